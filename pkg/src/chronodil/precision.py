"""Decomposition of the clock-time spread under the motional coupling.

At g = 0 and to fourth order in p/(m c), the coupling multiplies the
clock Hamiltonian by 1 + W(p) with

    W(p) = -p^2 / (2 m^2 c^2) + 3 p^4 / (8 m^4 c^4),

so each momentum component runs the clock at a slightly different rate.
The clock-time standard deviation then splits as

    sigma_T(t) = sigma_NR(t) + sigma_I(t) + sigma_NI(t):

a free part, a part that survives for an idealised clock, and a part
sourced entirely by the clock's error operator. The idealised term used
here is

    sigma_I(t) = t^2 (<p^4> + var(p^2)) / (8 sigma_NR(t) m^4 c^4),

and the non-idealised term is the full four-brace trace expression in
terms of E(t), e = (i/hbar)[H, T] - I and the W moments (see
``sigma_nonideal_term``). A companion ``sigma_dispersion_exact`` gives
the excess that exact joint evolution produces, t^2 var(W) / (2 sigma_NR),
whose leading term keeps var(p^2) but not <p^4>; the two closed forms
disagree at leading order and the oracle module quantifies that.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import C_LIGHT, HBAR
from .clocks import ClockModel, IdealisedClock, error_operator, mean_clock_time_nr
from .linalg import commutator, dagger, evolve_hermitian, expectation_real
from .clocks import phase_moment_operator
from .kinematics import moments


@dataclass(frozen=True)
class WMoments:
    """First and (truncated) second moments of the clock-rate shift W.

    ``mean_w2`` keeps only p^4/(4 m^4 c^4); the cross and p^8 pieces are
    of sixth order in p/(m c) and dropped. ``flagged`` marks a negative
    truncated second moment (never silently clipped)."""

    mean_w: float
    mean_w2: float
    flagged: bool = False


@dataclass(frozen=True)
class PrecisionBreakdown:
    """sigma_NR + sigma_I + sigma_NI = total, exactly as assembled."""

    sigma_nr: float
    sigma_i: float
    sigma_ni: float
    total: float


def w_of_p(p, mass: float, c: float = C_LIGHT, order: str = "c4"):
    """Per-momentum clock-rate shift W(p). ``order='c2'`` keeps only the
    quadratic term."""
    w = -(p**2) / (2.0 * mass**2 * c**2)
    if order == "c4":
        w = w + 3.0 * p**4 / (8.0 * mass**4 * c**4)
    elif order != "c2":
        raise ValueError(f"order must be 'c2' or 'c4', got {order!r}")
    return w


def w_moments(kstate, c: float = C_LIGHT) -> WMoments:
    """<W> and truncated <W^2> from the state's exact momentum moments."""
    m = moments(kstate)
    mass = kstate.mass if hasattr(kstate, "mass") else kstate.components[0][1].mass
    mean_w = -m.mean_p2 / (2.0 * mass**2 * c**2) + 3.0 * m.mean_p4 / (8.0 * mass**4 * c**4)
    mean_w2 = m.mean_p4 / (4.0 * mass**4 * c**4)
    return WMoments(mean_w=float(mean_w), mean_w2=float(mean_w2), flagged=mean_w2 < 0)


def second_moment_operator(clock: ClockModel) -> np.ndarray:
    """Second-moment operator of the time measurement.

    Projective measurements square the calibrated time observable. The
    phase clock's measurement is not projective, so its second moment is
    the direct integral of s^2 against the phase density over one period
    (shifted to the calibrated origin)."""
    if clock.kind == "qubit_phase":
        raw = phase_moment_operator(2, 0.0, clock.period, clock.omega)
        # moments of (s - offset): T2 - 2 offset T1 + offset^2
        t_raw = clock.t_cl_raw()
        return raw - 2.0 * clock.time_offset * t_raw + clock.time_offset**2 * np.eye(clock.dim)
    return clock.t_cl @ clock.t_cl


def sigma_nr(clock, t: float, hbar: float = HBAR) -> float:
    """Clock-time standard deviation under free evolution."""
    if isinstance(clock, IdealisedClock):
        return clock.sigma_t0
    rho_t = evolve_hermitian(clock.h_cl, clock.rho0, t, hbar)
    t2 = expectation_real(second_moment_operator(clock), rho_t)
    t1 = expectation_real(clock.t_cl, rho_t)
    var = max(t2 - t1**2, 0.0)
    return float(np.sqrt(var))


def sigma_ideal_term(kstate, t: float, sigma_nr_value: float, c: float = C_LIGHT) -> float:
    """Idealised-clock precision loss t^2 (<p^4> + var(p^2)) / (8 sigma_NR m^4 c^4).

    Strictly positive for any spread-out momentum state at t > 0. A zero
    free spread sits outside this expression's validity and is an error.
    """
    if sigma_nr_value <= 0:
        raise ValueError("sigma_NR must be positive; a delta-sharp reading is outside "
                         "the validity of the idealised-term expression")
    m = moments(kstate)
    mass = kstate.mass if hasattr(kstate, "mass") else kstate.components[0][1].mass
    return float(t**2 * (m.mean_p4 + m.var_p2) / (8.0 * sigma_nr_value * mass**4 * c**4))


def sigma_dispersion_exact(kstate, t: float, sigma_nr_value: float, c: float = C_LIGHT) -> float:
    """Leading excess spread produced by exact joint evolution.

    Each momentum component shifts the reading by t W(p), so the variance
    gains t^2 var(W) and the standard deviation t^2 var(W) / (2 sigma_NR)
    at leading order. Kept alongside ``sigma_ideal_term`` because the two
    differ at leading order (var(W) vs (<p^4> + var(p^2)) / (4 m^4 c^4)).
    """
    if sigma_nr_value <= 0:
        raise ValueError("sigma_NR must be positive")
    m = moments(kstate)
    mass = kstate.mass if hasattr(kstate, "mass") else kstate.components[0][1].mass
    return float(t**2 * m.var_p2 / (8.0 * sigma_nr_value * mass**4 * c**4))


def sigma_nonideal_term(clock: ClockModel, kstate, t: float,
                        c: float = C_LIGHT, hbar: float = HBAR) -> float:
    """Error-operator contribution to the clock-time spread at g = 0.

    Direct matrix evaluation of the four-brace expression in E(t),
    e = (i/hbar)[H, T] - I, <W> and <W^2>. The assembled value must be
    real; an imaginary part above 1e-10 of scale raises instead of being
    symmetrised away.
    """
    if isinstance(clock, IdealisedClock):
        return 0.0
    if not isinstance(clock, ClockModel):
        raise ValueError(f"non-finite clock {type(clock).__name__!r}")
    wm = w_moments(kstate, c)
    s_nr = sigma_nr(clock, t, hbar)
    if s_nr <= 0:
        raise ValueError("sigma_NR must be positive for the non-idealised term")
    t_op = clock.t_cl
    h_op = clock.h_cl
    rho_t = evolve_hermitian(h_op, clock.rho0, t, hbar)
    e_op = error_operator(clock, t, hbar)
    e_small = (1j / hbar) * commutator(h_op, t_op) - np.eye(clock.dim)
    tr_e = np.trace(e_op)
    mean_t_nr = mean_clock_time_nr(clock, t, hbar)

    brace1 = np.trace((e_op + dagger(e_op)) @ t_op) - 2.0 * mean_t_nr * tr_e
    brace2 = 2.0 * tr_e + tr_e**2
    brace3 = (
        2.0 * tr_e
        + (1j / hbar) * np.trace(
            (h_op @ e_small @ t_op - t_op @ e_small @ h_op) @ rho_t
            + h_op @ t_op @ e_op
            - dagger(e_op) @ t_op @ h_op
        )
        + (2j / hbar) * mean_t_nr * np.trace(h_op @ (e_op - dagger(e_op)))
    )
    first = wm.mean_w * t / (2.0 * s_nr) * brace1
    second = -((wm.mean_w * t) ** 2) / (8.0 * s_nr**3) * brace1**2
    third = -((wm.mean_w * t) ** 2) / (2.0 * s_nr) * brace2
    fourth = -(wm.mean_w2 * t**2) / (2.0 * s_nr) * brace3
    total = first + second + third + fourth
    if abs(np.imag(total)) > 1e-10 * max(1.0, abs(total)):
        raise ValueError(f"non-idealised term has imaginary part {np.imag(total):.3e}")
    return float(np.real(total))


def sigma_breakdown(clock, kstate, t: float, c: float = C_LIGHT, hbar: float = HBAR) -> PrecisionBreakdown:
    """Assemble the three-way spread decomposition at g = 0.

    For an IdealisedClock the free spread is its constant t = 0 value and
    the non-idealised term vanishes identically.
    """
    s_nr = sigma_nr(clock, t, hbar)
    s_i = sigma_ideal_term(kstate, t, s_nr, c)
    s_ni = 0.0 if isinstance(clock, IdealisedClock) else sigma_nonideal_term(clock, kstate, t, c, hbar)
    return PrecisionBreakdown(sigma_nr=s_nr, sigma_i=s_i, sigma_ni=s_ni,
                              total=s_nr + s_i + s_ni)
