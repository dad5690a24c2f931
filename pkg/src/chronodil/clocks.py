"""Finite-dimensional clock models and their accuracy diagnostics.

A clock is a triple of a time observable, a Hamiltonian and an initial
state. The time observable ``T`` is the first-moment operator of the
clock's time measurement; its expectation value is the mean clock time.
Three concrete models are provided:

* a dial clock with evenly spaced energies whose time basis is the
  discrete Fourier transform of the energy basis (``build_swp``),
* the same dial with a Gaussian-weighted superposition over the time
  basis as initial state, which keeps the time reading nearly
  dispersionless (``build_quasi_ideal``),
* a two-level clock that reads time from the relative phase of its
  energy eigenstates through a continuous phase measurement
  (``build_qubit_phase``).

The central diagnostic is the error trace ``tr E(t)`` with

    E(t) = -(i/hbar) [T, H] rho(t) - rho(t),

which vanishes identically for a perfect (idealised) clock and measures
how far the mean clock time drifts from the lab time per unit time:
d<T>/dt = 1 + tr E(t) under free evolution.

Conventions: energies ascend, the qubit ground state is ``|0>``, and the
stored time observable is offset-calibrated so that ``<T>(0) = 0``.
``time_offset`` records the subtracted constant, so the raw first-moment
operator is ``t_cl + time_offset * I``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .constants import HBAR
from . import linalg
from .linalg import (
    SIGMA_Z,
    commutator,
    dagger,
    evolve_hermitian,
    expectation,
    projector,
)


@dataclass(frozen=True)
class ClockModel:
    """Matrix clock: Hamiltonian (J), calibrated time observable (s),
    initial state, period (s), and, for continuous phase measurements,
    the measurement density at the dial's branch cut (1/s)."""

    dim: int
    h_cl: np.ndarray
    t_cl: np.ndarray
    rho0: np.ndarray
    period: float
    time_offset: float
    psi0: np.ndarray | None = None
    povm_at_zero: np.ndarray | None = None
    kind: str = "generic"
    omega: float = 0.0

    def t_cl_raw(self) -> np.ndarray:
        return self.t_cl + self.time_offset * np.eye(self.dim)


@dataclass(frozen=True)
class IdealisedClock:
    """Analytic model of a clock obeying [T, H] = i*hbar exactly.

    Its mean reading tracks lab time, its error trace vanishes and its
    spread ``sigma_t0`` is constant. The reading distribution is taken
    Gaussian, which fixes all higher moments.
    """

    sigma_t0: float = 0.0

    def moment(self, n: int, t: float) -> float:
        # n-th moment of a normal distribution with mean t, std sigma_t0
        total = 0.0
        for k in range(0, n + 1, 2):
            total += math.comb(n, k) * t ** (n - k) * _gaussian_central_moment(k, self.sigma_t0)
        return total


def _gaussian_central_moment(k: int, sigma: float) -> float:
    if k % 2 == 1:
        return 0.0
    # (k-1)!! * sigma^k
    return float(np.prod(np.arange(k - 1, 0, -2), initial=1.0) * sigma**k)


@dataclass(frozen=True)
class ErrorTraceSeries:
    times: np.ndarray
    values: np.ndarray


@dataclass(frozen=True)
class MomentCheckReport:
    """Both sides of the covariant-measurement moment polynomial

        <T^(n)>(t) = sum_k C(n, k) t^(n-k) <T^(k)>(0)

    evaluated on a branch window that follows the state, plus their
    difference. ``applicable`` is False when the requested time cannot be
    made wrap-safe (for dial clocks, times off the integer step grid)."""

    n: int
    t: float
    lhs: float
    rhs: float
    residual: float
    branch_start: float
    applicable: bool
    note: str


@dataclass(frozen=True)
class CommutatorReport:
    """Residual of [T, H] = i*hbar*(I - (s1 - s0) F(0)) for clocks with a
    continuous covariant measurement on a bounded dial [s0, s1]."""

    residual: float
    applicable: bool
    note: str


# ---------------------------------------------------------------------------
# model constructors


def fourier_time_basis(d: int) -> np.ndarray:
    """Columns are the time-basis kets: theta_m = d^{-1/2} sum_j e^{-2pi i j m / d} |e_j>."""
    j = np.arange(d).reshape(-1, 1)
    m = np.arange(d).reshape(1, -1)
    return np.exp(-2j * np.pi * j * m / d) / np.sqrt(d)


def _dial_operators(d: int, omega: float, hbar: float):
    h = np.diag(np.arange(d) * hbar * omega).astype(complex)
    period = 2.0 * np.pi / omega
    basis = fourier_time_basis(d)
    values = np.arange(d) * period / d
    t_raw = (basis * values) @ dagger(basis)
    return h, t_raw, period, basis


def build_swp(d: int, omega: float, hbar: float = HBAR) -> ClockModel:
    """Dial clock started in the time eigenstate with eigenvalue zero.

    Energies are j*hbar*omega for j = 0..d-1, the time basis is the
    discrete Fourier transform of the energy basis, and the time
    observable assigns m*T0/d to the m-th time ket, T0 = 2*pi/omega.
    """
    if d < 2:
        raise ValueError(f"clock dimension must be >= 2, got {d}")
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    h, t_raw, period, basis = _dial_operators(d, omega, hbar)
    psi0 = basis[:, 0].copy()
    rho0 = projector(psi0)
    offset = linalg.expectation_real(t_raw, rho0)  # zero: psi0 is the 0-eigenket
    t_cl = t_raw - offset * np.eye(d)
    return ClockModel(
        dim=d, h_cl=h, t_cl=t_cl, rho0=rho0, period=period,
        time_offset=offset, psi0=psi0, kind="swp", omega=omega,
    )


def build_quasi_ideal(
    d: int,
    omega: float,
    sigma_bar: float,
    m0: float,
    n0: float | None = None,
    hbar: float = HBAR,
) -> ClockModel:
    """Dial clock started in a Gaussian-weighted superposition of time kets.

    Amplitudes over the window of d integers centred on ``m0`` are

        g(m) = A exp(-pi (m - m0)^2 / sigma_bar^2) exp(2 pi i n0 (m - m0) / d)

    wrapped onto the dial. ``n0`` defaults to (d-1)/2, centring the energy
    distribution mid-spectrum. The time reading of this state advances with
    lab time while staying sharply peaked, so its error trace is
    exponentially small in d while the packet stays clear of the dial cut.
    """
    if d < 2:
        raise ValueError(f"clock dimension must be >= 2, got {d}")
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if not 0.0 < sigma_bar < d:
        raise ValueError(f"sigma_bar must lie in (0, d), got {sigma_bar}")
    if n0 is None:
        n0 = (d - 1) / 2.0
    h, t_raw, period, basis = _dial_operators(d, omega, hbar)
    m = np.arange(d)
    # displacement from m0, wrapped into [-d/2, d/2)
    delta = (m - m0 + d / 2.0) % d - d / 2.0
    amps = np.exp(-np.pi * delta**2 / sigma_bar**2) * np.exp(2j * np.pi * n0 * delta / d)
    amps /= np.linalg.norm(amps)
    psi0 = basis @ amps
    rho0 = projector(psi0)
    offset = linalg.expectation_real(t_raw, rho0)
    t_cl = t_raw - offset * np.eye(d)
    return ClockModel(
        dim=d, h_cl=h, t_cl=t_cl, rho0=rho0, period=period,
        time_offset=offset, psi0=psi0, kind="quasi_ideal", omega=omega,
    )


def phase_moment_operator(n: int, a: float, b: float, omega: float) -> np.ndarray:
    """integral over [a, b] of s^n F(s) ds for the qubit phase measurement.

    F(s) = (omega/2pi) (I + e^{i omega s}|0><1| + e^{-i omega s}|1><0|),
    the periodic extension of the phase-ket density to the whole line.
    Entries are evaluated in closed form.
    """
    diag = (b ** (n + 1) - a ** (n + 1)) / (n + 1)
    off = _poly_phase_integral(n, a, b, omega)
    op = np.array([[diag, off], [np.conj(off), diag]], dtype=complex)
    return op * omega / (2.0 * np.pi)


def _poly_phase_integral(n: int, a: float, b: float, omega: float) -> complex:
    """integral over [a, b] of s^n e^{i omega s} ds by the standard recursion."""
    if n == 0:
        return (np.exp(1j * omega * b) - np.exp(1j * omega * a)) / (1j * omega)
    boundary = (b**n * np.exp(1j * omega * b) - a**n * np.exp(1j * omega * a)) / (1j * omega)
    return boundary - n / (1j * omega) * _poly_phase_integral(n - 1, a, b, omega)


def build_qubit_phase(omega: float, hbar: float = HBAR) -> ClockModel:
    """Two-level clock reading time from the relative phase of its levels.

    H = (hbar*omega/2) sigma_z (traceless), initial state (|0>+|1>)/sqrt(2).
    The time observable is the first moment of the phase measurement
    F(theta) = |theta><theta| / pi with clock time s = theta/omega,
    computed by direct integration over one period. The measurement
    density at the dial cut is stored for the commutator identity check.
    """
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    h = (hbar * omega / 2.0) * SIGMA_Z
    period = 2.0 * np.pi / omega
    t_raw = phase_moment_operator(1, 0.0, period, omega)
    psi0 = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
    rho0 = projector(psi0)
    offset = linalg.expectation_real(t_raw, rho0)
    t_cl = t_raw - offset * np.eye(2)
    f0 = (omega / np.pi) * projector(psi0)  # density (1/s) of the phase ket at the cut
    return ClockModel(
        dim=2, h_cl=h, t_cl=t_cl, rho0=rho0, period=period,
        time_offset=offset, psi0=psi0, povm_at_zero=f0, kind="qubit_phase", omega=omega,
    )


# ---------------------------------------------------------------------------
# diagnostics


def error_operator(clock: ClockModel, t: float, hbar: float = HBAR) -> np.ndarray:
    """E(t) = -(i/hbar)[T, H] rho(t) - rho(t) under free clock evolution."""
    rho_t = evolve_hermitian(clock.h_cl, clock.rho0, t, hbar)
    return (-1j / hbar) * commutator(clock.t_cl, clock.h_cl) @ rho_t - rho_t


def error_trace(clock, t: float, hbar: float = HBAR) -> float:
    """tr E(t). Zero for an idealised clock at every time."""
    if isinstance(clock, IdealisedClock):
        return 0.0
    val = np.trace(error_operator(clock, t, hbar))
    if abs(val.imag) > 1e-10 * max(1.0, abs(val)):
        raise ValueError(f"tr E(t) has non-negligible imaginary part {val.imag:.3e}")
    return float(val.real)


def error_trace_series(clock: ClockModel, times: np.ndarray, hbar: float = HBAR) -> ErrorTraceSeries:
    times = np.asarray(times, dtype=float)
    # one eigendecomposition, reused across all samples
    energies, vectors = np.linalg.eigh(clock.h_cl)
    m = (-1j / hbar) * commutator(clock.t_cl, clock.h_cl)
    values = np.empty_like(times)
    if clock.psi0 is not None:
        a0 = dagger(vectors) @ clock.psi0
        for i, t in enumerate(times):
            psi = vectors @ (np.exp(-1j * energies * t / hbar) * a0)
            values[i] = (np.vdot(psi, m @ psi)).real - 1.0
    else:
        for i, t in enumerate(times):
            rho_t = evolve_hermitian(clock.h_cl, clock.rho0, t, hbar)
            values[i] = expectation(m, rho_t).real - 1.0
    return ErrorTraceSeries(times=times, values=values)


def mean_clock_time_nr(clock, t: float, hbar: float = HBAR) -> float:
    """Mean clock reading under free (non-relativistic) evolution, with the
    t = 0 offset calibrated away so the reading starts at zero."""
    if isinstance(clock, IdealisedClock):
        return t
    rho_t = evolve_hermitian(clock.h_cl, clock.rho0, t, hbar)
    return linalg.expectation_real(clock.t_cl, rho_t)


def integrated_error_trace(clock: ClockModel, t: float, hbar: float = HBAR,
                           rtol: float = 1e-9) -> float:
    """integral of tr E over [0, t] by composite Simpson quadrature,
    refined until successive estimates agree to ``rtol`` of scale."""
    if t == 0.0:
        return 0.0
    periods = abs(t) / clock.period
    n = max(201, 2 * int(100 * periods) + 1)
    prev = None
    for _ in range(12):
        times = np.linspace(0.0, t, n)
        vals = error_trace_series(clock, times, hbar).values
        est = float(simpson(vals, x=times))
        if prev is not None and abs(est - prev) < rtol * max(abs(est), abs(t)):
            return est
        prev = est
        n = 2 * n - 1
    return prev


def eq_mean_time_identity_residual(clock: ClockModel, t: float, hbar: float = HBAR) -> float:
    """| <T>_NR(t) - t - integral_0^t tr E | for t before the first dial wrap.

    The quadrature identity relating the mean reading to the accumulated
    error trace ignores the mod-period structure of the dial, so callers
    must keep t below the first wrap of the mean reading.
    """
    return abs(mean_clock_time_nr(clock, t, hbar) - t - integrated_error_trace(clock, t, hbar))


def circular_mean_time(clock: ClockModel, t: float = 0.0, hbar: float = HBAR) -> float:
    """Mean clock reading interpreted on the dial circle (in [0, period)).

    Uses the argument of the first circular harmonic of the time-basis
    distribution, which is insensitive to the dial cut.
    """
    rho_t = evolve_hermitian(clock.h_cl, clock.rho0, t, hbar) if t else clock.rho0
    if clock.kind == "qubit_phase":
        # first harmonic of the phase density is rho_10
        harmonic = rho_t[1, 0]
    else:
        basis = fourier_time_basis(clock.dim)
        probs = np.einsum("im,ij,jm->m", basis.conj(), rho_t, basis).real
        harmonic = np.sum(probs * np.exp(2j * np.pi * np.arange(clock.dim) / clock.dim))
    angle = float(np.angle(harmonic)) % (2.0 * np.pi)
    return angle / (2.0 * np.pi) * clock.period


# ---------------------------------------------------------------------------
# covariant-measurement algebra


def covariant_moment_check(clock, n: int, t: float, hbar: float = HBAR) -> MomentCheckReport:
    """Check the moment polynomial of a covariant time measurement.

    The n-th outcome moment at lab time t, taken over a dial window that
    follows the state (keeping its support clear of the window edges),
    must equal the binomial combination of the t = 0 moments. Wrap-safety
    is what restricts the admissible times: dial clocks are exact only on
    the integer step grid, the phase clock on any t once the window is cut
    at the density minimum.
    """
    if n < 0:
        raise ValueError("moment order must be non-negative")
    if isinstance(clock, IdealisedClock):
        lhs = clock.moment(n, t)
        rhs = sum(math.comb(n, k) * t ** (n - k) * clock.moment(k, 0.0) for k in range(n + 1))
        return MomentCheckReport(
            n=n, t=t, lhs=lhs, rhs=rhs, residual=abs(lhs - rhs),
            branch_start=-np.inf, applicable=True,
            note="idealised clock: unbounded dial, polynomial exact",
        )
    if clock.kind == "qubit_phase":
        return _qubit_moment_check(clock, n, t, hbar)
    if clock.kind in ("swp", "quasi_ideal"):
        return _dial_moment_check(clock, n, t, hbar)
    raise ValueError(f"unsupported clock type {clock.kind!r} for moment checks")


def _qubit_moment_check(clock: ClockModel, n: int, t: float, hbar: float) -> MomentCheckReport:
    period = clock.period
    omega = clock.omega
    rho_t = evolve_hermitian(clock.h_cl, clock.rho0, t, hbar)
    # cut the dial at the outcome-density minimum of the initial state
    r01 = clock.rho0[1, 0]
    peak0 = (-np.angle(r01) / omega) if abs(r01) > 1e-14 else 0.0
    start0 = peak0 - period / 2.0

    def moment(k: int, rho: np.ndarray, start: float) -> float:
        op = phase_moment_operator(k, start, start + period, omega)
        return linalg.expectation_real(op, rho)

    lhs = moment(n, rho_t, start0 + t)
    m0 = [moment(k, clock.rho0, start0) for k in range(n + 1)]
    rhs = sum(math.comb(n, k) * t ** (n - k) * m0[k] for k in range(n + 1))
    return MomentCheckReport(
        n=n, t=t, lhs=lhs, rhs=rhs, residual=abs(lhs - rhs),
        branch_start=start0, applicable=True,
        note="phase clock: window cut at the outcome-density minimum and advanced with the state",
    )


def _dial_moment_check(clock: ClockModel, n: int, t: float, hbar: float) -> MomentCheckReport:
    d = clock.dim
    step = clock.period / d
    nu = t / step
    nu_int = round(nu)
    on_grid = abs(nu - nu_int) < 1e-9 * max(1.0, abs(nu))
    basis = fourier_time_basis(d)
    center = round(circular_mean_time(clock, 0.0, hbar) / step) % d
    w0 = center - d // 2

    def moment(k: int, rho: np.ndarray, shift: int) -> float:
        idx = np.arange(w0 + shift, w0 + shift + d)
        probs = np.einsum("im,ij,jm->m", basis[:, idx % d].conj(), rho, basis[:, idx % d]).real
        return float(np.sum((idx * step) ** k * probs))

    rho_t = evolve_hermitian(clock.h_cl, clock.rho0, t, hbar)
    lhs = moment(n, rho_t, nu_int)
    m0 = [moment(k, clock.rho0, 0) for k in range(n + 1)]
    rhs = sum(math.comb(n, k) * t ** (n - k) * m0[k] for k in range(n + 1))
    note = "dial clock at integer step time: window shifted with the state"
    if not on_grid:
        note = ("dial clock between step times: reading disperses, polynomial "
                "holds only approximately")
    return MomentCheckReport(
        n=n, t=t, lhs=lhs, rhs=rhs, residual=abs(lhs - rhs),
        branch_start=w0 * step, applicable=on_grid, note=note,
    )


def commutator_form_check(clock, hbar: float = HBAR) -> CommutatorReport:
    """Residual of [T, H] - i*hbar*I - i*hbar*(s0 - s1) F(0).

    The factor i on the boundary term is required for the left side's
    anti-Hermiticity; (s1 - s0) is the dial period. Clocks with a discrete
    projective measurement carry no F(0) and are flagged not applicable.
    """
    if isinstance(clock, IdealisedClock):
        return CommutatorReport(
            residual=0.0, applicable=True,
            note="idealised clock: unbounded dial, boundary term vanishes, pure Heisenberg form",
        )
    if clock.povm_at_zero is None:
        return CommutatorReport(
            residual=float("nan"), applicable=False,
            note="discrete PVM - continuous identity not applicable",
        )
    ident = np.eye(clock.dim)
    lhs = commutator(clock.t_cl, clock.h_cl)
    rhs = 1j * hbar * ident + 1j * hbar * (-clock.period) * clock.povm_at_zero
    residual = float(np.abs(lhs - rhs).max())
    return CommutatorReport(
        residual=residual, applicable=True,
        note="bounded-dial Heisenberg form with boundary term at the cut",
    )
