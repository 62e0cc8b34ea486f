"""Thermal covariance of the ring, finite and bulk limit.

All second moments come from the normal-mode decomposition: each mode of
frequency omega contributes sigma(omega) = (1/2) coth(omega / 2T) to its own
quadrature pair, and site moments are mode averages with the appropriate
phase weights. Quadratures are reported normalized, q -> q sqrt(m nu_ref)
and p -> p / sqrt(m nu_ref) with nu_ref the trap frequency of the direction,
so an uncoupled oscillator's vacuum has var q = var p = 1/2; equivalently
the reduced single-mode symplectic eigenvalue is r = 2 sqrt(<q^2><p^2>) in
raw units.

Two rules keep criticality finite where it should be. A mode summed with an
exactly zero phase weight contributes nothing even if its own variance
diverges (zero-weight rule), and the momentum factor of a zero mode takes
its analytic limit m T. Raw variances that genuinely diverge are reported
as inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ImaginaryFrequency, SizeLimitExceeded
from .lattice import (
    LatticeParams,
    Variant,
    critical_potential,
    solve_equilibrium,
    taylor_coefficients,
)
from .quadrature import (
    Divergent,
    integrate_weighted_frequency,
    integrate_weighted_inverse,
)
from .spectrum import RADICAND_TOL, ModeSpectrum, build_spectrum

#: Largest ring accepted by the dense site-basis oracle.
DENSE_SITE_LIMIT = 64

#: Modes below this fraction of the trap scale count as soft when dropping.
SOFT_FREQ_FACTOR = 1e-6

DIRECTIONS = ("x", "y")


def _thermal_sigma(omega: np.ndarray, temperature: float) -> np.ndarray:
    omega = np.asarray(omega, dtype=float)
    if temperature <= 0.0:
        return np.where(omega > 0.0, 0.5, np.inf)
    out = np.full_like(omega, np.inf)
    pos = omega > 0.0
    out[pos] = 0.5 / np.tanh(omega[pos] / (2.0 * temperature))
    return out


def _position_factor(omega, temperature, mass):
    """Per-mode <q^2> factor sigma/(m omega); inf for a zero mode."""
    omega = np.asarray(omega, dtype=float)
    sig = _thermal_sigma(omega, temperature)
    return np.where(omega > 0.0, sig / (mass * np.where(omega > 0.0, omega, 1.0)), np.inf)


def _momentum_factor(omega, temperature, mass):
    """Per-mode <p^2> factor m omega sigma; a zero mode tends to m T."""
    omega = np.asarray(omega, dtype=float)
    sig = _thermal_sigma(omega, temperature)
    # omega * sigma -> T as omega -> 0 (equipartition); avoid 0 * inf.
    safe = mass * omega * np.where(np.isinf(sig), 0.0, sig)
    return np.where(omega > 0.0, safe, mass * temperature)


@dataclass(frozen=True)
class _Kernels:
    """Per-direction mode kernels: lists of (frequencies, mixing weights)."""

    x: list
    y: list
    cross: list | None
    dropped: int


def _direction_kernels(spec: ModeSpectrum, drop_soft_modes: bool = False) -> _Kernels:
    if spec.variant is Variant.LINEAR:
        ones = np.ones(spec.params.n)
        branches = {"x": [(spec.omega_x, ones)], "y": [(spec.omega_y, ones)], "cross": None}
    else:
        branches = {
            "x": [(spec.omega_v, spec.c2), (spec.omega_w, spec.s2)],
            "y": [(spec.omega_v, spec.s2), (spec.omega_w, spec.c2)],
            "cross": [(spec.omega_v, spec.cs), (spec.omega_w, -spec.cs)],
        }
    dropped = 0
    if drop_soft_modes:
        tol = SOFT_FREQ_FACTOR * max(spec.params.nu, spec.nu_t)
        masked = {}
        seen = set()
        for key, kern in branches.items():
            if kern is None:
                masked[key] = None
                continue
            new = []
            for omega, wt in kern:
                keep = omega > tol
                new.append((omega, np.where(keep, wt, 0.0)))
                marker = id(omega)
                if marker not in seen:
                    seen.add(marker)
                    dropped += int((~keep).sum())
            masked[key] = new
        branches = masked
    return _Kernels(x=branches["x"], y=branches["y"], cross=branches["cross"], dropped=dropped)


def _weighted_mode_sum(kern, phase_weights, n, fac):
    """(1/n) sum_l w_l fac(omega_l), with exact-zero weights killing the term."""
    total = 0.0
    for omega, wt in kern:
        w = np.asarray(wt * phase_weights, dtype=float)
        nz = w != 0.0
        if nz.any():
            total += float((w[nz] * fac(np.asarray(omega, float)[nz])).sum()) / n
    return total


def _cos_weights(n, delta):
    ls = np.arange(1, n + 1, dtype=float)
    return np.cos(2.0 * np.pi * ls * delta / n)


def _sin_weights(n, delta):
    if delta == 0:
        return np.zeros(n)
    ls = np.arange(1, n + 1, dtype=float)
    return np.sin(2.0 * np.pi * ls * delta / n)


@dataclass(frozen=True)
class PairMoments:
    """Same-direction second moments of two sites at separation tau.

    ``var_*``/``cov_*`` are the plain moments; ``q_plus = var_q + cov_q`` and
    friends are evaluated as single mode sums so that criticality's zero mode
    drops out exactly where its phase weight vanishes. The raw fields can be
    inf (or indeterminate) exactly at a critical point; the combination
    fields stay finite whenever the combination is finite.
    """

    direction: str
    tau: int
    temperature: float
    var_q: float
    var_p: float
    cov_q: float
    cov_p: float
    q_plus: float
    q_minus: float
    p_plus: float
    p_minus: float


def _check_direction(direction: str):
    if direction not in DIRECTIONS:
        raise ConfigError(f"direction must be one of {DIRECTIONS}, got {direction!r}")


def pair_moments(
    params: LatticeParams, nu_t: float, temperature: float, tau: int, direction: str
) -> PairMoments:
    """Normalized second moments of two sites at neighbour distance tau."""
    _check_direction(direction)
    if not 1 <= tau <= params.n // 2:
        raise ConfigError(f"tau must be in 1..{params.n // 2}, got {tau}")
    if temperature < 0:
        raise ConfigError("temperature must be non-negative")
    spec = build_spectrum(params, nu_t)
    kerns = _direction_kernels(spec)
    kern = kerns.x if direction == "x" else kerns.y
    parity = -1.0 if (
        spec.variant is Variant.ZIGZAG and direction == "y" and tau % 2 == 1
    ) else 1.0
    nu_ref = params.nu if direction == "x" else nu_t
    q_scale = params.mass * nu_ref
    n = params.n

    def qf(w):
        return _position_factor(w, temperature, params.mass)

    def pf(w):
        return _momentum_factor(w, temperature, params.mass)

    ones = np.ones(n)
    cosd = _cos_weights(n, tau)
    var_q = q_scale * _weighted_mode_sum(kern, ones, n, qf)
    cov_q = q_scale * parity * _weighted_mode_sum(kern, cosd, n, qf)
    var_p = _weighted_mode_sum(kern, ones, n, pf) / q_scale
    cov_p = parity * _weighted_mode_sum(kern, cosd, n, pf) / q_scale
    q_plus = q_scale * _weighted_mode_sum(kern, 1.0 + parity * cosd, n, qf)
    q_minus = q_scale * _weighted_mode_sum(kern, 1.0 - parity * cosd, n, qf)
    p_plus = _weighted_mode_sum(kern, 1.0 + parity * cosd, n, pf) / q_scale
    p_minus = _weighted_mode_sum(kern, 1.0 - parity * cosd, n, pf) / q_scale
    return PairMoments(
        direction=direction,
        tau=tau,
        temperature=temperature,
        var_q=var_q,
        var_p=var_p,
        cov_q=cov_q,
        cov_p=cov_p,
        q_plus=q_plus,
        q_minus=q_minus,
        p_plus=p_plus,
        p_minus=p_minus,
    )


@dataclass(frozen=True)
class CovarianceMatrix:
    """Covariance over an ordered set of (site, direction) modes.

    ``matrix`` is 2k x 2k with quadratures interleaved (q1, p1, q2, p2, ...)
    following ``modes``. Entries are in normalized units.
    """

    matrix: np.ndarray
    modes: tuple
    temperature: float
    dropped_soft_modes: int = 0


def _pair_entry(spec, kerns, fac, s1, d1, s2, d2, mass):
    """Raw same-kind moment <a_{s1,d1} a_{s2,d2}> for a = q or p via fac."""
    n = spec.params.n
    delta = s2 - s1
    if d1 == d2:
        kern = kerns.x if d1 == "x" else kerns.y
        val = _weighted_mode_sum(kern, _cos_weights(n, delta), n, fac)
        if d1 == "y" and spec.variant is Variant.ZIGZAG:
            val *= (-1.0) ** (s1 + s2)
        return val
    if spec.variant is Variant.LINEAR:
        return 0.0
    # cross-entry signs fixed by the (-1)^j staggering of the first site in
    # each coupled pair; validated against the dense oracle
    sin_sum = _weighted_mode_sum(kerns.cross, _sin_weights(n, delta), n, fac)
    if d1 == "x":  # <x_{s1} y_{s2}>
        return ((-1.0) ** s2) * sin_sum
    return -((-1.0) ** s1) * sin_sum  # <y_{s1} x_{s2}>


def block_covariance(
    params: LatticeParams,
    nu_t: float,
    temperature: float,
    sites,
    directions=DIRECTIONS,
    drop_soft_modes: bool = False,
) -> CovarianceMatrix:
    """Covariance matrix of selected sites and directions.

    Parameters
    ----------
    sites : iterable of int
        1-based site indices, distinct.
    directions : sequence
        Subset of ("x", "y") defining the per-site mode order.
    drop_soft_modes : bool
        Exclude modes below ``SOFT_FREQ_FACTOR * max(nu, nu_t)`` from every
        mode sum. This regularizes the exactly critical point, where the
        zone-edge zero mode makes position variances infinite; the number
        of excluded modes is reported on the result.
    """
    sites = tuple(int(s) for s in sites)
    if len(sites) == 0 or len(set(sites)) != len(sites):
        raise ConfigError("sites must be a non-empty collection of distinct indices")
    for s in sites:
        if not 1 <= s <= params.n:
            raise ConfigError(f"site index {s} outside 1..{params.n}")
    directions = tuple(directions)
    if not directions or any(d not in DIRECTIONS for d in directions):
        raise ConfigError(f"directions must be a non-empty subset of {DIRECTIONS}")
    if temperature < 0:
        raise ConfigError("temperature must be non-negative")

    spec = build_spectrum(params, nu_t)
    kerns = _direction_kernels(spec, drop_soft_modes)
    modes = tuple((s, d) for s in sites for d in directions)
    k = len(modes)
    cov = np.zeros((2 * k, 2 * k))

    def qf(w):
        return _position_factor(w, temperature, params.mass)

    def pf(w):
        return _momentum_factor(w, temperature, params.mass)

    scale = {d: params.mass * (params.nu if d == "x" else nu_t) for d in DIRECTIONS}
    for i, (s1, d1) in enumerate(modes):
        for j, (s2, d2) in enumerate(modes[i:], start=i):
            g = math.sqrt(scale[d1] * scale[d2])
            qq = g * _pair_entry(spec, kerns, qf, s1, d1, s2, d2, params.mass)
            pp = _pair_entry(spec, kerns, pf, s1, d1, s2, d2, params.mass) / g
            cov[2 * i, 2 * j] = cov[2 * j, 2 * i] = qq
            cov[2 * i + 1, 2 * j + 1] = cov[2 * j + 1, 2 * i + 1] = pp
    return CovarianceMatrix(
        matrix=cov,
        modes=modes,
        temperature=temperature,
        dropped_soft_modes=kerns.dropped,
    )


def direct_covariance_oracle(
    params: LatticeParams, nu_t: float, temperature: float
) -> CovarianceMatrix:
    """Full covariance by dense diagonalization in the site basis.

    Independent of the mode-sum path: the quadratic form is assembled site
    by site from the pair couplings and diagonalized numerically. Serves as
    the reference for equivalence checks; refuses rings larger than
    ``DENSE_SITE_LIMIT``.
    """
    n = params.n
    if n > DENSE_SITE_LIMIT:
        raise SizeLimitExceeded(
            f"dense oracle supports n <= {DENSE_SITE_LIMIT}, got {n}"
        )
    if temperature < 0:
        raise ConfigError("temperature must be non-negative")
    config = solve_equilibrium(params, nu_t)
    coeff = taylor_coefficients(params, config)
    m, q2 = params.mass, params.charge**2

    # potential quadratic form V over u = (x_1..x_n, y_1..y_n), H = p^2/2m + u^T V u
    V = np.zeros((2 * n, 2 * n))
    np.fill_diagonal(V[:n, :n], 0.5 * m * params.nu**2)
    np.fill_diagonal(V[n:, n:], 0.5 * m * nu_t**2)
    for idx, tau in enumerate(coeff.tau):
        half_dx = 0.5 * q2 * coeff.dx[idx]
        half_dy = 0.5 * q2 * coeff.dy[idx]
        for j in range(n):
            k = (j + tau) % n
            V[j, j] += half_dx
            V[k, k] += half_dx
            V[j, k] -= half_dx
            V[k, j] -= half_dx
            V[n + j, n + j] += half_dy
            V[n + k, n + k] += half_dy
            V[n + j, n + k] -= half_dy
            V[n + k, n + j] -= half_dy
            if config.variant is Variant.ZIGZAG and tau % 2 == 1:
                # cross coupling alternates with the parity of the first site
                cd = 0.25 * q2 * coeff.dxy[idx] * ((-1.0) ** (j + 1))
                V[j, n + j] += cd
                V[n + j, j] += cd
                V[k, n + k] += cd
                V[n + k, k] += cd
                V[j, n + k] -= cd
                V[n + k, j] -= cd
                V[k, n + j] -= cd
                V[n + j, k] -= cd

    w2, basis = np.linalg.eigh(2.0 * V / m)
    if (w2 < -RADICAND_TOL).any():
        bad = np.nonzero(w2 < -RADICAND_TOL)[0].tolist()
        raise ImaginaryFrequency(
            f"dense quadratic form not positive semidefinite at modes {bad}", modes=bad
        )
    omega = np.sqrt(np.where(w2 < 0.0, 0.0, w2))
    # split off (numerically) zero modes so their divergent position factor
    # never enters a matmul; their momentum factor is the equipartition limit
    zero = omega <= SOFT_FREQ_FACTOR * max(params.nu, nu_t)
    pos = ~zero
    qmat = (
        basis[:, pos]
        @ np.diag(_position_factor(omega[pos], temperature, m))
        @ basis[:, pos].T
    )
    pmat = (
        basis[:, pos]
        @ np.diag(_momentum_factor(omega[pos], temperature, m))
        @ basis[:, pos].T
    )
    if zero.any():
        proj = basis[:, zero] @ basis[:, zero].T
        pmat = pmat + m * temperature * proj
        diverges = np.abs(proj) > 1e-10 * np.abs(proj).max()
        qmat[diverges] = np.sign(proj[diverges]) * np.inf

    modes = tuple((s, d) for s in range(1, n + 1) for d in DIRECTIONS)
    cov = np.zeros((4 * n, 4 * n))
    scale = {d: m * (params.nu if d == "x" else nu_t) for d in DIRECTIONS}

    def uindex(site, d):
        return site - 1 if d == "x" else n + site - 1

    for i, (s1, d1) in enumerate(modes):
        for j, (s2, d2) in enumerate(modes):
            g = math.sqrt(scale[d1] * scale[d2])
            cov[2 * i, 2 * j] = g * qmat[uindex(s1, d1), uindex(s2, d2)]
            cov[2 * i + 1, 2 * j + 1] = pmat[uindex(s1, d1), uindex(s2, d2)] / g
    return CovarianceMatrix(matrix=cov, modes=modes, temperature=temperature)


def _bulk_omega2(params: LatticeParams, nu_t: float, direction: str):
    c = params.coulomb_constant
    taus = np.arange(1, params.tau_max + 1, dtype=float)
    if direction == "x":
        base = params.nu**2

        def w2(a):
            return base + c * float(np.sum(np.sin(a * taus) ** 2 / taus**3))

    else:
        base = nu_t**2

        def w2(a):
            return base - 0.5 * c * float(np.sum(np.sin(a * taus) ** 2 / taus**3))

    return w2


def _require_flat_bulk(params: LatticeParams, nu_t: float):
    crit = critical_potential(params, td_limit=True)
    if nu_t < crit * (1.0 - 1e-12):
        raise ConfigError(
            "bulk-limit expressions hold in the flat configuration only "
            f"(nu_t={nu_t:.6g} below critical {crit:.6g})"
        )


def td_pair_criteria(
    params: LatticeParams, nu_t: float, tau: int, direction: str, atol: float = 1e-10
) -> tuple[float, float]:
    """Bulk-limit separability criteria pair (S1, S2) for neighbours at tau.

    Evaluated from dispersion averages over the half zone. A divergent
    inverse average (soft zone edge under a nonvanishing weight) makes the
    corresponding criterion +inf, which can never signal entanglement.
    """
    _check_direction(direction)
    if tau < 1:
        raise ConfigError(f"tau must be positive, got {tau}")
    _require_flat_bulk(params, nu_t)
    w2 = _bulk_omega2(params, nu_t, direction)

    def w_plus(a):
        return 1.0 + math.cos(2.0 * a * tau)

    def w_minus(a):
        return 1.0 - math.cos(2.0 * a * tau)

    ip_plus = integrate_weighted_frequency(w_plus, w2, atol)
    ip_minus = integrate_weighted_frequency(w_minus, w2, atol)
    iq_plus = integrate_weighted_inverse(w_plus, w2, atol)
    iq_minus = integrate_weighted_inverse(w_minus, w2, atol)
    pref = 4.0 / math.pi**2

    def combine(iq, ip):
        if isinstance(iq, Divergent):
            return math.inf
        return pref * iq * ip - 1.0

    return combine(iq_plus, ip_minus), combine(iq_minus, ip_plus)


def td_single_site_eigenvalue(
    params: LatticeParams, nu_t: float, direction: str, atol: float = 1e-10
):
    """Bulk-limit symplectic eigenvalue of one site's reduced state.

    Returns a float, or :class:`Divergent` when the underlying inverse
    dispersion average diverges (or the value exceeds 1e6).
    """
    _check_direction(direction)
    _require_flat_bulk(params, nu_t)
    w2 = _bulk_omega2(params, nu_t, direction)
    one = lambda a: 1.0
    iq = integrate_weighted_inverse(one, w2, atol)
    if isinstance(iq, Divergent):
        return iq
    ip = integrate_weighted_frequency(one, w2, atol)
    r = (2.0 / math.pi) * math.sqrt(iq * ip)
    if r > 1e6:
        return Divergent("single-site eigenvalue exceeded 1e6")
    return r
