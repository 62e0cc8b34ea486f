"""Normal modes of the ring in both configurations.

Translation invariance reduces the quadratic Hamiltonian to independent
wave-number blocks l = 1 .. n. In the flat configuration the axial and
transverse branches decouple and the dispersion is analytic. In the buckled
configuration the two directions mix within each block; the block is brought
to normal form by a symplectic congruence built from the rotation that
diagonalizes the 2x2 squared-frequency matrix.

The transverse Fourier transform carries a half-zone shift that absorbs the
alternating sign of the buckled pattern; its trace is that odd-distance
transverse couplings enter with cos^2 weights where all other terms carry
sin^2, and that the transverse branch of the flat ring maps onto the buckled
labels as l -> l + n/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DegenerateCoupling, ImaginaryFrequency
from .lattice import (
    Configuration,
    CouplingCoefficients,
    LatticeParams,
    Variant,
    solve_equilibrium,
    taylor_coefficients,
)

#: Squared frequencies more negative than this raise; values in [-tol, 0) clamp to 0.
RADICAND_TOL = 1e-12

#: Couplings below this magnitude use the trivially decoupled normal form.
COUPLING_TOL = 1e-14

# block ordering (X, Px, Y, Py); one symplectic unit per direction
OMEGA4 = np.array(
    [
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.0, 0.0, -1.0, 0.0],
    ]
)


def _sqrt_radicand(w2: np.ndarray, branch: str) -> np.ndarray:
    """Square root with the clamp window; raises listing offending modes."""
    w2 = np.atleast_1d(np.asarray(w2, dtype=float))
    bad = w2 < -RADICAND_TOL
    if bad.any():
        ls = (np.nonzero(bad)[0] + 1).tolist()
        raise ImaginaryFrequency(
            f"{branch} branch unstable: squared frequency negative at l={ls}",
            modes=ls,
        )
    return np.sqrt(np.where(w2 < 0.0, 0.0, w2))


def linear_dispersion(params: LatticeParams, nu_t: float, l: int | None = None):
    """Axial and transverse mode frequencies of the flat ring.

    Returns the pair ``(omega_x, omega_y)`` for wave number ``l`` or, when
    ``l`` is None, arrays over l = 1 .. n. The axial branch does not depend
    on ``nu_t``.
    """
    c = params.coulomb_constant
    taus = np.arange(1, params.tau_max + 1, dtype=float)
    if l is not None and not 1 <= l <= params.n:
        raise ConfigError(f"mode index {l} outside 1 .. {params.n}")
    ls = np.arange(1, params.n + 1, dtype=float) if l is None else np.array([float(l)])
    s2 = np.sin(np.pi * np.outer(ls, taus) / params.n) ** 2
    softening = (s2 / taus**3).sum(axis=1)
    wx = _sqrt_radicand(params.nu**2 + c * softening, "axial")
    wy = _sqrt_radicand(nu_t**2 - 0.5 * c * softening, "transverse")
    if l is not None:
        return float(wx[0]), float(wy[0])
    return wx, wy


def tilde_frequencies(
    params: LatticeParams, config: Configuration, nu_t: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-block squared frequencies and cross coupling in the buckled frame.

    Returns arrays ``(wx2, wy2, wxy)`` over l = 1 .. n:

        wx2_l = nu^2   + (4 Q^2/m) sum_tau dx_tau sin^2(pi l tau / n)
        wy2_l = nu_t^2 + (4 Q^2/m) [even-tau dy sin^2 + odd-tau dy cos^2]
        wxy_l = (Q^2/m) sum_{tau odd} dxy_tau sin(2 pi l tau / n)

    In the flat configuration all couplings are zero and wy2 reduces to the
    transverse dispersion at the shifted label l + n/2.
    """
    coeff: CouplingCoefficients = taylor_coefficients(params, config)
    pref = 4.0 * params.charge**2 / params.mass
    ls = np.arange(1, params.n + 1, dtype=float)
    wx2 = np.full(params.n, params.nu**2)
    wy2 = np.full(params.n, nu_t**2)
    wxy = np.zeros(params.n)
    for i, tau in enumerate(coeff.tau):
        phase = np.pi * ls * tau / params.n
        wx2 += pref * coeff.dx[i] * np.sin(phase) ** 2
        if config.variant is Variant.ZIGZAG and tau % 2 == 1:
            wy2 += pref * coeff.dy[i] * np.cos(phase) ** 2
            wxy += (pref / 4.0) * coeff.dxy[i] * np.sin(2.0 * phase)
        else:
            wy2 += pref * coeff.dy[i] * np.sin(phase) ** 2
    return wx2, wy2, wxy


def coupling_matrix(
    params: LatticeParams, config: Configuration, nu_t: float, l: int
) -> np.ndarray:
    """4x4 quadratic-form block for wave number ``l``, ordered (X, Px, Y, Py)."""
    if not 1 <= l <= params.n:
        raise ConfigError(f"l must be in 1..{params.n}, got {l}")
    wx2, wy2, wxy = tilde_frequencies(params, config, nu_t)
    m = params.mass
    i = l - 1
    return np.array(
        [
            [0.5 * m * wx2[i], 0.0, 0.5 * m * wxy[i], 0.0],
            [0.0, 0.5 / m, 0.0, 0.0],
            [0.5 * m * wxy[i], 0.0, 0.5 * m * wy2[i], 0.0],
            [0.0, 0.0, 0.0, 0.5 / m],
        ]
    )


def _rotation(wx2: float, wy2: float, wxy: float) -> tuple[float, float]:
    """Cosine/sine of the mixing angle; branch-free in the coupled case."""
    if abs(wxy) < COUPLING_TOL:
        return (1.0, 0.0) if wx2 >= wy2 else (0.0, 1.0)
    delta = wx2 - wy2
    big_r = np.hypot(delta, 2.0 * wxy)
    c = np.sqrt((big_r + delta) / (2.0 * big_r))
    s = (wxy / big_r) / c
    return float(c), float(s)


def symplectic_diagonalize(block: np.ndarray) -> tuple[float, float, np.ndarray]:
    """Normal-form frequencies and symplectic congruence of one 4x4 block.

    Returns ``(omega_v, omega_w, S)`` with ``omega_v >= omega_w`` such that
    ``S @ block @ S.T = diag(omega_v/2, omega_v/2, omega_w/2, omega_w/2)``
    and ``S @ OMEGA4 @ S.T = OMEGA4``. The normal-mode quadratures are
    obtained from the block quadratures via ``S^-T``.
    """
    block = np.asarray(block, dtype=float)
    if block.shape != (4, 4) or not np.allclose(block, block.T, atol=1e-12):
        raise ConfigError("expected a symmetric 4x4 block")
    m = 0.5 / block[1, 1]
    wx2 = 2.0 * block[0, 0] / m
    wy2 = 2.0 * block[2, 2] / m
    wxy = 2.0 * block[0, 2] / m

    delta = wx2 - wy2
    big_r = float(np.hypot(delta, 2.0 * wxy))
    wv = float(_sqrt_radicand(0.5 * (wx2 + wy2 + big_r), "upper normal")[0])
    ww = float(_sqrt_radicand(0.5 * (wx2 + wy2 - big_r), "lower normal")[0])
    if wv <= 0.0 or ww <= 0.0:
        raise DegenerateCoupling("zero-frequency mode admits no normal-form scaling")

    c, s = _rotation(wx2, wy2, wxy)
    rv, rw = np.sqrt(m * wv), np.sqrt(m * ww)
    S = np.array(
        [
            [c / rv, 0.0, s / rv, 0.0],
            [0.0, c * rv, 0.0, s * rv],
            [-s / rw, 0.0, c / rw, 0.0],
            [0.0, -s * rw, 0.0, c * rw],
        ]
    )
    return wv, ww, S


@dataclass(frozen=True)
class ModeEntry:
    """Normal-mode data of one wave-number block."""

    l: int
    variant: Variant
    omega_x: float | None = None
    omega_y: float | None = None
    omega_v: float | None = None
    omega_w: float | None = None
    phi: float | None = None
    psi: float | None = None
    s_matrix: np.ndarray | None = None


@dataclass(frozen=True)
class ModeSpectrum:
    """Full normal-mode spectrum at a given transverse trap frequency.

    Flat configuration: ``omega_x``/``omega_y`` hold the two decoupled
    branches. Buckled configuration: ``omega_v``/``omega_w`` hold the upper
    and lower normal branches and ``c2``/``s2``/``cs`` the squared cosine,
    squared sine and cosine*sine of the per-block mixing angle.
    """

    params: LatticeParams
    nu_t: float
    config: Configuration
    omega_x: np.ndarray | None = None
    omega_y: np.ndarray | None = None
    omega_v: np.ndarray | None = None
    omega_w: np.ndarray | None = None
    c2: np.ndarray | None = None
    s2: np.ndarray | None = None
    cs: np.ndarray | None = None
    wx2: np.ndarray | None = None
    wy2: np.ndarray | None = None
    wxy: np.ndarray | None = None

    @property
    def variant(self) -> Variant:
        return self.config.variant

    def branch_frequencies(self) -> np.ndarray:
        """All 2n mode frequencies, both branches concatenated."""
        if self.variant is Variant.LINEAR:
            return np.concatenate([self.omega_x, self.omega_y])
        return np.concatenate([self.omega_v, self.omega_w])

    def entry(self, l: int) -> ModeEntry:
        if not 1 <= l <= self.params.n:
            raise ConfigError(f"l must be in 1..{self.params.n}, got {l}")
        i = l - 1
        if self.variant is Variant.LINEAR:
            return ModeEntry(
                l=l,
                variant=self.variant,
                omega_x=float(self.omega_x[i]),
                omega_y=float(self.omega_y[i]),
            )
        delta = self.wx2[i] - self.wy2[i]
        big_r = float(np.hypot(delta, 2.0 * self.wxy[i]))
        block = coupling_matrix(self.params, self.config, self.nu_t, l)
        wv, ww, S = symplectic_diagonalize(block)
        return ModeEntry(
            l=l,
            variant=self.variant,
            omega_v=wv,
            omega_w=ww,
            phi=delta + big_r,
            psi=big_r * (delta + big_r),
            s_matrix=S,
        )

    def entries(self):
        return [self.entry(l) for l in range(1, self.params.n + 1)]


def build_spectrum(params: LatticeParams, nu_t: float) -> ModeSpectrum:
    """Solve the equilibrium at ``nu_t`` and assemble the full mode spectrum."""
    config = solve_equilibrium(params, nu_t)
    if config.variant is Variant.LINEAR:
        wx, wy = linear_dispersion(params, nu_t)
        return ModeSpectrum(params, nu_t, config, omega_x=wx, omega_y=wy)

    wx2, wy2, wxy = tilde_frequencies(params, config, nu_t)
    delta = wx2 - wy2
    big_r = np.hypot(delta, 2.0 * wxy)
    wv = _sqrt_radicand(0.5 * (wx2 + wy2 + big_r), "upper normal")
    ww = _sqrt_radicand(0.5 * (wx2 + wy2 - big_r), "lower normal")

    tiny = np.abs(wxy) < COUPLING_TOL
    safe_r = np.where(big_r > 0.0, big_r, 1.0)
    c2 = np.where(tiny, np.where(delta >= 0.0, 1.0, 0.0), (big_r + delta) / (2 * safe_r))
    s2 = np.where(tiny, np.where(delta >= 0.0, 0.0, 1.0), (big_r - delta) / (2 * safe_r))
    cs = np.where(tiny, 0.0, wxy / safe_r)
    return ModeSpectrum(
        params,
        nu_t,
        config,
        omega_v=wv,
        omega_w=ww,
        c2=c2,
        s2=s2,
        cs=cs,
        wx2=wx2,
        wy2=wy2,
        wxy=wxy,
    )
