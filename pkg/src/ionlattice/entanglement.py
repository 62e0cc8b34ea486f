"""Entanglement measures for pairs and blocks of sites.

Pair entanglement is decided by two sum-difference separability criteria,

    S1 = 4 <(q_j + q_k)^2/2> <(p_j - p_k)^2/2> - 1,
    S2 = 4 <(q_j - q_k)^2/2> <(p_j + p_k)^2/2> - 1,

either one negative certifies an entangled pair, and the logarithmic
negativity follows as E = max(0, -ln(1 + S1)/2) + max(0, -ln(1 + S2)/2).
Block entropies come from the symplectic spectrum of the reduced
covariance matrix.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .covariance import CovarianceMatrix, PairMoments, block_covariance, pair_moments
from .errors import ConfigError, DomainError, NumericalFailure
from .lattice import LatticeParams
from .quadrature import Divergent


class Violation(Enum):
    """Which separability criterion, if any, is violated."""

    NONE = "none"
    S1 = "S1"
    S2 = "S2"


def separability_criteria(moments: PairMoments) -> tuple[float, float]:
    """(S1, S2) of a site pair from its same-direction moments."""
    s1 = 4.0 * moments.q_plus * moments.p_minus - 1.0
    s2 = 4.0 * moments.q_minus * moments.p_plus - 1.0
    return s1, s2


def negativity(s1: float, s2: float) -> float:
    """Logarithmic negativity from the two criteria values.

    Values at or below -1 would make a reduced variance product negative,
    which no physical state produces.
    """
    total = 0.0
    for s in (s1, s2):
        if s <= -1.0:
            raise DomainError(f"criterion value {s} at or below -1 is unphysical")
        if math.isinf(s):
            continue
        total += max(0.0, -0.5 * math.log1p(s))
    return total


@dataclass(frozen=True)
class EntanglementReport:
    """Pair criteria, negativity and the violated criterion (if any)."""

    s1: float
    s2: float
    log_negativity: float
    violated: Violation


def pair_entanglement(
    params: LatticeParams, nu_t: float, temperature: float, tau: int, direction: str
) -> EntanglementReport:
    """Entanglement of a same-direction site pair at separation tau."""
    moments = pair_moments(params, nu_t, temperature, tau, direction)
    s1, s2 = separability_criteria(moments)
    if s1 < 0.0 and s2 < 0.0:
        # both negative cannot happen for a physical Gaussian pair state
        warnings.warn(
            f"both separability criteria negative (S1={s1:.3g}, S2={s2:.3g}); "
            "results may be unreliable",
            RuntimeWarning,
            stacklevel=2,
        )
    if s1 < 0.0:
        violated = Violation.S1
    elif s2 < 0.0:
        violated = Violation.S2
    else:
        violated = Violation.NONE
    return EntanglementReport(
        s1=s1, s2=s2, log_negativity=negativity(s1, s2), violated=violated
    )


def symplectic_spectrum(cov: CovarianceMatrix | np.ndarray) -> np.ndarray:
    """Symplectic eigenvalues of a covariance matrix, one per mode pair.

    Normalized so a pure vacuum mode gives exactly 1. Raises
    :class:`NumericalFailure` if the eigenvalues do not pair up, and
    :class:`DomainError` if one falls below the physical floor.
    """
    sigma = cov.matrix if isinstance(cov, CovarianceMatrix) else np.asarray(cov, float)
    if sigma.ndim != 2 or sigma.shape[0] != sigma.shape[1] or sigma.shape[0] % 2:
        raise ConfigError("covariance matrix must be square with even dimension")
    k = sigma.shape[0] // 2
    omega = np.zeros_like(sigma)
    for i in range(k):
        omega[2 * i, 2 * i + 1] = 1.0
        omega[2 * i + 1, 2 * i] = -1.0
    ev = np.abs(np.linalg.eigvals(1j * omega @ sigma))
    ev = 2.0 * np.sort(ev)
    pairs, partners = ev[::2], ev[1::2]
    scale = np.maximum(np.abs(pairs), 1.0)
    if np.any(np.abs(pairs - partners) > 1e-8 * scale):
        raise NumericalFailure("symplectic eigenvalues failed to pair up")
    out = pairs.copy()
    low = out < 1.0
    if np.any(out[low] < 1.0 - 1e-10):
        raise DomainError(
            f"symplectic eigenvalue {out.min()} below 1 beyond tolerance"
        )
    out[low] = 1.0
    return out


def von_neumann_entropy(r) -> float:
    """Entropy contribution of one symplectic eigenvalue.

    Accepts :class:`Divergent` (infinite eigenvalue) and returns inf.
    """
    if isinstance(r, Divergent):
        return math.inf
    if r < 1.0 - 1e-10:
        raise DomainError(f"symplectic eigenvalue {r} below 1")
    if r <= 1.0:
        return 0.0
    up, dn = (r + 1.0) / 2.0, (r - 1.0) / 2.0
    return up * math.log(up) - dn * math.log(dn)


@dataclass(frozen=True)
class BlockEntropyReport:
    """Entropy of a reduced block with its symplectic spectrum."""

    n_sites: int
    direction: str
    entropy: float
    spectrum: tuple
    dropped_soft_modes: int = 0


def block_entropy(cov: CovarianceMatrix, n_sites: int = 0, direction: str = "") -> BlockEntropyReport:
    """Von Neumann entropy of the state with covariance ``cov``."""
    spectrum = symplectic_spectrum(cov)
    entropy = float(sum(von_neumann_entropy(r) for r in spectrum))
    dropped = cov.dropped_soft_modes if isinstance(cov, CovarianceMatrix) else 0
    return BlockEntropyReport(
        n_sites=n_sites,
        direction=direction,
        entropy=entropy,
        spectrum=tuple(float(r) for r in spectrum),
        dropped_soft_modes=dropped,
    )


def block_entropy_profile(
    params: LatticeParams,
    nu_t: float,
    temperature: float,
    n_sites: int,
    direction: str,
    drop_soft_modes: bool = False,
) -> BlockEntropyReport:
    """Entropy of a block of adjacent sites along one direction."""
    if not 1 <= n_sites <= params.n // 2:
        raise ConfigError(f"block size must be in 1..{params.n // 2}, got {n_sites}")
    cov = block_covariance(
        params,
        nu_t,
        temperature,
        sites=range(1, n_sites + 1),
        directions=(direction,),
        drop_soft_modes=drop_soft_modes,
    )
    report = block_entropy(cov, n_sites=n_sites, direction=direction)
    return report


def negativity_cross_check(
    params: LatticeParams, nu_t: float, temperature: float, tau: int, direction: str
) -> tuple[float, float]:
    """Pair negativity by two routes: criteria values and partial transpose.

    The partial transpose flips the second site's momentum in the two-site
    covariance matrix; minus-log of its sub-unit symplectic eigenvalues is
    the same negativity when the pair state is symmetric.
    """
    report = pair_entanglement(params, nu_t, temperature, tau, direction)
    cov = block_covariance(
        params, nu_t, temperature, sites=(1, 1 + tau), directions=(direction,)
    )
    flip = np.diag([1.0, 1.0, 1.0, -1.0])
    sigma_pt = flip @ cov.matrix @ flip
    k = 2
    omega = np.zeros((4, 4))
    for i in range(k):
        omega[2 * i, 2 * i + 1] = 1.0
        omega[2 * i + 1, 2 * i] = -1.0
    ev = 2.0 * np.sort(np.abs(np.linalg.eigvals(1j * omega @ sigma_pt)))[::2]
    en_pt = float(sum(max(0.0, -math.log(r)) for r in ev))
    return report.log_negativity, en_pt
