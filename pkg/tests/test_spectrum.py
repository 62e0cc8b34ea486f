"""Dispersion branches and the 4x4 symplectic normal form.

Oracle for the normal form, independent of the closed-form construction:
the Williamson frequencies of a quadratic Hamiltonian u^T M u are the
absolute eigenvalues of i Omega (2M). Every frozen frequency below was
computed from that eigenvalue problem first.
"""

import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from ionlattice.errors import ConfigError, ImaginaryFrequency
from ionlattice.lattice import (
    Configuration,
    Variant,
    critical_potential,
    solve_equilibrium,
)
from ionlattice.spectrum import (
    OMEGA4,
    build_spectrum,
    coupling_matrix,
    linear_dispersion,
    symplectic_diagonalize,
    tilde_frequencies,
)


def williamson_oracle(block):
    """Normal-mode frequencies |eig(i Omega 2M)|, descending, one per pair."""
    freqs = np.sort(np.abs(np.linalg.eigvals(1j * OMEGA4 @ (2.0 * block))))
    assert_allclose(freqs[::2], freqs[1::2], rtol=1e-12)
    return freqs[3], freqs[1]


def _block(wx2, wy2, wxy, mass):
    m = mass
    return np.array(
        [
            [0.5 * m * wx2, 0.0, 0.5 * m * wxy, 0.0],
            [0.0, 0.5 / m, 0.0, 0.0],
            [0.5 * m * wxy, 0.0, 0.5 * m * wy2, 0.0],
            [0.0, 0.0, 0.0, 0.5 / m],
        ]
    )


def test_symmetric_block_frozen():
    # equal diagonal frequencies 1 with coupling 1/2: the oracle gives
    # sqrt(3/2) and sqrt(1/2)
    block = _block(1.0, 1.0, 0.5, mass=1.0)
    hi, lo = williamson_oracle(block)
    assert_allclose(hi, 1.224744871391589, rtol=1e-12)
    assert_allclose(lo, 0.7071067811865476, rtol=1e-12)
    wv, ww, _ = symplectic_diagonalize(block)
    assert_allclose([wv, ww], [hi, lo], rtol=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2, 3])
def test_normal_form_invariants(seed):
    rng = np.random.default_rng(seed)
    for _ in range(20):
        wx2, wy2 = rng.uniform(0.5, 3.0, size=2)
        # keep the lower branch stable: wxy^2 < wx2 * wy2
        wxy = 0.9 * math.sqrt(wx2 * wy2) * rng.uniform(0.0, 1.0)
        mass = rng.uniform(0.5, 4.0)
        block = _block(wx2, wy2, wxy, mass)
        wv, ww, smat = symplectic_diagonalize(block)
        assert_allclose([wv, ww], williamson_oracle(block), rtol=1e-10)
        assert wv >= ww > 0
        target = np.diag([wv / 2, wv / 2, ww / 2, ww / 2])
        assert_allclose(smat @ block @ smat.T, target, atol=1e-10)
        assert_allclose(smat @ OMEGA4 @ smat.T, OMEGA4, atol=1e-10)


def test_decoupled_block_keeps_branch_identity():
    block = _block(4.0, 1.0, 0.0, mass=2.0)
    wv, ww, smat = symplectic_diagonalize(block)
    assert_allclose([wv, ww], [2.0, 1.0], rtol=1e-12)
    assert_allclose(smat @ OMEGA4 @ smat.T, OMEGA4, atol=1e-12)


def test_coupling_matrix_layout(nn_ring):
    params = nn_ring(n=8)
    nu_t = 0.8 * critical_potential(params)
    config = solve_equilibrium(params, nu_t)
    wx2, wy2, wxy = tilde_frequencies(params, config, nu_t)
    l = 3
    block = coupling_matrix(params, config, nu_t, l)
    m = params.mass
    assert_allclose(block[0, 0], 0.5 * m * wx2[l - 1], rtol=1e-12)
    assert_allclose(block[2, 2], 0.5 * m * wy2[l - 1], rtol=1e-12)
    assert_allclose(block[0, 2], 0.5 * m * wxy[l - 1], rtol=1e-12)
    assert block[1, 1] == block[3, 3] == 0.5 / m
    assert_allclose(block, block.T, atol=0)


def test_linear_dispersion_frozen_quarter_ring(nn_ring):
    # N = 4, l = 1: axial 1 + 2 sin^2(pi/4) = 2; transverse 1.5^2 - sin^2(pi/4)
    params = nn_ring(n=4)
    wx, wy = linear_dispersion(params, 1.5, l=1)
    assert_allclose(wx, math.sqrt(2.0), rtol=1e-12)
    assert_allclose(wy, math.sqrt(1.75), rtol=1e-12)


def test_zone_centre_recovers_trap_frequencies(nn_ring):
    params = nn_ring(n=10)
    wx, wy = linear_dispersion(params, 1.7, l=10)
    assert_allclose(wx, params.nu, rtol=1e-12)
    assert_allclose(wy, 1.7, rtol=1e-12)


def test_reflection_symmetry(lr_ring):
    params = lr_ring(n=12)
    wx, wy = linear_dispersion(params, 1.4)
    for l in range(1, 12):
        assert_allclose(wx[l - 1], wx[12 - l - 1], rtol=1e-12)
        assert_allclose(wy[l - 1], wy[12 - l - 1], rtol=1e-12)


def test_axial_branch_ignores_transverse_trap(nn_ring):
    params = nn_ring(n=8)
    wx1, _ = linear_dispersion(params, 1.2)
    wx2, _ = linear_dispersion(params, 3.7)
    assert_allclose(wx1, wx2, rtol=0, atol=0)


def test_zone_edge_softens_at_critical_point(nn_ring):
    params = nn_ring(n=16)
    crit = critical_potential(params)
    _, wy = linear_dispersion(params, crit, l=8)
    assert abs(wy) < 1e-7


def test_zigzag_branches_continuous_at_onset(nn_ring):
    """As b -> 0 the coupled branches converge to the flat ones with the
    transverse index shifted by half the zone."""
    params = nn_ring(n=8)
    nu_t = 1.05  # flat side, but evaluate the coupled transform at tiny b
    config = Configuration(variant=Variant.ZIGZAG, b=1e-7)
    wx, wy = linear_dispersion(params, nu_t)
    for l in range(1, 9):
        block = coupling_matrix(params, config, nu_t, l)
        wv, ww, _ = symplectic_diagonalize(block)
        shifted = (l + 4 - 1) % 8 + 1
        expect = sorted([wx[l - 1], wy[shifted - 1]])
        assert_allclose(sorted([ww, wv]), expect, atol=1e-6)


def test_build_spectrum_flat_matches_dispersion(nn_ring):
    params = nn_ring(n=12)
    spec = build_spectrum(params, 1.3)
    wx, wy = linear_dispersion(params, 1.3)
    assert spec.variant is Variant.LINEAR
    assert_allclose(spec.omega_x, wx, rtol=1e-14)
    assert_allclose(spec.omega_y, wy, rtol=1e-14)


def test_build_spectrum_zigzag_matches_blockwise(nn_ring):
    params = nn_ring(n=8)
    nu_t = 0.8 * critical_potential(params)
    spec = build_spectrum(params, nu_t)
    assert spec.variant is Variant.ZIGZAG
    config = solve_equilibrium(params, nu_t)
    for l in (1, 2, 4, 8):
        block = coupling_matrix(params, config, nu_t, l)
        wv, ww, _ = symplectic_diagonalize(block)
        assert_allclose(spec.omega_v[l - 1], wv, rtol=1e-10)
        assert_allclose(spec.omega_w[l - 1], ww, rtol=1e-10)


def test_mode_entry_consistency(nn_ring):
    params = nn_ring(n=8)
    nu_t = 0.8 * critical_potential(params)
    spec = build_spectrum(params, nu_t)
    entry = spec.entry(2)
    assert entry.l == 2
    assert_allclose(entry.omega_v, spec.omega_v[1], rtol=1e-12)
    assert_allclose(entry.omega_w, spec.omega_w[1], rtol=1e-12)
    assert entry.psi >= 0 and entry.phi >= 0
    smat = entry.s_matrix
    assert_allclose(smat @ OMEGA4 @ smat.T, OMEGA4, atol=1e-10)


def test_unstable_configuration_raises_with_modes(lr_ring):
    params = lr_ring(n=64)
    crit = critical_potential(params, td_limit=True)
    with pytest.raises(ImaginaryFrequency) as err:
        build_spectrum(params, 0.2 * crit)
    assert err.value.modes  # offending mode labels are carried along


def test_out_of_range_mode_index(nn_ring):
    with pytest.raises(ConfigError):
        linear_dispersion(nn_ring(n=8), 1.4, l=9)
