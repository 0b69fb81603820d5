"""Folded transfer tensors and both contraction directions of the network."""

from math import cos, pi, sin

import numpy as np
import pytest

from stabmpo.circuit import (
    StabMpoCircuit,
    StabMpoLayer,
    compile_blocks,
    expectation,
)
from stabmpo.clifford import CliffordTableau
from stabmpo.harness import sample_tdoped_blocks
from stabmpo.mps import Mps, TruncationPolicy
from stabmpo.pauli import SIGMA, PauliString, pauli_coefficient
from stabmpo.temporal import (
    AuxChainState,
    build_folded_site,
    computational_pauli_vector,
    gamma_structure,
    horizontal_contract,
    s_factor,
    vertical_fold_evolve,
)

EXACT = TruncationPolicy(chi_max=2**8)


# ----------------------------------------------------------------------
# structure factors (dense half-trace oracles, exhaustive)
# ----------------------------------------------------------------------
def test_gamma_exhaustive_dense_oracle():
    for g in range(4):
        for mu in range(4):
            for nu in range(4):
                dense = 0.5 * np.trace(SIGMA[mu] @ SIGMA[nu] @ SIGMA[g])
                assert gamma_structure(mu, nu, g) == pytest.approx(dense, abs=1e-14)


def test_gamma_examples():
    for mu in range(4):
        for nu in range(4):
            assert gamma_structure(mu, nu, 0) == (1.0 if mu == nu else 0.0)
    assert gamma_structure(1, 2, 3) == pytest.approx(1j)  # Tr(XYZ)/2
    for mu in range(1, 4):
        for g in range(1, 4):
            assert gamma_structure(mu, mu, g) == 0.0


def test_gamma_hermiticity():
    for g in range(4):
        for mu in range(4):
            for nu in range(4):
                assert gamma_structure(mu, nu, g) == pytest.approx(
                    np.conj(gamma_structure(nu, mu, g))
                )


def test_s_factor_exhaustive_dense_oracle():
    for g in range(4):
        for mu in range(4):
            dense = 0.5 * np.trace(SIGMA[mu] @ SIGMA[g] @ SIGMA[mu] @ SIGMA[g])
            assert s_factor(mu, g) == pytest.approx(dense.real, abs=1e-14)
            assert s_factor(mu, g) in (1.0, -1.0)


def test_s_factor_examples():
    assert all(s_factor(0, g) == 1.0 for g in range(4))
    assert all(s_factor(mu, 0) == 1.0 for mu in range(4))
    assert s_factor(3, 3) == 1.0
    assert s_factor(1, 3) == -1.0  # ZXZ = -X


# ----------------------------------------------------------------------
# folded site tensors
# ----------------------------------------------------------------------
def dense_folded_reference(g: int, phi0: complex, phi1: complex) -> np.ndarray:
    ops = (phi0 * SIGMA[0], phi1 * SIGMA[g])
    w = np.zeros((4, 4, 4), dtype=complex)
    for a_ket in range(2):
        for a_bra in range(2):
            a = 2 * a_ket + a_bra
            for mu in range(4):
                for nu in range(4):
                    w[a, mu, nu] = 0.5 * np.trace(
                        SIGMA[mu] @ ops[a_ket] @ SIGMA[nu] @ ops[a_bra].conj().T
                    )
    return w


def test_folded_site_disconnected_when_trivial():
    t = build_folded_site(0, cos(0.4), -1j * sin(0.4))
    for a in range(4):
        block = t.block(a)
        assert np.allclose(block, block[0, 0] * np.eye(4))


def test_folded_site_t_gate_block():
    phi0, phi1 = cos(pi / 8), -1j * sin(pi / 8)
    t = build_folded_site(3, phi0, phi1)
    want = sin(pi / 8) ** 2 * np.diag([1.0, -1.0, -1.0, 1.0])
    assert np.allclose(t.block(3), want, atol=1e-14)


def test_folded_site_pure_identity_channel():
    t = build_folded_site(2, 1.0, 0.0)
    assert np.allclose(t.block(0), np.eye(4))
    for a in (1, 2, 3):
        assert np.allclose(t.block(a), 0.0)


def test_folded_site_random_vs_dense_trace():
    rng = np.random.default_rng(70)
    for _ in range(100):
        g = int(rng.integers(4))
        theta = float(rng.uniform(0, 2 * pi))
        sign = 1.0 if rng.integers(2) else -1.0
        phi0, phi1 = cos(theta / 2), sign * -1j * sin(theta / 2)
        t = build_folded_site(g, phi0, phi1)
        assert np.max(np.abs(t.w - dense_folded_reference(g, phi0, phi1))) < 1e-12


def test_folded_site_rejects_non_unitary_pair():
    with pytest.raises(ValueError):
        build_folded_site(1, 1.0, 0.5)


def test_computational_pauli_vector_roundtrip():
    for s in (0, 1):
        v = computational_pauli_vector(s)
        proj = sum(v[mu] * SIGMA[mu] for mu in range(4))
        want = np.zeros((2, 2), dtype=complex)
        want[s, s] = 1.0
        assert np.allclose(proj, want)
        for mu in range(4):
            assert pauli_coefficient(want, PauliString.from_letters([mu])) == (
                pytest.approx(complex(v[mu]))
            )


# ----------------------------------------------------------------------
# vertical contraction
# ----------------------------------------------------------------------
def trivial_circuit(n: int, layers) -> StabMpoCircuit:
    return StabMpoCircuit(n, list(layers), CliffordTableau.identity(n))


def test_vertical_no_layers_reads_off_projector():
    n = 4
    circ = trivial_circuit(n, [])
    bits = [0, 1, 0, 1]
    for j in range(n):
        res = vertical_fold_evolve(circ, PauliString.single(n, j, 3), bits, EXACT)
        assert res.value == pytest.approx((-1.0) ** bits[j], abs=1e-12)
        res = vertical_fold_evolve(circ, PauliString.single(n, j, 1), bits, EXACT)
        assert res.value == pytest.approx(0.0, abs=1e-12)
    ident = PauliString.identity(n)
    assert vertical_fold_evolve(circ, ident, bits, EXACT).value == pytest.approx(1.0)


def test_vertical_matches_layer_evolution():
    rng = np.random.default_rng(71)
    for _ in range(8):
        n = 4
        blocks = sample_tdoped_blocks(n, 3, 1, rng)
        compiled = compile_blocks(n, blocks)
        obs = PauliString.single(n, int(rng.integers(n)), int(rng.integers(1, 4)))
        bits = [int(b) for b in rng.integers(2, size=n)]
        ref = expectation(Mps.product_state(bits), compiled, obs, EXACT).value
        got = vertical_fold_evolve(compiled, obs, bits, EXACT)
        assert got.value == pytest.approx(ref, abs=1e-8)


def test_vertical_zero_angles_leave_coefficients_fixed():
    n = 3
    layers = [StabMpoLayer(PauliString.from_literal("XZY"), 0.0)]
    circ = trivial_circuit(n, layers)
    res = vertical_fold_evolve(circ, PauliString.single(n, 0, 3), [0] * n, EXACT)
    assert res.value == pytest.approx(1.0, abs=1e-12)
    assert res.max_bond == 1


# ----------------------------------------------------------------------
# horizontal contraction
# ----------------------------------------------------------------------
def test_horizontal_trivial_layers_have_zero_temporal_entropy():
    n = 5
    layers = [StabMpoLayer(PauliString.identity(n), 0.9) for _ in range(3)]
    circ = trivial_circuit(n, layers)
    res = horizontal_contract(circ, PauliString.single(n, 2, 3), [0] * n, EXACT)
    assert res.value == pytest.approx(1.0, abs=1e-10)
    assert np.allclose(res.temporal_entropy_bits, 0.0, atol=1e-12)


def test_horizontal_identity_observable_gives_norm_one():
    rng = np.random.default_rng(72)
    for _ in range(5):
        n = 4
        blocks = sample_tdoped_blocks(n, 3, 1, rng)
        compiled = compile_blocks(n, blocks)
        res = horizontal_contract(compiled, PauliString.identity(n), [0] * n, EXACT)
        assert res.value == pytest.approx(1.0, abs=1e-8)


def test_horizontal_matches_vertical_and_layers():
    rng = np.random.default_rng(73)
    for _ in range(8):
        n = 4
        blocks = sample_tdoped_blocks(n, 3, 1, rng)
        compiled = compile_blocks(n, blocks)
        obs = PauliString.single(n, int(rng.integers(n)), int(rng.integers(1, 4)))
        bits = [int(b) for b in rng.integers(2, size=n)]
        ref = expectation(Mps.product_state(bits), compiled, obs, EXACT).value
        vert = vertical_fold_evolve(compiled, obs, bits, EXACT).value
        folded = horizontal_contract(compiled, obs, bits, EXACT, mode="folded")
        unfolded = horizontal_contract(compiled, obs, bits, EXACT, mode="unfolded")
        assert vert == pytest.approx(ref, abs=1e-8)
        assert folded.value == pytest.approx(ref, abs=1e-8)
        assert unfolded.value == pytest.approx(ref, abs=1e-8)


def test_horizontal_m0_direct_value():
    n = 3
    circ = trivial_circuit(n, [])
    res = horizontal_contract(circ, PauliString.single(n, 1, 3), [0, 1, 0], EXACT)
    assert res.value == pytest.approx(-1.0)
    assert np.allclose(res.temporal_entropy_bits, 0.0)


def test_horizontal_entropy_profile_shape_and_chain_modes():
    rng = np.random.default_rng(74)
    n, m = 5, 4
    blocks = sample_tdoped_blocks(n, m, 1, rng)
    compiled = compile_blocks(n, blocks)
    obs = PauliString.single(n, 2, 3)
    res = horizontal_contract(compiled, obs, [0] * n, EXACT)
    assert res.temporal_entropy_bits.shape == (n,)
    aux_folded = AuxChainState.initial(compiled, "folded")
    aux_unfolded = AuxChainState.initial(compiled, "unfolded")
    assert aux_folded.chain.n == m
    assert aux_unfolded.chain.n == 2 * m
    assert aux_folded.chain.phys_dims == (4,) * m
    assert aux_folded.mid_cut() == 2
    assert aux_unfolded.mid_cut() == m


def test_horizontal_pi_layer_with_x_observable_collapses_chain():
    # theta = pi layers make the identity branch weight ~1e-33; a column whose
    # observable letter anticommutes with the string then annihilates the chain
    n = 2
    layer = StabMpoLayer(PauliString.from_literal("XX"), pi)
    circ = trivial_circuit(n, [layer])
    obs = PauliString.single(n, 0, 1)  # X on qubit 0
    for mode in ("folded", "unfolded"):
        res = horizontal_contract(circ, obs, [0, 0], EXACT, mode=mode)
        assert res.zero_state
        assert res.value == 0.0
    # the exact value is indeed zero
    ref = expectation(Mps.product_state([0, 0]), circ, obs, EXACT).value
    assert ref == pytest.approx(0.0, abs=1e-12)


def test_horizontal_rejects_length_mismatch():
    circ = trivial_circuit(3, [])
    with pytest.raises(ValueError):
        horizontal_contract(circ, PauliString.identity(3), [0, 0], EXACT)


def test_write_temporal_csv(tmp_path):
    from stabmpo.temporal import write_temporal_csv

    mat = np.array([[0.0, 0.5], [1.0, 0.25]])
    path = tmp_path / "temporal.csv"
    write_temporal_csv(path, mat)
    lines = path.read_text().splitlines()
    assert lines[0] == "n,m,entropy_bits"
    assert lines[1] == "1,1,0.0"
    assert lines[4] == "2,2,0.25"
