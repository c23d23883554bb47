import numpy as np
import pytest

from wlift.bases import (
    CORRECTION_FACTORS,
    OrthonormalBasis,
    bell_pair,
    correction_unitary,
    ghz_basis,
    local_operator,
    validate_orthonormality,
    w_basis,
)
from wlift.protocol import IDEAL, prepared_state
from wlift.qcore import StateVector, apply_unitary, branch_decompose, overlap

from _oracle import W_KETS


def ket(bits):
    return StateVector.basis_state(bits).amplitudes


def test_w1_explicit():
    expected = (ket("001") + ket("010") + ket("100")) / np.sqrt(3)
    assert np.allclose(w_basis()[0].amplitudes, expected, atol=1e-15)


@pytest.mark.parametrize("j", range(8))
def test_members_match_reference_kets(j):
    expected = np.zeros(8)
    for bits, amp in W_KETS[j].items():
        expected[int(bits, 2)] = amp
    assert np.allclose(w_basis()[j].amplitudes, expected, atol=1e-15)


def test_w5_is_negation_of_w1():
    w = w_basis()
    expected = (ket("110") + ket("101") + ket("011")) / np.sqrt(3)
    assert np.allclose(w[4].amplitudes, expected, atol=1e-15)
    assert overlap(apply_unitary(w[0], local_operator("X", "X", "X")), w[4]) == pytest.approx(1, abs=1e-12)


@pytest.mark.parametrize("j", range(4))
def test_negation_symmetry(j):
    w = w_basis()
    xxx = local_operator("X", "X", "X")
    assert overlap(apply_unitary(w[j], xxx), w[j + 4]) == pytest.approx(1, abs=1e-12)
    assert overlap(apply_unitary(w[j + 4], xxx), w[j]) == pytest.approx(1, abs=1e-12)


def test_w_gram_identity():
    assert validate_orthonormality(w_basis()) <= 1e-12
    m = w_basis().matrix()
    assert np.allclose(m.conj().T @ m, np.eye(8), atol=1e-12)


def test_local_equivalence_examples():
    w = w_basis()
    # exact equality, not only up to phase
    assert np.allclose(apply_unitary(w[1], local_operator("I", "Z", "X")).amplitudes, w[0].amplitudes, atol=1e-12)
    assert np.allclose(apply_unitary(w[2], local_operator("Z", "X", "I")).amplitudes, w[0].amplitudes, atol=1e-12)


def test_sum_identities():
    w = w_basis()
    low = (w[1].amplitudes + w[2].amplitudes + w[3].amplitudes) / np.sqrt(3)
    high = (w[5].amplitudes + w[6].amplitudes + w[7].amplitudes) / np.sqrt(3)
    assert np.max(np.abs(low - ket("000"))) <= 1e-12
    assert np.max(np.abs(high - ket("111"))) <= 1e-12


def test_ghz_examples():
    g = ghz_basis()
    assert g.labels[0] == "GHZ+_000"
    assert np.allclose(g[0].amplitudes, (ket("000") + ket("111")) / np.sqrt(2), atol=1e-15)
    m = g[g.index("GHZ-_011")].amplitudes
    assert np.allclose(m, (ket("011") - ket("100")) / np.sqrt(2), atol=1e-15)
    assert g.labels == ("GHZ+_000", "GHZ-_000", "GHZ+_001", "GHZ-_001",
                        "GHZ+_010", "GHZ-_010", "GHZ+_011", "GHZ-_011")


def test_ghz_gram():
    assert validate_orthonormality(ghz_basis()) <= 1e-12


def test_ghz_decomposition_of_ideal_source():
    g = ghz_basis()
    for j, (p, psi) in enumerate(branch_decompose(prepared_state(IDEAL), g)):
        assert p == pytest.approx(1 / 8, abs=1e-12)
        assert overlap(psi, g[j]) == pytest.approx(1, abs=1e-12)


class TestBellPair:
    def test_ideal(self):
        assert np.allclose(bell_pair(1 / np.sqrt(2)).amplitudes, np.array([1, 0, 0, 1]) / np.sqrt(2), atol=1e-15)

    def test_separable(self):
        for theta in (0.0, 0.3, -1.2):
            assert np.allclose(bell_pair(1.0, theta).amplitudes, ket("00"), atol=1e-15)

    def test_phase(self):
        s = bell_pair(1 / np.sqrt(2), np.pi / 5)
        ref = StateVector.normalized([1, 0, 0, np.exp(1j * np.pi / 5)])
        assert np.allclose(s.amplitudes, ref.amplitudes, atol=1e-15)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            bell_pair(1.2)
        with pytest.raises(ValueError):
            bell_pair(-0.1)


class TestCorrections:
    def test_o1_identity(self):
        assert np.allclose(correction_unitary(1).matrix, np.eye(8), atol=0)

    def test_o4_explicit(self):
        x = np.array([[0, 1], [1, 0]])
        z = np.diag([1, -1])
        assert np.allclose(correction_unitary(4).matrix, np.kron(np.kron(x, np.eye(2)), z), atol=0)

    def test_o6_explicit(self):
        x = np.array([[0, 1], [1, 0]])
        iy = 1j * np.array([[0, -1j], [1j, 0]])
        assert np.allclose(correction_unitary(6).matrix, np.kron(np.kron(x, iy), np.eye(2)), atol=0)
        out = apply_unitary(w_basis()[5], correction_unitary(6))
        assert overlap(out, w_basis()[0]) == pytest.approx(1, abs=1e-12)

    @pytest.mark.parametrize("j", range(1, 9))
    def test_every_entry_maps_to_w1(self, j):
        out = apply_unitary(w_basis()[j - 1], correction_unitary(j))
        assert abs(overlap(out, w_basis()[0]) - 1) <= 1e-12

    def test_factors_are_pauli_like(self):
        for factors in CORRECTION_FACTORS.values():
            assert len(factors) == 3 and set(factors) <= {"I", "X", "iY", "Z"}

    @pytest.mark.parametrize("bad", [0, 9, -1])
    def test_out_of_range(self, bad):
        with pytest.raises(ValueError):
            correction_unitary(bad)


def test_corrupted_basis_detected():
    members = list(w_basis())
    amps = np.zeros(8)
    for bits, sign in (("000", 1), ("011", 1), ("101", 1)):  # W2 with the |011> sign flipped
        amps[int(bits, 2)] = sign / np.sqrt(3)
    members[1] = StateVector(amps)
    corrupted = OrthonormalBasis(tuple(members), w_basis().labels)
    # <W3|W2'> = (1 + 1)/3 by hand
    assert validate_orthonormality(corrupted) == pytest.approx(2 / 3, abs=1e-12)
    assert validate_orthonormality(corrupted) >= 1 / 3
