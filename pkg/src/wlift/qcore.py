"""Small exact state-vector toolkit: kets, permutations, measurement, mixtures.

Conventions: qubit 1 is the most significant bit of the amplitude index, so
``|b1 b2 ... bn>`` lives at index ``sum(b_i * 2**(n - i))``. States are
compared up to a global phase via ``|<u|v>|``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional, Sequence

import numpy as np

MAX_QUBITS = 6
NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
UNITARY_TOL = 1e-12
ENSEMBLE_SUM_TOL = 1e-9
# Branches whose probability falls below this carry no residual state.
ZERO_PROBABILITY = 1e-14


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, dtype=complex)
    array.flags.writeable = False
    return array


def _qubits_for(length: int) -> int:
    n = length.bit_length() - 1
    if length < 2 or 1 << n != length:
        raise ValueError(f"length {length} is not a power of two >= 2")
    return n


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state of ``n_qubits`` qubits (1 to 6)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amplitudes))
        n = _qubits_for(amps.size)
        if n > MAX_QUBITS:
            raise ValueError(f"{n} qubits exceeds the supported maximum of {MAX_QUBITS}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"state is not normalized (sum |amp|^2 = {norm!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def normalized(cls, amplitudes) -> "StateVector":
        amps = np.asarray(amplitudes, dtype=complex).ravel()
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(amps / norm)

    @classmethod
    def basis_state(cls, bits: str) -> "StateVector":
        """Computational basis ket, e.g. ``basis_state("010")``."""
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(amps)

    @property
    def n_qubits(self) -> int:
        return _qubits_for(self.amplitudes.size)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def __repr__(self):
        return f"StateVector(n_qubits={self.n_qubits}, amplitudes={np.round(self.amplitudes, 6)!r})"


@dataclass(frozen=True, eq=False)
class Unitary:
    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"unitary must be square, got shape {m.shape}")
        err = np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0])))
        if err > UNITARY_TOL:
            raise ValueError(f"matrix is not unitary (max |U^dag U - I| = {err:.3e})")
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def __matmul__(self, other: "Unitary") -> "Unitary":
        return Unitary(self.matrix @ other.matrix)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator."""

    matrix: np.ndarray

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITIAN_TOL:
            raise ValueError(f"density matrix is not Hermitian (deviation {herm:.3e})")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        lowest = np.linalg.eigvalsh((m + m.conj().T) / 2).min()
        if lowest < -PSD_TOL:
            raise ValueError(f"density matrix has negative eigenvalue {lowest:.3e}")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def maximally_mixed(cls, dim: int) -> "DensityMatrix":
        return cls(np.eye(dim, dtype=complex) / dim)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


@dataclass(frozen=True)
class QubitPermutation:
    """Bijection on qubit positions: input qubit ``i`` moves to ``image[i]``."""

    image: tuple

    def __post_init__(self):
        image = tuple(int(i) for i in self.image)
        if sorted(image) != list(range(len(image))):
            raise ValueError(f"{self.image!r} is not a permutation of 0..{len(image) - 1}")
        object.__setattr__(self, "image", image)

    @property
    def n_qubits(self) -> int:
        return len(self.image)

    def inverse(self) -> "QubitPermutation":
        inv = [0] * len(self.image)
        for src, dst in enumerate(self.image):
            inv[dst] = src
        return QubitPermutation(tuple(inv))


class Branch(NamedTuple):
    """One measurement branch; ``state`` is None when the outcome cannot occur."""

    probability: float
    state: Optional[StateVector]


def tensor(u: StateVector, v: StateVector, *more: StateVector) -> StateVector:
    states = (u, v) + more
    total = sum(s.n_qubits for s in states)
    if total > MAX_QUBITS:
        raise ValueError(f"tensor product would have {total} qubits (max {MAX_QUBITS})")
    amps = states[0].amplitudes
    for s in states[1:]:
        amps = np.kron(amps, s.amplitudes)
    return StateVector.normalized(amps)


def permute_qubits(s: StateVector, p: QubitPermutation) -> StateVector:
    if p.n_qubits != s.n_qubits:
        raise ValueError(f"permutation acts on {p.n_qubits} qubits, state has {s.n_qubits}")
    n = s.n_qubits
    # np.transpose wants, for each output axis, the input axis it reads from.
    axes = p.inverse().image
    out = np.transpose(s.amplitudes.reshape((2,) * n), axes).reshape(-1)
    return StateVector(out)


def inner(u: StateVector, v: StateVector) -> complex:
    """<u|v>, conjugate-linear in ``u``."""
    if u.dim != v.dim:
        raise ValueError(f"dimension mismatch: {u.dim} vs {v.dim}")
    return complex(np.vdot(u.amplitudes, v.amplitudes))


def overlap(u: StateVector, v: StateVector) -> float:
    """|<u|v>|, the phase-blind equality measure."""
    return abs(inner(u, v))


def gram_deviation(members: Sequence[StateVector]) -> float:
    """max |G_jk - delta_jk| over the Gram matrix of ``members``."""
    vecs = np.array([m.amplitudes for m in members])
    gram = vecs.conj() @ vecs.T
    return float(np.max(np.abs(gram - np.eye(len(members)))))


def apply_unitary(s: StateVector, u: Unitary) -> StateVector:
    if u.dim != s.dim:
        raise ValueError(f"unitary of dim {u.dim} cannot act on state of dim {s.dim}")
    return StateVector(u.matrix @ s.amplitudes)


def _subsystem_table(s: StateVector, basis: Sequence[StateVector]) -> np.ndarray:
    """Unnormalized residuals, row j = (<basis_j| (x) I)|s>."""
    members = list(basis)
    if not members:
        raise ValueError("empty measurement basis")
    k = members[0].n_qubits
    if any(m.n_qubits != k for m in members) or len(members) != 2 ** k:
        raise ValueError("basis must contain 2**k states of k qubits each")
    if s.n_qubits <= k:
        raise ValueError(f"state has {s.n_qubits} qubits; need more than the {k} measured")
    dev = gram_deviation(members)
    if dev > NORM_TOL:
        raise ValueError(f"measurement basis is not orthonormal (deviation {dev:.3e})")
    bra = np.array([m.amplitudes for m in members]).conj()
    return bra @ s.amplitudes.reshape(2 ** k, -1)


def _probabilities(table: np.ndarray) -> np.ndarray:
    probs = np.sum(np.abs(table) ** 2, axis=1)
    total = probs.sum()
    if total <= ZERO_PROBABILITY:
        raise ValueError("all outcome probabilities vanish; corrupted input state")
    if abs(total - 1.0) > NORM_TOL:
        raise ValueError(f"outcome probabilities sum to {total!r}")
    return probs


def branch_decompose(s: StateVector, basis: Sequence[StateVector]) -> list[Branch]:
    """Every outcome of measuring the leading qubits of ``s`` in ``basis``.

    The measured subsystem is the first ``k`` qubits, where ``k`` is the
    qubit count of the basis members. Zero-probability outcomes get
    ``state=None``.
    """
    table = _subsystem_table(s, basis)
    probs = _probabilities(table)
    branches = []
    for p, row in zip(probs, table):
        if p < ZERO_PROBABILITY:
            branches.append(Branch(float(p), None))
        else:
            branches.append(Branch(float(p), StateVector(row / np.sqrt(p))))
    return branches


def measure_subsystem(
    s: StateVector, basis: Sequence[StateVector], rng: np.random.Generator
) -> tuple[int, float, StateVector]:
    """Sample one projective measurement on the leading qubits of ``s``.

    Returns the 0-based outcome index, its probability and the normalized
    post-measurement state of the remaining qubits.
    """
    table = _subsystem_table(s, basis)
    probs = _probabilities(table)
    j = int(rng.choice(len(probs), p=probs / probs.sum()))
    return j, float(probs[j]), StateVector(table[j] / np.sqrt(probs[j]))


def sample_outcomes(
    s: StateVector, basis: Sequence[StateVector], rng: np.random.Generator, shots: int
) -> np.ndarray:
    """Outcome indices of ``shots`` independent repetitions of :func:`measure_subsystem`."""
    probs = _probabilities(_subsystem_table(s, basis))
    return rng.choice(len(probs), size=shots, p=probs / probs.sum())


def density_from_ensemble(branches: Iterable[tuple[float, Optional[StateVector]]]) -> DensityMatrix:
    branches = list(branches)
    if not branches:
        raise ValueError("empty ensemble")
    total = 0.0
    rho = None
    for p, psi in branches:
        if p < 0:
            raise ValueError(f"negative probability {p!r}")
        total += p
        if psi is None:
            if p >= ZERO_PROBABILITY:
                raise ValueError("member with nonzero probability has no state")
            continue
        if not isinstance(psi, StateVector):
            psi = StateVector(psi)
        term = p * psi.projector()
        rho = term if rho is None else rho + term
    if abs(total - 1.0) > ENSEMBLE_SUM_TOL:
        raise ValueError(f"ensemble probabilities sum to {total!r}")
    rho = rho / total
    return DensityMatrix((rho + rho.conj().T) / 2)


def fidelity_pure(rho: DensityMatrix, psi: StateVector) -> float:
    """<psi|rho|psi>, clamped to [0, 1]."""
    if rho.dim != psi.dim:
        raise ValueError(f"dimension mismatch: rho is {rho.dim}, psi is {psi.dim}")
    value = np.vdot(psi.amplitudes, rho.matrix @ psi.amplitudes).real
    return float(min(1.0, max(0.0, value)))


def condition_on_outcome(rho: np.ndarray, effect: StateVector) -> np.ndarray:
    """Unnormalized (<e| (x) I) rho (|e> (x) I) on the trailing qubits.

    ``effect`` addresses the leading qubits of ``rho``; the trace of the
    result is the outcome probability.
    """
    d_a = effect.dim
    d_b = rho.shape[0] // d_a
    if d_a * d_b != rho.shape[0]:
        raise ValueError(f"effect of dim {d_a} does not divide operator of dim {rho.shape[0]}")
    blocks = np.asarray(rho).reshape(d_a, d_b, d_a, d_b)
    e = effect.amplitudes
    return np.einsum("a,abcd,c->bd", e.conj(), blocks, e)
