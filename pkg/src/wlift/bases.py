"""The three-qubit W basis, the GHZ basis, imperfect EPR pairs and the LOCC table."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np

from .qcore import StateVector, Unitary, gram_deviation

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

SINGLE_QUBIT_OPS = {
    "I": I2,
    "X": SIGMA_X,
    "Z": SIGMA_Z,
    "iY": 1j * SIGMA_Y,
}

# (sign, bitstring) terms of each member, coefficient sign/sqrt(3).
_W_TERMS = (
    ((+1, "001"), (+1, "010"), (+1, "100")),
    ((+1, "000"), (-1, "011"), (+1, "101")),
    ((+1, "000"), (+1, "011"), (-1, "110")),
    ((+1, "000"), (-1, "101"), (+1, "110")),
    ((+1, "110"), (+1, "101"), (+1, "011")),
    ((+1, "111"), (-1, "100"), (+1, "010")),
    ((+1, "111"), (+1, "100"), (-1, "001")),
    ((+1, "111"), (-1, "010"), (+1, "001")),
)

# Local corrections on B, keyed by the 1-based W outcome, one factor per qubit.
CORRECTION_FACTORS = {
    1: ("I", "I", "I"),
    2: ("I", "Z", "X"),
    3: ("Z", "X", "I"),
    4: ("X", "I", "Z"),
    5: ("X", "X", "X"),
    6: ("X", "iY", "I"),
    7: ("iY", "I", "X"),
    8: ("I", "X", "iY"),
}


@dataclass(frozen=True, eq=False)
class OrthonormalBasis:
    members: tuple
    labels: tuple

    def __post_init__(self):
        if len(self.members) != len(self.labels):
            raise ValueError("one label per member is required")
        dims = {m.dim for m in self.members}
        if len(dims) != 1 or dims.pop() != len(self.members):
            raise ValueError("a basis needs exactly dim members of equal dimension")

    @property
    def dim(self) -> int:
        return len(self.members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __getitem__(self, j):
        return self.members[j]

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def matrix(self) -> np.ndarray:
        """Members as the columns of a dim x dim array."""
        return np.array([m.amplitudes for m in self.members]).T

    def coordinates(self, s: StateVector) -> np.ndarray:
        return self.matrix().conj().T @ s.amplitudes

    def represent(self, operator: np.ndarray) -> np.ndarray:
        """Matrix elements <m_j|operator|m_k> in this basis."""
        m = self.matrix()
        return m.conj().T @ np.asarray(operator) @ m

    def from_coordinates(self, coords) -> StateVector:
        return StateVector.normalized(self.matrix() @ np.asarray(coords, dtype=complex))


def _from_terms(terms) -> StateVector:
    amps = np.zeros(8, dtype=complex)
    for sign, bits in terms:
        amps[int(bits, 2)] += sign
    return StateVector(amps / np.sqrt(len(terms)))


@lru_cache(maxsize=None)
def w_basis() -> OrthonormalBasis:
    """The eight W-class kets W1..W8, in subscript order."""
    members = tuple(_from_terms(t) for t in _W_TERMS)
    return OrthonormalBasis(members, tuple(f"W{j}" for j in range(1, 9)))


def w_state() -> StateVector:
    """The standard W state (|001> + |010> + |100>)/sqrt(3)."""
    return w_basis()[0]


@lru_cache(maxsize=None)
def ghz_basis() -> OrthonormalBasis:
    """(|ijk> +/- |not ijk>)/sqrt(2) with i = 0, jk ascending, + before -."""
    members, labels = [], []
    for j, k in product((0, 1), repeat=2):
        bits = f"0{j}{k}"
        flipped = "".join("1" if c == "0" else "0" for c in bits)
        for sign, tag in ((+1, "+"), (-1, "-")):
            members.append(_from_terms(((+1, bits), (sign, flipped))))
            labels.append(f"GHZ{tag}_{bits}")
    return OrthonormalBasis(tuple(members), tuple(labels))


def bell_pair(a: float, theta: float = 0.0) -> StateVector:
    """a|00> + b|11> with b = sqrt(1 - a^2) exp(i theta)."""
    if not 0.0 <= a <= 1.0:
        raise ValueError(f"amplitude a must lie in [0, 1], got {a!r}")
    b = np.sqrt(max(0.0, 1.0 - a * a)) * np.exp(1j * theta)
    return StateVector.normalized([a, 0, 0, b])


def local_operator(*factors: str) -> Unitary:
    """Tensor product of named single-qubit operators, e.g. ``local_operator("I", "Z", "X")``."""
    m = np.ones((1, 1), dtype=complex)
    for name in factors:
        m = np.kron(m, SINGLE_QUBIT_OPS[name])
    return Unitary(m)


@lru_cache(maxsize=None)
def correction_unitary(outcome: int) -> Unitary:
    """LOCC correction on B after W outcome ``outcome`` (1-based)."""
    if outcome not in CORRECTION_FACTORS:
        raise ValueError(f"outcome must be in 1..8, got {outcome!r}")
    return local_operator(*CORRECTION_FACTORS[outcome])


def correction_table() -> tuple:
    return tuple(correction_unitary(j) for j in range(1, 9))


def validate_orthonormality(basis) -> float:
    return gram_deviation(list(basis))
