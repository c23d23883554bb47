"""Remote W-state preparation: source, A/B split, W-basis measurement, LOCC.

Besides the simulated pipeline this module holds the closed-form results for
the flawed source ``(a|00> + b|11>)^3``: outcome probabilities, the
postselection rate, the mixed state left without postselection and the
fidelities of source and product. Nothing here calls the brute-force oracle
in :mod:`wlift.analysis`; the two routes are compared in the tests.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .bases import correction_unitary, ghz_basis, w_basis, w_state, bell_pair
from .qcore import (
    DensityMatrix,
    QubitPermutation,
    StateVector,
    apply_unitary,
    branch_decompose,
    measure_subsystem,
    overlap,
    permute_qubits,
    tensor,
)

# Slack on the closed theta interval so that +/- pi/2 computed in floating point is admitted.
_THETA_SLACK = 1e-12

# Particles 1..6 -> positions (1, 4, 2, 5, 3, 6): A = (1, 3, 5) first, B = (2, 4, 6) last.
SPLIT_PERMUTATION = QubitPermutation((0, 3, 1, 4, 2, 5))


@dataclass(frozen=True)
class SourceSpec:
    """Per-pair amplitude ``a``, phase ``theta`` of b, and white-noise fraction."""

    a: float = 1 / math.sqrt(2)
    theta: float = 0.0
    noise_f: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.a <= 1.0:
            raise ValueError(f"a must lie in [0, 1], got {self.a!r}")
        if abs(self.theta) > math.pi / 2 + _THETA_SLACK:
            raise ValueError(f"theta must lie in [-pi/2, pi/2], got {self.theta!r}")
        if not 0.0 <= self.noise_f <= 1.0:
            raise ValueError(f"noise fraction must lie in [0, 1], got {self.noise_f!r}")

    @classmethod
    def from_a2(cls, a2: float, theta: float = 0.0, noise_f: float = 0.0) -> "SourceSpec":
        if not 0.0 <= a2 <= 1.0:
            raise ValueError(f"a^2 must lie in [0, 1], got {a2!r}")
        return cls(math.sqrt(a2), theta, noise_f)

    @property
    def a2(self) -> float:
        return self.a * self.a

    @property
    def b(self) -> complex:
        return math.sqrt(max(0.0, 1.0 - self.a2)) * complex(math.cos(self.theta), math.sin(self.theta))

    @property
    def gamma(self) -> float:
        return self.a * math.sqrt(max(0.0, 1.0 - self.a2)) * math.cos(self.theta)

    def noiseless(self) -> "SourceSpec":
        return SourceSpec(self.a, self.theta, 0.0)


IDEAL = SourceSpec()


class PostselectionPolicy(str, enum.Enum):
    KEEP_ALL = "keep-all"
    KEEP_W1_AND_W5 = "keep-W1-and-W5"
    KEEP_W1_ONLY = "keep-W1-only"

    def accepts(self, outcome: int) -> bool:
        if self is PostselectionPolicy.KEEP_ALL:
            return True
        if self is PostselectionPolicy.KEEP_W1_AND_W5:
            return outcome in (1, 5)
        return outcome == 1

    def accepted_outcomes(self) -> tuple:
        return tuple(j for j in range(1, 9) if self.accepts(j))


@dataclass(frozen=True)
class RunOutcome:
    """One shot: the 1-based outcome, its probability and the corrected state of B.

    ``fidelity`` is measured against ``target`` (``"W1"`` for the W protocol,
    the correlated GHZ partner label for the GHZ variant).
    """

    outcome_index: int
    probability: float
    post_locc_state: StateVector
    fidelity: float
    target: str = "W1"

    @property
    def fidelity_to_w1(self) -> float:
        if self.target != "W1":
            raise AttributeError(f"fidelity is measured against {self.target}, not W1")
        return self.fidelity


@dataclass(frozen=True)
class Rejected:
    """Marker for a shot discarded by postselection."""

    outcome_index: int
    probability: float


def _check_pure(spec: SourceSpec):
    if spec.noise_f != 0.0:
        raise ValueError("pure-state path requires noise_f = 0; use propagate_depolarizing_noise")


def build_source_state(spec: SourceSpec) -> StateVector:
    """Three identical pairs on particles 1..6, in physical order."""
    _check_pure(spec)
    pair = bell_pair(spec.a, spec.theta)
    return tensor(pair, pair, pair)


def split_reorder(s: StateVector) -> StateVector:
    """Bring particles 1, 3, 5 (subsystem A) to the front, 2, 4, 6 (B) to the back."""
    if s.n_qubits != 6:
        raise ValueError(f"expected a 6-qubit source state, got {s.n_qubits} qubits")
    return permute_qubits(s, SPLIT_PERMUTATION)


def prepared_state(spec: SourceSpec) -> StateVector:
    return split_reorder(build_source_state(spec))


def run_single(
    spec: SourceSpec,
    rng: np.random.Generator,
    policy: PostselectionPolicy = PostselectionPolicy.KEEP_ALL,
) -> Union[RunOutcome, Rejected]:
    _check_pure(spec)
    j, p, residual = measure_subsystem(prepared_state(spec), w_basis(), rng)
    outcome = j + 1
    if not policy.accepts(outcome):
        return Rejected(outcome, p)
    corrected = apply_unitary(residual, correction_unitary(outcome))
    return RunOutcome(outcome, p, corrected, overlap(w_state(), corrected) ** 2)


def outcome_probabilities(spec: SourceSpec) -> np.ndarray:
    """Closed-form probability of each W outcome, in basis order."""
    _check_pure(spec)
    a2 = spec.a2
    b2 = 1.0 - a2
    low = a2 * (a2 * a2 + 2 * b2 * b2) / 3
    high = b2 * (b2 * b2 + 2 * a2 * a2) / 3
    return np.array([a2 * a2 * b2, low, low, low, a2 * b2 * b2, high, high, high])


def postselection_success_probability(spec: SourceSpec) -> float:
    return spec.a2 - spec.a2 ** 2


def post_locc_coordinates(spec: SourceSpec) -> np.ndarray:
    """Unnormalized corrected B states in W-basis coordinates, one row per outcome.

    Outcomes 2-4 leave (a^2 + 2b^2) W1 + (a^2 - b^2)(+/- W6, W7, W8 pair);
    outcomes 6-8 the same with a and b exchanged; 1 and 5 leave W1.
    """
    a2 = complex(spec.a2)
    b2 = spec.b ** 2
    # W-basis indices of (+, -) in the difference left by outcomes 2/6, 3/7, 4/8.
    differences = ((7, 6), (5, 7), (6, 5))
    rows = np.zeros((8, 8), dtype=complex)
    rows[0, 0] = rows[4, 0] = 1.0
    for offset, (major, minor) in ((1, (a2 + 2 * b2, a2 - b2)), (5, (b2 + 2 * a2, b2 - a2))):
        for n, (plus, minus) in enumerate(differences):
            rows[offset + n, 0] = major
            rows[offset + n, plus] = minor
            rows[offset + n, minus] = -minor
    return rows


def _closed_form_rho_w(spec: SourceSpec) -> np.ndarray:
    probs = outcome_probabilities(spec)
    rho = np.zeros((8, 8), dtype=complex)
    for p, row in zip(probs, post_locc_coordinates(spec)):
        norm2 = np.vdot(row, row).real
        if p > 0 and norm2 > 0:
            rho += p * np.outer(row, row.conj()) / norm2
    return rho


def mixed_state_no_postselection(spec: SourceSpec) -> DensityMatrix:
    """State of B averaged over all eight corrected outcomes (computational basis).

    Use ``w_basis().represent(rho.matrix)`` for the W-basis matrix.
    """
    _check_pure(spec)
    basis = w_basis().matrix()
    rho = basis @ _closed_form_rho_w(spec) @ basis.conj().T
    return DensityMatrix((rho + rho.conj().T) / 2)


def coherence_K(spec: SourceSpec) -> float:
    """Magnitude of the W6/W7/W8 coherences, |a^2 - b^2|^2 / 9."""
    return (1.0 - 4.0 * spec.gamma ** 2) / 9.0


def coherence_K_printed(spec: SourceSpec) -> float:
    """The published closed form for the same coherences (disagrees with coherence_K)."""
    a2 = spec.a2
    return (4.0 * a2 * (1.0 - a2) * (1.0 + math.sin(spec.theta) ** 2) + 1.0) / 9.0


def analytic_fidelity(spec: SourceSpec) -> float:
    return (8.0 * spec.gamma ** 2 + 1.0) / 3.0


def source_fidelity(spec: SourceSpec) -> float:
    """Fidelity of the flawed triple with respect to the ideal EPR triple."""
    return (spec.gamma + 0.5) ** 3


def fidelity_from_source_fidelity(f0: float) -> float:
    if not 0.0 <= f0 <= 1.0:
        raise ValueError(f"source fidelity must lie in [0, 1], got {f0!r}")
    return 2.0 / 3.0 * (1.0 - 2.0 * f0 ** (1.0 / 3.0)) ** 2 + 1.0 / 3.0


def propagate_depolarizing_noise(spec: SourceSpec) -> DensityMatrix:
    """(1 - f) rho + f I/8 for the white-noise fraction f of ``spec``."""
    f = spec.noise_f
    rho = mixed_state_no_postselection(spec.noiseless()).matrix
    return DensityMatrix((1.0 - f) * rho + f * np.eye(8) / 8.0)


def noisy_fidelity(spec: SourceSpec) -> float:
    return (1.0 - spec.noise_f) * analytic_fidelity(spec) + spec.noise_f / 8.0


def noisy_source_fidelity(spec: SourceSpec) -> float:
    return (1.0 - spec.noise_f) * source_fidelity(spec) + spec.noise_f / 64.0


@dataclass(frozen=True)
class GhzBranch:
    label: str
    probability: float
    state: Optional[StateVector]
    partner_fidelity: float
    best_fidelity: float


def ghz_branches(spec: SourceSpec) -> list[GhzBranch]:
    """Every GHZ-basis outcome with the residual's fidelity to its correlated partner.

    For the ideal source outcome m on A leaves member m on B, so the partner
    of each outcome is the member with the same label.
    """
    _check_pure(spec)
    basis = ghz_basis()
    out = []
    for j, (p, psi) in enumerate(branch_decompose(prepared_state(spec), basis)):
        if psi is None:
            out.append(GhzBranch(basis.labels[j], p, None, 0.0, 0.0))
            continue
        fids = [overlap(m, psi) ** 2 for m in basis]
        out.append(GhzBranch(basis.labels[j], p, psi, fids[j], max(fids)))
    return out


def run_ghz_variant(spec: SourceSpec, rng: np.random.Generator) -> RunOutcome:
    _check_pure(spec)
    basis = ghz_basis()
    j, p, residual = measure_subsystem(prepared_state(spec), basis, rng)
    return RunOutcome(j + 1, p, residual, overlap(basis[j], residual) ** 2, basis.labels[j])
