"""Verification harness: brute-force oracles, Monte Carlo, sweeps and yields.

The oracles work from raw amplitudes only (state construction, branch
enumeration, corrections) and never touch the closed forms in
:mod:`wlift.protocol`, so agreement between the two is a real check.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import protocol
from .bases import correction_unitary, local_operator, w_basis, w_state
from .protocol import PostselectionPolicy, SourceSpec
from .qcore import (
    DensityMatrix,
    StateVector,
    apply_unitary,
    branch_decompose,
    condition_on_outcome,
    density_from_ensemble,
    overlap,
    sample_outcomes,
)

DEFAULT_A2_GRID = tuple(round(0.05 * k, 2) for k in range(1, 20))
DEFAULT_THETA_GRID = tuple(
    sorted({0.0, math.pi / 8, -math.pi / 8, math.pi / 5, -math.pi / 5,
            math.pi / 4, -math.pi / 4, 0.49 * math.pi, -0.49 * math.pi})
)
DEFAULT_F_GRID = (0.0, 0.1, 0.2, 0.5)

MC_BLOCK = 10_000
SIGMA_BOUND = 5.0


def default_grid(thetas: Sequence[float] = DEFAULT_THETA_GRID) -> list[SourceSpec]:
    return [SourceSpec.from_a2(a2, th) for a2 in DEFAULT_A2_GRID for th in thetas]


@dataclass(frozen=True, eq=False)
class OracleResult:
    probs: np.ndarray
    post_locc_states: tuple
    rho: DensityMatrix


def brute_force_oracle(spec: SourceSpec) -> OracleResult:
    """Enumerate all eight W-basis branches of the 64-dim source and correct each."""
    state = protocol.prepared_state(spec)
    probs, states = [], []
    for j, (p, residual) in enumerate(branch_decompose(state, w_basis()), start=1):
        probs.append(p)
        states.append(None if residual is None else apply_unitary(residual, correction_unitary(j)))
    rho = density_from_ensemble(zip(probs, states))
    return OracleResult(np.array(probs), tuple(states), rho)


def noisy_source_density(spec: SourceSpec) -> np.ndarray:
    """(1 - f)|Phi0><Phi0| + f I/64 with A particles first."""
    phi = protocol.prepared_state(spec.noiseless()).amplitudes
    f = spec.noise_f
    return (1.0 - f) * np.outer(phi, phi.conj()) + f * np.eye(64) / 64.0


def noisy_push_through(spec: SourceSpec) -> DensityMatrix:
    """Measure A of the 64-dim noisy source branch by branch and apply each correction."""
    source = noisy_source_density(spec)
    total = np.zeros((8, 8), dtype=complex)
    for j, member in enumerate(w_basis(), start=1):
        u = correction_unitary(j).matrix
        total += u @ condition_on_outcome(source, member) @ u.conj().T
    return DensityMatrix((total + total.conj().T) / 2)


@dataclass(frozen=True)
class EnsembleReport:
    spec: SourceSpec
    n_shots: int
    empirical_probs: tuple
    analytic_probs: tuple
    empirical_fidelity: float
    analytic_fidelity: float
    accepted_fraction: float
    seed: Optional[int]
    policy: str = PostselectionPolicy.KEEP_ALL.value
    analytic_accepted_fraction: float = 1.0
    outcome_labels: tuple = field(default_factory=lambda: tuple(w_basis().labels))

    @property
    def counts(self) -> tuple:
        return tuple(int(round(p * self.n_shots)) for p in self.empirical_probs)

    def sigma(self, p: float) -> float:
        """Binomial standard deviation of an empirical frequency with true value ``p``."""
        return math.sqrt(p * (1.0 - p) / self.n_shots)

    def within_bound(self, k: float = SIGMA_BOUND) -> bool:
        probs_ok = all(
            abs(e - p) <= k * self.sigma(p) + 1e-15
            for e, p in zip(self.empirical_probs, self.analytic_probs)
        )
        q = self.analytic_accepted_fraction
        return probs_ok and abs(self.accepted_fraction - q) <= k * self.sigma(q) + 1e-15


def block_generators(seed: int, n_blocks: int) -> list[np.random.Generator]:
    """Independent per-block generators derived deterministically from ``seed``."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n_blocks)]


def monte_carlo(
    spec: SourceSpec,
    n_shots: int,
    seed: int,
    policy: PostselectionPolicy = PostselectionPolicy.KEEP_ALL,
) -> EnsembleReport:
    """Sample ``n_shots`` protocol runs in seeded blocks of ``MC_BLOCK`` shots."""
    if n_shots < 1:
        raise ValueError("n_shots must be at least 1")
    policy = PostselectionPolicy(policy)
    state = protocol.prepared_state(spec)
    basis = w_basis()

    # Sampling draws outcomes only; the corrected state is a function of the outcome.
    fid = np.zeros(8)
    for j, (p, residual) in enumerate(branch_decompose(state, basis), start=1):
        if residual is not None:
            fid[j - 1] = overlap(w_state(), apply_unitary(residual, correction_unitary(j))) ** 2

    n_blocks = -(-n_shots // MC_BLOCK)
    counts = np.zeros(8, dtype=np.int64)
    for b, rng in enumerate(block_generators(seed, n_blocks)):
        size = min(MC_BLOCK, n_shots - b * MC_BLOCK)
        counts += np.bincount(sample_outcomes(state, basis, rng, size), minlength=8)

    keep = np.array([policy.accepts(j) for j in range(1, 9)])
    accepted = int(counts[keep].sum())
    emp_fid = float(counts[keep] @ fid[keep] / accepted) if accepted else float("nan")

    analytic = protocol.outcome_probabilities(spec)
    if policy is PostselectionPolicy.KEEP_ALL:
        analytic_fid, analytic_acc = protocol.analytic_fidelity(spec), 1.0
    else:
        analytic_fid = 1.0
        analytic_acc = float(analytic[keep].sum())
    return EnsembleReport(
        spec=spec,
        n_shots=n_shots,
        empirical_probs=tuple(float(c) / n_shots for c in counts),
        analytic_probs=tuple(float(p) for p in analytic),
        empirical_fidelity=emp_fid,
        analytic_fidelity=float(analytic_fid),
        accepted_fraction=accepted / n_shots,
        seed=seed,
        policy=policy.value,
        analytic_accepted_fraction=analytic_acc,
    )


@dataclass(frozen=True)
class SweepRecord:
    a: float
    theta: float
    f: float
    F: float
    F0: float
    P: float
    K_derived: float
    K_paper: float

    @property
    def a2(self) -> float:
        return self.a * self.a


def sweep(
    a2_grid: Sequence[float] = DEFAULT_A2_GRID,
    theta_grid: Sequence[float] = DEFAULT_THETA_GRID,
    f_grid: Sequence[float] = (0.0,),
) -> list[SweepRecord]:
    """Closed-form figures of merit over the grid, sorted by (a^2, theta, f).

    With white noise, ``F`` and ``F0`` are the fidelities of the noisy product
    and the noisy source.
    """
    if not (a2_grid and theta_grid and f_grid):
        raise ValueError("sweep grids must be nonempty")
    records = []
    for a2 in sorted(a2_grid):
        for theta in sorted(theta_grid):
            for f in sorted(f_grid):
                spec = SourceSpec.from_a2(a2, theta, f)
                records.append(SweepRecord(
                    a=spec.a, theta=theta, f=f,
                    F=protocol.noisy_fidelity(spec),
                    F0=protocol.noisy_source_fidelity(spec),
                    P=protocol.postselection_success_probability(spec),
                    K_derived=protocol.coherence_K(spec),
                    K_paper=protocol.coherence_K_printed(spec),
                ))
    return records


@dataclass(frozen=True)
class YieldEstimate:
    expected_perfect_w: float
    paper_asymptotic: float


def yield_estimate(epsilon: float, n_pairs: int) -> YieldEstimate:
    """Expected perfect W states from ``n_pairs`` pairs eps|00> + sqrt(1-eps^2)|11>.

    Pairs are consumed in triples, each succeeding with eps^2 - eps^4. The
    published asymptotic eps^2 N / 2 is returned alongside; the two differ.
    """
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must lie in [0, 1], got {epsilon!r}")
    if n_pairs % 3:
        raise ValueError(f"n_pairs must be divisible by 3, got {n_pairs}")
    per_triple = epsilon ** 2 - epsilon ** 4
    return YieldEstimate(n_pairs // 3 * per_triple, epsilon ** 2 * n_pairs / 2)


COARSE_LABELS = ("W1", "W5", "rest")


def coarse_probabilities(spec: SourceSpec) -> tuple[np.ndarray, list[Optional[StateVector]]]:
    """Outcome probabilities of the {W1}, {W5}, {rest} measurement on A.

    Also returns the corrected B state for W1 and W5 (``None`` if impossible).
    """
    state = protocol.prepared_state(spec).amplitudes.reshape(8, 8)
    basis = w_basis()
    p1, p5 = basis[0].projector(), basis[4].projector()
    projectors = (p1, p5, np.eye(8) - p1 - p5)
    probs = np.array([np.vdot(state, P @ state).real for P in projectors])
    flip = local_operator("X", "X", "X").matrix
    accepted = []
    for member, fix in ((basis[0], np.eye(8)), (basis[4], flip)):
        residual = member.amplitudes.conj() @ state
        norm = np.linalg.norm(residual)
        accepted.append(StateVector(fix @ residual / norm) if norm > 1e-7 else None)
    return probs, accepted


def coarse_measurement_model(spec: SourceSpec, rng, n_shots: int) -> EnsembleReport:
    """Postselect on a measurement that only separates W1, W5 and the rest."""
    if n_shots < 1:
        raise ValueError("n_shots must be at least 1")
    seed = rng if isinstance(rng, (int, np.integer)) else None
    rng = np.random.default_rng(rng)
    probs, accepted_states = coarse_probabilities(spec)
    outcomes = rng.choice(3, size=n_shots, p=probs / probs.sum())
    counts = np.bincount(outcomes, minlength=3)
    n_acc = int(counts[0] + counts[1])
    fids = [0.0 if s is None else overlap(w_state(), s) ** 2 for s in accepted_states]
    emp_fid = (counts[0] * fids[0] + counts[1] * fids[1]) / n_acc if n_acc else float("nan")
    P = protocol.postselection_success_probability(spec)
    analytic = protocol.outcome_probabilities(spec)
    return EnsembleReport(
        spec=spec,
        n_shots=n_shots,
        empirical_probs=tuple(float(c) / n_shots for c in counts),
        analytic_probs=(float(analytic[0]), float(analytic[4]), float(1.0 - P)),
        empirical_fidelity=float(emp_fid),
        analytic_fidelity=1.0,
        accepted_fraction=n_acc / n_shots,
        seed=seed,
        policy=PostselectionPolicy.KEEP_W1_AND_W5.value,
        analytic_accepted_fraction=P,
        outcome_labels=COARSE_LABELS,
    )
