"""Hybrid variational loop: per-cable sampling VQE and the decomposed solve.

Each cable block is solved independently: prepare the ansatz state, measure
(or use the exact distribution when shots=0), estimate the expected block
energy, and let a derivative-free simplex optimizer update the angles.  The
optimizer steers on the expectation; the returned bitstring is the best
energy sample observed anywhere in the run, which never discards a lucky
measurement.  Per-cable results merge additively into the global assignment.

Everything is deterministic given (instance, kappa, config, seed): the master
seed is expanded into independent per-cable and per-purpose substreams.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .instance import Instance
from .oracle import FeasibilityReport, check_feasibility, chosen_objective
from .quantum import AnsatzSpec, estimate_energy, exact_distribution, prepare_state, sample
from .qubo import CableQubo, build_cable_qubo, default_penalties, qubo_energy, scale_penalties

__all__ = [
    "VqeConfig",
    "OptTrace",
    "SolveResult",
    "GlobalAssignment",
    "minimize",
    "vqe_solve",
    "solve_decomposed",
    "cable_subseed",
    "STATEVECTOR_DIM_CAP",
]

STATEVECTOR_DIM_CAP = 24


@dataclass(frozen=True)
class VqeConfig:
    """Solver settings; defaults match the benchmark protocol.

    ``shots=0`` is a sentinel for sampling-free runs on the exact measurement
    distribution.  ``maxiter`` bounds objective evaluations.  ``theta_init``
    is "uniform" (angles uniform in [0, 2pi)) or "zeros".
    """

    shots: int = 1000
    reps: int = 1
    maxiter: int = 100
    seed: int = 0
    ftol: float = 1e-6
    theta_init: str = "uniform"

    def __post_init__(self) -> None:
        if self.shots < 0:
            raise ValueError("shots must be nonnegative (0 = exact distribution)")
        if self.maxiter < 1:
            raise ValueError("maxiter must be positive")
        if self.ftol <= 0:
            raise ValueError("ftol must be positive")
        if self.theta_init not in ("uniform", "zeros"):
            raise ValueError("theta_init must be 'uniform' or 'zeros'")


@dataclass
class OptTrace:
    """Objective values in evaluation order, plus loop accounting."""

    values: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False


class _BudgetExhausted(Exception):
    pass


def minimize(
    fn: Callable[[np.ndarray], float],
    dim: int,
    config: VqeConfig,
    rng: np.random.Generator,
) -> tuple[np.ndarray, float, OptTrace]:
    """Budgeted Nelder-Mead simplex descent.

    Runs for at most ``config.maxiter`` objective evaluations.  Every full
    update cycle (dim + 1 simplex iterations) convergence is checked: the run
    ends early once the best value improved by less than ``config.ftol`` over
    the cycle and the simplex values have collapsed to within ``config.ftol``
    of each other.  (The spread condition keeps episodic non-improving cycles,
    common mid-descent, from stopping the run while the simplex is still
    large.)  Deterministic given (config, rng state).  Returns the best point,
    its value, and the evaluation trace.
    """
    if dim < 1:
        raise ValueError("dim must be positive")
    trace = OptTrace()
    best_x: np.ndarray | None = None
    best_f = np.inf

    def evaluate(x: np.ndarray) -> float:
        nonlocal best_x, best_f
        if len(trace.values) >= config.maxiter:
            raise _BudgetExhausted
        value = float(fn(x))
        trace.values.append(value)
        if value < best_f:
            best_f = value
            best_x = x.copy()
        return value

    if config.theta_init == "uniform":
        x0 = rng.random(dim) * 2.0 * np.pi
    else:
        x0 = np.zeros(dim)

    step = 0.5
    vertices = [x0]
    values: list[float] = []
    try:
        values.append(evaluate(x0))
        for i in range(dim):
            point = x0.copy()
            point[i] += step
            vertices.append(point)
            values.append(evaluate(point))
    except _BudgetExhausted:
        assert best_x is not None
        return best_x, best_f, trace

    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5
    cycle = dim + 1
    best_at_check = best_f
    try:
        while len(trace.values) < config.maxiter:
            order = np.argsort(values, kind="stable")
            vertices = [vertices[i] for i in order]
            values = [values[i] for i in order]
            centroid = np.mean(vertices[:-1], axis=0)
            worst = vertices[-1]

            reflected = centroid + alpha * (centroid - worst)
            f_reflected = evaluate(reflected)
            if f_reflected < values[0]:
                expanded = centroid + gamma * (centroid - worst)
                f_expanded = evaluate(expanded)
                if f_expanded < f_reflected:
                    vertices[-1], values[-1] = expanded, f_expanded
                else:
                    vertices[-1], values[-1] = reflected, f_reflected
            elif f_reflected < values[-2]:
                vertices[-1], values[-1] = reflected, f_reflected
            else:
                if f_reflected < values[-1]:
                    contracted = centroid + rho * (reflected - centroid)
                else:
                    contracted = centroid + rho * (worst - centroid)
                f_contracted = evaluate(contracted)
                if f_contracted < min(f_reflected, values[-1]):
                    vertices[-1], values[-1] = contracted, f_contracted
                else:
                    for i in range(1, len(vertices)):
                        vertices[i] = vertices[0] + sigma * (vertices[i] - vertices[0])
                        values[i] = evaluate(vertices[i])

            trace.iterations += 1
            if trace.iterations % cycle == 0:
                spread = max(values) - min(values)
                if best_at_check - best_f < config.ftol and spread < config.ftol:
                    trace.converged = True
                    break
                best_at_check = best_f
    except _BudgetExhausted:
        pass

    assert best_x is not None
    return best_x, best_f, trace


@dataclass(frozen=True)
class SolveResult:
    """Outcome of one cable solve."""

    cable_id: str
    bitstring: str
    energy: float
    e_exp_final: float
    feasibility: FeasibilityReport
    objective: float | None
    iterations_used: int
    evaluations_used: int
    seed: int


@dataclass(frozen=True)
class GlobalAssignment:
    """Merged per-cable solutions; energies add because blocks never couple."""

    results: tuple[SolveResult, ...]
    total_energy: float
    all_feasible: bool

    @property
    def bitstring(self) -> str:
        return "".join(r.bitstring for r in self.results)


def vqe_solve(q: CableQubo, config: VqeConfig, instance: Instance) -> SolveResult:
    """Variationally minimize one cable block.

    The instance is needed to decode feasibility and routing cost of the
    returned bitstring; the cable is looked up by the block's cable id.
    """
    if q.dim > STATEVECTOR_DIM_CAP:
        raise ValueError(f"dimension {q.dim} exceeds statevector cap {STATEVECTOR_DIM_CAP}")
    cable = instance.cable(q.cable_id)
    spec = AnsatzSpec(num_qubits=q.dim, reps=config.reps)
    theta_stream, sample_stream = np.random.SeedSequence(config.seed).spawn(2)
    theta_rng = np.random.default_rng(theta_stream)
    sample_rng = np.random.default_rng(sample_stream)

    best_bits: str | None = None
    best_energy = np.inf

    def objective(theta: np.ndarray) -> float:
        nonlocal best_bits, best_energy
        state = prepare_state(spec, theta)
        if config.shots == 0:
            weights = exact_distribution(state)
        else:
            weights = sample(state, config.shots, sample_rng)
        e_exp, (bits, energy) = estimate_energy(weights, q)
        if energy < best_energy or (energy == best_energy and (best_bits is None or bits < best_bits)):
            best_energy = energy
            best_bits = bits
        return e_exp

    _, e_star, trace = minimize(objective, spec.parameter_count, config, theta_rng)
    assert best_bits is not None
    feasibility = check_feasibility(instance, cable, best_bits)
    objective_value = (
        chosen_objective(instance, cable, best_bits) if feasibility.feasible_path else None
    )
    return SolveResult(
        cable_id=q.cable_id,
        bitstring=best_bits,
        energy=qubo_energy(q, best_bits),
        e_exp_final=e_star,
        feasibility=feasibility,
        objective=objective_value,
        iterations_used=trace.iterations,
        evaluations_used=len(trace.values),
        seed=config.seed,
    )


def cable_subseed(master_seed: int, cable_index: int) -> int:
    """Expand the master seed into one independent stream seed per cable."""
    return int(np.random.SeedSequence((master_seed, cable_index)).generate_state(1, np.uint64)[0])


def solve_decomposed(instance: Instance, kappa: float, config: VqeConfig) -> GlobalAssignment:
    """Solve every cable block independently and merge.

    Per cable: derive baseline penalties, scale them by ``kappa``, build the
    block, and run the VQE with a per-cable subseed.  The per-run qubit
    requirement is the largest single block, never the sum.
    """
    results = []
    for index, cable in enumerate(instance.cables):
        penalties = scale_penalties(default_penalties(instance, cable), kappa)
        block = build_cable_qubo(instance, cable, penalties)
        sub_config = replace(config, seed=cable_subseed(config.seed, index))
        results.append(vqe_solve(block, sub_config, instance))
    return GlobalAssignment(
        results=tuple(results),
        total_energy=sum(r.energy for r in results),
        all_feasible=all(r.feasibility.feasible_path for r in results),
    )
