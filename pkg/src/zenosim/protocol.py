"""End-to-end protection experiments.

A cycle is prepare -> encode -> noisy evolution -> decode -> ancilla
measurement.  All reported statistics are exact Born probabilities on the
postselected (no-error) branch; sampling is layered on top purely for
realism and is always seeded.

Repeated-measurement runs split the total noise strength over k cycles.
Under the default "reset" policy each cycle sees a fresh environment,
which is tracked exactly by carrying the system's density matrix between
cycles and rerunning its eigenvectors as pure states; "persist" keeps one
environment entangled across the whole run as a single pure state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation
from .fitting import PowerLawFit, fit_power_law
from .noise import NoiseModel, noise_unitary, random_model
from .statevec import (
    StateVector,
    apply,
    basis_state,
    branch_vector,
    overlap_probability,
    postselect,
    product_state,
    projection_probabilities,
    protected_register,
)
from .zeno_code import ZenoCode, decode, encode, prepare
from .heisenberg import controlled_flip


@dataclass(frozen=True)
class CycleResult:
    """Exact statistics of one protection cycle."""

    success_probability: float
    conditional_fidelity: float
    failure_probability: float
    syndrome_probabilities: tuple[float, float, float, float]
    sampled_syndrome: int

    def __post_init__(self):
        for value in (self.success_probability, self.conditional_fidelity, self.failure_probability):
            if not -1e-12 <= value <= 1 + 1e-12:
                raise ContractViolation(f"probability {value} outside [0, 1]")


@dataclass(frozen=True)
class RunResult:
    """A k-cycle repeated-measurement run, conditioned on every syndrome reading 0."""

    cycles: int
    epsilon_per_cycle: float
    env_policy: str
    per_cycle: tuple[CycleResult, ...]
    cumulative_success: float
    cumulative_failure: float
    final_conditional_fidelity: float


@dataclass(frozen=True)
class SweepRow:
    x: float
    failure_probability: float
    infidelity: float


@dataclass(frozen=True)
class SweepTable:
    """Sweep rows plus the log-log fit of the chosen observable."""

    observable: str
    rows: tuple[SweepRow, ...]
    fit: PowerLawFit | None
    status: str  # "ok" | "floor"


@dataclass(frozen=True)
class TwoTimeResult:
    """Joint outcome distribution of the paired two-time comparisons."""

    systems: int
    epsilon: float
    labels: tuple[tuple[tuple[int, int], ...], ...]
    probabilities: np.ndarray
    sampled_outcome: int

    @property
    def success_probability(self) -> float:
        """Probability that every comparison reads 0 (no change detected)."""
        return float(self.probabilities[0])

    @property
    def other_outcome_mass(self) -> float:
        return float(1.0 - self.probabilities[0])


def _attach_environment(state: StateVector, n: int) -> StateVector:
    env = basis_state(n)
    return product_state(state, env, layout=protected_register(n))


def _cycle_state(code: ZenoCode, state: StateVector, model: NoiseModel, epsilon: float) -> StateVector:
    state = encode(code, state)
    state = apply(noise_unitary(model, epsilon), state)
    return decode(code, state)


def single_cycle(
    code: ZenoCode,
    model: NoiseModel,
    psi: StateVector,
    rng_seed: int,
    epsilon: float | None = None,
) -> CycleResult:
    """Run one protection cycle and report its exact statistics.

    The syndrome sample drawn from `rng_seed` is recorded but never enters
    the probabilities or the fidelity, which are computed from the full
    postselected branch.
    """
    if model.n != code.n:
        raise ContractViolation(f"noise model has n={model.n} but code has n={code.n}")
    eps = model.epsilon if epsilon is None else epsilon
    reference = prepare(code, psi)
    state = _attach_environment(reference, code.n)
    state = _cycle_state(code, state, model, eps)
    probs = projection_probabilities(state, (0, 1), code.syndrome_basis)
    _, post = postselect(state, (0, 1), code.in_state)
    fidelity = overlap_probability(post, reference)
    sampled = int(np.random.default_rng(rng_seed).choice(4, p=probs / probs.sum()))
    return CycleResult(
        success_probability=float(probs[0]),
        conditional_fidelity=float(fidelity),
        failure_probability=float(1.0 - probs[0]),
        syndrome_probabilities=tuple(float(p) for p in probs),
        sampled_syndrome=sampled,
    )


def _reset_policy_run(code, model, eps_c, cycles, psi, rng) -> tuple[list[CycleResult], float]:
    n = code.n
    dim = 2**n
    rho = np.outer(psi.amplitudes, psi.amplitudes.conj())
    results = []
    for _ in range(cycles):
        weights, vectors = np.linalg.eigh(rho)
        probs = np.zeros(4)
        rho_next = np.zeros((dim, dim), dtype=complex)
        for w, v in zip(weights, vectors.T):
            if w < 1e-14:
                continue
            pure = product_state(code.in_state, v, basis_state(n).amplitudes)
            out = _cycle_state(code, pure, model, eps_c)
            probs += w * projection_probabilities(out, (0, 1), code.syndrome_basis)
            rest = branch_vector(out, (0, 1), code.in_state).amplitudes
            block = rest.reshape(dim, dim)  # environment index above system index
            rho_next += w * (block.T @ block.conj())
        p0 = float(probs[0])
        rho = rho_next / p0
        fidelity = float((psi.amplitudes.conj() @ rho @ psi.amplitudes).real)
        sampled = int(rng.choice(4, p=probs / probs.sum()))
        results.append(
            CycleResult(p0, fidelity, float(1.0 - p0), tuple(float(p) for p in probs), sampled)
        )
    return results, results[-1].conditional_fidelity


def _persist_policy_run(code, model, eps_c, cycles, psi, rng) -> tuple[list[CycleResult], float]:
    reference = prepare(code, psi)
    state = _attach_environment(reference, code.n)
    results = []
    fidelity = 1.0
    for _ in range(cycles):
        state = _cycle_state(code, state, model, eps_c)
        probs = projection_probabilities(state, (0, 1), code.syndrome_basis)
        _, state = postselect(state, (0, 1), code.in_state)
        fidelity = overlap_probability(state, reference)
        sampled = int(rng.choice(4, p=probs / probs.sum()))
        results.append(
            CycleResult(
                float(probs[0]), float(fidelity), float(1.0 - probs[0]),
                tuple(float(p) for p in probs), sampled,
            )
        )
    return results, float(fidelity)


def zeno_run(
    code: ZenoCode,
    model: NoiseModel,
    total_epsilon: float,
    cycles: int,
    env_policy: str = "reset",
    rng_seed: int = 0,
    psi: StateVector | None = None,
) -> RunResult:
    """Split the noise over `cycles` measured intervals and track the no-error branch.

    Per-cycle strength is total_epsilon / cycles, so larger k means more
    frequent measurement of the same total disturbance; the cumulative
    failure shrinks roughly like 1/k.
    """
    if not isinstance(cycles, int) or cycles < 1:
        raise ContractViolation(f"cycle count must be a positive integer, got {cycles!r}")
    if env_policy not in ("reset", "persist"):
        raise ContractViolation(f"env_policy must be 'reset' or 'persist', got {env_policy!r}")
    if model.n != code.n:
        raise ContractViolation(f"noise model has n={model.n} but code has n={code.n}")
    if psi is None:
        psi = basis_state(code.n)
    eps_c = total_epsilon / cycles
    rng = np.random.default_rng(rng_seed)
    runner = _reset_policy_run if env_policy == "reset" else _persist_policy_run
    per_cycle, final_fidelity = runner(code, model, eps_c, cycles, psi, rng)
    cumulative = float(np.prod([c.success_probability for c in per_cycle]))
    return RunResult(
        cycles=cycles,
        epsilon_per_cycle=eps_c,
        env_policy=env_policy,
        per_cycle=tuple(per_cycle),
        cumulative_success=cumulative,
        cumulative_failure=float(1.0 - cumulative),
        final_conditional_fidelity=final_fidelity,
    )


def epsilon_sweep(
    code: ZenoCode,
    model_or_seed,
    epsilons,
    psi: StateVector | None = None,
    observable: str = "failure",
    rng_seed: int = 0,
) -> SweepTable:
    """Exact single-cycle statistics across a strength grid, with a power-law fit.

    `model_or_seed` is either a NoiseModel or an integer seed for a random
    one.  Points whose observable sits at the numerical floor are excluded
    from the fit; if too few remain the table carries a "floor" status and
    no fit.
    """
    if observable not in ("failure", "infidelity"):
        raise ContractViolation(f"observable must be 'failure' or 'infidelity', got {observable!r}")
    eps = np.asarray(list(epsilons), dtype=float)
    if eps.size < 4:
        raise ContractViolation("need at least four sweep points")
    if np.any(eps <= 0):
        raise ContractViolation("sweep strengths must be positive")
    if eps.max() / eps.min() < 10.0:
        raise ContractViolation("sweep must span at least one decade")
    model = model_or_seed if isinstance(model_or_seed, NoiseModel) else random_model(code.n, int(model_or_seed))
    if psi is None:
        psi = basis_state(code.n)
    rows = []
    for e in eps:
        cycle = single_cycle(code, model, psi, rng_seed, epsilon=float(e))
        rows.append(SweepRow(float(e), cycle.failure_probability, 1.0 - cycle.conditional_fidelity))
    values = [r.failure_probability if observable == "failure" else r.infidelity for r in rows]
    fit = fit_power_law(eps, values)
    status = "ok" if fit is not None else "floor"
    return SweepTable(observable, tuple(rows), fit, status)


def _plus_state() -> np.ndarray:
    return np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)


def _comparison_basis(num_tests: int) -> np.ndarray:
    """Outcome basis: each test qubit read out as unchanged (+) or flipped (-)."""
    single = np.column_stack(
        [np.array([1, 1], dtype=complex) / np.sqrt(2), np.array([1, -1], dtype=complex) / np.sqrt(2)]
    )
    basis = np.array([[1.0 + 0j]])
    for _ in range(num_tests):
        basis = np.kron(single, basis)
    return basis


def two_time_protocol(
    disturbance: NoiseModel,
    epsilon: float,
    rng_seed: int,
    psi: StateVector | None = None,
) -> TwoTimeResult:
    """Compare each system's x and y components at two times with test qubits.

    Per system, one test qubit couples through an x-type controlled flip
    before and after the disturbance window and another through a y-type
    flip at nested instants in between; a test qubit found flipped means
    the corresponding two-time difference read 2 instead of 0.  With two
    systems the second pair's couplings are staggered just outside the
    first pair's, giving the 4 x 4 joint outcome grid.
    """
    n = disturbance.n
    if n not in (1, 2):
        raise ContractViolation("the two-time protocol is implemented for 1 or 2 systems")
    if psi is None:
        psi = basis_state(n)
    if psi.num_qubits != n:
        raise ContractViolation(f"system state has {psi.num_qubits} qubits, expected {n}")
    num_tests = 2 * n
    plus = _plus_state()
    state = product_state(*([plus] * num_tests), psi, basis_state(n).amplitudes)

    def flip(letter: str, pair: int):
        control = 2 * pair + (0 if letter == "x" else 1)
        target = num_tests + pair
        return controlled_flip(letter).retargeted((control, target))

    # ascending time: outer pair (highest index) couples first and last
    pre = [flip("x", p) for p in reversed(range(n))] + [flip("y", p) for p in reversed(range(n))]
    post = [flip("y", p) for p in range(n)] + [flip("x", p) for p in range(n)]
    for gate in pre:
        state = apply(gate, state)
    u = noise_unitary(disturbance, epsilon)
    sys_env = tuple(range(num_tests, num_tests + 2 * n))
    state = apply(u.retargeted(sys_env), state)
    for gate in post:
        state = apply(gate, state)

    basis = _comparison_basis(num_tests)
    probs = projection_probabilities(state, tuple(range(num_tests)), basis)
    labels = []
    for outcome in range(4**n):
        per_pair = tuple(
            (2 * ((outcome >> (2 * p)) & 1), 2 * ((outcome >> (2 * p + 1)) & 1))
            for p in range(n)
        )
        labels.append(per_pair)
    sampled = int(np.random.default_rng(rng_seed).choice(4**n, p=probs / probs.sum()))
    return TwoTimeResult(n, float(epsilon), tuple(labels), probs, sampled)


#: Syndrome letter -> two-time outcome index for one system (x and y comparisons).
SYNDROME_TO_TWO_TIME = {0: 0, 1: 2, 2: 1, 3: 3}
