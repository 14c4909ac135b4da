"""Dense complex state vectors and operators on little-endian qubit registers.

Conventions used everywhere in this package:

* basis index I of an m-qubit register has bit q equal to the state of
  qubit q, so qubit 0 is the least significant bit;
* an operator's matrix uses the same rule over its target list: the first
  listed target is the least significant bit of the matrix index.  Listing
  a block's qubits in ascending order therefore keeps the block matrix in
  register order, and ``np.kron(high, low)`` composes blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import ContractViolation

NORM_TOL = 1e-12


@dataclass(frozen=True)
class Register:
    """Named, ordered qubit blocks, lowest block first."""

    blocks: tuple[tuple[str, int], ...]

    @property
    def num_qubits(self) -> int:
        return sum(size for _, size in self.blocks)

    def qubits(self, name: str) -> tuple[int, ...]:
        start = 0
        for block, size in self.blocks:
            if block == name:
                return tuple(range(start, start + size))
            start += size
        raise KeyError(f"no block named {name!r}")


def protected_register(n: int, environment: bool = True) -> Register:
    """ancilla(2) | system(n) | environment(n) layout used by the code."""
    blocks = [("ancilla", 2), ("system", n)]
    if environment:
        blocks.append(("environment", n))
    return Register(tuple(blocks))


@dataclass
class StateVector:
    """Complex amplitudes over a little-endian qubit register."""

    amplitudes: np.ndarray
    layout: Register | None = None

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size == 0 or amps.size & (amps.size - 1):
            raise ContractViolation(
                f"amplitude array length must be a power of two, got {amps.size}"
            )
        self.amplitudes = amps

    @property
    def num_qubits(self) -> int:
        return int(self.amplitudes.size).bit_length() - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def normalized(self) -> "StateVector":
        nrm = self.norm()
        if nrm == 0.0:
            raise ContractViolation("cannot normalize a zero vector")
        return StateVector(self.amplitudes / nrm, self.layout)

    def copy(self) -> "StateVector":
        return StateVector(self.amplitudes.copy(), self.layout)


def basis_state(num_qubits: int, index: int = 0, layout: Register | None = None) -> StateVector:
    amps = np.zeros(2**num_qubits, dtype=complex)
    amps[index] = 1.0
    return StateVector(amps, layout)


def product_state(*parts, layout: Register | None = None) -> StateVector:
    """Tensor product of amplitude blocks, first part on the lowest qubits."""
    amps = np.array([1.0 + 0j])
    for part in parts:
        block = part.amplitudes if isinstance(part, StateVector) else np.asarray(part, dtype=complex)
        amps = np.kron(block, amps)
    return StateVector(amps, layout)


def random_state(num_qubits: int, seed: int, layout: Register | None = None) -> StateVector:
    rng = np.random.default_rng(seed)
    amps = rng.normal(size=2**num_qubits) + 1j * rng.normal(size=2**num_qubits)
    return StateVector(amps / np.linalg.norm(amps), layout)


@dataclass
class DenseOperator:
    """Square complex matrix acting on an ordered list of target qubits."""

    matrix: np.ndarray
    target_qubits: tuple[int, ...]
    hermitian: bool = False
    unitary: bool = False

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        targets = tuple(self.target_qubits)
        k = len(targets)
        if len(set(targets)) != k:
            raise ContractViolation(f"duplicate target qubits in {targets}")
        if mat.shape != (2**k, 2**k):
            raise ContractViolation(
                f"matrix shape {mat.shape} does not match {k} target qubits"
            )
        if self.hermitian and np.abs(mat - mat.conj().T).max() > NORM_TOL:
            raise ContractViolation("hermitian flag set on a non-hermitian matrix")
        if self.unitary:
            defect = np.abs(mat.conj().T @ mat - np.eye(2**k)).max()
            if defect > NORM_TOL:
                raise ContractViolation(
                    f"unitary flag set but max |U+U - 1| = {defect:.3e}"
                )
        self.matrix = mat
        self.target_qubits = targets

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def retargeted(self, targets) -> "DenseOperator":
        return replace(self, target_qubits=tuple(targets))

    def dagger(self) -> "DenseOperator":
        return replace(self, matrix=self.matrix.conj().T)


def apply(op: DenseOperator, state: StateVector) -> StateVector:
    """Apply `op` on its target qubits, identity on the rest."""
    m = state.num_qubits
    k = len(op.target_qubits)
    if any(q < 0 or q >= m for q in op.target_qubits):
        raise ContractViolation(
            f"targets {op.target_qubits} out of range for a {m}-qubit register"
        )
    psi = state.amplitudes.reshape([2] * m)  # axis j <-> qubit m-1-j
    tens = op.matrix.reshape([2] * (2 * k))
    in_axes = [2 * k - 1 - t for t in range(k)]
    state_axes = [m - 1 - q for q in op.target_qubits]
    out = np.tensordot(tens, psi, axes=(in_axes, state_axes))
    # tensordot leaves the op's output axes first: axis u <-> target k-1-u
    dest = [m - 1 - op.target_qubits[k - 1 - u] for u in range(k)]
    out = np.moveaxis(out, range(k), dest)
    return StateVector(out.reshape(-1), state.layout)


def operator_on_register(matrix, targets, num_qubits: int) -> np.ndarray:
    """Full 2^m matrix acting as `matrix` on `targets` and identity elsewhere."""
    targets = tuple(targets)
    k = len(targets)
    mat = np.asarray(matrix, dtype=complex)
    if mat.shape != (2**k, 2**k):
        raise ContractViolation(f"matrix shape {mat.shape} does not match targets {targets}")
    rest = [q for q in range(num_qubits) if q not in targets]
    big = np.kron(np.eye(2 ** len(rest), dtype=complex), mat)
    # big index = (rest bits high | target bits low); map global index into it
    idx = np.arange(2**num_qubits)
    j = np.zeros_like(idx)
    for t, q in enumerate(targets):
        j |= ((idx >> q) & 1) << t
    for u, q in enumerate(rest):
        j |= ((idx >> q) & 1) << (k + u)
    return big[np.ix_(j, j)]


def hermitian_exp(op: DenseOperator, t: float) -> DenseOperator:
    """exp(+i t H) for Hermitian H, computed by eigendecomposition."""
    defect = np.abs(op.matrix - op.matrix.conj().T).max()
    if defect > NORM_TOL:
        raise ContractViolation(f"matrix is not hermitian (defect {defect:.3e})")
    w, v = np.linalg.eigh(op.matrix)
    u = (v * np.exp(1j * t * w)) @ v.conj().T
    return DenseOperator(u, op.target_qubits, unitary=True)


def _split_targets(state: StateVector, targets) -> np.ndarray:
    """Reshape to (rest, block) with the block index little-endian over `targets`."""
    m = state.num_qubits
    targets = tuple(targets)
    k = len(targets)
    psi = state.amplitudes.reshape([2] * m)
    target_axes = [m - 1 - q for q in targets]
    rest_axes = [ax for ax in range(m) if ax not in target_axes]
    perm = rest_axes + [target_axes[t] for t in reversed(range(k))]
    return np.transpose(psi, perm).reshape(2 ** (m - k), 2**k)


def _merge_targets(mat: np.ndarray, targets, num_qubits: int) -> np.ndarray:
    """Inverse of _split_targets: back to flat little-endian amplitudes."""
    m = num_qubits
    targets = tuple(targets)
    k = len(targets)
    target_axes = [m - 1 - q for q in targets]
    rest_axes = [ax for ax in range(m) if ax not in target_axes]
    perm = rest_axes + [target_axes[t] for t in reversed(range(k))]
    inv = np.argsort(perm)
    return np.transpose(mat.reshape([2] * m), inv).reshape(-1)


def _check_basis(basis: np.ndarray, k: int) -> np.ndarray:
    basis = np.asarray(basis, dtype=complex)
    if basis.shape != (2**k, 2**k):
        raise ContractViolation(
            f"need {2**k} basis vectors of length {2**k}, got shape {basis.shape}"
        )
    gram_defect = np.abs(basis.conj().T @ basis - np.eye(2**k)).max()
    if gram_defect > NORM_TOL:
        raise ContractViolation(f"basis is not orthonormal (defect {gram_defect:.3e})")
    return basis


def projection_probabilities(state: StateVector, targets, basis) -> np.ndarray:
    """Born probabilities of each basis outcome on `targets` (columns of `basis`)."""
    k = len(tuple(targets))
    basis = _check_basis(basis, k)
    block = _split_targets(state, targets)
    amps = block @ basis.conj()
    return (np.abs(amps) ** 2).sum(axis=0)


@dataclass
class MeasurementResult:
    outcome: int
    probability: float
    post_state: StateVector
    probabilities: np.ndarray


def project_measure(state: StateVector, targets, basis, rng_seed: int) -> MeasurementResult:
    """Projective measurement of `targets` in an orthonormal basis.

    The outcome is sampled with the Born rule from a generator seeded with
    `rng_seed`; the returned probabilities cover every outcome, so callers
    needing exact statistics never have to sample.
    """
    targets = tuple(targets)
    k = len(targets)
    basis = _check_basis(basis, k)
    m = state.num_qubits
    block = _split_targets(state, targets)
    amps = block @ basis.conj()
    probs = (np.abs(amps) ** 2).sum(axis=0)
    rng = np.random.default_rng(rng_seed)
    outcome = int(rng.choice(2**k, p=probs / probs.sum()))
    p = float(probs[outcome])
    if p <= 0.0:
        raise ContractViolation("sampled an outcome with zero probability")
    post = np.outer(amps[:, outcome], basis[:, outcome]) / np.sqrt(p)
    post_state = StateVector(_merge_targets(post, targets, m), state.layout)
    return MeasurementResult(outcome, p, post_state, probs)


def branch_vector(state: StateVector, targets, vector) -> StateVector:
    """Contract <vector| on `targets`; unnormalized state of the other qubits."""
    vec = np.asarray(vector, dtype=complex)
    block = _split_targets(state, targets)
    return StateVector(block @ vec.conj())


def postselect(state: StateVector, targets, vector) -> tuple[float, StateVector]:
    """Probability of finding `targets` in `vector`, and the normalized post-state."""
    targets = tuple(targets)
    vec = np.asarray(vector, dtype=complex)
    block = _split_targets(state, targets)
    rest = block @ vec.conj()
    p = float(np.vdot(rest, rest).real)
    if p <= 1e-300:
        raise ContractViolation("postselection branch has zero weight")
    post = np.outer(rest, vec) / np.sqrt(p)
    return p, StateVector(_merge_targets(post, targets, state.num_qubits), state.layout)


def overlap_probability(state: StateVector, reference: StateVector, start_qubit: int = 0) -> float:
    """Probability of finding the contiguous block at `start_qubit` in `reference`."""
    k = reference.num_qubits
    m = state.num_qubits
    if start_qubit < 0 or start_qubit + k > m:
        raise ContractViolation(
            f"reference of {k} qubits at offset {start_qubit} exceeds a {m}-qubit register"
        )
    if abs(reference.norm() - 1.0) > 1e-9:
        raise ContractViolation("reference state must be normalized")
    high = 2 ** (m - k - start_qubit)
    low = 2**start_qubit
    arr = state.amplitudes.reshape(high, 2**k, low)
    contracted = np.tensordot(reference.amplitudes.conj(), arr, axes=([0], [1]))
    return float(np.sum(np.abs(contracted) ** 2))


def reduced_density_matrix(state: StateVector, keep) -> np.ndarray:
    """Density matrix of the `keep` qubits, indexed little-endian over `keep`."""
    block = _split_targets(state, keep)
    return block.T @ block.conj()
