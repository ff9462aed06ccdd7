"""Dense state-vector and density-matrix kernel.

Basis convention: qubit 0 is the most significant bit of a basis index, so
``|q0 q1 ... q(n-1)>`` reads left to right exactly like a written ket.  A
two-qubit gate applied to targets ``(c, t)`` uses its matrix row/column
index ``2*bit(c) + bit(t)``.

States, gates and projectors are immutable values; every operation returns
a new object.  The only mutable thing here is :class:`Rng`.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    ArgumentError,
    CapacityError,
    ContractError,
    InvalidBranchError,
)

MAX_QUBITS = 26
NORM_TOL = 1e-9  # user-supplied amplitudes
PROP_TOL = 1e-12  # drift allowed through operations
PSD_SLACK = 1e-10
PROB_EPS = 1e-12  # branches below this are impossible


def _check_capacity(n_qubits: int) -> None:
    if n_qubits > MAX_QUBITS:
        raise CapacityError(f"{n_qubits} qubits exceeds capacity of {MAX_QUBITS}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, copy=True)
    a.flags.writeable = False
    return a


def _n_from_dim(dim: int) -> int:
    n = dim.bit_length() - 1
    if dim < 2 or 1 << n != dim:
        raise ArgumentError(f"dimension {dim} is not a power of two")
    return n


# ---------------------------------------------------------------------------
# value types


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized amplitude vector over ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        if self.n_qubits < 1:
            raise ArgumentError("n_qubits must be positive")
        _check_capacity(self.n_qubits)
        amps = _frozen(self.amplitudes).reshape(-1)
        if amps.shape[0] != 1 << self.n_qubits:
            raise ArgumentError(
                f"expected {1 << self.n_qubits} amplitudes, got {amps.shape[0]}"
            )
        if not np.all(np.isfinite(amps)):
            raise ArgumentError("amplitudes must be finite")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > NORM_TOL:
            raise ArgumentError(f"state is not normalized (|psi|^2 = {norm2!r})")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_vector(cls, amplitudes: Sequence[complex] | np.ndarray) -> PureState:
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        return cls(_n_from_dim(amps.shape[0]), amps)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> PureState:
        _check_capacity(n_qubits)
        if not 0 <= index < 1 << n_qubits:
            raise ArgumentError(f"basis index {index} out of range")
        amps = np.zeros(1 << n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def from_bits(cls, bits: str) -> PureState:
        """``from_bits("01")`` is ``|01>``."""
        return cls.basis(len(bits), int(bits, 2))

    @classmethod
    def zeros(cls, n_qubits: int) -> PureState:
        return cls.basis(n_qubits, 0)

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def __repr__(self) -> str:
        return f"PureState(n_qubits={self.n_qubits}, amplitudes={self.amplitudes!r})"


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, unit-trace, positive semidefinite operator."""

    n_qubits: int
    entries: np.ndarray

    def __post_init__(self) -> None:
        _check_capacity(2 * self.n_qubits)
        rho = _frozen(self.entries)
        d = 1 << self.n_qubits
        if rho.shape != (d, d):
            raise ArgumentError(f"expected a {d}x{d} matrix, got {rho.shape}")
        if not np.all(np.isfinite(rho)):
            raise ArgumentError("density matrix must be finite")
        if np.max(np.abs(rho - rho.conj().T)) > PROP_TOL:
            raise ContractError("density matrix is not Hermitian")
        tr = np.trace(rho)
        if abs(tr - 1.0) > PROP_TOL:
            raise ContractError(f"density matrix trace is {tr!r}")
        if np.linalg.eigvalsh(rho).min() < -PSD_SLACK:
            raise ContractError("density matrix is not positive semidefinite")
        object.__setattr__(self, "entries", rho)

    @classmethod
    def from_matrix(cls, entries: np.ndarray) -> DensityMatrix:
        entries = np.asarray(entries, dtype=np.complex128)
        return cls(_n_from_dim(entries.shape[0]), entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    def purity(self) -> float:
        return float(np.real(np.trace(self.entries @ self.entries)))


@dataclass(frozen=True, eq=False)
class Gate:
    """Unitary on 1 to 3 qubits."""

    name: str
    matrix: np.ndarray

    def __post_init__(self) -> None:
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ArgumentError("gate matrix must be square")
        arity = _n_from_dim(m.shape[0])
        if not 1 <= arity <= 3:
            raise ArgumentError(f"gate arity {arity} not in 1..3")
        if np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0]))) > PROP_TOL:
            raise ContractError(f"gate {self.name!r} is not unitary")
        object.__setattr__(self, "matrix", m)

    @property
    def arity(self) -> int:
        return self.matrix.shape[0].bit_length() - 1

    def dagger(self) -> Gate:
        return Gate(self.name + "^dag", self.matrix.conj().T)

    def __matmul__(self, other: Gate) -> Gate:
        return Gate(f"{self.name}*{other.name}", self.matrix @ other.matrix)

    def __repr__(self) -> str:
        return f"Gate({self.name!r}, arity={self.arity})"


_S2 = 1 / np.sqrt(2)

I = Gate("I", np.eye(2))
X = Gate("X", [[0, 1], [1, 0]])
Y = Gate("Y", [[0, -1j], [1j, 0]])
Z = Gate("Z", [[1, 0], [0, -1]])
H = Gate("H", [[_S2, _S2], [_S2, -_S2]])
CNOT = Gate("CNOT", [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
SWAP = Gate("SWAP", [[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]])
_toffoli = np.eye(8)
_toffoli[[6, 7]] = _toffoli[[7, 6]]
TOFFOLI = Gate("TOFFOLI", _toffoli)

GATES = {g.name: g for g in (I, X, Y, Z, H, CNOT, SWAP, TOFFOLI)}


@dataclass(frozen=True, eq=False)
class Projector:
    """Orthogonal projector on ``n_qubits`` qubits.

    Stored either densely (``matrix``) or, for projectors that are diagonal in
    the computational basis, as a 0/1 ``diagonal``.  The diagonal form keeps
    12-qubit syndrome projectors at 4096 entries instead of 4096**2.
    """

    n_qubits: int
    matrix: np.ndarray | None = None
    diagonal: np.ndarray | None = None

    def __post_init__(self) -> None:
        if (self.matrix is None) == (self.diagonal is None):
            raise ArgumentError("give exactly one of matrix or diagonal")
        d = 1 << self.n_qubits
        if self.diagonal is not None:
            diag = np.asarray(self.diagonal)
            if diag.shape != (d,):
                raise ArgumentError(f"diagonal must have length {d}")
            if not np.all((diag == 0) | (diag == 1)):
                raise ContractError("diagonal projector entries must be 0 or 1")
            diag = diag.astype(bool)
            diag.flags.writeable = False
            object.__setattr__(self, "diagonal", diag)
            return
        p = _frozen(self.matrix)
        if p.shape != (d, d):
            raise ArgumentError(f"projector must be {d}x{d}")
        if np.max(np.abs(p - p.conj().T)) > PROP_TOL:
            raise ContractError("projector is not Hermitian")
        if np.max(np.abs(p @ p - p)) > PROP_TOL:
            raise ContractError("projector is not idempotent")
        ev = np.linalg.eigvalsh(p)
        if np.max(np.minimum(np.abs(ev), np.abs(ev - 1))) > PSD_SLACK:
            raise ContractError("projector eigenvalues are not in {0, 1}")
        object.__setattr__(self, "matrix", p)

    @classmethod
    def onto(cls, vector: Sequence[complex] | np.ndarray | PureState) -> Projector:
        """Rank-one projector ``|v><v|``."""
        if isinstance(vector, PureState):
            vector = vector.amplitudes
        v = np.asarray(vector, dtype=np.complex128).reshape(-1)
        v = v / np.linalg.norm(v)
        return cls(_n_from_dim(v.shape[0]), matrix=np.outer(v, v.conj()))

    @classmethod
    def from_diagonal(cls, diagonal: np.ndarray) -> Projector:
        diagonal = np.asarray(diagonal)
        return cls(_n_from_dim(diagonal.shape[0]), diagonal=diagonal)

    @property
    def is_diagonal(self) -> bool:
        return self.diagonal is not None

    def dense(self) -> np.ndarray:
        if self.matrix is not None:
            return self.matrix
        return np.diag(self.diagonal.astype(np.complex128))

    def rank(self) -> int:
        if self.diagonal is not None:
            return int(self.diagonal.sum())
        return int(round(np.trace(self.matrix).real))

    def apply(self, block: np.ndarray) -> np.ndarray:
        """Apply to the leading axis of ``block`` (shape ``(2**n, ...)``)."""
        if self.diagonal is not None:
            return block * self.diagonal.reshape((-1,) + (1,) * (block.ndim - 1))
        return np.tensordot(self.matrix, block, axes=(1, 0))

    def expectation(self, state: PureState) -> float:
        """``<psi|P|psi>`` for a state on exactly ``n_qubits`` qubits."""
        if state.n_qubits != self.n_qubits:
            raise ArgumentError("projector and state sizes differ")
        if self.diagonal is not None:
            return float(np.sum(np.abs(state.amplitudes[self.diagonal]) ** 2))
        return float(np.vdot(state.amplitudes, self.matrix @ state.amplitudes).real)


class Rng:
    """Seeded, counter-based random stream (Philox).

    ``Rng.for_trial(seed, t)`` gives trial ``t`` its own disjoint stream, so
    results never depend on the order in which trials run.
    """

    def __init__(self, seed: int, stream: int = 0):
        seed, stream = int(seed), int(stream)
        if not 0 <= seed < 1 << 64:
            raise ArgumentError("seed must be a 64-bit unsigned integer")
        if not 0 <= stream < 1 << 64:
            raise ArgumentError("stream must be a 64-bit unsigned integer")
        self.seed = seed
        self.stream = stream
        self._gen = np.random.Generator(
            np.random.Philox(key=seed, counter=[0, stream, 0, 0])
        )

    @classmethod
    def for_trial(cls, seed: int, trial: int) -> Rng:
        return cls(seed, stream=trial)

    def random(self, size: int | None = None):
        """Uniform draw(s) on [0, 1)."""
        return self._gen.random(size)

    def normal(self, size=None):
        return self._gen.standard_normal(size)

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, stream={self.stream})"


# ---------------------------------------------------------------------------
# helpers


def _check_targets(targets: Sequence[int], n_qubits: int, count: int | None = None) -> tuple[int, ...]:
    targets = tuple(int(t) for t in targets)
    if count is not None and len(targets) != count:
        raise ArgumentError(f"expected {count} targets, got {len(targets)}")
    if len(set(targets)) != len(targets):
        raise ArgumentError(f"repeated target in {targets}")
    for t in targets:
        if not 0 <= t < n_qubits:
            raise ArgumentError(f"target {t} out of range for {n_qubits} qubits")
    return targets


def _apply_on_axes(tensor: np.ndarray, matrix: np.ndarray, axes: Sequence[int]) -> np.ndarray:
    k = len(axes)
    op = matrix.reshape((2,) * (2 * k))
    out = np.tensordot(op, tensor, axes=(list(range(k, 2 * k)), list(axes)))
    return np.moveaxis(out, list(range(k)), list(axes))


def _gate_matrix(g: Gate | np.ndarray) -> np.ndarray:
    return g.matrix if isinstance(g, Gate) else np.asarray(g, dtype=np.complex128)


def _front(state: PureState, targets: Sequence[int]) -> np.ndarray:
    """Reshape to ``(2**k, 2**(n-k))`` with the target qubits as rows."""
    k = len(targets)
    t = np.moveaxis(state.tensor(), list(targets), list(range(k)))
    return t.reshape(1 << k, -1)


def _unfront(block: np.ndarray, n_qubits: int, targets: Sequence[int]) -> np.ndarray:
    k = len(targets)
    t = block.reshape((2,) * n_qubits)
    return np.moveaxis(t, list(range(k)), list(targets)).reshape(-1)


# ---------------------------------------------------------------------------
# operations


def kron(a, b):
    """Tensor product; qubits of ``a`` come first.

    Accepts two PureStates, two DensityMatrices, two Gates, or plain arrays.
    """
    if isinstance(a, PureState) and isinstance(b, PureState):
        _check_capacity(a.n_qubits + b.n_qubits)
        return PureState(a.n_qubits + b.n_qubits, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityMatrix) and isinstance(b, DensityMatrix):
        _check_capacity(2 * (a.n_qubits + b.n_qubits))
        return DensityMatrix(a.n_qubits + b.n_qubits, np.kron(a.entries, b.entries))
    if isinstance(a, Gate) and isinstance(b, Gate):
        return Gate(f"{a.name}(x){b.name}", np.kron(a.matrix, b.matrix))
    if isinstance(a, (PureState, DensityMatrix, Gate)) or isinstance(b, (PureState, DensityMatrix, Gate)):
        raise ArgumentError("kron operands must be of the same kind")
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128)
    if a.size * b.size > 1 << MAX_QUBITS and a.ndim == 1:
        raise CapacityError("tensor product exceeds qubit capacity")
    return np.kron(a, b)


def kron_all(*items):
    out = items[0]
    for item in items[1:]:
        out = kron(out, item)
    return out


def apply_gate(state: PureState, g: Gate, targets: Sequence[int]) -> PureState:
    """Apply ``g`` to ``targets`` (in gate-matrix order), identity elsewhere."""
    targets = _check_targets(targets, state.n_qubits, g.arity)
    out = _apply_on_axes(state.tensor(), g.matrix, targets)
    return PureState(state.n_qubits, out.reshape(-1))


def apply_controlled_x(state: PureState, controls: Sequence[int], target: int) -> PureState:
    """NOT on ``target`` when every control is 1; any number of controls."""
    wires = _check_targets(tuple(controls) + (target,), state.n_qubits)
    t = np.array(state.tensor())
    idx = [slice(None)] * state.n_qubits
    for c in wires[:-1]:
        idx[c] = 1
    lo, hi = list(idx), list(idx)
    lo[target], hi[target] = 0, 1
    t[tuple(lo)], t[tuple(hi)] = state.tensor()[tuple(hi)], state.tensor()[tuple(lo)]
    return PureState(state.n_qubits, t.reshape(-1))


def apply_unitary_to_dm(dm: DensityMatrix, g: Gate, targets: Sequence[int]) -> DensityMatrix:
    """``U rho U^dag`` with ``U`` acting on ``targets``."""
    n = dm.n_qubits
    targets = _check_targets(targets, n, g.arity)
    t = dm.entries.reshape((2,) * (2 * n))
    t = _apply_on_axes(t, g.matrix, targets)
    t = _apply_on_axes(t, g.matrix.conj(), [n + q for q in targets])
    d = 1 << n
    return DensityMatrix(n, t.reshape(d, d))


def operator_on(op: Gate | np.ndarray, targets: Sequence[int], n_qubits: int) -> np.ndarray:
    """Dense ``2**n`` matrix of ``op`` embedded on ``targets``.

    Built by applying ``op`` to every basis column; used as a reference for
    small registers only.
    """
    m = _gate_matrix(op)
    k = _n_from_dim(m.shape[0])
    targets = _check_targets(targets, n_qubits, k)
    d = 1 << n_qubits
    cols = np.eye(d, dtype=np.complex128).reshape((2,) * n_qubits + (d,))
    out = _apply_on_axes(cols, m, targets)
    return out.reshape(d, d)


def pure_to_dm(s: PureState) -> DensityMatrix:
    return DensityMatrix(s.n_qubits, np.outer(s.amplitudes, s.amplitudes.conj()))


def _clamp_unit(x: float) -> float:
    if x < -PSD_SLACK or x > 1 + PSD_SLACK:
        raise ContractError(f"value {x!r} outside [0, 1] beyond tolerance")
    return min(max(x, 0.0), 1.0)


def fidelity_pure_dm(phi: PureState, rho: DensityMatrix) -> float:
    """``sqrt(<phi|rho|phi>)``."""
    if phi.n_qubits != rho.n_qubits:
        raise ArgumentError("state and density matrix sizes differ")
    v = phi.amplitudes
    return float(np.sqrt(_clamp_unit(float(np.vdot(v, rho.entries @ v).real))))


def fidelity_pure(phi: PureState, psi: PureState) -> float:
    """``|<phi|psi>|``; equals ``fidelity_pure_dm(phi, pure_to_dm(psi))``."""
    if phi.n_qubits != psi.n_qubits:
        raise ArgumentError("state sizes differ")
    return float(np.sqrt(_clamp_unit(abs(np.vdot(phi.amplitudes, psi.amplitudes)) ** 2)))


def _projector_width(projectors: Sequence[Projector]) -> int:
    if not projectors:
        raise ContractError("empty projector set")
    k = projectors[0].n_qubits
    if any(p.n_qubits != k for p in projectors):
        raise ContractError("projectors act on different numbers of qubits")
    return k


def check_complete(projectors: Sequence[Projector], tol: float = 1e-10) -> None:
    """Raise ContractError unless the set is orthogonal and sums to identity."""
    _check_complete(tuple(projectors), tol)


@functools.lru_cache(maxsize=64)
def _check_complete(projectors: tuple[Projector, ...], tol: float) -> None:
    # Projectors are immutable and hash by identity, so a verified set stays verified.
    k = _projector_width(projectors)
    if all(p.is_diagonal for p in projectors):
        counts = np.sum([p.diagonal for p in projectors], axis=0)
        if not np.all(counts == 1):
            raise ContractError("diagonal projectors are not a partition of the basis")
        return
    mats = [p.dense() for p in projectors]
    if np.max(np.abs(sum(mats) - np.eye(1 << k))) > tol:
        raise ContractError("projectors do not sum to identity")
    for i in range(len(mats)):
        for j in range(i + 1, len(mats)):
            if np.max(np.abs(mats[i] @ mats[j])) > tol:
                raise ContractError(f"projectors {i} and {j} are not orthogonal")


def outcome_probabilities(
    state: PureState, projectors: Sequence[Projector], targets: Sequence[int] | None = None
) -> np.ndarray:
    """Born probabilities ``<psi|P_i|psi>`` for projectors on ``targets``."""
    k = _projector_width(projectors)
    targets = tuple(range(state.n_qubits)) if targets is None else targets
    targets = _check_targets(targets, state.n_qubits, k)
    block = _front(state, targets)
    return np.array([float(np.sum(np.abs(p.apply(block)) ** 2)) for p in projectors])


def _collapse(state: PureState, p: Projector, targets: tuple[int, ...], prob: float) -> PureState:
    block = p.apply(_front(state, targets)) / np.sqrt(prob)
    return PureState(state.n_qubits, _unfront(block, state.n_qubits, targets))


def force_branch(
    state: PureState,
    projectors: Sequence[Projector],
    outcome: int,
    targets: Sequence[int] | None = None,
) -> tuple[float, PureState]:
    """Post-select ``outcome``: returns its probability and the collapsed state."""
    check_complete(projectors)
    targets = tuple(range(state.n_qubits)) if targets is None else tuple(targets)
    if not 0 <= outcome < len(projectors):
        raise ArgumentError(f"outcome {outcome} out of range")
    probs = outcome_probabilities(state, projectors, targets)
    prob = float(probs[outcome])
    if prob < PROB_EPS:
        raise InvalidBranchError(f"outcome {outcome} has probability {prob!r}")
    return prob, _collapse(state, projectors[outcome], targets, prob)


def measure(
    state: PureState,
    projectors: Sequence[Projector],
    rng: Rng,
    targets: Sequence[int] | None = None,
) -> tuple[int, float, PureState]:
    """Projective measurement of ``targets`` with a complete projector set."""
    check_complete(projectors)
    targets = tuple(range(state.n_qubits)) if targets is None else tuple(targets)
    probs = outcome_probabilities(state, projectors, targets)
    if abs(probs.sum() - 1.0) > PROP_TOL:
        raise ContractError(f"outcome probabilities sum to {probs.sum()!r}")
    u = rng.random()
    allowed = np.flatnonzero(probs >= PROB_EPS)
    cum = np.cumsum(probs[allowed])
    pick = int(np.searchsorted(cum, u * cum[-1], side="right"))
    outcome = int(allowed[min(pick, len(allowed) - 1)])
    prob = float(probs[outcome])
    return outcome, prob, _collapse(state, projectors[outcome], targets, prob)


def permute_qubits(state: PureState, permutation: Sequence[int]) -> PureState:
    """Reorder qubits: new qubit ``i`` is old qubit ``permutation[i]``."""
    perm = tuple(int(p) for p in permutation)
    if sorted(perm) != list(range(state.n_qubits)):
        raise ArgumentError(f"{perm} is not a permutation of {state.n_qubits} qubits")
    return PureState(state.n_qubits, np.transpose(state.tensor(), perm).reshape(-1))


def inverse_permutation(permutation: Sequence[int]) -> tuple[int, ...]:
    return tuple(int(i) for i in np.argsort(permutation))


def contract(state: PureState, targets: Sequence[int], bra: PureState) -> tuple[float, PureState]:
    """Contract ``<bra|`` into ``targets``; returns (probability, rest normalized).

    This is what "measure out" leaves behind once a branch is known, and the
    remaining qubits keep their relative order.
    """
    targets = _check_targets(targets, state.n_qubits, bra.n_qubits)
    if len(targets) == state.n_qubits:
        raise ArgumentError("nothing left after contraction")
    rest = bra.amplitudes.conj() @ _front(state, targets)
    prob = float(np.vdot(rest, rest).real)
    if prob < PROB_EPS:
        raise InvalidBranchError("contraction has zero weight")
    return prob, PureState.from_vector(rest / np.sqrt(prob))


def weight_outside_zero(state: PureState, wires: Sequence[int]) -> float:
    """Probability that any qubit in ``wires`` reads 1."""
    wires = _check_targets(wires, state.n_qubits)
    if not wires:
        return 0.0
    block = _front(state, wires)
    return float(np.sum(np.abs(block[1:]) ** 2))


def drop_zero_qubits(state: PureState, wires: Sequence[int], tol: float = PROP_TOL) -> PureState:
    """Remove qubits that are exactly ``|0>`` (within ``tol`` in amplitude)."""
    wires = _check_targets(wires, state.n_qubits)
    if not wires:
        return state
    block = _front(state, wires)
    if np.max(np.abs(block[1:]), initial=0.0) > tol:
        raise ArgumentError("qubits to drop are not in |0>")
    return PureState.from_vector(block[0])


def split_product(state: PureState, left: Sequence[int], tol: float = PROP_TOL) -> tuple[PureState, PureState]:
    """Factor a product state into (``left`` qubits, remaining qubits).

    Each factor is determined up to a global phase.  Raises ArgumentError if
    the state is entangled across the cut beyond ``tol``.
    """
    left = _check_targets(left, state.n_qubits)
    u, s, vh = np.linalg.svd(_front(state, left), full_matrices=False)
    if s.shape[0] > 1 and s[1] > tol:
        raise ArgumentError(f"state is entangled across the cut (sigma_1 = {s[1]:.3e})")
    return PureState.from_vector(u[:, 0]), PureState.from_vector(vh[0])


def partial_trace(state: PureState, keep: Sequence[int]) -> DensityMatrix:
    """Reduced density matrix of ``keep`` (in the given order)."""
    keep = _check_targets(keep, state.n_qubits)
    block = _front(state, keep)
    return DensityMatrix(len(keep), block @ block.conj().T)
