"""Bi-directional teleportation of GHZ-like states over a four-qubit cluster.

Each party holds ``c0|0...0> + c1|1...1>`` on its own register.  The run:

1. reduce the register to one qubit with a CNOT cascade (ancillas -> |0>),
2. Bell-measure (A_1, a_1) and (B_1, b_1) against the cluster channel,
3. swap the two Bell outcomes classically and apply Pauli corrections,
4. rebuild the GHZ-like state on the receiving side from fresh |0> ancillas.

Qubit possession: the cluster ``(|0000>+|0011>+|1100>+|1111>)/2`` on
``(a1, a2, b1, b2)`` is ``Bell(a1,a2) (x) Bell(b1,b2)``.  For the channel to
move anything between the parties, Alice holds ``{A_i, a1, b2}`` and Bob holds
``{B_i, b1, a2}``: Alice's state arrives on ``a2`` (Bob's), Bob's on ``b2``
(Alice's).
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import qsim
from .errors import ArgumentError, PreconditionError
from .qsim import PureState, Projector, Rng, X, Z

GHZ_AMPLITUDE = 1 / np.sqrt(2)


@dataclass(frozen=True)
class GhzLikeSpec:
    """``c0|0...0> + c1|1...1>`` on ``n`` qubits."""

    n: int
    c0: complex
    c1: complex

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 1:
            raise ArgumentError(f"n must be a positive integer, got {self.n!r}")
        c0, c1 = complex(self.c0), complex(self.c1)
        if not (np.isfinite(c0) and np.isfinite(c1)):
            raise ArgumentError("coefficients must be finite")
        norm2 = abs(c0) ** 2 + abs(c1) ** 2
        if abs(norm2 - 1.0) > qsim.NORM_TOL:
            raise ArgumentError(f"|c0|^2 + |c1|^2 = {norm2!r}, expected 1")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "c0", c0)
        object.__setattr__(self, "c1", c1)

    @classmethod
    def ghz(cls, n: int) -> GhzLikeSpec:
        return cls(n, GHZ_AMPLITUDE, GHZ_AMPLITUDE)

    @classmethod
    def random(cls, n: int, rng: Rng) -> GhzLikeSpec:
        v = rng.normal(4)
        c = np.array([v[0] + 1j * v[1], v[2] + 1j * v[3]])
        c /= np.linalg.norm(c)
        return cls(n, complex(c[0]), complex(c[1]))

    def qubit(self) -> PureState:
        """The single-qubit state ``c0|0> + c1|1>`` the register reduces to."""
        return PureState(1, [self.c0, self.c1])


@dataclass(frozen=True)
class WireMap:
    """Joint-register layout ``A_1..A_nA, B_1..B_nB, a1, a2, b1, b2``."""

    n_alice: int
    n_bob: int

    def __post_init__(self) -> None:
        if self.n_alice < 1 or self.n_bob < 1:
            raise ArgumentError("register sizes must be positive")

    @property
    def alice_inputs(self) -> tuple[int, ...]:
        return tuple(range(self.n_alice))

    @property
    def bob_inputs(self) -> tuple[int, ...]:
        return tuple(range(self.n_alice, self.n_alice + self.n_bob))

    @property
    def a1(self) -> int:
        return self.n_alice + self.n_bob

    @property
    def a2(self) -> int:
        return self.a1 + 1

    @property
    def b1(self) -> int:
        return self.a1 + 2

    @property
    def b2(self) -> int:
        return self.a1 + 3

    @property
    def n_qubits(self) -> int:
        return self.n_alice + self.n_bob + 4

    @property
    def alice_holds(self) -> tuple[int, ...]:
        return self.alice_inputs + (self.a1, self.b2)

    @property
    def bob_holds(self) -> tuple[int, ...]:
        return self.bob_inputs + (self.b1, self.a2)

    def roles(self) -> dict[str, int]:
        out = {f"A{i + 1}": w for i, w in enumerate(self.alice_inputs)}
        out.update({f"B{i + 1}": w for i, w in enumerate(self.bob_inputs)})
        out.update(a1=self.a1, a2=self.a2, b1=self.b1, b2=self.b2)
        return out


class BellOutcome(enum.Enum):
    PHI_PLUS = 0
    PHI_MINUS = 1
    PSI_PLUS = 2
    PSI_MINUS = 3

    @property
    def label(self) -> str:
        return {0: "Phi+", 1: "Phi-", 2: "Psi+", 3: "Psi-"}[self.value]

    def state(self) -> PureState:
        return BELL_STATES[self]

    @classmethod
    def from_label(cls, label: str) -> BellOutcome:
        for o in cls:
            if o.label == label:
                return o
        raise ArgumentError(f"unknown Bell label {label!r}")


_s = 1 / np.sqrt(2)
BELL_STATES = {
    BellOutcome.PHI_PLUS: PureState(2, [_s, 0, 0, _s]),
    BellOutcome.PHI_MINUS: PureState(2, [_s, 0, 0, -_s]),
    BellOutcome.PSI_PLUS: PureState(2, [0, _s, _s, 0]),
    BellOutcome.PSI_MINUS: PureState(2, [0, _s, -_s, 0]),
}


class CorrectionOp(enum.Enum):
    """Pauli word applied by the receiver; "ZX" is the product Z.X (X first)."""

    I = "I"
    X = "X"
    Z = "Z"
    ZX = "ZX"

    def gates(self) -> tuple[qsim.Gate, ...]:
        """Gates in application order."""
        return {"I": (), "X": (X,), "Z": (Z,), "ZX": (X, Z)}[self.value]

    def matrix(self) -> np.ndarray:
        m = np.eye(2, dtype=complex)
        for g in self.gates():
            m = g.matrix @ m
        return m

    def apply(self, state: PureState, wire: int) -> PureState:
        for g in self.gates():
            state = qsim.apply_gate(state, g, [wire])
        return state


_CORRECTIONS = {
    BellOutcome.PHI_PLUS: CorrectionOp.I,
    BellOutcome.PSI_PLUS: CorrectionOp.X,
    BellOutcome.PHI_MINUS: CorrectionOp.Z,
    BellOutcome.PSI_MINUS: CorrectionOp.ZX,
}


def correction_for(outcome: BellOutcome) -> CorrectionOp:
    """Receiver's fix-up for the sender's Bell outcome."""
    return _CORRECTIONS[outcome]


@functools.cache
def bell_projectors() -> tuple[Projector, ...]:
    """Rank-one projectors onto the four Bell states, in BellOutcome order."""
    return tuple(Projector.onto(BELL_STATES[o]) for o in BellOutcome)


def make_ghz_like(spec: GhzLikeSpec) -> PureState:
    amps = np.zeros(1 << spec.n, dtype=np.complex128)
    amps[0] += spec.c0
    amps[-1] += spec.c1
    return PureState(spec.n, amps)


def make_cluster_channel() -> PureState:
    """``(|0000> + |0011> + |1100> + |1111>)/2`` on (a1, a2, b1, b2)."""
    amps = np.zeros(16, dtype=np.complex128)
    amps[[0, 3, 12, 15]] = 0.5
    return PureState(4, amps)


def reduction_circuit(state: PureState, wires: Sequence[int]) -> PureState:
    """Fold a GHZ-like register onto its first wire.

    CNOTs from ``wires[0]`` onto ``wires[-1], ..., wires[1]``, after which the
    other wires must read exactly |0>; otherwise the input was not in
    ``span{|0...0>, |1...1>}`` and PreconditionError is raised.
    """
    wires = tuple(wires)
    for w in reversed(wires[1:]):
        state = qsim.apply_controlled_x(state, [wires[0]], w)
    leak = np.sqrt(qsim.weight_outside_zero(state, wires[1:]))
    if leak > qsim.PROP_TOL:
        raise PreconditionError(
            f"register is not GHZ-like: amplitude {leak:.3e} left on reduced wires"
        )
    return state


def reconstruction_circuit(state: PureState, wire: int, ancillas: Sequence[int]) -> PureState:
    """Inverse of :func:`reduction_circuit`: spread ``wire`` onto |0> ancillas."""
    ancillas = tuple(ancillas)
    if np.sqrt(qsim.weight_outside_zero(state, ancillas)) > qsim.NORM_TOL:
        raise PreconditionError("ancillas are not in |0>")
    for a in ancillas:
        state = qsim.apply_controlled_x(state, [wire], a)
    return state


def reduction_circuit_multicontrolled(state: PureState, wires: Sequence[int]) -> PureState:
    """Reduction with the k-controlled NOT at each step instead of a CNOT.

    Step ``m`` (m = n..2) flips ``wires[m-1]`` controlled on all of
    ``wires[:m-1]``.  Agrees with :func:`reduction_circuit` on GHZ-like input.
    """
    wires = tuple(wires)
    for m in range(len(wires), 1, -1):
        state = qsim.apply_controlled_x(state, wires[: m - 1], wires[m - 1])
    return state


def rebuild(qubit: PureState, n: int) -> PureState:
    """Reconstruct an ``n``-qubit GHZ-like register from one received qubit."""
    if n == 1:
        return qubit
    state = qsim.kron(qubit, PureState.zeros(n - 1))
    return reconstruction_circuit(state, 0, range(1, n))


def reduce_to_qubit(register: PureState) -> PureState:
    """Reduce a GHZ-like register and drop its (verified |0>) ancillas."""
    n = register.n_qubits
    if n == 1:
        return register
    reduced = reduction_circuit(register, range(n))
    return qsim.drop_zero_qubits(reduced, range(1, n))


# ---------------------------------------------------------------------------
# collapsed channel states

# (Alice outcome, Bob outcome) -> branch number 1..16, in the order the
# sixteen collapsed channel states are conventionally listed.
_P, _M, _S, _T = (
    BellOutcome.PHI_PLUS,
    BellOutcome.PHI_MINUS,
    BellOutcome.PSI_PLUS,
    BellOutcome.PSI_MINUS,
)
ETA_INDEX = {
    (_P, _P): 1, (_P, _M): 2, (_M, _P): 3, (_M, _M): 4,
    (_P, _S): 5, (_P, _T): 6, (_M, _S): 7, (_M, _T): 8,
    (_S, _P): 9, (_S, _M): 10, (_T, _P): 11, (_T, _M): 12,
    (_S, _S): 13, (_S, _T): 14, (_T, _S): 15, (_T, _T): 16,
}  # fmt: skip

# eta^i on (a2, b2): basis ket and sign attached to a0b0, a0b1, a1b0, a1b1.
_ETA_TERMS = {
    1: (("00", "01", "10", "11"), (+1, +1, +1, +1)),
    2: (("00", "01", "10", "11"), (+1, -1, +1, -1)),
    3: (("00", "01", "10", "11"), (+1, +1, -1, -1)),
    4: (("00", "01", "10", "11"), (+1, -1, -1, +1)),
    5: (("01", "00", "11", "10"), (+1, +1, +1, +1)),
    6: (("01", "00", "11", "10"), (+1, -1, +1, -1)),
    7: (("01", "00", "11", "10"), (+1, +1, -1, -1)),
    8: (("01", "00", "11", "10"), (+1, -1, -1, +1)),
    9: (("10", "11", "00", "01"), (+1, +1, +1, +1)),
    10: (("10", "11", "00", "01"), (+1, -1, +1, -1)),
    11: (("10", "11", "00", "01"), (+1, +1, -1, -1)),
    12: (("10", "11", "00", "01"), (+1, -1, -1, +1)),
    13: (("11", "10", "01", "00"), (+1, +1, +1, +1)),
    14: (("11", "10", "01", "00"), (+1, -1, +1, -1)),
    15: (("11", "10", "01", "00"), (+1, +1, -1, -1)),
    16: (("11", "10", "01", "00"), (+1, -1, -1, +1)),
}


def eta_state(index: int, alice: GhzLikeSpec, bob: GhzLikeSpec) -> PureState:
    """Collapsed (a2, b2) state for branch ``index`` as listed term by term."""
    kets, signs = _ETA_TERMS[index]
    coeffs = (alice.c0 * bob.c0, alice.c0 * bob.c1, alice.c1 * bob.c0, alice.c1 * bob.c1)
    amps = np.zeros(4, dtype=np.complex128)
    for ket, sign, c in zip(kets, signs, coeffs):
        amps[int(ket, 2)] += sign * c
    return PureState(2, amps)


# ---------------------------------------------------------------------------
# protocol


@dataclass(frozen=True, eq=False)
class Transcript:
    """Record of one protocol branch.

    ``bob_correction`` is what Bob applies on a2 (driven by Alice's outcome);
    ``alice_correction`` is what Alice applies on b2 (driven by Bob's).
    """

    alice_outcome: BellOutcome
    bob_outcome: BellOutcome
    alice_correction: CorrectionOp
    bob_correction: CorrectionOp
    probability: float
    channel_state: PureState  # (a2, b2) before corrections
    received_by_bob: PureState  # n_alice qubits
    received_by_alice: PureState  # n_bob qubits
    fidelity_to_bob: float
    fidelity_to_alice: float
    eta_overlap: float = field(default=float("nan"))

    @property
    def eta_index(self) -> int:
        return ETA_INDEX[(self.alice_outcome, self.bob_outcome)]

    @property
    def min_fidelity(self) -> float:
        return min(self.fidelity_to_bob, self.fidelity_to_alice)


def _channel_register(alice: GhzLikeSpec, bob: GhzLikeSpec) -> PureState:
    """(A1, B1, a1, a2, b1, b2) after both parties have reduced."""
    qa = reduce_to_qubit(make_ghz_like(alice))
    qb = reduce_to_qubit(make_ghz_like(bob))
    return qsim.kron_all(qa, qb, make_cluster_channel())


# wire positions inside the compact register
_A1, _B1, _a1, _a2, _b1, _b2 = range(6)


def _finish(
    alice: GhzLikeSpec,
    bob: GhzLikeSpec,
    a_out: BellOutcome,
    b_out: BellOutcome,
    prob: float,
    collapsed: PureState,
) -> Transcript:
    # Measured pairs are in known Bell states; contract them away.
    _, rest = qsim.contract(collapsed, [_A1, _a1, _B1, _b1], qsim.kron(a_out.state(), b_out.state()))
    channel = rest  # (a2, b2)
    bob_fix, alice_fix = correction_for(a_out), correction_for(b_out)
    fixed = alice_fix.apply(bob_fix.apply(channel, 0), 1)
    on_a2, on_b2 = qsim.split_product(fixed, [0])
    to_bob = rebuild(on_a2, alice.n)
    to_alice = rebuild(on_b2, bob.n)
    eta = eta_state(ETA_INDEX[(a_out, b_out)], alice, bob)
    return Transcript(
        alice_outcome=a_out,
        bob_outcome=b_out,
        alice_correction=alice_fix,
        bob_correction=bob_fix,
        probability=prob,
        channel_state=channel,
        received_by_bob=to_bob,
        received_by_alice=to_alice,
        fidelity_to_bob=qsim.fidelity_pure(make_ghz_like(alice), to_bob),
        fidelity_to_alice=qsim.fidelity_pure(make_ghz_like(bob), to_alice),
        eta_overlap=qsim.fidelity_pure(eta, channel),
    )


def run_bqt(alice: GhzLikeSpec, bob: GhzLikeSpec, rng: Rng) -> Transcript:
    """One sampled run of the protocol.

    Both registers are reduced locally and their |0> ancillas (checked to be
    exactly |0>) factored out, so the measurements act on a six-qubit
    register regardless of ``n``.  :func:`run_bqt_joint` keeps everything in
    one register instead.
    """
    state = _channel_register(alice, bob)
    projs = bell_projectors()
    ia, pa, state = qsim.measure(state, projs, rng, [_A1, _a1])
    ib, pb, state = qsim.measure(state, projs, rng, [_B1, _b1])
    return _finish(alice, bob, BellOutcome(ia), BellOutcome(ib), pa * pb, state)


def force_bqt(alice: GhzLikeSpec, bob: GhzLikeSpec, a_out: BellOutcome, b_out: BellOutcome) -> Transcript:
    state = _channel_register(alice, bob)
    projs = bell_projectors()
    pa, state = qsim.force_branch(state, projs, a_out.value, [_A1, _a1])
    pb, state = qsim.force_branch(state, projs, b_out.value, [_B1, _b1])
    return _finish(alice, bob, a_out, b_out, pa * pb, state)


def enumerate_branches(alice: GhzLikeSpec, bob: GhzLikeSpec) -> list[Transcript]:
    """All sixteen (Alice, Bob) outcome pairs, ordered by branch number."""
    out = [force_bqt(alice, bob, a, b) for a in BellOutcome for b in BellOutcome]
    return sorted(out, key=lambda t: t.eta_index)


def run_bqt_joint(alice: GhzLikeSpec, bob: GhzLikeSpec, rng: Rng) -> Transcript:
    """Same protocol on the full ``n_A + n_B + 4`` qubit register.

    Nothing is factored out: the reduction, both Bell measurements, the
    corrections and the reconstruction (with fresh ancillas appended) all act
    on one state vector.  Fidelities come from reduced density matrices.
    Intended as a cross-check of :func:`run_bqt` for small registers.
    """
    wm = WireMap(alice.n, bob.n)
    state = qsim.kron_all(make_ghz_like(alice), make_ghz_like(bob), make_cluster_channel())
    state = reduction_circuit(state, wm.alice_inputs)
    state = reduction_circuit(state, wm.bob_inputs)
    projs = bell_projectors()
    ia, pa, state = qsim.measure(state, projs, rng, [wm.alice_inputs[0], wm.a1])
    ib, pb, state = qsim.measure(state, projs, rng, [wm.bob_inputs[0], wm.b1])
    a_out, b_out = BellOutcome(ia), BellOutcome(ib)
    channel = qsim.partial_trace(state, [wm.a2, wm.b2])
    eta = eta_state(ETA_INDEX[(a_out, b_out)], alice, bob)
    bob_fix, alice_fix = correction_for(a_out), correction_for(b_out)
    state = bob_fix.apply(state, wm.a2)
    state = alice_fix.apply(state, wm.b2)
    # fresh ancillas: Bob's after the joint register, then Alice's
    base = state.n_qubits
    state = qsim.kron(state, PureState.zeros(alice.n - 1 + bob.n - 1)) if alice.n + bob.n > 2 else state
    bob_anc = tuple(range(base, base + alice.n - 1))
    alice_anc = tuple(range(base + alice.n - 1, base + alice.n - 1 + bob.n - 1))
    state = reconstruction_circuit(state, wm.a2, bob_anc)
    state = reconstruction_circuit(state, wm.b2, alice_anc)
    rho_bob = qsim.partial_trace(state, (wm.a2,) + bob_anc)
    rho_alice = qsim.partial_trace(state, (wm.b2,) + alice_anc)
    return Transcript(
        alice_outcome=a_out,
        bob_outcome=b_out,
        alice_correction=alice_fix,
        bob_correction=bob_fix,
        probability=pa * pb,
        channel_state=_dominant(channel),
        received_by_bob=_dominant(rho_bob),
        received_by_alice=_dominant(rho_alice),
        fidelity_to_bob=qsim.fidelity_pure_dm(make_ghz_like(alice), rho_bob),
        fidelity_to_alice=qsim.fidelity_pure_dm(make_ghz_like(bob), rho_alice),
        eta_overlap=qsim.fidelity_pure_dm(eta, channel),
    )


def _dominant(rho: qsim.DensityMatrix) -> PureState:
    w, v = np.linalg.eigh(rho.entries)
    return PureState(rho.n_qubits, v[:, -1])
