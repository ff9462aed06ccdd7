"""Three-qubit bit-flip repetition code on the four-qubit cluster channel.

Channel qubit ``j`` is encoded on physical qubits ``3j, 3j+1, 3j+2``
(``|0> -> |000>``, ``|1> -> |111>``), giving a 12-qubit register.  Syndrome
projector ``P_0`` projects onto the 16-dimensional subspace where every block
is ``000`` or ``111``; ``P_i = X_{i-1} P_0 X_{i-1}`` for ``i = 1..12``.  All
thirteen are diagonal in the computational basis and stored that way.

Two or more flips are never identified: they either miss every projector
(NoMatch) or, with two flips inside one block, trigger a wrong single-qubit
correction.  The correction cancels the error exactly when at most one qubit
flipped, which is what ``(1-p)**12 + 12 p (1-p)**11`` counts.  A few heavier
patterns end in a stabilizer of the cluster state (blocks 0+1, blocks 2+3 or
all four blocks flipped, give or take one qubit), so the encoded channel
still comes back intact; :class:`MaskResult` reports both notions.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np

from . import qsim
from .bqt import make_cluster_channel
from .errors import ArgumentError, ContractError, PreconditionError
from .qsim import Projector, PureState, Rng

N_LOGICAL = 4
BLOCK = 3
N_PHYSICAL = N_LOGICAL * BLOCK
N_SYNDROMES = N_PHYSICAL + 1
SYNDROME_TOL = 1e-10
FIDELITY_TOL = 1e-10


def qubit_bit(q: int, n_qubits: int = N_PHYSICAL) -> int:
    """Basis-index bit of qubit ``q`` (qubit 0 is the most significant)."""
    return 1 << (n_qubits - 1 - q)


@dataclass(frozen=True)
class FlipMask:
    """Which physical qubits received an X; bit ``qubit_bit(q)`` for qubit q."""

    bits: int

    def __post_init__(self) -> None:
        if not 0 <= self.bits < 1 << N_PHYSICAL:
            raise ArgumentError(f"flip mask {self.bits} out of range")

    @classmethod
    def of(cls, *qubits: int) -> FlipMask:
        bits = 0
        for q in qubits:
            if not 0 <= q < N_PHYSICAL:
                raise ArgumentError(f"qubit {q} out of range")
            bits ^= qubit_bit(q)
        return cls(bits)

    @property
    def qubits(self) -> tuple[int, ...]:
        return tuple(q for q in range(N_PHYSICAL) if self.bits & qubit_bit(q))

    @property
    def weight(self) -> int:
        return bin(self.bits).count("1")

    def __xor__(self, other: FlipMask) -> FlipMask:
        return FlipMask(self.bits ^ other.bits)


@dataclass(frozen=True)
class SyndromeOutcome:
    """Index of the projector that fired (0..12), or None for NoMatch."""

    index: int | None

    def __post_init__(self) -> None:
        if self.index is not None and not 0 <= self.index < N_SYNDROMES:
            raise ArgumentError(f"syndrome index {self.index} out of range")

    @property
    def no_match(self) -> bool:
        return self.index is None

    @property
    def flipped_qubit(self) -> int | None:
        """Physical qubit the syndrome blames, if any."""
        return None if self.index in (None, 0) else self.index - 1

    def __str__(self) -> str:
        return "NoMatch" if self.index is None else f"P{self.index}"


NO_MATCH = SyndromeOutcome(None)


def flip(state: PureState, mask: FlipMask) -> PureState:
    """Apply X on every qubit in ``mask`` (an index permutation)."""
    if mask.bits == 0:
        return state
    idx = np.arange(state.dim) ^ mask.bits
    return PureState(state.n_qubits, state.amplitudes[idx])


def encode(logical: PureState) -> PureState:
    """Repetition-encode a 4-qubit state onto 12 physical qubits."""
    if logical.n_qubits != N_LOGICAL:
        raise ArgumentError("encoder expects a 4-qubit state")
    amps = np.zeros(1 << N_PHYSICAL, dtype=np.complex128)
    amps[_encoded_index()] = logical.amplitudes
    return PureState(N_PHYSICAL, amps)


@functools.cache
def _encoded_index() -> np.ndarray:
    out = np.zeros(1 << N_LOGICAL, dtype=np.int64)
    for x in range(1 << N_LOGICAL):
        for j in range(N_LOGICAL):
            if x & qubit_bit(j, N_LOGICAL):
                for k in range(BLOCK):
                    out[x] |= qubit_bit(BLOCK * j + k)
    return out


def encode_logical_channel() -> PureState:
    """Encoded cluster channel ``(|0000>_L + |0011>_L + |1100>_L + |1111>_L)/2``."""
    return encode(make_cluster_channel())


@functools.cache
def _uniform_blocks() -> np.ndarray:
    """Boolean mask of basis states whose four blocks each read 000 or 111."""
    mask = np.zeros(1 << N_PHYSICAL, dtype=bool)
    mask[_encoded_index()] = True
    mask.flags.writeable = False
    return mask


@functools.cache
def syndrome_projectors() -> tuple[Projector, ...]:
    """``P_0 .. P_12`` as diagonal projectors on 12 qubits."""
    base = _uniform_blocks()
    idx = np.arange(base.shape[0])
    out = [Projector(N_PHYSICAL, diagonal=base)]
    for q in range(N_PHYSICAL):
        out.append(Projector(N_PHYSICAL, diagonal=base[idx ^ qubit_bit(q)]))
    return tuple(out)


def syndrome_expectations(state: PureState) -> np.ndarray:
    """``<phi|P_i|phi>`` for i = 0..12."""
    return np.array([p.expectation(state) for p in syndrome_projectors()])


def measure_syndrome(state: PureState) -> SyndromeOutcome:
    """Identify the single flipped qubit, if any, without touching the state.

    Only expectation values are read.  Pure bit-flip noise on a code state
    gives 0/1 expectations; anything in between raises ContractError.
    """
    if state.n_qubits != N_PHYSICAL:
        raise ArgumentError("syndrome measurement expects 12 qubits")
    ev = syndrome_expectations(state)
    fired = np.flatnonzero(np.abs(ev - 1.0) <= SYNDROME_TOL)
    silent = np.abs(ev) <= SYNDROME_TOL
    if not np.all(silent | (np.abs(ev - 1.0) <= SYNDROME_TOL)):
        raise ContractError(f"syndrome expectations are not 0/1: {ev}")
    if fired.size == 0:
        return NO_MATCH
    return SyndromeOutcome(int(fired[0]))


def correction_mask(outcome: SyndromeOutcome) -> FlipMask:
    q = outcome.flipped_qubit
    return FlipMask(0) if q is None else FlipMask.of(q)


def correct(state: PureState, outcome: SyndromeOutcome) -> tuple[PureState, bool]:
    """Undo the flip ``outcome`` points to; NoMatch leaves the state alone."""
    if outcome.no_match:
        return state, False
    return flip(state, correction_mask(outcome)), True


def decode_logical(state: PureState) -> PureState:
    """Read each uniform block back as one qubit."""
    if state.n_qubits != N_PHYSICAL:
        raise ArgumentError("decoder expects 12 qubits")
    inside = state.amplitudes[_encoded_index()]
    if abs(np.vdot(inside, inside).real - 1.0) > qsim.PROP_TOL:
        raise PreconditionError("state has weight outside the uniform-block subspace")
    return PureState(N_LOGICAL, inside)


def apply_random_bitflips(state: PureState, p: float, rng: Rng) -> tuple[PureState, FlipMask]:
    """Flip each of the 12 qubits independently with probability ``p``."""
    mask = sample_flip_mask(p, rng)
    return flip(state, mask), mask


_BIT_WEIGHTS = np.array([qubit_bit(q) for q in range(N_PHYSICAL)], dtype=np.int64)


def sample_flip_mask(p: float, rng: Rng) -> FlipMask:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ArgumentError(f"p must lie in [0, 1], got {p!r}")
    u = rng.random(N_PHYSICAL)
    return FlipMask(int(_BIT_WEIGHTS[u < p].sum()))


# ---------------------------------------------------------------------------
# analysis


def p_ec_closed_form(p: float) -> float:
    """Probability that at most one of the twelve qubits flips."""
    return (1 - p) ** 12 + 12 * p * (1 - p) ** 11


def p_e_closed_form(p: float) -> float:
    return 1 - p_ec_closed_form(p)


@dataclass(frozen=True)
class MaskResult:
    mask: FlipMask
    syndrome: SyndromeOutcome
    corrected: bool
    residual: FlipMask  # flips left after the correction
    fidelity: float  # with the encoded channel after correction

    @property
    def restores_code_space(self) -> bool:
        """The correction cancelled the error operator itself."""
        return self.residual.bits == 0

    @property
    def restores_channel(self) -> bool:
        """The encoded cluster state is back (fidelity 1)."""
        return self.fidelity >= 1 - FIDELITY_TOL


@functools.lru_cache(maxsize=1 << N_PHYSICAL)
def run_mask(bits: int) -> MaskResult:
    """Flip, measure syndrome, correct, compare: the full pipeline for one mask."""
    mask = FlipMask(bits)
    ideal = encode_logical_channel()
    noisy = flip(ideal, mask)
    syndrome = measure_syndrome(noisy)
    fixed, corrected = correct(noisy, syndrome)
    residual = mask ^ correction_mask(syndrome)
    return MaskResult(mask, syndrome, corrected, residual, qsim.fidelity_pure(ideal, fixed))


def enumerate_masks() -> list[MaskResult]:
    """Run the pipeline on all 4096 deterministic flip patterns."""
    return [run_mask(b) for b in range(1 << N_PHYSICAL)]


def success_probability(p: float, criterion: str = "code_space") -> float:
    """Exact success probability from the mask enumeration.

    ``criterion="code_space"`` counts masks the correction fully cancels;
    ``"channel"`` counts masks after which the encoded cluster state is
    recovered, which also includes flips that act trivially on it.
    """
    total = 0.0
    for r in enumerate_masks():
        ok = r.restores_code_space if criterion == "code_space" else r.restores_channel
        if ok:
            w = r.mask.weight
            total += p**w * (1 - p) ** (N_PHYSICAL - w)
    return total


@dataclass(frozen=True)
class MonteCarloResult:
    p: float
    trials: int
    successes: int

    @property
    def estimate(self) -> float:
        return self.successes / self.trials

    @property
    def standard_error(self) -> float:
        q = self.estimate
        return math.sqrt(q * (1 - q) / self.trials)

    def z_score(self, expected: float) -> float:
        se = self.standard_error
        if se == 0:
            return 0.0 if self.estimate == expected else math.inf
        return (self.estimate - expected) / se


def monte_carlo(p: float, trials: int, seed: int) -> MonteCarloResult:
    """Estimate the rate at which the encoded channel is recovered.

    Trial ``t`` draws its flips from ``Rng.for_trial(seed, t)``, so the count
    does not depend on trial order.  The pipeline outcome for a given mask is
    deterministic and is memoized by :func:`run_mask`.
    """
    if trials < 1:
        raise ArgumentError("trials must be positive")
    wins = 0
    for t in range(trials):
        mask = sample_flip_mask(p, Rng.for_trial(seed, t))
        wins += run_mask(mask.bits).restores_channel
    return MonteCarloResult(float(p), int(trials), wins)


def monte_carlo_pec(p: float, trials: int, seed: int) -> tuple[float, float]:
    r = monte_carlo(p, trials, seed)
    return r.estimate, r.standard_error


def crossover_threshold(tol: float = 1e-6) -> float:
    """Root of ``p_e(p) = p`` on (0, 0.5) by bisection."""
    lo, hi = 1e-9, 0.5
    f = lambda x: p_e_closed_form(x) - x  # noqa: E731
    if not f(lo) < 0 < f(hi):
        raise ContractError("threshold is not bracketed")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
