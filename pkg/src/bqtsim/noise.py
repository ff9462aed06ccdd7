"""Single-qubit Kraus noise applied independently to the four channel qubits.

``apply_iid_channel`` evaluates the full sum over all ``k**4`` tensor
products of the single-qubit Kraus operators; nothing is truncated.
:func:`closed_form_fidelity` keeps the usual truncated expressions, with
their elided terms dropped, for comparison only.
"""

from __future__ import annotations

import enum
import functools
import itertools
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import qsim
from .bqt import make_cluster_channel
from .errors import ArgumentError, ContractError
from .qsim import DensityMatrix

N_CHANNEL_QUBITS = 4


class NoiseKind(enum.Enum):
    BIT_FLIP = "bitflip"
    PHASE_FLIP = "phaseflip"
    BIT_PHASE_FLIP = "bitphaseflip"
    DEPOLARIZING = "depolarizing"
    AMPLITUDE_DAMPING = "ampdamp"
    PHASE_DAMPING = "phasedamp"

    @classmethod
    def parse(cls, name: str) -> NoiseKind:
        try:
            return cls(name.strip().lower())
        except ValueError:
            choices = ", ".join(k.value for k in cls)
            raise ArgumentError(f"unknown noise kind {name!r} (choose from {choices})") from None


FLIP_KINDS = (NoiseKind.BIT_FLIP, NoiseKind.PHASE_FLIP, NoiseKind.BIT_PHASE_FLIP)

_I2 = np.eye(2, dtype=np.complex128)
_X = qsim.X.matrix
_Y = qsim.Y.matrix
_Z = qsim.Z.matrix
_P0 = np.array([[1, 0], [0, 0]], dtype=np.complex128)
_P1 = np.array([[0, 0], [0, 1]], dtype=np.complex128)
_LOWER = np.array([[0, 1], [0, 0]], dtype=np.complex128)  # |0><1|


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Single-qubit channel ``rho -> sum_k E_k rho E_k^dag``."""

    kind: NoiseKind
    p: float
    operators: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        ops = []
        for e in self.operators:
            e = np.array(e, dtype=np.complex128)
            if e.shape != (2, 2):
                raise ArgumentError("Kraus operators must be 2x2")
            e.flags.writeable = False
            ops.append(e)
        # trace preservation: sum E^dag E = I
        total = sum(e.conj().T @ e for e in ops)
        if np.max(np.abs(total - _I2)) > qsim.PROP_TOL:
            raise ContractError(f"Kraus operators for {self.kind.value} are not complete")
        object.__setattr__(self, "operators", tuple(ops))

    def __len__(self) -> int:
        return len(self.operators)

    def apply_single(self, rho: np.ndarray) -> np.ndarray:
        return sum(e @ rho @ e.conj().T for e in self.operators)


def kraus_for(kind: NoiseKind, p: float) -> KrausChannel:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ArgumentError(f"p must lie in [0, 1], got {p!r}")
    a, b = np.sqrt(1.0 - p), np.sqrt(p)
    if kind is NoiseKind.BIT_FLIP:
        ops = (a * _I2, b * _X)
    elif kind is NoiseKind.PHASE_FLIP:
        ops = (a * _I2, b * _Z)
    elif kind is NoiseKind.BIT_PHASE_FLIP:
        ops = (a * _I2, b * _Y)
    elif kind is NoiseKind.DEPOLARIZING:
        c = np.sqrt(p / 3.0)
        ops = (a * _I2, c * _X, c * _Y, c * _Z)
    elif kind is NoiseKind.AMPLITUDE_DAMPING:
        ops = (np.array([[1, 0], [0, a]], dtype=np.complex128), b * _LOWER)
    elif kind is NoiseKind.PHASE_DAMPING:
        ops = (a * _I2, b * _P0, b * _P1)
    else:  # pragma: no cover
        raise ArgumentError(f"unsupported kind {kind!r}")
    return KrausChannel(kind, p, ops)


def effective_operators(ch: KrausChannel) -> tuple[np.ndarray, ...]:
    """Operators with nonzero weight (``p = 0`` bit flip leaves just ``I``)."""
    return tuple(e for e in ch.operators if np.any(e != 0))


def tensor_kraus(ch: KrausChannel, n_qubits: int = N_CHANNEL_QUBITS) -> dict[tuple[int, ...], np.ndarray]:
    """``E_{i j k l} = E_i (x) E_j (x) E_k (x) E_l`` for every index tuple."""
    out = {}
    for idx in itertools.product(range(len(ch)), repeat=n_qubits):
        m = np.ones((1, 1), dtype=np.complex128)
        for i in idx:
            m = np.kron(m, ch.operators[i])
        out[idx] = m
    return out


def apply_iid_channel(dm: DensityMatrix, ch: KrausChannel) -> DensityMatrix:
    """Apply ``ch`` to every qubit of ``dm`` as one sum over tensor products."""
    ks = np.stack(list(tensor_kraus(ch, dm.n_qubits).values()))
    rho = np.einsum("kij,jl,kml->im", ks, dm.entries, ks.conj(), optimize=True)
    return DensityMatrix(dm.n_qubits, rho)


@functools.cache
def cluster_dm() -> DensityMatrix:
    return qsim.pure_to_dm(make_cluster_channel())


def noisy_cluster(kind: NoiseKind, p: float) -> DensityMatrix:
    return apply_iid_channel(cluster_dm(), kraus_for(kind, p))


def channel_fidelity_exact(kind: NoiseKind, p: float) -> float:
    """Fidelity of the noisy cluster channel with the noiseless one."""
    return qsim.fidelity_pure_dm(make_cluster_channel(), noisy_cluster(kind, p))


def fidelity_contributions(kind: NoiseKind, p: float) -> dict[tuple[int, ...], float]:
    """Per-term split of ``<Phi|rho'|Phi>``: ``|<Phi|E_ijkl|Phi>|**2`` by index.

    The values sum to the squared exact fidelity.  Zero terms are included.
    """
    phi = make_cluster_channel().amplitudes
    return {
        idx: float(abs(np.vdot(phi, e @ phi)) ** 2)
        for idx, e in tensor_kraus(kraus_for(kind, p)).items()
    }


def closed_form_fidelity(kind: NoiseKind, p: float) -> float:
    """Reference closed forms, with the elided ``...`` terms dropped.

    Exact for the three flip channels; a truncation for the others (and for
    amplitude damping, a different polynomial from the exact result).
    """
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ArgumentError(f"p must lie in [0, 1], got {p!r}")
    if kind in FLIP_KINDS:
        return 2 * p**2 - 2 * p + 1
    if kind is NoiseKind.DEPOLARIZING:
        return float(np.sqrt((1 - p) ** 4 + p**4 / 27))
    if kind is NoiseKind.AMPLITUDE_DAMPING:
        return float(0.5 * np.sqrt(p**4 - 3 * p**3 + 7 * p**2 - 8 * p + 4))
    if kind is NoiseKind.PHASE_DAMPING:
        return float(np.sqrt((1 - p) ** 4 + p**4 / 8))
    raise ArgumentError(f"unsupported kind {kind!r}")  # pragma: no cover


@dataclass(frozen=True)
class FidelityCurve:
    kind: NoiseKind
    samples: tuple[tuple[float, float, float], ...]  # (p, exact, closed form)

    def __post_init__(self) -> None:
        ps = [s[0] for s in self.samples]
        if any(b <= a for a, b in zip(ps, ps[1:])):
            raise ArgumentError("p grid must be strictly increasing")
        for p, fe, fc in self.samples:
            if not (0 <= p <= 1 and 0 <= fe <= 1 and 0 <= fc <= 1):
                raise ContractError(f"sample out of [0, 1]: {(p, fe, fc)}")

    @property
    def p(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    @property
    def exact(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples])

    @property
    def closed_form(self) -> np.ndarray:
        return np.array([s[2] for s in self.samples])


def parse_grid(spec: str) -> np.ndarray:
    """``"start:stop:count"`` -> ``count`` points, both ends included."""
    try:
        start_s, stop_s, count_s = spec.split(":")
        start, stop, count = float(start_s), float(stop_s), int(count_s)
    except ValueError:
        raise ArgumentError(f"grid must look like start:stop:count, got {spec!r}") from None
    if count < 1 or not (0 <= start <= 1 and 0 <= stop <= 1):
        raise ArgumentError(f"bad grid {spec!r}")
    if count == 1:
        return np.array([start])
    if stop <= start:
        raise ArgumentError("grid stop must exceed start")
    return np.linspace(start, stop, count)


def sweep(kind: NoiseKind, p_grid: Iterable[float]) -> FidelityCurve:
    samples = tuple(
        (float(p), channel_fidelity_exact(kind, p), closed_form_fidelity(kind, p))
        for p in p_grid
    )
    return FidelityCurve(kind, samples)
