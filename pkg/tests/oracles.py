"""Reference implementations used only by the tests."""

from __future__ import annotations

import itertools

import numpy as np

CLUSTER_SUPPORT = (0b0000, 0b0011, 0b1100, 0b1111)


def superoperator_oracle(ops: tuple[np.ndarray, ...]) -> np.ndarray:
    """256x256 matrix acting on row-major vec(rho), built qubit by qubit.

    A single-qubit channel is ``S1[(a b), (c d)] = sum_k E[a, c] conj(E[b, d])``;
    the four-qubit map is the product of one copy per qubit, with the indices
    interleaved to match the row/column split of vec(rho).
    """
    s1 = sum(np.einsum("ac,bd->abcd", e, e.conj()) for e in ops)  # (a, b, c, d)
    t = np.einsum("aeAE,bfBF,cgCG,dhDH->abcdefghABCDEFGH", s1, s1, s1, s1)
    return t.reshape(256, 256)


def overlap_oracle(ops: tuple[np.ndarray, ...]) -> float:
    """Sum over index tuples of |<Phi|E_t|Phi>|^2 without forming any kron."""
    total = 0.0
    for idx in itertools.product(range(len(ops)), repeat=4):
        amp = 0.0
        for x in CLUSTER_SUPPORT:
            for y in CLUSTER_SUPPORT:
                term = 1.0 + 0j
                for q, k in enumerate(idx):
                    term *= ops[k][(x >> (3 - q)) & 1, (y >> (3 - q)) & 1]
                amp += term
        total += abs(amp / 4) ** 2
    return total
