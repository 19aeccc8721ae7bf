"""Plain-text matrix and tensor files.

Matrix block: a line ``rows cols`` followed by rows*cols lines ``re im`` in
column-major order.  Tensor files start with a header line and continue
with matrix blocks:

* ``DENSE d n_1 ... n_d``: the mode-1 unfolding (so entries follow vec(X)).
* ``TUCKER d k_1 ... k_d n_1 ... n_d``: the core's mode-1 unfolding, then
  the d factors.
* ``TT d n_1 ... n_d r_0 ... r_d``: every carriage as its left unfolding
  (r_{j-1} n_j) x r_j.
"""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .errors import DimensionMismatch
from .tensors import TTTensor, TuckerTensor, fold, unfold


def _format_block(M: np.ndarray) -> list[str]:
    M = np.asarray(M, dtype=complex)
    lines = [f"{M.shape[0]} {M.shape[1]}"]
    flat = M.ravel(order="F")
    lines += [f"{z.real:.17g} {z.imag:.17g}" for z in flat]
    return lines


class _Reader:
    def __init__(self, text: str):
        self.lines = [ln.strip() for ln in text.splitlines() if ln.strip()
                      and not ln.lstrip().startswith("#")]
        self.pos = 0

    def line(self) -> list[str]:
        if self.pos >= len(self.lines):
            raise ValueError("unexpected end of file")
        out = self.lines[self.pos].split()
        self.pos += 1
        return out

    def block(self) -> np.ndarray:
        head = self.line()
        if len(head) != 2:
            raise ValueError(f"bad matrix header {' '.join(head)!r}")
        rows, cols = int(head[0]), int(head[1])
        count = rows * cols
        if self.pos + count > len(self.lines):
            raise ValueError("matrix block is truncated")
        data = np.array([[float(t) for t in ln.split()[:2]] for ln in
                         self.lines[self.pos:self.pos + count]]).reshape(count, 2)
        self.pos += count
        vals = data[:, 0] + 1j * data[:, 1]
        if not np.all(np.isfinite(vals)):
            raise ValueError("matrix entries must be finite")
        return vals.reshape((rows, cols), order="F")


def _maybe_real(M: np.ndarray) -> np.ndarray:
    return M.real.copy() if not np.any(M.imag) else M


def write_matrix(path, M) -> None:
    Path(path).write_text("\n".join(_format_block(np.atleast_2d(M))) + "\n")


def read_matrix(path) -> np.ndarray:
    return _maybe_real(_Reader(Path(path).read_text()).block())


def write_tensor(path, T) -> None:
    if isinstance(T, TuckerTensor):
        d = T.ndim
        head = ["TUCKER", str(d), *map(str, T.ranks), *map(str, T.shape)]
        lines = [" ".join(head)] + _format_block(unfold(T.core, 0))
        for B in T.factors:
            lines += _format_block(B)
    elif isinstance(T, TTTensor):
        d = T.ndim
        full_ranks = [T.cores[0].shape[0]] + [G.shape[2] for G in T.cores]
        head = ["TT", str(d), *map(str, T.shape), *map(str, full_ranks)]
        lines = [" ".join(head)]
        for G in T.cores:
            lines += _format_block(G.reshape(G.shape[0] * G.shape[1], G.shape[2], order="F"))
    else:
        X = np.asarray(T)
        head = ["DENSE", str(X.ndim), *map(str, X.shape)]
        lines = [" ".join(head)] + _format_block(X.reshape(X.shape[0], -1, order="F"))
    Path(path).write_text("\n".join(lines) + "\n")


def read_tensor(path):
    r = _Reader(Path(path).read_text())
    head = r.line()
    kind, d = head[0].upper(), int(head[1])
    nums = [int(t) for t in head[2:]]
    if kind == "DENSE":
        if len(nums) != d:
            raise ValueError("DENSE header needs d sizes")
        M = r.block()
        if M.size != int(np.prod(nums)):
            raise DimensionMismatch("DENSE block size does not match the header")
        return _maybe_real(M.reshape(nums, order="F"))
    if kind == "TUCKER":
        if len(nums) != 2 * d:
            raise ValueError("TUCKER header needs d ranks and d sizes")
        ranks, shape = nums[:d], nums[d:]
        core = fold(r.block(), ranks, 0)
        factors = [r.block() for _ in range(d)]
        for B, n, k in zip(factors, shape, ranks):
            if B.shape != (n, k):
                raise DimensionMismatch(f"factor of shape {B.shape}, expected {(n, k)}")
        return TuckerTensor(core, factors)
    if kind == "TT":
        if len(nums) != 2 * d + 1:
            raise ValueError("TT header needs d sizes and d+1 ranks")
        shape, ranks = nums[:d], nums[d:]
        cores = []
        for j in range(d):
            M = r.block()
            if M.shape != (ranks[j] * shape[j], ranks[j + 1]):
                raise DimensionMismatch(f"carriage {j} block has shape {M.shape}")
            cores.append(M.reshape(ranks[j], shape[j], ranks[j + 1], order="F"))
        return TTTensor(cores)
    raise ValueError(f"unknown tensor file kind {kind!r}")
