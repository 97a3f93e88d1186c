"""Finite-support vectors on the positive integers and coordinate utilities."""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence

import numpy as np

from .errors import ParseError

IndexSet = frozenset


class SparseVec:
    """Immutable real vector with finite support in {1, 2, 3, ...}.

    Coordinates are kept as two sorted numpy arrays; zero coordinates are
    never stored, so ``support()`` is exactly the set of stored indices.
    """

    __slots__ = ("_idx", "_val")

    def __init__(self, entries: Mapping[int, float] | Iterable[tuple[int, float]] | None = None):
        if entries is None:
            pairs = []
        elif isinstance(entries, Mapping):
            pairs = list(entries.items())
        else:
            pairs = list(entries)
        idx = np.array([int(i) for i, _ in pairs], dtype=np.int64)
        val = np.array([float(v) for _, v in pairs], dtype=np.float64)
        self._set(idx, val, check_unique=True)

    def _set(self, idx, val, check_unique):
        if idx.size and idx.min() < 1:
            raise ValueError("indices must be positive integers")
        if not np.all(np.isfinite(val)):
            raise ValueError("coordinates must be finite")
        order = np.argsort(idx, kind="stable")
        idx, val = idx[order], val[order]
        if check_unique and idx.size > 1 and np.any(idx[1:] == idx[:-1]):
            raise ValueError("duplicate index")
        keep = val != 0.0
        idx, val = idx[keep], val[keep]
        idx.setflags(write=False)
        val.setflags(write=False)
        self._idx, self._val = idx, val

    @classmethod
    def from_arrays(cls, indices, values) -> SparseVec:
        out = cls.__new__(cls)
        out._set(np.asarray(indices, dtype=np.int64).copy(), np.asarray(values, dtype=np.float64).copy(), True)
        return out

    @classmethod
    def dense(cls, values: Sequence[float], start: int = 1) -> SparseVec:
        """Vector with x(start + i) = values[i]."""
        values = np.asarray(values, dtype=np.float64)
        return cls.from_arrays(np.arange(start, start + values.size), values)

    @classmethod
    def basis(cls, i: int) -> SparseVec:
        return cls({i: 1.0})

    @classmethod
    def ones(cls, n: int) -> SparseVec:
        """Sum of e_1, ..., e_n."""
        return cls.dense(np.ones(n))

    @property
    def indices(self) -> np.ndarray:
        return self._idx

    @property
    def values(self) -> np.ndarray:
        return self._val

    def support(self) -> frozenset:
        return frozenset(int(i) for i in self._idx)

    def __len__(self):
        return int(self._idx.size)

    def __bool__(self):
        return bool(self._idx.size)

    def __getitem__(self, i: int) -> float:
        pos = np.searchsorted(self._idx, i)
        if pos < self._idx.size and self._idx[pos] == i:
            return float(self._val[pos])
        return 0.0

    def items(self):
        return [(int(i), float(v)) for i, v in zip(self._idx, self._val)]

    def to_dict(self) -> dict[int, float]:
        return dict(self.items())

    @property
    def max_index(self) -> int:
        return int(self._idx[-1]) if self._idx.size else 0

    def abs(self) -> SparseVec:
        return SparseVec.from_arrays(self._idx, np.abs(self._val))

    def __neg__(self):
        return SparseVec.from_arrays(self._idx, -self._val)

    def __mul__(self, t):
        return SparseVec.from_arrays(self._idx, float(t) * self._val)

    __rmul__ = __mul__

    def __truediv__(self, t):
        return SparseVec.from_arrays(self._idx, self._val / float(t))

    def _combine(self, other: SparseVec, sign: float) -> SparseVec:
        idx = np.union1d(self._idx, other._idx)
        val = np.zeros(idx.size)
        val[np.searchsorted(idx, self._idx)] += self._val
        val[np.searchsorted(idx, other._idx)] += sign * other._val
        return SparseVec.from_arrays(idx, val)

    def __add__(self, other):
        return self._combine(other, 1.0)

    def __sub__(self, other):
        return self._combine(other, -1.0)

    def __eq__(self, other):
        if not isinstance(other, SparseVec):
            return NotImplemented
        return np.array_equal(self._idx, other._idx) and np.array_equal(self._val, other._val)

    def __hash__(self):
        return hash((self._idx.tobytes(), self._val.tobytes()))

    def __repr__(self):
        body = ", ".join(f"{i}: {v!r}" for i, v in self.items())
        return f"SparseVec({{{body}}})"


def _mask(x: SparseVec, A: Iterable[int]) -> np.ndarray:
    A = np.fromiter((int(a) for a in A), dtype=np.int64)
    return np.isin(x.indices, A)


def project(x: SparseVec, A: Iterable[int]) -> SparseVec:
    """P_A x: keep the coordinates of x indexed by A."""
    m = _mask(x, A)
    return SparseVec.from_arrays(x.indices[m], x.values[m])


def remainder(x: SparseVec, A: Iterable[int]) -> SparseVec:
    """R_A x = x - P_A x."""
    m = _mask(x, A)
    return SparseVec.from_arrays(x.indices[~m], x.values[~m])


def prefix_project(x: SparseVec, n: int) -> SparseVec:
    m = x.indices <= n
    return SparseVec.from_arrays(x.indices[m], x.values[m])


def sup_seminorm(x: SparseVec) -> float:
    return float(np.abs(x.values).max()) if len(x) else 0.0


def l1_norm(x: SparseVec) -> float:
    return math.fsum(np.abs(x.values))


def greedy_order(x: SparseVec) -> np.ndarray:
    """Indices of supp(x) by decreasing modulus, smaller index first on ties."""
    order = np.lexsort((x.indices, -np.abs(x.values)))
    return x.indices[order]


def greedy_support(x: SparseVec, n: int) -> frozenset:
    """A_n(x): indices of the n largest moduli (all of supp(x) if fewer)."""
    return frozenset(int(i) for i in greedy_order(x)[: max(n, 0)])


def decreasing_rearrangement(x: SparseVec) -> np.ndarray:
    return np.sort(np.abs(x.values))[::-1]


def rearrangement_dot(c: Sequence[float], d: Sequence[float], perm: Sequence[int] | None = None) -> float:
    """Sum of c[k] * d[perm[k]] for non-increasing non-negative c, d.

    ``perm`` is a 0-based permutation of range(len(c)); ``None`` means the
    identity, which maximizes the sum.
    """
    c = np.asarray(c, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if c.shape != d.shape or c.ndim != 1:
        raise ValueError("c and d must be 1-d sequences of equal length")
    if (c < 0).any() or (d < 0).any():
        raise ValueError("entries must be non-negative")
    if (np.diff(c) > 0).any() or (np.diff(d) > 0).any():
        raise ValueError("c and d must be non-increasing")
    if perm is None:
        perm = np.arange(c.size)
    perm = np.asarray(perm, dtype=np.int64)
    if perm.shape != c.shape or not np.array_equal(np.sort(perm), np.arange(c.size)):
        raise ValueError("perm is not a permutation of range(len(c))")
    return math.fsum(c * d[perm])


# -- text format -----------------------------------------------------------

def parse_vector(text: str) -> SparseVec:
    """Parse ``index:value`` lines; ``#`` starts a comment, indices increase."""
    pairs = []
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.count(":") != 1:
            raise ParseError(f"expected 'index:value', got {raw.strip()!r}", lineno)
        a, b = (s.strip() for s in line.split(":"))
        try:
            i = int(a)
        except ValueError:
            raise ParseError(f"bad index {a!r}", lineno) from None
        try:
            v = float(b)
        except ValueError:
            raise ParseError(f"bad value {b!r}", lineno) from None
        if i < 1:
            raise ParseError(f"index must be positive, got {i}", lineno)
        if i <= last:
            raise ParseError(f"indices must be strictly increasing ({i} after {last})", lineno)
        if not math.isfinite(v):
            raise ParseError(f"non-finite value {b!r}", lineno)
        last = i
        pairs.append((i, v))
    return SparseVec(pairs)


def read_vector(path) -> SparseVec:
    with open(path, encoding="utf-8") as fh:
        return parse_vector(fh.read())


def format_vector(x: SparseVec) -> str:
    return "".join(f"{i}:{v!r}\n" for i, v in x.items())
