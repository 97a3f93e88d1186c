"""Norm engines on finite-support sequences.

Every engine is a :class:`NormEngine`: a name, a scalar evaluator, optional
batch evaluators, and declared structural flags. The Luxemburg norm is
computed by bisection, the Nakano norm by Brent's method on its exact
modular; Day's norm and the block weighted norm have closed forms on the
vectors they are used with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.optimize import brentq, linear_sum_assignment

from . import _kernels as kern
from .errors import EngineError, HypothesisError, ParseError, SupportTooLarge
from .seqvec import SparseVec, prefix_project, sup_seminorm

ENVELOPE_MAX_SUPPORT = 20
EXHAUSTIVE_MAX_SUPPORT = 16


# --------------------------------------------------------------------------
# engine type
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class NormEngine:
    name: str
    eval: Callable[[SparseVec], float]
    symmetric: bool = False
    one_unconditional: bool = False
    lattice_monotone: bool = False
    unconditional_constant: float = 1.0
    # rows are dense coordinates over a shared, increasing index array
    eval_rows: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    eval_mp: Callable[..., object] | None = field(default=None, compare=False)

    def __call__(self, x: SparseVec) -> float:
        return self.eval(x)

    @property
    def flags(self) -> dict[str, bool]:
        return {
            "symmetric": self.symmetric,
            "one_unconditional": self.one_unconditional,
            "lattice_monotone": self.lattice_monotone,
        }

    def eval_many(self, indices, rows) -> np.ndarray:
        indices = np.asarray(indices, dtype=np.int64)
        rows = np.atleast_2d(np.asarray(rows, dtype=np.float64))
        if self.eval_rows is not None:
            return np.asarray(self.eval_rows(indices, rows), dtype=np.float64)
        return np.array([self.eval(SparseVec.from_arrays(indices, r)) for r in rows])


# --------------------------------------------------------------------------
# c0 and the summing-coordinate norm
# --------------------------------------------------------------------------

def c0_norm() -> NormEngine:
    return NormEngine(
        "c0",
        sup_seminorm,
        symmetric=True,
        one_unconditional=True,
        lattice_monotone=True,
        unconditional_constant=1.0,
        eval_rows=lambda idx, rows: np.abs(rows).max(axis=1, initial=0.0),
    )


def summing_norm(x: SparseVec) -> float:
    """sup_n |x(1) + ... + x(n)|."""
    return float(kern.summing_rows(x.values)[0]) if len(x) else 0.0


def summing_engine() -> NormEngine:
    return NormEngine(
        "summing",
        summing_norm,
        unconditional_constant=math.inf,
        eval_rows=lambda idx, rows: kern.summing_rows(rows),
    )


def summing_prefix_project(x: SparseVec, n: int) -> SparseVec:
    """Basis projection onto the first n summing-basis vectors, written in
    standard coordinates: sum_{i<=n} (x(i) - x(n+1)) e_i."""
    head = np.zeros(n)
    m = x.indices <= n
    head[x.indices[m] - 1] = x.values[m]
    return SparseVec.dense(head - x[n + 1])


# --------------------------------------------------------------------------
# Orlicz functions and the Luxemburg norm
# --------------------------------------------------------------------------

def _default_M(t):
    return kern.orlicz_M_np(t, kern.KIND_DEFAULT, 0.0)


def _default_log_M(t):
    t = np.asarray(t, dtype=np.float64)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(t <= 0.5, 2.0 - 1.0 / t - math.log(3.0), np.log((4.0 * t - 1.0) / 3.0))


@dataclass(frozen=True)
class OrliczFn:
    """Normalized convex Orlicz function; ``M`` must accept numpy arrays.

    ``kind``/``param`` name a built-in family that has a compiled kernel.
    ``t_max`` is sup{t : M(t) <= 1}; for convex M with M(1) = 1 the ratio
    M(t)/t is non-decreasing, so this is always 1.
    """

    M: Callable[[np.ndarray], np.ndarray]
    K_growth: float = 2.0
    name: str = "custom"
    kind: int | None = None
    param: float = 0.0
    log_M: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)
    t_max: float = field(default=1.0, init=False)

    def __post_init__(self):
        if not self.K_growth > 1:
            raise ValueError("K_growth must exceed 1")
        m0, m1 = (float(v) for v in self(np.array([0.0, 1.0])))
        if m0 != 0.0 or abs(m1 - 1.0) > 1e-12:
            raise ValueError(f"Orlicz function must satisfy M(0)=0, M(1)=1 (got {m0}, {m1})")
        grid = np.linspace(0.0, 2.0, 10_001)
        vals = self(grid)
        scale = max(1.0, float(vals.max()))
        if (np.diff(vals) < -1e-12 * scale).any():
            raise ValueError(f"Orlicz function {self.name!r} is not non-decreasing")
        if (np.diff(vals, 2) < -1e-12 * scale).any():
            raise ValueError(f"Orlicz function {self.name!r} is not convex on the check grid")

    def __call__(self, t) -> np.ndarray:
        return np.asarray(self.M(np.asarray(t, dtype=np.float64)), dtype=np.float64)

    def ratio(self, tau) -> np.ndarray:
        """M(tau) / M(K tau), with the log form when available (underflow)."""
        tau = np.asarray(tau, dtype=np.float64)
        K = self.K_growth
        if self.kind == kern.KIND_POWER:
            return np.full(tau.shape, K ** -self.param)
        if self.log_M is not None:
            return np.exp(self.log_M(tau) - self.log_M(K * tau))
        num, den = self(tau), self(K * tau)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(den > 0, num / den, 0.0)

    @classmethod
    def power(cls, p: float, K_growth: float = 2.0) -> OrliczFn:
        if p < 1:
            raise ValueError("power Orlicz function needs p >= 1")
        return cls(lambda t: t ** p, K_growth, f"pow{p:g}", kern.KIND_POWER, float(p))

    @classmethod
    def default(cls, K_growth: float = 2.0) -> OrliczFn:
        """exp(1 - 1/t) on (0, 1/2], tangent line beyond, scaled so M(1) = 1."""
        return cls(_default_M, K_growth, "default", kern.KIND_DEFAULT, 0.0, _default_log_M)


def modular_orlicz(M: OrliczFn, x: SparseVec, rho: float) -> float:
    if not rho > 0:
        raise ValueError("rho must be positive")
    return math.fsum(M(np.abs(x.values) / rho))


def _luxemburg_absrows(M: OrliczFn, absrows: np.ndarray) -> np.ndarray:
    absrows = np.atleast_2d(absrows)
    hi = absrows.sum(axis=1)
    nz = hi > 0
    top = M(absrows[nz] / hi[nz, None]).sum(axis=1)
    if (top > 1.0 + 1e-12).any():
        raise RuntimeError(f"invalid Luxemburg bracket for {M.name!r}: modular at l1 norm exceeds 1")
    if M.kind is not None:
        return kern.luxemburg_rows(absrows, M.kind, M.param, M.t_max)
    return kern.luxemburg_rows_np(absrows, -1, 0.0, M.t_max, M=M)


def luxemburg_norm(M: OrliczFn, x: SparseVec) -> float:
    if not len(x):
        return 0.0
    return float(_luxemburg_absrows(M, np.abs(x.values))[0])


def orlicz_engine(M: OrliczFn) -> NormEngine:
    return NormEngine(
        f"orlicz:{M.name}",
        lambda x: luxemburg_norm(M, x),
        symmetric=True,
        one_unconditional=True,
        lattice_monotone=True,
        eval_rows=lambda idx, rows: _luxemburg_absrows(M, np.abs(rows)),
    )


# --------------------------------------------------------------------------
# Nakano exponents and the symmetric Nakano norm
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class NakanoExponents:
    """Non-decreasing exponent sequence p_1 <= p_2 <= ... with p_1 >= 1.

    ``fn`` maps a 1-based integer array n to p_n. A bounded sequence must be
    eventually constant from index ``stable_from`` on.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    name: str
    unbounded: bool
    stable_from: int | None = None

    def values(self, n: int) -> np.ndarray:
        p = np.asarray(self.fn(np.arange(1, n + 1)), dtype=np.float64)
        if n and p[0] < 1:
            raise ValueError("p_1 must be >= 1")
        if (np.diff(p) < 0).any():
            raise ValueError(f"exponents {self.name!r} are not non-decreasing")
        return p

    def __call__(self, n: int) -> float:
        return float(self.values(n)[-1])

    @classmethod
    def linear(cls) -> NakanoExponents:
        return cls(lambda n: n.astype(np.float64), "linear", True)

    @classmethod
    def ones(cls) -> NakanoExponents:
        return cls(lambda n: np.ones(n.shape), "ones", False, 1)

    @classmethod
    def log(cls) -> NakanoExponents:
        return cls(lambda n: 1.0 + np.log(n), "log", True)

    @classmethod
    def capped(cls, cap: float) -> NakanoExponents:
        if cap < 1:
            raise ValueError("cap must be >= 1")
        return cls(lambda n: np.minimum(n, cap).astype(np.float64), f"capped:{cap:g}", False, int(math.ceil(cap)))


def _slot_count(p: NakanoExponents, n: int, over_one: bool) -> int:
    if not over_one:
        # values <= 1 never gain from a later (larger) exponent
        return n
    return p.stable_from - 1 + n


def _nakano_modular_abs(p: NakanoExponents, v: np.ndarray) -> float:
    n = v.size
    if n == 0:
        return 0.0
    over_one = bool(v.max() > 1.0)
    if over_one:
        if p.unbounded:
            return math.inf
        if p.stable_from is None:
            raise ValueError(f"bounded exponents {p.name!r} must declare stable_from")
    P = p.values(_slot_count(p, n, over_one))
    if not over_one and v.min() == v.max():
        # equal moduli: every injection into the first n slots is optimal
        return math.fsum(v[0] ** P[:n])
    C = v[:, None] ** P[None, :]
    rows, cols = linear_sum_assignment(C, maximize=True)
    return math.fsum(C[rows, cols])


def nakano_modular(p: NakanoExponents, x: SparseVec) -> float:
    """sup over injections of supp(x) into exponent slots of sum |x|^{p_slot}.

    Solved exactly as a maximum-weight assignment over a horizon that is
    provably sufficient (the first |supp| slots when all moduli are <= 1).
    """
    return _nakano_modular_abs(p, np.abs(x.values))


def _solve_unit_modular(modular, lo, hi):
    """rho in [lo, hi] with modular(rho) = 1, for a continuous non-increasing
    modular with modular(lo) >= 1 >= modular(hi)."""
    f_lo = modular(lo) - 1.0
    if f_lo <= 0.0 or hi <= lo:
        return lo
    f_hi = modular(hi) - 1.0
    if f_hi >= 0.0:
        return hi
    return brentq(lambda r: modular(r) - 1.0, lo, hi, xtol=lo * 1e-16, rtol=kern.BISECT_RTOL / 4, maxiter=kern.BISECT_MAX_ITER)


def nakano_norm(p: NakanoExponents, x: SparseVec) -> float:
    v = np.abs(x.values)
    if v.size == 0:
        return 0.0
    return _solve_unit_modular(lambda rho: _nakano_modular_abs(p, v / rho), float(v.max()), math.fsum(v))


def nakano_norm_mp(p: NakanoExponents, x: SparseVec, dps: int = 80):
    """Nakano norm in mpmath arithmetic with ``dps`` decimal digits.

    The optimal slot assignment is chosen in double precision and then
    evaluated in high precision; for vectors whose moduli are all equal the
    choice is irrelevant and the result is accurate to ``dps`` digits.
    """
    import mpmath

    v = np.abs(x.values)
    if v.size == 0:
        return mpmath.mpf(0)
    P = p.values(v.size)
    with mpmath.workdps(dps + 10):
        vm = [mpmath.mpf(float(a)) for a in v]
        Pm = [mpmath.mpf(float(a)) for a in P]

        equal = v.min() == v.max()

        def f(rho):
            if equal and rho >= vm[0]:
                rows = cols = range(v.size)
            else:
                C = (v[:, None] / float(rho)) ** P[None, :]
                rows, cols = linear_sum_assignment(C, maximize=True)
            return mpmath.fsum((vm[r] / rho) ** Pm[c] for r, c in zip(rows, cols)) - 1

        lo, hi = mpmath.mpf(float(v.max())), mpmath.fsum(vm)
        if f(lo) <= 0:
            return +lo
        guess = nakano_norm(p, x)
        a, b = mpmath.mpf(guess) * (1 - mpmath.mpf(10) ** -10), mpmath.mpf(guess) * (1 + mpmath.mpf(10) ** -10)
        if not (f(a) > 0 >= f(b)):
            a, b = lo, hi
        root = mpmath.findroot(f, (a, b), solver="anderson", tol=mpmath.mpf(10) ** (-2 * dps))
    with mpmath.workdps(dps):
        return +root


def nakano_engine(p: NakanoExponents) -> NormEngine:
    return NormEngine(
        f"nakano:{p.name}",
        lambda x: nakano_norm(p, x),
        symmetric=True,
        one_unconditional=True,
        lattice_monotone=True,
        eval_mp=lambda x, dps=80: nakano_norm_mp(p, x, dps),
    )


# --------------------------------------------------------------------------
# Day's norm
# --------------------------------------------------------------------------

def day_norm(x: SparseVec) -> float:
    """(sum_k 2^{-k} v_k^2)^{1/2} with v the decreasing rearrangement of |x|."""
    if not len(x):
        return 0.0
    return float(kern.day_rows(np.abs(x.values))[0])


def day_norm_sq_exact(squares) -> Fraction:
    """Exact squared Day norm from exact squared moduli (any iterable)."""
    sq = sorted((Fraction(s) for s in squares), reverse=True)
    return sum((s / 2 ** (k + 1) for k, s in enumerate(sq)), Fraction(0))


def day_engine() -> NormEngine:
    return NormEngine(
        "day",
        day_norm,
        symmetric=True,
        one_unconditional=True,
        lattice_monotone=True,
        eval_rows=lambda idx, rows: kern.day_rows(np.abs(rows)),
    )


# --------------------------------------------------------------------------
# block weights (the non-symmetric norm on c0)
# --------------------------------------------------------------------------

def in_dyadic_set(d: Fraction) -> bool:
    """Whether d = 1 / (m 2^k) for integers m, k >= 1."""
    d = Fraction(d)
    if d <= 0 or d.numerator != 1:
        return False
    den = d.denominator
    return den % 2 == 0


@dataclass(frozen=True)
class BlockWeights:
    """Finite blocks H_k with weight q_j = 2^{-k} / |H_k| on each member."""

    blocks: tuple[tuple[int, tuple[int, ...]], ...]
    members: np.ndarray = field(init=False, repr=False, compare=False)
    q_values: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        blocks = tuple((int(k), tuple(sorted(int(j) for j in H))) for k, H in self.blocks)
        object.__setattr__(self, "blocks", blocks)
        prev_level, prev_max = 0, 0
        for k, H in blocks:
            if not H:
                raise ValueError(f"block at level {k} is empty")
            if k <= prev_level:
                raise ValueError("block levels must be strictly increasing positive integers")
            if H[0] <= prev_max:
                raise ValueError(f"block at level {k} overlaps or precedes the previous block")
            prev_level, prev_max = k, H[-1]
        members = np.array([j for _, H in blocks for j in H], dtype=np.int64)
        q = np.array([2.0 ** -k / len(H) for k, H in blocks for _ in H])
        members.setflags(write=False)
        q.setflags(write=False)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "q_values", q)

    @classmethod
    def consecutive(cls, sizes, levels=None, start: int = 1) -> BlockWeights:
        levels = list(range(1, len(sizes) + 1)) if levels is None else list(levels)
        blocks, j = [], start
        for k, s in zip(levels, sizes):
            blocks.append((k, tuple(range(j, j + s))))
            j += s
        return cls(tuple(blocks))

    def q_exact(self, j: int) -> Fraction:
        for k, H in self.blocks:
            if H[0] <= j <= H[-1] and j in H:
                return Fraction(1, 2 ** k * len(H))
        raise KeyError(j)

    def q(self, j: int) -> float:
        pos = np.searchsorted(self.members, j)
        if pos < self.members.size and self.members[pos] == j:
            return float(self.q_values[pos])
        raise KeyError(j)

    def total_q_exact(self) -> Fraction:
        return sum((Fraction(1, 2 ** k) for k, _ in self.blocks), Fraction(0))

    def is_admissible(self) -> bool:
        """q non-increasing along the stored members in index order."""
        return bool((np.diff(self.q_values) <= 0).all())

    def to_text(self) -> str:
        lines = ["# k |H_k| min_index"]
        for k, H in self.blocks:
            if H[-1] - H[0] + 1 != len(H):
                raise ValueError("only consecutive blocks can be serialized")
            lines.append(f"{k} {len(H)} {H[0]}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> BlockWeights:
        blocks = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            try:
                k, size, start = (int(s) for s in parts)
            except ValueError:
                raise ParseError(f"expected 'k size min_index', got {raw.strip()!r}", lineno) from None
            if k < 1 or size < 1 or start < 1:
                raise ParseError("block fields must be positive", lineno)
            blocks.append((k, tuple(range(start, start + size))))
        try:
            return cls(tuple(blocks))
        except ValueError as exc:
            raise ParseError(str(exc), len(text.splitlines())) from None


def read_blockweights(path) -> BlockWeights:
    with open(path, encoding="utf-8") as fh:
        return BlockWeights.from_text(fh.read())


def _member_weights(W: BlockWeights, x: SparseVec):
    """(inside, q) for each support point of x; q is 0 off the blocks."""
    if W.members.size == 0:
        return np.zeros(len(x), dtype=bool), np.zeros(len(x))
    pos = np.minimum(np.searchsorted(W.members, x.indices), W.members.size - 1)
    inside = W.members[pos] == x.indices
    return inside, np.where(inside, W.q_values[pos], 0.0)


def _best_chain(q: np.ndarray, w: np.ndarray) -> float:
    """max sum of w over index-ordered subsequences along which q does not increase."""
    if q.size == 0:
        return 0.0
    if (np.diff(q) <= 0).all():
        return math.fsum(w)
    best = np.zeros(q.size)
    for i in range(q.size):
        prev = best[:i][q[:i] >= q[i]]
        best[i] = w[i] + (prev.max() if prev.size else 0.0)
    return float(best.max())


def blockweight_norm(W: BlockWeights, x: SparseVec, mode: str = "certified", family: str = "prefix"):
    """Norm sup{f(x) : f in E} for the block weights ``W``.

    Returns ``(value, certified)``. ``certified`` mode applies the attainment
    identity ||x|| = 2 sum_L q_j |x(j)| and refuses inputs outside its
    hypotheses; ``exact`` maximizes over admissible chains inside supp(x)
    (valid whenever supp(x) lies in the stored blocks); ``lower_bound``
    searches a candidate family (``prefix`` sets L_n or, for at most 16
    support points, the ``exhaustive`` family of admissible subsets).
    """
    absx = np.abs(x.values)
    sup = float(absx.max()) if absx.size else 0.0
    inside, q = _member_weights(W, x)
    if mode == "certified":
        if not inside.all():
            raise HypothesisError("supp(x) is not contained in the stored blocks")
        if not W.is_admissible():
            raise HypothesisError("stored blocks are not admissible (q increases along L)")
        if (np.diff(absx) > 0).any():
            raise HypothesisError("|x| is not non-increasing on its support")
        total = 2.0 * math.fsum(q * absx)
        if not sup < total:
            raise HypothesisError("sup norm of x is not below 2 sum_L q_j |x(j)|")
        return total, True
    if mode == "exact":
        if not inside.all():
            raise HypothesisError("supp(x) is not contained in the stored blocks")
        return max(sup, 2.0 * _best_chain(q, q * absx)), True
    if mode != "lower_bound":
        raise ValueError(f"unknown mode {mode!r}")
    if family == "prefix":
        mq = W.q_values
        bad = np.flatnonzero(np.diff(mq) > 0)
        admissible_len = int(bad[0]) + 1 if bad.size else mq.size
        contrib = np.zeros(mq.size)
        pos = np.searchsorted(W.members, x.indices[inside])
        contrib[pos] = q[inside] * absx[inside]
        best = float(np.cumsum(contrib)[:admissible_len].max()) if admissible_len else 0.0
        return max(sup, 2.0 * best), False
    if family == "exhaustive":
        qi, wi = q[inside], (q * absx)[inside]
        if qi.size > EXHAUSTIVE_MAX_SUPPORT:
            raise SupportTooLarge(f"exhaustive family needs at most {EXHAUSTIVE_MAX_SUPPORT} support points")
        best = 0.0
        for mask in kern.subset_masks(qi.size):
            if (np.diff(qi[mask]) <= 0).all():
                best = max(best, math.fsum(wi[mask]))
        return max(sup, 2.0 * best), False
    raise ValueError(f"unknown candidate family {family!r}")


def blockweight_engine(W: BlockWeights, name: str = "blockweight") -> NormEngine:
    return NormEngine(
        name,
        lambda x: blockweight_norm(W, x, mode="exact")[0],
        symmetric=False,
        one_unconditional=True,
        lattice_monotone=True,
    )


# --------------------------------------------------------------------------
# envelope norms
# --------------------------------------------------------------------------

def envelope_norm(engine: NormEngine, x: SparseVec) -> float:
    """max of engine(alpha * x) over sign vectors alpha on supp(x).

    The supremum over alpha in [-1, 1]^supp is attained at a sign vector
    because alpha -> engine(alpha * x) is convex; alpha and -alpha agree, so
    only patterns with a leading +1 are evaluated.
    """
    n = len(x)
    if n > ENVELOPE_MAX_SUPPORT:
        raise SupportTooLarge(f"envelope_norm needs |supp(x)| <= {ENVELOPE_MAX_SUPPORT}, got {n}")
    if n == 0:
        return 0.0
    pats = kern.sign_patterns(n)
    best = 0.0
    for start in range(0, pats.shape[0], 1 << 16):
        chunk = pats[start:start + (1 << 16)] * x.values[None, :]
        best = max(best, float(engine.eval_many(x.indices, chunk).max()))
    return best


def prefix_envelope_norm(engine: NormEngine, x: SparseVec) -> float:
    """max over n of engine(P_n x); only n in supp(x) give new prefixes."""
    best = 0.0
    for n in x.indices:
        best = max(best, engine.eval(prefix_project(x, int(n))))
    return best


# --------------------------------------------------------------------------
# engine ids
# --------------------------------------------------------------------------

def orlicz_from_id(fn_id: str) -> OrliczFn:
    if fn_id == "default":
        return OrliczFn.default()
    if fn_id == "square":
        return OrliczFn.power(2.0)
    if fn_id.startswith("pow"):
        try:
            return OrliczFn.power(float(fn_id[3:]))
        except ValueError:
            pass
    raise EngineError(f"unknown Orlicz function id {fn_id!r} (default, square, pow<p>)")


def nakano_from_id(exp_id: str) -> NakanoExponents:
    if exp_id == "linear":
        return NakanoExponents.linear()
    if exp_id == "ones":
        return NakanoExponents.ones()
    if exp_id == "log":
        return NakanoExponents.log()
    if exp_id.startswith("capped:"):
        try:
            return NakanoExponents.capped(float(exp_id.split(":", 1)[1]))
        except ValueError:
            pass
    raise EngineError(f"unknown exponent id {exp_id!r} (linear, ones, log, capped:<P>)")


def engine_from_name(spec: str) -> NormEngine:
    """Resolve ``c0``, ``summing``, ``day``, ``orlicz:<fn-id>``,
    ``nakano:<exp-id>`` or ``blockweight:<file>``."""
    if spec == "c0":
        return c0_norm()
    if spec == "day":
        return day_engine()
    if spec == "summing":
        return summing_engine()
    kind, _, arg = spec.partition(":")
    if kind == "orlicz" and arg:
        return orlicz_engine(orlicz_from_id(arg))
    if kind == "nakano" and arg:
        return nakano_engine(nakano_from_id(arg))
    if kind == "blockweight" and arg:
        try:
            W = read_blockweights(arg)
        except OSError as exc:
            raise EngineError(f"cannot read block weights file {arg!r}: {exc}") from None
        return blockweight_engine(W, name=spec)
    raise EngineError(f"unknown engine {spec!r}")
