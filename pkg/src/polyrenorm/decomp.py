"""Gap sequences, the decomposition inequality and its certificates."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import _kernels as kern
from .errors import EngineError, HypothesisError, SupportTooLarge
from .norms import EXHAUSTIVE_MAX_SUPPORT, NormEngine, OrliczFn, luxemburg_norm
from .seqvec import SparseVec, greedy_order, greedy_support, project, prefix_project, remainder, sup_seminorm

SLACK = 1e-9


# --------------------------------------------------------------------------
# moduli
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Modulus:
    """Non-decreasing piecewise-linear function with value 0 at 0.

    Beyond the last node the value stays constant (``tail="const"``) or the
    last segment is extended (``tail="linear"``).
    """

    t: np.ndarray
    w: np.ndarray
    name: str
    tail: str = "const"

    def __post_init__(self):
        t = np.asarray(self.t, dtype=np.float64)
        w = np.asarray(self.w, dtype=np.float64)
        if t.ndim != 1 or t.shape != w.shape or t.size < 2:
            raise ValueError("modulus needs matching node arrays with at least two nodes")
        if t[0] != 0.0 or w[0] != 0.0:
            raise ValueError("modulus must pass through (0, 0)")
        if (np.diff(t) <= 0).any() or (np.diff(w) < 0).any():
            raise ValueError("modulus nodes must be increasing and values non-decreasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "w", w)

    def __call__(self, s):
        s = np.asarray(s, dtype=np.float64)
        if (s < 0).any():
            raise ValueError("modulus is defined on [0, inf)")
        out = np.interp(s, self.t, self.w)
        if self.tail == "linear":
            slope = (self.w[-1] - self.w[-2]) / (self.t[-1] - self.t[-2])
            out = np.where(s > self.t[-1], self.w[-1] + slope * (s - self.t[-1]), out)
        return out if out.ndim else float(out)

    @classmethod
    def identity(cls) -> Modulus:
        return cls(np.array([0.0, 1.0]), np.array([0.0, 1.0]), "identity", tail="linear")


def orlicz_modulus(M: OrliczFn, t_hi: float = 1e3, points: int = 10_000) -> Modulus:
    """Upper envelope of t -> sup{M(tau)/M(K tau) : 0 < tau <= t}.

    The ratio is sampled on a log grid over [1e-12, t_hi]; each node carries
    the running maximum reached at the *next* node, so the interpolant lies
    above the sampled supremum on every cell. Convexity gives M(K tau) >=
    K M(tau), hence the constant 1/K bounds the tail.
    """
    grid = np.logspace(-12, math.log10(t_hi), points)
    run = np.maximum.accumulate(M.ratio(grid))
    cap = 1.0 / M.K_growth
    shifted = np.minimum(np.append(run[1:], cap), cap)
    shifted = np.maximum.accumulate(shifted)
    return Modulus(np.concatenate([[0.0], grid]), np.concatenate([[0.0], shifted]), f"orlicz:{M.name}:K={M.K_growth:g}")


# --------------------------------------------------------------------------
# subset and prefix suprema
# --------------------------------------------------------------------------

def all_subset_norms(engine: NormEngine, x: SparseVec):
    """(masks, norms) for every A within supp(x); row b of masks encodes A."""
    n = len(x)
    if n > EXHAUSTIVE_MAX_SUPPORT:
        raise SupportTooLarge(f"exhaustive subset search needs |supp(x)| <= {EXHAUSTIVE_MAX_SUPPORT}, got {n}")
    masks = kern.subset_masks(n)
    return masks, engine.eval_many(x.indices, np.where(masks, x.values[None, :], 0.0))


def _greedy_path(engine: NormEngine) -> bool:
    return engine.symmetric and engine.lattice_monotone


def subset_sups(engine: NormEngine, x: SparseVec, ns: Sequence[int]) -> np.ndarray:
    """sup_{|A| <= n} ||P_A x|| for each n in ``ns``."""
    ns = [int(n) for n in ns]
    if _greedy_path(engine):
        order = greedy_order(x)
        return np.array([engine.eval(project(x, order[:n])) for n in ns])
    if len(x) > EXHAUSTIVE_MAX_SUPPORT:
        raise SupportTooLarge(
            f"engine {engine.name!r} is not symmetric and lattice-monotone; exhaustive search needs "
            f"|supp(x)| <= {EXHAUSTIVE_MAX_SUPPORT}, got {len(x)}"
        )
    masks, norms = all_subset_norms(engine, x)
    size = masks.sum(axis=1)
    return np.array([norms[size <= n].max() for n in ns])


def subset_sup(engine: NormEngine, x: SparseVec, n: int) -> float:
    return float(subset_sups(engine, x, [n])[0])


def subset_sup_exhaustive(engine: NormEngine, x: SparseVec, n: int) -> float:
    masks, norms = all_subset_norms(engine, x)
    return float(norms[masks.sum(axis=1) <= n].max())


def subset_gap(engine: NormEngine, x: SparseVec, n: int) -> float:
    return engine.eval(x) - subset_sup(engine, x, n)


def prefix_gap(engine: NormEngine, x: SparseVec, n: int, projector=prefix_project) -> float:
    return engine.eval(x) - engine.eval(projector(x, n))


# --------------------------------------------------------------------------
# gap tables
# --------------------------------------------------------------------------

class GapRow(NamedTuple):
    n: int
    norm: float
    sup_term: float
    gap: float
    a_n: float
    ratio: float


GAP_COLUMNS = GapRow._fields


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if v is None:
        return ""
    return repr(float(v))


def rows_to_csv(rows, columns) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(getattr(r, c) if hasattr(r, c) else r.get(c)) for c in columns])
    return buf.getvalue()


def a_values(a, n_max: int) -> np.ndarray:
    """a_1..a_n as an array from a sequence object, a callable or an array."""
    if callable(getattr(a, "values", None)):
        vals = np.asarray(a.values(n_max), dtype=np.float64)
    elif callable(a):
        vals = np.array([float(a(n)) for n in range(1, n_max + 1)])
    else:
        vals = np.asarray(a, dtype=np.float64)[:n_max]
        if vals.size < n_max:
            raise ValueError(f"sequence has {vals.size} values, need {n_max}")
    return vals


@dataclass
class GapTable:
    engine: str
    mode: str
    x: SparseVec
    rows: list[GapRow] = field(default_factory=list)

    @property
    def ratios(self) -> np.ndarray:
        return np.array([r.ratio for r in self.rows])

    @property
    def gaps(self) -> np.ndarray:
        return np.array([r.gap for r in self.rows])

    @property
    def min_ratio(self) -> float:
        """Windowed minimum of gap / a_n: finite evidence only."""
        return float(self.ratios.min()) if self.rows else math.nan

    def to_csv(self) -> str:
        return rows_to_csv(self.rows, GAP_COLUMNS)

    def to_json(self) -> str:
        return json.dumps(
            {
                "engine": self.engine,
                "mode": self.mode,
                "min_ratio": self.min_ratio,
                "rows": [r._asdict() for r in self.rows],
            },
            indent=1,
        )


def gap_table(engine: NormEngine, x: SparseVec, a, n_max: int, mode: str = "subset", projector=None) -> GapTable:
    """Rows n = 1..n_max of ||x||, the n-term supremum, the gap and gap / a_n.

    ``mode="subset"`` uses sup_{|A|<=n} ||P_A x||; ``mode="prefix"`` uses
    ||P_n x|| with ``projector`` (default: coordinate prefix).
    """
    av = a_values(a, n_max)
    if (av <= 0).any():
        raise ValueError("a_n must be positive on the window")
    ns = list(range(1, n_max + 1))
    norm_x = engine.eval(x)
    if mode == "subset":
        sups = subset_sups(engine, x, ns)
    elif mode == "prefix":
        proj = projector or prefix_project
        sups = np.array([engine.eval(proj(x, n)) for n in ns])
    else:
        raise ValueError(f"unknown mode {mode!r}")
    gaps = norm_x - sups
    rows = [GapRow(n, norm_x, float(s), float(g), float(a_n), float(g / a_n)) for n, s, g, a_n in zip(ns, sups, gaps, av)]
    return GapTable(engine.name, mode, x, rows)


# --------------------------------------------------------------------------
# the decomposition inequality
# --------------------------------------------------------------------------

class Certificate(NamedTuple):
    c_x: float
    d_x: float
    omega: Modulus


@dataclass
class StarCertificate:
    x: SparseVec
    c_x: float
    d_x: float
    modulus: str
    norm_x: float
    masks: np.ndarray
    norm_PA: np.ndarray
    sup_RA: np.ndarray
    margins: np.ndarray

    @property
    def valid(self) -> bool:
        return bool((self.margins >= -SLACK).all())

    @property
    def min_margin(self) -> float:
        return float(self.margins.min())

    @property
    def subsets(self) -> list[frozenset]:
        idx = self.x.indices
        return [frozenset(int(i) for i in idx[m]) for m in self.masks]

    def margin_for(self, A) -> float:
        A = set(A)
        key = np.array([int(i) in A for i in self.x.indices])
        row = np.flatnonzero((self.masks == key).all(axis=1))[0]
        return float(self.margins[row])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["subset", "norm_PA", "sup_RA", "margin"])
        for A, a, b, m in zip(self.subsets, self.norm_PA, self.sup_RA, self.margins):
            w.writerow([" ".join(str(i) for i in sorted(A)), _fmt(a), _fmt(b), _fmt(m)])
        return buf.getvalue()

    def to_record(self) -> str:
        """``key: value`` header block describing the certificate."""
        return (
            f"c_x: {self.c_x!r}\nd_x: {self.d_x!r}\nmodulus: {self.modulus}\n"
            f"norm_x: {self.norm_x!r}\nsubsets: {self.margins.size}\n"
            f"min_margin: {self.min_margin!r}\nvalid: {str(self.valid).lower()}\n"
        )


def star_check(engine: NormEngine, x: SparseVec, c_x: float, d_x: float, omega: Modulus) -> StarCertificate:
    """Margins ||P_A x|| + c omega(d ||R_A x||_inf) - ||x|| over all A in supp(x).

    Subsets outside supp(x) add nothing: P_A x and R_A x only see A n supp(x).
    """
    masks, norm_PA = all_subset_norms(engine, x)
    absx = np.abs(x.values)
    sup_RA = np.where(~masks, absx[None, :], 0.0).max(axis=1, initial=0.0)
    norm_x = engine.eval(x)
    margins = norm_PA + c_x * np.asarray(omega(d_x * sup_RA)) - norm_x
    return StarCertificate(x, float(c_x), float(d_x), omega.name, float(norm_x), masks, norm_PA, sup_RA, margins)


def star_rescale(c_unit: float, d_unit: float, norm_x: float) -> tuple[float, float]:
    """Constants for x from those for x / ||x||."""
    if not norm_x > 0:
        raise ValueError("norm_x must be positive")
    return norm_x * c_unit, d_unit / norm_x


def star_orlicz_certificate(M: OrliczFn, x: SparseVec, omega: Modulus | None = None) -> Certificate:
    """c(x) = sum M(K |x(gamma)|), d(x) = 1 for ||x|| = 1; rescaled otherwise."""
    if not len(x):
        raise ValueError("the zero vector has no certificate")
    omega = omega or orlicz_modulus(M)
    nx = luxemburg_norm(M, x)
    unit = x / nx
    c_unit = math.fsum(M(M.K_growth * np.abs(unit.values)))
    if abs(nx - 1.0) <= 1e-12:
        return Certificate(c_unit, 1.0, omega)
    c, d = star_rescale(c_unit, 1.0, nx)
    return Certificate(c, d, omega)


def star_summable_certificate(engine: NormEngine, f: SparseVec, x: SparseVec) -> Certificate:
    """c(x) = sum |f(e_gamma)|, d = 1, omega = identity, for f attaining ||x||."""
    fx = math.fsum(f[int(i)] * v for i, v in x.items())
    nx = engine.eval(x)
    if abs(fx - nx) > SLACK * max(1.0, nx):
        raise HypothesisError(f"functional does not attain the norm: f(x) = {fx!r}, ||x|| = {nx!r}")
    return Certificate(math.fsum(np.abs(f.values)), 1.0, Modulus.identity())


# --------------------------------------------------------------------------
# combining null sequences
# --------------------------------------------------------------------------

@dataclass
class CombinedSequence:
    a: np.ndarray
    remainder_bound: float
    window_max: np.ndarray
    min_margin: float
    inequality_holds: bool
    # first n from which a_n strictly decreases to the end of the window
    decreasing_from: int


def combine_sequences(a_family, m_max: int, n_max: int) -> CombinedSequence:
    """a_n = sum_{m<=m_max} 2^-m a_{m,n} / (1 + a_{m,n}) and the bound
    a_{m,n} <= 2^m a_n max_k (a_{m,k} + 1) on the window.

    ``a_family`` is an (m_max, n_max) array or a callable f(m, n) accepting
    broadcast integer arrays. Truncation drops at most 2^-m_max from each a_n;
    the window maximum is a lower bound for the maximum over all k.
    """
    if callable(a_family):
        m = np.arange(1, m_max + 1)[:, None]
        n = np.arange(1, n_max + 1)[None, :]
        A = np.asarray(a_family(m, n), dtype=np.float64) * np.ones((m_max, n_max))
    else:
        A = np.asarray(a_family, dtype=np.float64)[:m_max, :n_max]
    if (A <= 0).any():
        raise ValueError("a_{m,n} must be positive on the window")
    w = 0.5 ** np.arange(1, m_max + 1)
    terms = w[:, None] * A / (1.0 + A)
    a = np.array([math.fsum(col) for col in terms.T])
    wmax = (A + 1.0).max(axis=1)
    rhs = (2.0 ** np.arange(1, m_max + 1))[:, None] * a[None, :] * wmax[:, None]
    margin = float(((rhs - A) / np.maximum(1.0, rhs)).min())
    inc = np.flatnonzero(np.diff(a) >= 0)
    decreasing_from = int(inc[-1]) + 2 if inc.size else 1
    return CombinedSequence(a, 2.0 ** -m_max, wmax, margin, margin >= -SLACK, decreasing_from)


# --------------------------------------------------------------------------
# lambda_n and the chain behind the symmetric case
# --------------------------------------------------------------------------

def _require_symmetric(engine: NormEngine):
    if not (engine.symmetric and engine.lattice_monotone):
        raise EngineError(f"engine {engine.name!r} must be symmetric and lattice-monotone")


def lambda_sequence(engine: NormEngine, n_max: int, dps: int | None = None):
    """lambda_n = inf{||sum_{A} e_gamma|| : |A| >= n} for n = 1..n_max.

    For symmetric lattice-monotone engines the infimum is the norm of
    e_1 + ... + e_n. With ``dps`` and an engine that has a multiprecision
    evaluator, values are mpmath numbers with that many digits.
    """
    _require_symmetric(engine)
    if dps is not None:
        if engine.eval_mp is None:
            raise EngineError(f"engine {engine.name!r} has no multiprecision evaluator")
        return [engine.eval_mp(SparseVec.ones(n), dps) for n in range(1, n_max + 1)]
    return np.array([engine.eval(SparseVec.ones(n)) for n in range(1, n_max + 1)])


@dataclass
class ChainReport:
    n: int
    lam: float
    norm_x: float
    sup_R: float
    sup_R_bound: float
    sup_term: float
    chain_rhs: float
    m_threshold: float
    a_mn: dict[int, float]

    @property
    def sup_R_margin(self) -> float:
        return self.sup_R_bound - self.sup_R

    @property
    def chain_margin(self) -> float:
        return self.chain_rhs - self.norm_x

    @property
    def a_mn_margins(self) -> dict[int, float]:
        """sup_term + a_{m,n} - ||x|| for every m at or above the threshold."""
        return {m: self.sup_term + v - self.norm_x for m, v in self.a_mn.items() if m >= self.m_threshold}

    @property
    def ok(self) -> bool:
        return (
            self.sup_R_margin >= -SLACK
            and self.chain_margin >= -SLACK
            and all(v >= -SLACK for v in self.a_mn_margins.values())
        )


def prop36_chain(engine: NormEngine, x: SparseVec, cert: Certificate, n: int, m_values=None, lam=None) -> ChainReport:
    """Evaluate ||R_{A_n(x)} x||_inf <= K ||x|| / lambda_n and
    ||x|| <= sup_{|A|<=n} ||P_A x|| + c(x) omega(K d(x) ||x|| / lambda_n),
    plus the table a_{m,n} = m omega(m / lambda_n).

    The chain needs m >= max(c(x), K d(x) ||x||); that threshold is reported,
    not chosen.
    """
    _require_symmetric(engine)
    K = engine.unconditional_constant
    lam = engine.eval(SparseVec.ones(n)) if lam is None else lam
    norm_x = engine.eval(x)
    A = greedy_support(x, n)
    sup_R = sup_seminorm(remainder(x, A))
    sup_term = engine.eval(project(x, A))
    c, d, omega = cert
    chain_rhs = sup_term + c * omega(K * d * norm_x / lam)
    thr = max(c, K * d * norm_x)
    if m_values is None:
        m_values = range(1, int(math.ceil(thr)) + 3)
    a_mn = {int(m): float(m * omega(m / lam)) for m in m_values}
    return ChainReport(n, float(lam), norm_x, sup_R, K * norm_x / lam, sup_term, float(chain_rhs), thr, a_mn)


# --------------------------------------------------------------------------
# boundary pieces
# --------------------------------------------------------------------------

def boundary_gap(engine: NormEngine, K_m: Sequence[SparseVec], n: int) -> float:
    """a_{m,n} = max_{f in K_m} ||R_n^* f|| for the c0 engine, whose dual
    norm on finite-support functionals is the l1 sum."""
    if engine.name != "c0":
        raise EngineError("boundary_gap needs the c0 engine (l1 dual norm)")
    best = 0.0
    for f in K_m:
        total = math.fsum(np.abs(f.values))
        if abs(total - 1.0) > SLACK:
            raise ValueError(f"functional {f!r} is not on the dual unit sphere")
        best = max(best, math.fsum(np.abs(f.values[f.indices > n])))
    return best
