import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import sparse_vecs
from oracles import (
    blockweight_brute,
    day_norm_brute,
    default_M_mp,
    luxemburg_mp,
    nakano_modular_brute,
    nakano_norm_brute,
)
from polyrenorm.errors import EngineError, HypothesisError, ParseError, SupportTooLarge
from polyrenorm.norms import (
    BlockWeights,
    NakanoExponents,
    OrliczFn,
    blockweight_engine,
    blockweight_norm,
    c0_norm,
    day_engine,
    day_norm,
    day_norm_sq_exact,
    engine_from_name,
    envelope_norm,
    in_dyadic_set,
    luxemburg_norm,
    modular_orlicz,
    nakano_engine,
    nakano_modular,
    nakano_norm,
    nakano_norm_mp,
    orlicz_engine,
    prefix_envelope_norm,
    read_blockweights,
    summing_engine,
    summing_norm,
    summing_prefix_project,
)
from polyrenorm.seqvec import SparseVec

GOLDEN = (1 + math.sqrt(5)) / 2


# ---------------------------------------------------------------- c0, summing

def test_c0():
    assert c0_norm()(SparseVec({1: -3.0, 2: 2.0})) == 3.0
    assert c0_norm()(SparseVec()) == 0.0


def test_summing_norm_is_sup_of_partial_sums():
    x = SparseVec({1: 1.0, 2: -3.0, 4: 1.5})
    assert summing_norm(x) == 2.0
    assert summing_engine().unconditional_constant == math.inf
    assert not any(summing_engine().flags.values())


@given(sparse_vecs(max_index=12), st.integers(1, 12))
def test_summing_projection_formula(x, n):
    # sum_{i<=n} (x(i) - x(n+1)) e_i, written out by hand
    expected = {i: x[i] - x[n + 1] for i in range(1, n + 1)}
    assert summing_prefix_project(x, n) == SparseVec(expected)


# ---------------------------------------------------------------- Orlicz

def test_luxemburg_square_pythagorean_triple():
    M = OrliczFn.power(2.0)
    assert luxemburg_norm(M, SparseVec({1: 3.0, 2: 4.0})) == pytest.approx(5.0, rel=1e-12)


@given(sparse_vecs(min_size=1))
def test_luxemburg_square_is_euclidean(x):
    M = OrliczFn.power(2.0)
    assert luxemburg_norm(M, x) == pytest.approx(float(np.linalg.norm(x.values)), rel=1e-10)


@given(sparse_vecs(min_size=1), st.floats(1.0, 6.0))
def test_luxemburg_power_is_lp(x, p):
    M = OrliczFn.power(p)
    lp = float((np.abs(x.values) ** p).sum() ** (1 / p))
    assert luxemburg_norm(M, x) == pytest.approx(lp, rel=1e-10)


def test_default_M_closed_form():
    # 2 M(0.5 / rho) = 1 with 0.5 / rho > 1/2 on the linear piece: rho = 0.8
    M = OrliczFn.default()
    assert luxemburg_norm(M, SparseVec({1: 0.5, 2: 0.5})) == pytest.approx(0.8, rel=1e-12)
    assert float(M(np.array([0.5]))[0]) == pytest.approx(1 / 3, rel=1e-15)
    assert float(M(np.array([1.0]))[0]) == pytest.approx(1.0, rel=1e-15)


@given(sparse_vecs(min_size=1, max_size=6))
def test_default_luxemburg_matches_multiprecision(x):
    assert luxemburg_norm(OrliczFn.default(), x) == pytest.approx(luxemburg_mp(default_M_mp, x.values), rel=2e-12)


def test_luxemburg_custom_function_path():
    M = OrliczFn(lambda t: t ** 3, name="cube")
    x = SparseVec({1: 1.0, 3: 2.0})
    assert luxemburg_norm(M, x) == pytest.approx(9 ** (1 / 3), rel=1e-12)


def test_modular_at_norm_is_one():
    M = OrliczFn.default()
    x = SparseVec({1: 0.3, 2: -1.2, 5: 0.05})
    rho = luxemburg_norm(M, x)
    assert modular_orlicz(M, x, rho) == pytest.approx(1.0, abs=1e-10)
    with pytest.raises(ValueError):
        modular_orlicz(M, x, 0.0)


def test_orlicz_validation():
    with pytest.raises(ValueError, match="convex"):
        OrliczFn(lambda t: np.sqrt(t), name="sqrt")
    with pytest.raises(ValueError, match="M\\(1\\)=1"):
        OrliczFn(lambda t: 2 * t * t)
    with pytest.raises(ValueError):
        OrliczFn.power(0.5)
    with pytest.raises(ValueError):
        OrliczFn.default(K_growth=1.0)


def test_default_growth_ratio_tends_to_zero():
    M = OrliczFn.default()
    tau = np.array([0.5, 0.1, 0.01, 0.001])
    r = M.ratio(tau)
    assert (np.diff(r) < 0).all() and r[-1] < 1e-200
    assert OrliczFn.power(3.0).ratio(np.array([0.1]))[0] == pytest.approx(1 / 8)


# ---------------------------------------------------------------- Nakano

def test_nakano_golden_ratio():
    x = SparseVec({1: 1.0, 2: 1.0})
    p = NakanoExponents.linear()
    assert nakano_norm(p, x) == pytest.approx(GOLDEN, rel=1e-12)
    assert float(nakano_norm_mp(p, x, 50)) == pytest.approx(GOLDEN, rel=1e-15)
    with mpmath.workdps(50):
        assert abs(nakano_norm_mp(p, x, 50) - (1 + mpmath.sqrt(5)) / 2) < mpmath.mpf(10) ** -45


def test_nakano_modular_beats_pairing_rule():
    # pairing largest modulus with smallest exponent gives 1 + 0.25; swapping gives 1.5
    p = NakanoExponents.linear()
    assert nakano_modular(p, SparseVec({1: 1.0, 2: 0.5})) == 1.5


def test_nakano_modular_matches_brute_force(rng):
    p = NakanoExponents.linear()
    for _ in range(50):
        n = int(rng.integers(1, 7))
        v = rng.uniform(0.01, 1.0, n)
        x = SparseVec.dense(v * rng.choice([-1, 1], n))
        assert nakano_modular(p, x) == nakano_modular_brute(p.values(n), v)


def test_nakano_norm_matches_brute_bisection(rng):
    p = NakanoExponents.log()
    for _ in range(10):
        n = int(rng.integers(1, 6))
        x = SparseVec.dense(rng.uniform(0.1, 3.0, n))
        assert nakano_norm(p, x) == pytest.approx(nakano_norm_brute(p.values(n), x.values), rel=1e-11)


def test_nakano_special_exponents():
    x = SparseVec({1: 2.0, 4: -3.0})
    assert nakano_norm(NakanoExponents.ones(), x) == pytest.approx(5.0, rel=1e-12)
    # capped at 2: l2 beyond slot 2; moduli above 1 must use the stable tail
    assert nakano_modular(NakanoExponents.capped(2), x) == pytest.approx(9 + 4)
    assert nakano_modular(NakanoExponents.linear(), x) == math.inf
    assert nakano_modular(NakanoExponents.linear(), SparseVec()) == 0.0


def test_nakano_bounded_needs_stable_index():
    p = NakanoExponents(lambda n: np.ones(n.shape), "flat", unbounded=False)
    with pytest.raises(ValueError, match="stable_from"):
        nakano_modular(p, SparseVec({1: 2.0}))


def test_nakano_exponents_validated():
    with pytest.raises(ValueError):
        NakanoExponents(lambda n: 3.0 - n, "down", True).values(3)
    with pytest.raises(ValueError):
        NakanoExponents(lambda n: 0.5 * n, "small", True).values(2)


def test_nakano_mp_agrees_with_float(rng):
    p = NakanoExponents.linear()
    for _ in range(5):
        x = SparseVec.dense(rng.uniform(0.1, 2.0, 5))
        assert float(nakano_norm_mp(p, x, 40)) == pytest.approx(nakano_norm(p, x), rel=2e-12)


# ---------------------------------------------------------------- Day

def test_day_small_values():
    assert day_norm(SparseVec({1: 1.0})) == pytest.approx(math.sqrt(0.5), rel=1e-15)
    assert day_norm(SparseVec({3: 1.0, 9: -1.0})) == pytest.approx(math.sqrt(0.75), rel=1e-15)


def test_day_matches_injection_brute_force(rng):
    for _ in range(100):
        n = int(rng.integers(1, 7))
        v = rng.normal(size=n)
        assert day_norm(SparseVec.dense(v)) == pytest.approx(day_norm_brute(v), rel=1e-12)


def test_day_exact_squares():
    sq = [Fraction(3, 2), Fraction(3, 4), Fraction(3, 8)]
    assert day_norm_sq_exact(sq) == Fraction(3, 4) + Fraction(3, 16) + Fraction(3, 64)
    assert day_norm_sq_exact(reversed(sq)) == day_norm_sq_exact(sq)


# ---------------------------------------------------------------- block weights

def test_dyadic_set():
    assert in_dyadic_set(Fraction(1, 2)) and in_dyadic_set(Fraction(1, 12))
    assert not in_dyadic_set(Fraction(1, 3)) and not in_dyadic_set(Fraction(3, 4))
    assert not in_dyadic_set(Fraction(0)) and not in_dyadic_set(Fraction(1))


def test_blockweights_consecutive_and_exact_q():
    W = BlockWeights.consecutive([1, 2, 4])
    assert [list(H) for _, H in W.blocks] == [[1], [2, 3], [4, 5, 6, 7]]
    assert W.q_exact(3) == Fraction(1, 8) and W.q(3) == 0.125
    assert W.total_q_exact() == Fraction(7, 8)
    assert W.is_admissible()
    with pytest.raises(KeyError):
        W.q(8)


def test_blockweights_validation():
    with pytest.raises(ValueError):
        BlockWeights(((2, (1,)), (1, (2,))))
    with pytest.raises(ValueError):
        BlockWeights(((1, (1, 2)), (2, (2, 3))))
    with pytest.raises(ValueError):
        BlockWeights(((1, ()),))


def test_blockweights_text_roundtrip(tmp_path):
    W = BlockWeights.consecutive([1, 1, 3], levels=[1, 3, 4], start=2)
    assert BlockWeights.from_text(W.to_text()) == W
    p = tmp_path / "w.blocks"
    p.write_text(W.to_text())
    assert read_blockweights(p) == W
    with pytest.raises(ParseError) as err:
        BlockWeights.from_text("1 1 1\n2 x 2\n")
    assert err.value.line == 2


def test_blockweight_certified_identity():
    W = BlockWeights.consecutive([1, 2, 2])
    x = SparseVec({1: 0.75, 2: 0.375, 3: 0.375, 4: 0.1875, 5: 0.1875})
    value, certified = blockweight_norm(W, x)
    assert certified
    # 2 (1/2 * 3/4 + 2 * 1/8 * 3/8 + 2 * 1/16 * 3/16) = 63/64
    assert value == 63 / 64
    assert blockweight_norm(W, x, mode="exact")[0] == value
    assert blockweight_norm(W, x, mode="lower_bound", family="exhaustive")[0] == value
    assert blockweight_norm(W, x, mode="lower_bound")[0] == value


@pytest.mark.parametrize(
    "x, match",
    [
        (SparseVec({1: 1.0, 9: 1.0}), "stored blocks"),
        (SparseVec({1: 0.1, 2: 0.5}), "non-increasing"),
        (SparseVec({1: 1.0}), "sup norm"),
    ],
)
def test_blockweight_certified_refuses(x, match):
    W = BlockWeights.consecutive([1, 2])
    with pytest.raises(HypothesisError, match=match):
        blockweight_norm(W, x)


def test_blockweight_certified_needs_admissible_blocks():
    W = BlockWeights(((1, (1, 2, 3, 4)), (2, (5,))))
    with pytest.raises(HypothesisError, match="admissible"):
        blockweight_norm(W, SparseVec({1: 1.0, 5: 0.5}))


def test_blockweight_exact_matches_brute_force(rng):
    W = BlockWeights(((1, (1, 2, 3, 4)), (2, (5,)), (3, (6, 7))))
    q = {j: W.q_exact(j) for j in W.members.tolist()}
    for _ in range(100):
        n = int(rng.integers(1, 8))
        idx = np.sort(rng.choice(np.arange(1, 8), n, replace=False))
        x = SparseVec.from_arrays(idx, rng.uniform(-1, 1, n))
        exact, _ = blockweight_norm(W, x, mode="exact")
        assert exact == pytest.approx(float(blockweight_brute(q, x)), rel=1e-12)
        lb, certified = blockweight_norm(W, x, mode="lower_bound")
        assert not certified and lb <= exact + 1e-15


def test_blockweight_exhaustive_limit():
    W = BlockWeights.consecutive([1] * 20)
    x = SparseVec.dense(np.linspace(1, 0.5, 20))
    with pytest.raises(SupportTooLarge):
        blockweight_norm(W, x, mode="lower_bound", family="exhaustive")
    with pytest.raises(ValueError):
        blockweight_norm(W, x, mode="bogus")


# ---------------------------------------------------------------- envelopes

@pytest.mark.parametrize("engine", [c0_norm(), day_engine(), orlicz_engine(OrliczFn.default()),
                                    nakano_engine(NakanoExponents.linear())], ids=lambda e: e.name)
def test_envelope_equals_eval_for_unconditional(engine, rng):
    for _ in range(10):
        x = SparseVec.dense(rng.uniform(-1, 1, int(rng.integers(1, 7))))
        assert envelope_norm(engine, x) == pytest.approx(engine.eval(x), rel=1e-12)


def test_summing_envelopes():
    x = SparseVec({1: 1.0, 2: -1.0})
    assert envelope_norm(summing_engine(), x) == 2.0
    assert prefix_envelope_norm(summing_engine(), x) == 1.0
    with pytest.raises(SupportTooLarge):
        envelope_norm(summing_engine(), SparseVec.ones(21))


# ---------------------------------------------------------------- ids

@pytest.mark.parametrize(
    "spec, name",
    [("c0", "c0"), ("day", "day"), ("summing", "summing"), ("orlicz:default", "orlicz:default"),
     ("orlicz:square", "orlicz:pow2"), ("orlicz:pow3.5", "orlicz:pow3.5"), ("nakano:linear", "nakano:linear"),
     ("nakano:log", "nakano:log"), ("nakano:ones", "nakano:ones"), ("nakano:capped:3", "nakano:capped:3")],
)
def test_engine_ids(spec, name):
    assert engine_from_name(spec).name == name


@pytest.mark.parametrize("spec", ["l2", "orlicz:", "orlicz:cosh", "nakano:quadratic", "nakano:capped:x", "orlicz:powx"])
def test_unknown_engine_ids(spec):
    with pytest.raises(EngineError):
        engine_from_name(spec)


def test_blockweight_engine_from_file(tmp_path):
    p = tmp_path / "w.blocks"
    p.write_text(BlockWeights.consecutive([1, 2]).to_text())
    e = engine_from_name(f"blockweight:{p}")
    assert e.eval(SparseVec({1: 0.75, 2: 0.375, 3: 0.375})) == pytest.approx(2 * (0.375 + 0.09375))
    assert not e.symmetric and e.one_unconditional


# ---------------------------------------------------------------- norm axioms

AXIOM_ENGINES = [c0_norm(), summing_engine(), day_engine(), orlicz_engine(OrliczFn.default()),
                 orlicz_engine(OrliczFn.power(3.0)), nakano_engine(NakanoExponents.linear()),
                 nakano_engine(NakanoExponents.log()), blockweight_engine(BlockWeights.consecutive([1, 2, 4, 8]))]


@pytest.mark.parametrize("engine", AXIOM_ENGINES, ids=lambda e: e.name)
@given(sparse_vecs(max_index=15), sparse_vecs(max_index=15), st.floats(-5, 5))
def test_norm_axioms(engine, x, y, t):
    nx, ny, nxy = engine(x), engine(y), engine(x + y)
    assert nx >= 0 and (nx == 0) == (not x)
    assert engine(t * x) == pytest.approx(abs(t) * nx, rel=1e-12, abs=1e-300)
    assert nxy <= nx + ny + 1e-9
