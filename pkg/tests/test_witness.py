import csv
import io
from fractions import Fraction

import numpy as np
import pytest

from polyrenorm.errors import ConstructionError
from polyrenorm.norms import NakanoExponents, day_norm, in_dyadic_set, nakano_norm
from polyrenorm.seqvec import SparseVec
from polyrenorm.sequences import GEOMETRIC8, HARMONIC, NullSequence, from_values
from polyrenorm.witness import (
    WITNESS_COLUMNS,
    blockweight_witness,
    day_bound_suite,
    day_witness,
    ex17_witness,
    fact16_witness,
    nakano_suite,
    nakano_witness,
    prop36_witness,
    random_sparse,
)

QUARTER = NullSequence("quarter", lambda n: 4.0 ** -n.astype(np.float64), lambda n: Fraction(1, 4 ** n))


def _rows(rep, check):
    return [r for r in rep.rows if r.check == check]


# ---------------------------------------------------------------- summing basis

def test_ex17_harmonic_ratio_is_sqrt_n():
    rep = ex17_witness(HARMONIC, 400)
    assert rep.passed and rep.params["m"] == 4
    assert rep.vectors["x"][1] == 2.0
    rows = _rows(rep, "ratio = a_n^-1/2")
    assert [r.n for r in rows] == list(range(4, 401))
    for r in rows:
        assert r.ratio == pytest.approx(np.sqrt(r.n), rel=1e-10)


def test_ex17_quarter_sequence_ratio_two_to_n():
    rep = ex17_witness(QUARTER, 40)
    assert rep.passed and rep.params["m"] == 1
    for r in _rows(rep, "ratio = a_n^-1/2"):
        assert r.ratio == pytest.approx(2.0 ** r.n, rel=1e-10)


def test_ex17_needs_small_terms():
    with pytest.raises(ConstructionError):
        ex17_witness(from_values([1.0] * 10), 10)


# ---------------------------------------------------------------- Day

def test_day_witness_harmonic():
    rep = day_witness(HARMONIC, 6)
    assert rep.params["n_k"] == [8 ** k for k in range(1, 7)]
    assert rep.passed
    x = rep.vectors["x"]
    assert day_norm(x) ** 2 == pytest.approx(1 - 4.0 ** -6, rel=1e-12)
    rat = {r.n: Fraction(r.ratio) for r in _rows(rep, "ratio at n_k >= 2^(k-2) (exact)")}
    assert sorted(rat) == [8, 64, 512, 4096]
    for k, n in enumerate(sorted(rat), start=1):
        assert rat[n] >= 2 ** (k - 2)


def test_day_witness_gap_identity_exact():
    rep = day_witness(HARMONIC, 4, n_max=5000)
    for k, r in enumerate(_rows(rep, "||x||^2 - ||P_n x||^2 = 4^-k - 4^-K"), start=1):
        assert r.gap == float(Fraction(1, 4 ** k) - Fraction(1, 4 ** 4)) and r.ok


def test_day_witness_short_window():
    with pytest.raises(ConstructionError, match="block 3"):
        day_witness(HARMONIC, 3, n_max=100)


def test_day_bound_suite_small():
    rep = day_bound_suite(trials=30, max_dim=12, seed=3)
    assert rep.passed and len(rep.checks) == 30


# ---------------------------------------------------------------- block weights

def test_blockweight_witness_singleton_blocks():
    W, rep = blockweight_witness(GEOMETRIC8, 10)
    assert [len(H) for _, H in W.blocks] == [1] * 10
    assert [W.q_exact(j) for j in range(1, 11)] == [Fraction(1, 2 ** k) for k in range(1, 11)]
    assert all(in_dyadic_set(W.q_exact(j)) for j in range(1, 11))
    assert rep.passed, rep.summary()
    assert _rows(rep, "certified norm = exhaustive lower-bound search")[0].ok


def test_blockweight_witness_stated_bound_rows_are_informational():
    _, rep = blockweight_witness(GEOMETRIC8, 10)
    stated = _rows(rep, "stated bound 4^(k-2)")
    assert stated and all(r.info for r in stated)
    # the truncated gap at n = n_k is 4^-k - 4^-K, so the ratio is 2^k - 8^k 4^-K
    by_n = {r.n: r for r in stated}
    assert by_n[2].ok and by_n[3].ok
    assert by_n[4].ratio == 16 - 2.0 ** -8 and not by_n[4].ok
    tails = _rows(rep, "infinite tail 2 sum_{l>=k+2} (3/2) 4^-l = 4^(-k-1)")
    assert all(r.ok and r.info for r in tails)


def test_blockweight_witness_harmonic_growth():
    W, rep = blockweight_witness(HARMONIC, 4)
    sizes = [len(H) for _, H in W.blocks]
    assert sizes == sorted(sizes)
    assert rep.params["n_k"] == [8, 64, 512, 4096]
    assert rep.passed, rep.summary()
    assert W.total_q_exact() == Fraction(15, 16)


def test_blockweight_witness_needs_three_blocks():
    with pytest.raises(ConstructionError):
        blockweight_witness(GEOMETRIC8, 2)


# ---------------------------------------------------------------- Nakano

def test_nakano_witness_basis_vector():
    rep = nakano_witness(NakanoExponents.linear(), 0.5, SparseVec({7: 3.0}))
    assert rep.params["m"] == 1 and rep.passed
    assert all(r.gap == 0.0 for r in _rows(rep, "1 - ||P_{A_n} x|| <= theta^p_n"))


def test_nakano_witness_random():
    rng = np.random.default_rng(7)
    for _ in range(5):
        x = random_sparse(rng, 8)
        rep = nakano_witness(NakanoExponents.linear(), 0.5, x)
        assert rep.passed
        assert nakano_norm(NakanoExponents.linear(), rep.vectors["x"]) == pytest.approx(1.0, abs=1e-9)


def test_nakano_witness_preconditions():
    x = SparseVec({1: 1.0})
    with pytest.raises(ConstructionError):
        nakano_witness(NakanoExponents.ones(), 0.5, x)
    with pytest.raises(ConstructionError):
        nakano_witness(NakanoExponents.linear(), 1.0, x)
    with pytest.raises(ConstructionError):
        nakano_witness(NakanoExponents.linear(), 0.5, SparseVec())


def test_nakano_suite_small():
    assert nakano_suite(NakanoExponents.linear(), trials=10, max_dim=6).passed


# ---------------------------------------------------------------- combined sequences and the chain

def test_fact16_witness():
    rep = fact16_witness(m_max=10, n_max=1000)
    assert rep.passed and rep.notes


def test_prop36_witness_small():
    rep = prop36_witness(trials=5, max_dim=6, seed=1)
    assert rep.passed and len(rep.checks) > 0


# ---------------------------------------------------------------- report format

def test_report_csv_and_summary():
    rep = ex17_witness(HARMONIC, 10)
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert tuple(rows[0]) == WITNESS_COLUMNS
    assert {r[0] for r in rows[1:]} == {"ex1.7"}
    assert {r[-1] for r in rows[1:]} <= {"true", "false", "info"}
    assert "info" in {r[-1] for r in rows[1:]}
    assert rep.summary().rstrip().endswith("PASS")


def test_report_failure_reported():
    rep = ex17_witness(HARMONIC, 10)
    rep.add("forced", False, n=1)
    assert not rep.passed and "FAILED forced" in rep.summary()


def test_random_sparse_deterministic():
    a = random_sparse(np.random.default_rng(0), 10)
    b = random_sparse(np.random.default_rng(0), 10)
    assert a == b and 1 <= len(a) <= 10 and a.max_index <= 30
