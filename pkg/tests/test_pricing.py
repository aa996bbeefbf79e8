import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contractil.codegen import reindex
from contractil.compiler import count_compilations, from_contr
from contractil.errors import CholeskyFailure, MissingObservable, NonfiniteAccumulation
from contractil.il.semantics import Discount
from contractil.il.syntax import BinOp, ILBinExpr, ILFloat, ILModel, ILPayoff, TnumZ, tnum
from contractil.il.transform import cut_payoff
from contractil.instruments import double_option, european_option, fx_swap
from contractil.pricing import (
    ModelSpec,
    black_scholes_call,
    cut_versus_reduction,
    dumps_results,
    path_payoffs,
    price_across_time,
    price_mc,
    simulate_paths,
)
from contractil.pricing.model import psd_cholesky, standard_normals

# closed form, cross-checked by numerical integration of the lognormal density
BS_ATM_90D_R0 = 3.960376146988473
BS_ATM_90D_R5 = 4.579032085233791


def vanilla_kernel(maturity=90):
    return reindex(from_contr(european_option(maturity=maturity)))


def two_assets(rho):
    return ModelSpec(("AAPL", "MSFT"), (100.0, 50.0), (0.2, 0.3), (0.01, 0.01),
                     ((1.0, rho), (rho, 1.0)))


# --- closed form ------------------------------------------------------------------


def test_black_scholes_oracle_values():
    assert black_scholes_call(100.0, 100.0, 0.0, 0.2, 90 / 365) == pytest.approx(BS_ATM_90D_R0, abs=1e-12)
    assert black_scholes_call(100.0, 100.0, 0.05, 0.2, 90 / 365) == pytest.approx(BS_ATM_90D_R5, abs=1e-12)


def test_black_scholes_degenerate():
    assert black_scholes_call(110.0, 100.0, 0.05, 0.0, 1.0) == pytest.approx(110.0 - 100.0 * math.exp(-0.05))
    assert black_scholes_call(90.0, 100.0, 0.0, 0.3, 0.0) == 0.0
    with pytest.raises(ValueError):
        black_scholes_call(-1.0, 100.0, 0.0, 0.2, 1.0)


@given(st.floats(50, 150), st.floats(50, 150), st.floats(0, 0.1), st.floats(0.05, 0.8),
       st.floats(0.01, 3.0))
def test_black_scholes_within_arbitrage_bounds(s, k, r, v, t):
    c = black_scholes_call(s, k, r, v, t)
    assert max(s - k * math.exp(-r * t), 0.0) - 1e-9 <= c <= s + 1e-9


# --- model ------------------------------------------------------------------------


def test_model_validation():
    with pytest.raises(ValueError):
        ModelSpec(("A",), (0.0,), (0.2,), (0.0,), ((1.0,),))
    with pytest.raises(ValueError):
        ModelSpec(("A", "B"), (1.0, 1.0), (0.2, 0.2), (0.0, 0.0), ((1.0, 0.5), (0.4, 1.0)))
    with pytest.raises(CholeskyFailure):
        ModelSpec(("A", "B", "C"), (1.0,) * 3, (0.2,) * 3, (0.0,) * 3,
                  ((1.0, 0.9, -0.9), (0.9, 1.0, 0.9), (-0.9, 0.9, 1.0))).cholesky()


def test_model_json_round_trip():
    spec = two_assets(0.3)
    assert ModelSpec.from_json(spec.to_json()) == spec
    assert ModelSpec.loads('{"labels": {"A": {"spot": 1, "vol": 0.1, "rate": 0}}}').corr == ((1.0,),)


def test_semidefinite_factor():
    a = np.array([[1.0, 1.0], [1.0, 1.0]])
    low = psd_cholesky(a)
    np.testing.assert_allclose(low @ low.T, a)


def test_paths_independent_of_batching():
    spec = two_assets(0.5)
    days = [0, 3, 10, 40]
    whole = simulate_paths(spec, days, 0, 10, seed=9)
    parts = np.concatenate([simulate_paths(spec, days, s, n, seed=9)
                            for s, n in ((0, 3), (3, 1), (4, 6))])
    assert np.array_equal(whole, parts)


def test_normals_are_standard():
    z = standard_normals(1, 0, 50_000, 4, 4).ravel()
    assert abs(z.mean()) < 0.01 and abs(z.std() - 1.0) < 0.01


def test_zero_volatility_is_deterministic():
    spec = ModelSpec.single("AAPL", 100.0, 0.0, 0.05)
    vals = simulate_paths(spec, [0, 365], 0, 4, seed=1)
    assert np.all(vals[:, 0, 0] == 100.0)
    np.testing.assert_allclose(vals[:, 1, 0], 100.0 * math.exp(0.05), rtol=1e-14)


def test_perfect_correlation():
    spec = ModelSpec(("A", "B"), (100.0, 100.0), (0.2, 0.2), (0.0, 0.0), ((1.0, 1.0), (1.0, 1.0)))
    vals = simulate_paths(spec, [5, 30], 0, 100, seed=2)
    np.testing.assert_allclose(vals[..., 0], vals[..., 1], rtol=1e-14)


def test_martingale_under_discounting():
    spec = ModelSpec.single("AAPL", 100.0, 0.3, 0.04)
    vals = simulate_paths(spec, [180], 0, 200_000, seed=3)[:, 0, 0]
    disc = math.exp(-0.04 * 180 / 365)
    se = vals.std() / math.sqrt(len(vals))
    assert abs(disc * vals.mean() - 100.0) < 4 * se * disc


def test_correlation_is_recovered():
    spec = two_assets(0.6)
    vals = simulate_paths(spec, [30], 0, 100_000, seed=4)[:, 0, :]
    lr = np.log(vals)
    assert abs(np.corrcoef(lr[:, 0], lr[:, 1])[0, 1] - 0.6) < 0.01


# --- engine -----------------------------------------------------------------------


def test_zero_volatility_price_is_exact():
    spec = ModelSpec.single("AAPL", 100.0, 0.0, 0.05)
    disc = Discount.from_rate(0.05)
    res = price_mc(vanilla_kernel(), spec, disc, n_paths=10, seed=0)
    fwd = 100.0 * math.exp(0.05 * 90 / 365)
    assert res.price == pytest.approx((fwd - 100.0) * disc(90), rel=1e-12)
    assert res.std_error == 0.0


def test_constant_kernel():
    res = price_mc(reindex(ILFloat(7.0)), ModelSpec.single("A", 1.0, 0.2, 0.0), Discount.flat(),
                   n_paths=100)
    assert res.price == 7.0 and res.std_error == 0.0


def test_cut_kernel_after_last_payment_is_zero():
    k = reindex(cut_payoff(from_contr(double_option())))
    spec = two_assets(0.2)
    res = price_across_time(k, spec, Discount.from_rate(0.01), [0, 90, 91], n_paths=500, seed=1)
    assert res[0].price > 0 and res[1].price == res[0].price
    assert res[2].price == 0.0 and res[2].std_error == 0.0


def test_across_time_matches_single_time_and_never_compiles():
    k = reindex(cut_payoff(from_contr(double_option())))
    spec, disc = two_assets(0.2), Discount.from_rate(0.01)
    with count_compilations() as tally:
        many = price_across_time(k, spec, disc, [0, 45], n_paths=3000, seed=8)
    assert tally.calls == 0
    single = price_mc(k, spec, disc, 45, n_paths=3000, seed=8)
    assert (many[1].price, many[1].std_error, many[1].t) == (single.price, single.std_error, 45)


def test_fx_swap_needs_no_observables():
    k = reindex(from_contr(fx_swap()))
    res = price_mc(k, ModelSpec.single("X", 1.0, 0.1, 0.0), Discount.flat(), n_paths=3, p1="me", p2="you")
    assert res.price == pytest.approx(3 * 1_000_000.0 - 3 * 7_210_000.0)


def test_missing_label():
    with pytest.raises(MissingObservable):
        price_mc(vanilla_kernel(), ModelSpec.single("MSFT", 1.0, 0.1, 0.0), Discount.flat(), n_paths=2)


def test_nonfinite_payoff():
    il = ILBinExpr(BinOp.DIV, ILPayoff(tnum(1), "you", "me"),
                   ILBinExpr(BinOp.SUB, ILModel("A", TnumZ(0)), ILFloat(1.0)))
    with pytest.raises(NonfiniteAccumulation):
        price_mc(reindex(il), ModelSpec.single("A", 1.0, 0.2, 0.0), Discount.flat(), n_paths=4)


@settings(max_examples=10)
@given(st.integers(0, 2**31), st.integers(1, 9000), st.sampled_from([2, 3, 8]))
def test_worker_count_does_not_change_payoffs(seed, n, workers):
    k = reindex(cut_payoff(from_contr(double_option())))
    spec, disc = two_assets(0.4), Discount.from_rate(0.02)
    one = path_payoffs(k, spec, disc, [0, 30], n, seed, "you", "me", workers=1)
    many = path_payoffs(k, spec, disc, [0, 30], n, seed, "you", "me", workers=workers)
    assert np.array_equal(one.view(np.int64), many.view(np.int64))


def test_result_json():
    spec = ModelSpec.single("AAPL", 100.0, 0.2, 0.0)
    a = price_mc(vanilla_kernel(), spec, Discount.flat(), n_paths=1000, seed=5, workers=1)
    b = price_mc(vanilla_kernel(), spec, Discount.flat(), n_paths=1000, seed=5, workers=4)
    assert dumps_results(a) == dumps_results(b)
    assert set(a.to_json()) == {"price", "stdError", "nPaths", "seed"}


def test_cut_versus_reduction_small():
    res = cut_versus_reduction(double_option(), two_assets(0.3), Discount.from_rate(0.01),
                               [0, 50, 90, 91], n_paths=50, seed=6)
    assert res.identical()
    assert res.prices()[-1] == (0.0, 0.0)
