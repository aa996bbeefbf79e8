from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from contractil.codegen import (
    Kernel,
    KernelInput,
    KObs,
    discount_rows,
    eval_kernel,
    eval_kernel_batch,
    reindex,
    sample_input,
)
from contractil.codegen.functional import emit_functional
from contractil.codegen.kernel_source import emit, interpret, parse
from contractil.compiler import from_contr
from contractil.env import ExtEnv
from contractil.errors import (
    IndexOutOfRange,
    KernelError,
    ParseError,
    ShapeMismatch,
    UnboundTemplateVar,
    UnsupportedDynamicRow,
)
from contractil.generators import GenConfig, random_case, random_env
from contractil.il.semantics import Discount, eval_at
from contractil.il.syntax import (
    BinOp,
    ILBinExpr,
    ILBool,
    ILFloat,
    ILLoopIf,
    ILModel,
    ILPayoff,
    TnumZ,
    tnum,
)
from contractil.il.transform import cut_payoff
from contractil.instruments import barrier_option, instrument, templated_example
from contractil.syntax import Tvar

from strategies import cases

GOLDEN = Path(__file__).parent / "golden"
FLAT = Discount.flat()


def _golden_cases():
    import importlib.util

    spec = importlib.util.spec_from_file_location("regen", GOLDEN / "regen.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


REGEN = _golden_cases()


# --- reindexing -------------------------------------------------------------------


def test_distinct_days_get_rows_in_order():
    il = ILBinExpr(BinOp.ADD, ILPayoff(tnum(100), "a", "b"), ILPayoff(tnum(200), "a", "b"))
    k = reindex(il)
    assert k.rows == (100, 200)
    assert k.body.left.row == 0 and k.body.right.row == 1


def test_repeated_day_shares_a_row():
    il = ILBinExpr(BinOp.MULT, ILModel("A", TnumZ(7)), ILPayoff(tnum(7), "a", "b"))
    k = reindex(il)
    assert k.rows == (7,) and k.cols == ("A",)
    assert k.body.left == KObs(0, 0)


def test_single_observation():
    k = reindex(ILModel("AAPL", TnumZ(0)))
    assert k.rows == (0,) and k.body == KObs(0, 0)


def test_templated_rows():
    k = reindex(from_contr(templated_example()), {"t0": 10, "t1": 80})
    assert k.rows == (10, 90)
    assert k.tvars == ("t0", "t1") and k.tenv == (10, 80)
    assert set(k.layout_vars) == {"t0", "t1"}


def test_barrier_rows():
    k = reindex(from_contr(barrier_option()))
    assert k.rows == tuple(range(5, 16)) + tuple(range(25, 36)) + (60,)
    assert k.cols == ("AAPL", "MSFT", "GOOG")


def test_unbound_template_variable():
    with pytest.raises(UnboundTemplateVar):
        reindex(from_contr(templated_example()))


def test_constant_kernel():
    k = reindex(ILFloat(7.0))
    assert k.rows == () and k.cols == ()
    inp = KernelInput(np.empty((0, 0)), (), np.empty(0))
    assert eval_kernel(k, inp, "a", "b") == 7.0


# --- evaluation -------------------------------------------------------------------


def test_shape_mismatch():
    k = reindex(ILModel("A", TnumZ(3)))
    with pytest.raises(ShapeMismatch):
        eval_kernel(k, KernelInput(np.zeros((2, 1)), (), np.zeros(1)), "a", "b")
    with pytest.raises(ShapeMismatch):
        eval_kernel(k, KernelInput(np.zeros((1, 1)), (1,), np.zeros(1)), "a", "b")


def test_row_out_of_range():
    k = Kernel(KObs(3, 0), (0,), ("A",))
    with pytest.raises(IndexOutOfRange):
        eval_kernel(k, KernelInput(np.zeros((1, 1)), (), np.zeros(1)), "a", "b")


def _window_loop():
    hit = ILBinExpr(BinOp.LT, ILFloat(1.0), ILModel("A", TnumZ(0)))
    return ILLoopIf(hit, ILPayoff(tnum(0), "a", "b"), ILFloat(0.0), Tvar("w"))


def test_template_window_within_layout():
    k = reindex(_window_loop(), {"w": 4})
    rho = ExtEnv.from_table({"A": (0, [0.0, 0.0, 5.0, 0.0, 0.0])})
    d = Discount.from_table([1.0, 0.5, 0.25, 0.125, 0.0625])
    for w in range(5):
        want = eval_at(0, _window_loop(), rho, d, "a", "b", {"w": w})
        assert eval_kernel(k, sample_input(k, rho, d, tenv={"w": w}), "a", "b") == want


def test_template_window_beyond_layout():
    k = reindex(_window_loop(), {"w": 2})
    inp = sample_input(k, ExtEnv.constant({"A": 0.0}), FLAT, tenv={"w": 2})
    with pytest.raises(UnsupportedDynamicRow):
        eval_kernel(k, KernelInput(inp.ext, (3,), inp.disc), "a", "b")


def test_moving_a_dated_variable_is_rejected():
    k = reindex(from_contr(templated_example()), {"t0": 10, "t1": 80})
    rho = ExtEnv.constant({"AAPL": 120.0})
    with pytest.raises(UnsupportedDynamicRow):
        eval_kernel(k, sample_input(k, rho, FLAT, tenv={"t0": 11, "t1": 80}), "a", "b")


def test_boolean_observable_rejected():
    k = reindex(ILBinExpr(BinOp.AND, ILBool(True), ILModel("flag", TnumZ(0))))
    with pytest.raises(KernelError):
        sample_input(k, ExtEnv.constant({"flag": True}), FLAT)


def test_discount_rows_only_where_paid():
    k = reindex(ILBinExpr(BinOp.MULT, ILModel("A", TnumZ(1)), ILPayoff(tnum(2), "a", "b")))
    rows = discount_rows(k, Discount.from_table([1.0, 0.9, 0.8]))
    assert np.isnan(rows[0]) and rows[1] == 0.8


def test_json_round_trip():
    k = reindex(from_contr(barrier_option()))
    back = Kernel.loads(k.dumps())
    assert back == k and back.cells == k.cells and back.pay_rows == k.pay_rows


def _agree(il, rho, disc, p1, p2, times):
    k = reindex(il)
    src = parse(emit(k))
    for t in times:
        inp = sample_input(k, rho, disc, t)
        want = eval_at(t, il, rho, disc, p1, p2)
        got = eval_kernel(k, inp, p1, p2)
        assert got == want
        batch = eval_kernel_batch(k, inp.ext[None], inp.disc, inp.tenv, t, p1, p2)
        assert batch[0] == want
        assert interpret(src, inp.ext, inp.tenv, inp.disc, t, p1, p2) == want


@given(cases())
def test_kernel_agrees_with_payoff_semantics(case):
    il = from_contr(case.contract)
    _agree(il, case.rho, case.disc, case.p1, case.p2, [0])
    _agree(cut_payoff(il), case.rho, case.disc, case.p1, case.p2, [0, 3, 11])


def test_source_differential_on_random_inputs():
    rng = np.random.default_rng(5)
    for name in ("option", "fx-swap", "barrier", "double"):
        il = cut_payoff(from_contr(instrument(name)))
        k = reindex(il)
        src = parse(emit(k))
        for _ in range(100):
            ext = rng.uniform(80.0, 130.0, size=(len(k.rows), len(k.cols)))
            disc = rng.uniform(0.9, 1.0, size=len(k.rows))
            t = int(rng.integers(0, 100))
            want = eval_kernel(k, KernelInput(ext, (), disc, t), "you", "me")
            assert interpret(src, ext, (), disc, t, "you", "me") == want


@given(st.integers(0, 2**32 - 1), st.integers(1, 9))
def test_batch_matches_scalar(seed, n):
    case = random_case(seed, GenConfig(max_depth=5))
    k = reindex(cut_payoff(from_contr(case.contract)))
    rng = np.random.default_rng(seed)
    ext = rng.uniform(50.0, 150.0, size=(n, len(k.rows), len(k.cols)))
    disc = np.where(np.isnan(discount_rows(k, case.disc)), np.nan, rng.uniform(0.5, 1.0, len(k.rows)))
    t = int(rng.integers(0, 20))
    batch = eval_kernel_batch(k, ext, disc, (), t, case.p1, case.p2)
    for p in range(n):
        one = eval_kernel(k, KernelInput(ext[p], (), disc, t), case.p1, case.p2)
        assert batch[p] == one or (np.isnan(one) and np.isnan(batch[p]))


# --- emitted source ---------------------------------------------------------------


@pytest.mark.parametrize("stem", sorted(REGEN.CASES))
def test_golden_sources(stem):
    name, cut, tenv = REGEN.CASES[stem]
    out = REGEN.render(name, cut, tenv)
    assert out["kernel"] == (GOLDEN / f"{stem}.kernel").read_text()
    assert out["hs"] == (GOLDEN / f"{stem}.hs").read_text()


def test_emission_is_deterministic():
    il = cut_payoff(from_contr(barrier_option()))
    assert emit(reindex(il)) == emit(reindex(il))
    assert emit_functional(il) == emit_functional(il)


def test_source_headers_round_trip():
    k = reindex(from_contr(templated_example()), {"t0": 10, "t1": 80})
    prog = parse(emit(k))
    assert prog.headers["days"] == [10, 90]
    assert prog.headers["tvars"] == ["t0", "t1"]


def test_source_parse_error():
    with pytest.raises(ParseError):
        parse("let payoff(ext) = (1.0 +")


def test_functional_cut_guard():
    text = emit_functional(cut_payoff(from_contr(templated_example())))
    assert '< t_now)' in text
    assert 'ext Map.! ("AAPL", 0 + (tenv Map.! "t0") + (tenv Map.! "t1") + 0 + t0)' in text
    assert "loopif" not in text.split("payoffInternal", 1)[1]


def test_functional_keeps_real_loops():
    text = emit_functional(from_contr(barrier_option()))
    assert text.count("(loopif 10 t0") == 2
    assert "(\\t0 -> (loopif 10 t0" in text


def test_kernel_matches_environment_on_templated_example():
    il = cut_payoff(from_contr(templated_example()))
    tenv = {"t0": 10, "t1": 80}
    k = reindex(il, tenv)
    rho = random_env(11)
    d = Discount.from_rate(0.03)
    for t in (0, 10, 11, 90, 91):
        inp = sample_input(k, rho, d, t)
        assert eval_kernel(k, inp, "you", "me") == eval_at(t, il, rho, d, "you", "me", tenv)
