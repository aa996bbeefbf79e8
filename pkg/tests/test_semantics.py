import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from contractil.env import ExtEnv, Trace, Trans, check_tenv
from contractil.errors import (
    EvalError,
    MissingObservable,
    TypeCheckError,
    UnboundTemplateVar,
    UnboundVar,
)
from contractil.generators import GenConfig, random_contract, random_env, random_tenv
from contractil.instruments import example_option, fx_swap, templated_example
from contractil.semantics import (
    contract_trace,
    eval_exp,
    horizon,
    instantiate,
    is_template_closed,
    template_vars,
)
from contractil.syntax import (
    Acc,
    BoolLit,
    Both,
    Obs,
    Op,
    OpE,
    RealLit,
    Scale,
    Tnum,
    Transfer,
    Translate,
    Tvar,
    Ty,
    VarE,
    Zero,
    if_within,
)
from contractil.text import parse_contract
from contractil.typecheck import TypeContext, check_contract, is_well_typed, type_of_exp

from strategies import generated_contracts, seeds

TEMPLATED = GenConfig(template_vars=("T1", "T2", "T3"), allow_let=True, allow_acc=True)


def aapl(values):
    return ExtEnv.from_table({"AAPL": (0, values)})


# --- typing ---------------------------------------------------------------------


def test_type_errors():
    with pytest.raises(TypeCheckError):
        check_contract(Scale(BoolLit(True), Zero()))
    with pytest.raises(TypeCheckError):
        check_contract(if_within(RealLit(1.0), 0, Zero(), Zero()))
    with pytest.raises(TypeCheckError):
        type_of_exp(OpE(Op.ADD, (RealLit(1.0), BoolLit(False))))
    with pytest.raises(TypeCheckError):
        type_of_exp(VarE("x"))


def test_observable_kinds():
    ctx = TypeContext(observables={"flag": Ty.BOOL})
    assert type_of_exp(Obs("flag", 0), ctx) is Ty.BOOL
    assert type_of_exp(Obs("AAPL", 0), ctx) is Ty.REAL
    assert not is_well_typed(Scale(Obs("flag", 0), Zero()), ctx)


def test_cond_branches_must_agree():
    assert type_of_exp(OpE(Op.COND, (BoolLit(True), RealLit(1.0), RealLit(2.0)))) is Ty.REAL
    with pytest.raises(TypeCheckError):
        type_of_exp(OpE(Op.COND, (BoolLit(True), RealLit(1.0), BoolLit(False))))


@given(generated_contracts(TEMPLATED))
def test_generator_output_is_well_typed(c):
    check_contract(c)


# --- expressions ----------------------------------------------------------------


def test_acc_counts_days():
    inc = Acc("x", OpE(Op.ADD, (VarE("x"), RealLit(1.0))), 3, RealLit(0.0))
    assert eval_exp(inc, {}, ExtEnv.constant({})) == 3.0


def test_acc_reads_earlier_days():
    # running sum of the last three observations plus the initial one
    body = OpE(Op.ADD, (VarE("x"), Obs("A", 0)))
    rho = ExtEnv.from_table({"A": (0, [1.0, 10.0, 100.0, 1000.0])}).shift(3)
    assert eval_exp(Acc("x", body, 2, Obs("A", 0)), {}, rho) == 1000.0 + 100.0 + 10.0


def test_cond_is_lazy_in_branches():
    e = OpE(Op.COND, (BoolLit(True), RealLit(1.0), Obs("missing", 0)))
    assert eval_exp(e, {}, ExtEnv.constant({})) == 1.0


def test_eval_errors():
    with pytest.raises(EvalError):
        eval_exp(OpE(Op.DIV, (RealLit(1.0), RealLit(0.0))), {}, ExtEnv.constant({}))
    with pytest.raises(UnboundVar):
        eval_exp(VarE("z"), {}, ExtEnv.constant({}))
    with pytest.raises(MissingObservable):
        eval_exp(Obs("AAPL", 5), {}, aapl([1.0]))


# --- traces ---------------------------------------------------------------------


def test_example_option_in_the_money():
    rho = aapl([100.0] * 90 + [110.0])
    tr = contract_trace(example_option(), rho)
    assert len(tr) == 91
    assert tr[90] == Trans({("you", "me", "USD"): 10.0})
    assert all(tr[t].is_zero() for t in range(90))
    assert horizon(example_option()) == 91


def test_example_option_out_of_the_money():
    rho = aapl([100.0] * 90 + [95.0])
    assert contract_trace(example_option(), rho) == Trace()


def test_fx_swap_trace():
    tr = contract_trace(fx_swap(), ExtEnv.constant({}))
    assert horizon(fx_swap()) == 84
    for day in (22, 52, 83):
        assert tr[day].amount("me", "you", "EUR") == 1_000_000.0
        assert tr[day].amount("you", "me", "DKK") == pytest.approx(7_210_000.0)
    assert sum(not tr[d].is_zero() for d in range(len(tr))) == 3


def test_if_within_picks_first_true_day():
    c = if_within(OpE(Op.LT, (RealLit(105.0), Obs("AAPL", 0))), 5,
                  Transfer("a", "b", "X"), Scale(RealLit(2.0), Transfer("a", "b", "X")))
    assert contract_trace(c, aapl([100, 101, 106, 107, 100, 100])).days[2:] == (Trans.unit("a", "b", "X"),)
    tr = contract_trace(c, aapl([100.0] * 6))
    assert len(tr) == 6 and tr[5].amount("a", "b", "X") == 2.0


def test_templated_trace_needs_bindings():
    with pytest.raises(UnboundTemplateVar):
        contract_trace(templated_example(), aapl([0.0]))
    rho = aapl([0.0] * 90 + [130.0])
    tr = contract_trace(templated_example(), rho, {"t0": 10, "t1": 80})
    assert tr[10].amount("you", "me", "CUR") == 100.0
    assert tr[90].amount("you", "me", "CUR") == 30.0


def test_trans_antisymmetry():
    tr = Trans({("a", "b", "X"): 3.0, ("b", "a", "X"): 1.0, ("a", "a", "X"): 9.0})
    assert tr.amount("a", "b", "X") == 2.0
    assert tr.amount("b", "a", "X") == -2.0
    assert tr.amount("a", "a", "X") == 0.0


def test_check_tenv_rejects_negative():
    with pytest.raises(ValueError):
        check_tenv({"t": -1})


@given(generated_contracts(), seeds)
def test_trace_vanishes_at_horizon(c, seed):
    tr = contract_trace(c, random_env(seed))
    assert len(tr) <= horizon(c)


@given(generated_contracts(), seeds, st.integers(0, 12))
def test_translate_delays_trace(c, seed, n):
    rho = random_env(seed)
    assert contract_trace(Translate(Tnum(n), c), rho) == contract_trace(c, rho.shift(n)).delay(n)


@given(generated_contracts(), generated_contracts(), seeds)
def test_both_adds_traces(a, b, seed):
    rho = random_env(seed)
    assert contract_trace(Both(a, b), rho) == contract_trace(a, rho) + contract_trace(b, rho)


# --- templates ------------------------------------------------------------------


def test_template_vars_in_order():
    assert template_vars(templated_example()) == ["t0", "t1"]
    c = parse_contract("if(true, w, translate(m, zero), translate(w, zero))")
    assert template_vars(c) == ["w", "m"]


def test_instantiate_example():
    c = instantiate(templated_example(), {"t0": 10, "t1": 80})
    assert is_template_closed(c)
    assert c.shift == Tnum(10)
    assert horizon(c) == 91


def test_instantiate_unbound():
    with pytest.raises(UnboundTemplateVar):
        instantiate(Translate(Tvar("t"), Zero()), {})


@given(seeds)
def test_instantiation_closes_and_preserves_trace(seed):
    rng = random.Random(seed)
    c = random_contract(rng, TEMPLATED)
    tenv = random_tenv(rng)
    rho = random_env(rng.randrange(2**31))
    inst = instantiate(c, tenv)
    assert is_template_closed(inst)
    assert contract_trace(inst, rho) == contract_trace(c, rho, tenv)
    assert horizon(inst) == horizon(c, tenv)
