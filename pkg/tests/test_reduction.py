import pytest
from hypothesis import given
from hypothesis import strategies as st

from contractil.env import ExtEnv, Trace
from contractil.errors import NotTemplateClosed
from contractil.generators import GenConfig, random_env
from contractil.instruments import example_option, templated_example
from contractil.reduction import advance, reduce_step
from contractil.semantics import contract_trace, horizon
from contractil.syntax import (
    IfWithin,
    Let,
    Obs,
    Op,
    OpE,
    RealLit,
    Scale,
    Tnum,
    Transfer,
    Translate,
    VarE,
    Zero,
)

from strategies import generated_contracts, seeds


def test_transfer_pays_today():
    residual, tr = reduce_step(Transfer("a", "b", "X"), ExtEnv.constant({}))
    assert residual == Zero()
    assert tr.amount("a", "b", "X") == 1.0


def test_translate_counts_down():
    residual, tr = reduce_step(Translate(Tnum(3), Transfer("a", "b", "X")), ExtEnv.constant({}))
    assert residual == Translate(Tnum(2), Transfer("a", "b", "X"))
    assert tr.is_zero()


def test_scale_freezes_factor():
    c = Scale(Obs("A", 0), Translate(Tnum(1), Transfer("a", "b", "X")))
    residual, _ = reduce_step(c, ExtEnv.from_table({"A": (0, [4.0])}))
    assert residual == Scale(RealLit(4.0), Translate(Tnum(0), Transfer("a", "b", "X")))


def test_let_freezes_binding():
    c = Let("v", Obs("A", 0), Translate(Tnum(1), Scale(VarE("v"), Transfer("a", "b", "X"))))
    residual, _ = reduce_step(c, ExtEnv.from_table({"A": (0, [4.0])}))
    assert residual.bound == RealLit(4.0)


def test_if_within_shrinks_window():
    c = IfWithin(OpE(Op.LT, (RealLit(1.0), Obs("A", 0))), Tnum(2), Transfer("a", "b", "X"), Zero())
    residual, tr = reduce_step(c, ExtEnv.constant({"A": 0.0}))
    assert residual == IfWithin(c.cond, Tnum(1), c.then, c.orelse) and tr.is_zero()
    residual, tr = reduce_step(c, ExtEnv.constant({"A": 5.0}))
    assert residual == Zero() and tr.amount("a", "b", "X") == 1.0


def test_needs_template_closed():
    with pytest.raises(NotTemplateClosed):
        reduce_step(templated_example(), ExtEnv.constant({}))


def test_negative_advance():
    with pytest.raises(ValueError):
        advance(Zero(), ExtEnv.constant({}), -1)


def test_option_reduces_to_payment():
    rho = ExtEnv.from_table({"AAPL": (0, [100.0] * 90 + [125.0])})
    residual, emitted = advance(example_option(), rho, 91)
    assert len(emitted) == 91
    assert emitted[90].amount("you", "me", "USD") == 25.0
    assert contract_trace(residual, rho.shift(91)) == Trace()


@given(generated_contracts(GenConfig(allow_let=True, allow_acc=True)), seeds, st.integers(0, 40))
def test_advance_emits_the_trace_prefix(c, seed, n):
    rho = random_env(seed)
    full = contract_trace(c, rho)
    residual, emitted = advance(c, rho, n)
    assert Trace(tuple(emitted)) == Trace(full.days[:n])
    # the residual carries the rest of the trace
    assert contract_trace(residual, rho.shift(n)) == Trace(full.days[n:])


@given(generated_contracts(), seeds)
def test_advance_past_horizon_is_inert(c, seed):
    rho = random_env(seed)
    h = horizon(c)
    residual, _ = advance(c, rho, h)
    assert contract_trace(residual, rho.shift(h)) == Trace()
