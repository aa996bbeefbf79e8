"""Hypothesis strategies for contracts and payoff expressions."""

import random

from hypothesis import strategies as st

from contractil.generators import GenConfig, random_case, random_contract, random_env
from contractil.syntax import (
    Acc,
    BoolLit,
    Both,
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
    Tvar,
    VarE,
    Zero,
)

labels = st.sampled_from(["AAPL", "MSFT", "GOOG", "EURUSD"])
parties = st.sampled_from(["me", "you", "bank", "Bob"])
assets = st.sampled_from(["USD", "EUR", "DKK", "CUR"])
texprs = st.one_of(st.integers(0, 40).map(Tnum), st.sampled_from(["T1", "T2", "mat"]).map(Tvar))
floats = st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False)


def _real_exps(bound=()):
    leaves = [floats.map(RealLit), st.builds(Obs, labels, st.integers(-5, 5))]
    if bound:
        leaves.append(st.sampled_from(bound).map(VarE))
    return st.recursive(
        st.one_of(*leaves),
        lambda inner: st.one_of(
            st.builds(lambda o, a, b: OpE(o, (a, b)),
                      st.sampled_from([Op.ADD, Op.SUB, Op.MULT, Op.DIV]), inner, inner),
            inner.map(lambda a: OpE(Op.NEG, (a,))),
        ),
        max_leaves=6,
    )


def _bool_exps(bound=()):
    real = _real_exps(bound)
    base = st.one_of(
        st.booleans().map(BoolLit),
        st.builds(lambda o, a, b: OpE(o, (a, b)), st.sampled_from([Op.LT, Op.LEQ, Op.EQ]),
                  real, real),
    )
    return st.recursive(
        base,
        lambda inner: st.one_of(
            st.builds(lambda o, a, b: OpE(o, (a, b)), st.sampled_from([Op.AND, Op.OR]),
                      inner, inner),
            inner.map(lambda a: OpE(Op.NOT, (a,))),
        ),
        max_leaves=4,
    )


real_exps = _real_exps()
bool_exps = _bool_exps()
exps = st.one_of(
    real_exps,
    bool_exps,
    st.builds(lambda c, a, b: OpE(Op.COND, (c, a, b)), bool_exps, real_exps, real_exps),
    st.builds(lambda body, d, init: Acc("x", body, d, init),
              _real_exps(("x",)), st.integers(0, 4), real_exps),
)

transfers = st.builds(Transfer, parties, parties, assets)

contracts = st.recursive(
    st.one_of(st.just(Zero()), transfers),
    lambda inner: st.one_of(
        st.builds(Scale, real_exps, inner),
        st.builds(Translate, texprs, inner),
        st.builds(Both, inner, inner),
        st.builds(IfWithin, bool_exps, texprs, inner, inner),
        st.builds(lambda e, c: Let("y", e, c), real_exps, inner),
    ),
    max_leaves=8,
)

seeds = st.integers(0, 2**32 - 1)


@st.composite
def generated_contracts(draw, cfg=None):
    """Well-typed contracts from the package generator, shrinking by seed."""
    return random_contract(random.Random(draw(seeds)), cfg or GenConfig())


@st.composite
def cases(draw, cfg=None):
    return random_case(draw(seeds), cfg)


@st.composite
def envs(draw):
    return random_env(draw(seeds))
