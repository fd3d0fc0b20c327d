import itertools
import random
from fractions import Fraction

import pytest

from bvsigma.models import BfBlock, CsBlock, CS_BF, ModelSpec, build_S0, build_S1_generic
from bvsigma.worldsheet import (
    ComponentField,
    ComponentRelationError,
    DgaExpr,
    component_exprs,
    first_order_check,
    integrate,
    kinetic_master_check,
    product_form_part,
    superfield,
    theorem1_sum,
    theorem1_witness,
)

K2 = ((Fraction(1), Fraction(0)), (Fraction(0), Fraction(1)))


def random_dga(n, rng, families=("A", "B", "C")):
    degrees = {"A": 1, "B": 1, "C": 2}
    expr = DgaExpr.zero(n)
    for _ in range(rng.randint(1, 3)):
        term = DgaExpr.scalar(n, Fraction(rng.randint(-3, 3) or 1, rng.randint(1, 2)))
        for _ in range(rng.randint(1, 3)):
            fam = rng.choice(families)
            r = rng.randint(0, n)
            gen = ComponentField(fam, r, degrees[fam] - r)
            if rng.random() < 0.25 and r < n:
                nxt = gen.d()
                term = term * DgaExpr.gen(n, nxt)
            else:
                term = term * DgaExpr.gen(n, gen)
        expr = expr + term
    return expr


@pytest.mark.parametrize("n", (2, 3, 4))
def test_differentials_on_random_expressions(n):
    rng = random.Random(n)
    for _ in range(60):
        e = random_dga(n, rng)
        assert e.d().d().is_zero()
        assert e.delta0().delta0().is_zero()
        assert (e.d().delta0() + e.delta0().d()).is_zero()


def test_d_square_on_generators():
    n = 3
    a = component_exprs(n, "A", 1)
    assert a[1].d().d().is_zero()


def test_d_truncates_above_form_n():
    n = 2
    a = component_exprs(n, "A", 1)
    b = component_exprs(n, "B", 1)
    top = a[1] * b[1]  # form degree 2 = n
    assert not top.is_zero()
    assert top.d().is_zero()  # would have form degree 3


def test_delta0_component_relations():
    n = 3
    g = superfield(n, "G", 1)
    assert DgaExpr.gen(n, g[0]).delta0().is_zero()
    for r in range(1, n + 1):
        lhs = DgaExpr.gen(n, g[r]).delta0()
        rhs = DgaExpr.gen(n, g[r - 1]).d()
        assert lhs == rhs
    assert DgaExpr.gen(n, g[2]).delta0().delta0().is_zero()


def test_delta0_is_a_derivation():
    n = 3
    a = component_exprs(n, "A", 1)
    b = component_exprs(n, "B", 2)
    x, y = a[1], b[1]
    lhs = (x * y).delta0()
    # A(1,0) is odd, so the Leibniz sign is -1 on the second term
    rhs = x.delta0() * y - x * y.delta0()
    assert lhs == rhs


def test_integrate_kills_exact_and_low_form_terms():
    n = 3
    f = component_exprs(n, "F", 1)
    g = component_exprs(n, "G", 1)
    assert integrate((f[1] * g[1]).d()).is_zero()
    assert integrate(f[1] * g[0]).is_zero()  # form degree 1 < n


def test_integrate_generic_term_survives():
    n = 3
    f = component_exprs(n, "F", 1)
    g = component_exprs(n, "G", 1)
    survivor = f[2] * g[0].d()
    assert not integrate(survivor).is_zero()


@pytest.mark.parametrize("n", (2, 3))
def test_integrate_invariant_under_exact_shifts(n):
    rng = random.Random(17)
    for _ in range(40):
        x = random_dga(n, rng)
        y = random_dga(n, rng)
        lhs = integrate(x + y.d())
        rhs = integrate(x)
        assert (lhs - rhs).is_zero() or integrate(lhs - rhs).is_zero()


@pytest.mark.parametrize("n", (2, 3, 4, 5))
def test_theorem1_witness_identity(n):
    for pf, pg in itertools.product((0, 1), repeat=2):
        f = component_exprs(n, "F", pf)
        g = component_exprs(n, "G", pg)
        total = theorem1_sum(n, f, g)
        t, w = theorem1_witness(n, f, g, with_d_preimage=True)
        assert (total - t.delta0() - w.d()).is_zero()
        assert integrate(total - t.delta0()).is_zero()


def test_theorem1_single_terms_are_exact(n=4):
    # Every single split term F_{n-p-1} dG_p is delta0-exact modulo d on
    # its own: it differs from the closing term F_0 dG_{n-1} by the
    # telescoped chain, and the closing term is delta0(F_0 G_n) up to sign.
    f = component_exprs(n, "F", 0)
    g = component_exprs(n, "G", 1)
    for p in range(n):
        single = f[n - p - 1] * g[p].d()
        chain = f[0] * g[n]
        for q in range(p, n - 1):
            chain = chain + f[n - q - 1] * g[q + 1]
        assert integrate(single - chain.delta0()).is_zero()


def test_theorem1_zero_components():
    n = 3
    zero = [DgaExpr.zero(n) for _ in range(n + 1)]
    t = theorem1_witness(n, zero, zero)
    assert t.is_zero()


def test_theorem1_rejects_bad_components():
    n = 3
    f = component_exprs(n, "F", 1)
    bad = list(f)
    bad[2] = component_exprs(n, "H", 1)[2]  # breaks delta0 F_2 = d F_1
    with pytest.raises(ComponentRelationError):
        theorem1_witness(n, bad, component_exprs(n, "G", 0))


@pytest.mark.parametrize("n,blocks", [(2, ()), (3, (BfBlock(1, 2),)), (4, (BfBlock(1, 2),)), (5, (BfBlock(1, 2), BfBlock(2, 2)))])
def test_kinetic_master_bf(n, blocks):
    spec = ModelSpec(n=n, d=2, bf_blocks=blocks)
    s0 = build_S0(spec)
    assert kinetic_master_check(spec, s0.kinetic).passed


@pytest.mark.parametrize("n", (3, 5))
def test_kinetic_master_cs(n):
    blocks = (BfBlock(1, 2),) if n == 5 else ()
    spec = ModelSpec(n=n, d=2, flavor=CS_BF, bf_blocks=blocks, cs_block=CsBlock(2, K2))
    s0 = build_S0(spec)
    assert kinetic_master_check(spec, s0.kinetic).passed


def test_product_form_part_expands_compositions():
    n = 2
    f = component_exprs(n, "F", 1)
    g = component_exprs(n, "G", 1)
    part = product_form_part(n, [f, g], 1)
    assert part == f[0] * g[1] + f[1] * g[0]


@pytest.mark.parametrize(
    "spec",
    [
        ModelSpec(n=2, d=3),
        ModelSpec(n=3, d=2, bf_blocks=(BfBlock(1, 2),)),
        ModelSpec(n=4, d=2, bf_blocks=(BfBlock(1, 2),)),
        ModelSpec(n=5, d=2, bf_blocks=(BfBlock(1, 2), BfBlock(2, 2))),
        ModelSpec(n=3, d=2, flavor=CS_BF, cs_block=CsBlock(2, K2)),
    ],
    ids=lambda s: s.fingerprint(),
)
def test_first_order_of_generic_ansatz(spec):
    rep = first_order_check(spec, build_S1_generic(spec))
    assert rep.passed
    assert rep.monomials


def test_first_order_of_zero_action():
    from bvsigma.models import Action
    from bvsigma.symalg import Expr

    spec = ModelSpec(n=2, d=3)
    rep = first_order_check(spec, Action(Expr.zero(), 2))
    assert rep.passed and rep.monomials == []
