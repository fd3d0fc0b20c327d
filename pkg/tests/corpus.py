"""Shared structure-function instances used by the algebroid and
acceptance tests: model specs, passing and failing data, expected tables."""

import itertools
from fractions import Fraction

from bvsigma.models import (
    BfBlock,
    CsBlock,
    CS_BF,
    ModelSpec,
    StructureData,
    ansatz_families,
)
from bvsigma.symalg import CPoly, Expr, make_symbol


def n2_spec():
    return ModelSpec(n=2, d=3)


def n3_spec():
    return ModelSpec(n=3, d=2, bf_blocks=(BfBlock(1, 2),))


def cs_spec(rank=2, d=2):
    k = tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(rank))
        for i in range(rank)
    )
    return ModelSpec(n=3, d=d, flavor=CS_BF, cs_block=CsBlock(rank, k))


def sym_expr(spec, name, lower=(), upper=(), deriv=(), coeff=1):
    fams = {f.name: f for f in ansatz_families(spec)}
    sign, sym = make_symbol(name, lower, upper, deriv, fams[name].groups)
    if sym is None:
        return Expr.zero()
    return Expr.from_cpoly(CPoly.symbol(sym, Fraction(coeff) * sign))


def fill_zero(data, spec, names):
    """Assign zero to every not-yet-assigned combination of the families."""
    fams = {f.name: f for f in ansatz_families(spec)}
    for name in names:
        fam = fams[name]
        lo, up = fam.slot_ranges(spec)
        for lower in itertools.product(*(range(1, r + 1) for r in lo)):
            for upper in itertools.product(*(range(1, r + 1) for r in up)):
                sign, sym = make_symbol(name, lower, upper, (), fam.groups)
                if sym is None:
                    continue
                if (name, sym.lower, sym.upper) not in data.values:
                    data.assign(name, sym.lower, sym.upper, CPoly.zero())
    return data


# -- n=2 instances -------------------------------------------------------------


def so3_data():
    data = StructureData.for_model(n2_spec())
    data.assign("f1", (), (1, 2), CPoly.base(3))
    data.assign("f1", (), (1, 3), CPoly.base(2).scale(-1))
    data.assign("f1", (), (2, 3), CPoly.base(1))
    return data


def quadratic_poisson_data():
    data = StructureData.for_model(n2_spec())
    data.assign("f1", (), (1, 2), CPoly.base(3) * CPoly.base(3))
    data.assign("f1", (), (1, 3), CPoly.zero())
    data.assign("f1", (), (2, 3), CPoly.zero())
    return data


def zero_n2_data():
    return fill_zero(StructureData.for_model(n2_spec()), n2_spec(), ["f1"])


def bad_bivector_data():
    data = StructureData.for_model(n2_spec())
    data.assign("f1", (), (1, 2), CPoly.base(1))
    data.assign("f1", (), (1, 3), CPoly.zero())
    data.assign("f1", (), (2, 3), CPoly.base(2))
    return data


# -- n=3 two-block instances ------------------------------------------------------


def exact_courant_data():
    spec = n3_spec()
    data = StructureData.for_model(spec)
    for a in (1, 2):
        for i in (1, 2):
            data.assign("f2", (), (a, i), CPoly.scalar(-1 if a == i else 0))
    return fill_zero(data, spec, ["f1", "f4", "f5"])


def e_star_lie_data():
    spec = n3_spec()
    data = StructureData.for_model(spec)
    data.assign("f4", (1, 2), (1,), CPoly.scalar(1))
    return fill_zero(data, spec, ["f1", "f2", "f4", "f5"])


def perturbed_courant_data():
    spec = n3_spec()
    data = StructureData.for_model(spec)
    for a in (1, 2):
        for i in (1, 2):
            data.assign("f2", (), (a, i), CPoly.scalar(-1 if a == i else 0))
    data.assign("f4", (1, 2), (1,), CPoly.scalar(1))
    return fill_zero(data, spec, ["f1", "f4", "f5"])


def zero_n3_data():
    return fill_zero(StructureData.for_model(n3_spec()), n3_spec(), ["f1", "f2", "f4", "f5"])


# -- self-paired instances ----------------------------------------------------------


def su2_data(spec):
    data = StructureData.for_model(spec)
    data.assign("f2", (1, 2, 3), (), CPoly.scalar(1))
    return fill_zero(data, spec, ["f1", "f2"])


def non_jacobi_cs_data(spec):
    data = StructureData.for_model(spec)
    data.assign("f2", (1, 2, 3), (), CPoly.scalar(1))
    data.assign("f2", (1, 4, 5), (), CPoly.scalar(1))
    return fill_zero(data, spec, ["f1", "f2"])


def anchored_cs_data(spec):
    data = StructureData.for_model(spec)
    data.assign("f1", (1,), (1,), CPoly.scalar(1))
    return fill_zero(data, spec, ["f1", "f2"])
