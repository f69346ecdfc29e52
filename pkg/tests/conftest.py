"""Shared fixtures and deterministic random-expression generators."""

import random
from fractions import Fraction

import pytest

from hypersym.catalog import Catalog
from hypersym.expr import tree


@pytest.fixture(scope="session")
def catalog():
    return Catalog()


@pytest.fixture(scope="session")
def ctx(catalog):
    return catalog.ctx


def random_expr(rng: random.Random, names, depth: int) -> tree.Expr:
    """Random well-formed expression: +, *, small nonneg powers, rationals.

    Division is deliberately excluded so every generated expression is
    defined everywhere; inversion is exercised by dedicated tests.
    """
    if depth <= 0 or rng.random() < 0.3:
        if rng.random() < 0.25:
            return tree.const(Fraction(rng.randint(-4, 4), rng.randint(1, 3)))
        return tree.name(rng.choice(names))
    op = rng.choice(("add", "add", "mul", "mul", "pow"))
    if op == "add":
        return tree.add(random_expr(rng, names, depth - 1),
                        random_expr(rng, names, depth - 1))
    if op == "mul":
        return tree.mul(random_expr(rng, names, depth - 1),
                        random_expr(rng, names, depth - 1))
    return tree.pow_(random_expr(rng, names, depth - 1), rng.randint(0, 3))
