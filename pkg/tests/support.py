"""Seeded random generators shared across test modules."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional, Tuple

from weylflow.flows import Realization
from weylflow.scalars import GaussianRational
from weylflow.series import GradedSeries


def rational(rng: random.Random, span: int = 5, den: int = 4) -> Fraction:
    return Fraction(rng.randint(-span, span), rng.randint(1, den))


def random_index(rng: random.Random, n: int, total: int) -> Tuple[int, ...]:
    idx = [0] * n
    for _ in range(total):
        idx[rng.randrange(n)] += 1
    return tuple(idx)


def p_polynomial(
    rng: random.Random,
    n: int,
    degree: int,
    max_terms: int = 3,
    allow_zero: bool = True,
) -> GradedSeries:
    terms = {}
    count = rng.randint(0 if allow_zero else 1, max_terms)
    for _ in range(count):
        key = ((0,) * n, random_index(rng, n, rng.randint(0, degree)))
        coeff = rational(rng)
        terms[key] = terms.get(key, Fraction(0)) + coeff
    series = GradedSeries(n, 0, terms)
    if not allow_zero and series.is_zero:
        return GradedSeries.p_var(n, rng.randrange(n), 0)
    return series


def graded_series(
    rng: random.Random,
    n: int,
    kmax: int,
    max_terms: int = 4,
    pdeg: int = 2,
    complex_coeffs: bool = True,
) -> GradedSeries:
    terms = {}
    for _ in range(rng.randint(0, max_terms)):
        key = (
            random_index(rng, n, rng.randint(0, kmax)),
            random_index(rng, n, rng.randint(0, pdeg)),
        )
        im = rational(rng) if complex_coeffs else 0
        coeff = GaussianRational(rational(rng), im)
        prior = terms.get(key)
        terms[key] = coeff if prior is None else prior + coeff
    return GradedSeries(n, kmax, terms)


def random_realization(
    rng: random.Random,
    n: int,
    degree: int = 2,
    metric: Optional[Tuple[int, ...]] = None,
    with_chi: bool = False,
    max_terms: int = 2,
) -> Realization:
    if metric is None:
        metric = tuple(rng.choice((1, -1)) for _ in range(n))
    phi = tuple(
        tuple(p_polynomial(rng, n, degree, max_terms) for _ in range(n))
        for _ in range(n)
    )
    if with_chi:
        chi = tuple(
            p_polynomial(rng, n, degree, max_terms, allow_zero=False)
            for _ in range(n)
        )
    else:
        chi = tuple(GradedSeries.zero(n, 0) for _ in range(n))
    return Realization(n=n, metric=metric, phi=phi, chi=chi)
