"""Applications of the flow engine.

Numeric evaluation of a flow on a plane wave labeled by momentum q, a small
library of named realizations with exact closed forms where one is known,
and the composition report that checks products of two flows against the
operator oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .flows import (
    FlowResult,
    LinearRealization,
    Realization,
    compose_momenta,
    compute_flow,
    exponents_from_momenta,
    recover_generator,
)
from .series import GradedSeries
from .weyl import AlgebraSignature, coordinate_exponent, flow_normal_form


@dataclass(frozen=True)
class PlaneWaveImage:
    """Numeric image of one plane wave under the flow: new momenta and phase."""

    momenta: Tuple[float, ...]
    phase: float
    kmax_used: int


def evaluate_flow(
    fr: FlowResult, kval: Sequence[float], qval: Sequence[float]
) -> PlaneWaveImage:
    """Evaluate a computed flow at numeric k on the plane wave with momentum q."""
    n = fr.n
    if len(kval) != n or len(qval) != n:
        raise ValueError(f"need {n} components for k and for q")
    momenta = tuple(s.eval_at(kval, qval).real for s in fr.momenta)
    phase = fr.phase.eval_at(kval, qval).real
    return PlaneWaveImage(momenta=momenta, phase=phase, kmax_used=fr.kmax)


def act_on_plane_wave(
    r: Realization, kval: Sequence[float], qval: Sequence[float], kmax: int
) -> PlaneWaveImage:
    """Flow the realization to order kmax, then evaluate on one plane wave."""
    return evaluate_flow(compute_flow(r, kmax), kval, qval)


# -- named realizations ----------------------------------------------------------


@dataclass(frozen=True)
class NamedRealization:
    """A realization with a name, a one-line summary, and an optional exact
    closed form for its flowed momenta as a function of the k cap."""

    name: str
    summary: str
    realization: Realization
    kmax: int
    closed_form: Optional[Callable[[int], List[GradedSeries]]] = None


def _series_1d(coeffs: Dict[Tuple[int, int], Fraction], kmax: int = 0) -> GradedSeries:
    return GradedSeries(
        1, kmax, {((k,), (p,)): c for (k, p), c in coeffs.items()}
    )


def power_law_family(exponent: int, kmax: int = 4) -> NamedRealization:
    """One-dimensional realization with phi = p**exponent, exponent >= 2.

    The flow has the exact closed form

        J = p * (1 - (exponent-1) k p**(exponent-1)) ** (-1/(exponent-1))

    whose Taylor coefficients are rational, so the closed form is generated
    exactly from rising factorials.
    """
    if exponent < 2:
        raise ValueError("the power family starts at exponent 2")
    l = exponent

    def closed(km: int) -> List[GradedSeries]:
        a = Fraction(1, l - 1)
        coeff = Fraction(1)
        terms: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Fraction] = {}
        for m in range(km + 1):
            if m:
                coeff = coeff * (a + m - 1) * (l - 1) / m
            terms[((m,), (1 + (l - 1) * m,))] = coeff
        return [GradedSeries(1, km, terms)]

    r = Realization(
        n=1,
        metric=(1,),
        phi=((_series_1d({(0, l): Fraction(1)}),),),
        chi=(GradedSeries.zero(1, 0),),
    )
    return NamedRealization(
        name=f"power-{l}",
        summary=f"one dimension, phi = p^{l}, flow summing a closed geometric-type series",
        realization=r,
        kmax=kmax,
        closed_form=closed,
    )


def _linear_1d(kmax: int = 4) -> NamedRealization:
    def closed(km: int) -> List[GradedSeries]:
        terms = {
            ((m,), (1,)): Fraction(1, factorial(m)) for m in range(km + 1)
        }
        return [GradedSeries(1, km, terms)]

    r = Realization(
        n=1,
        metric=(1,),
        phi=((_series_1d({(0, 1): Fraction(1)}),),),
        chi=(GradedSeries.zero(1, 0),),
    )
    return NamedRealization(
        name="linear",
        summary="one dimension, phi = p, flow rescales the momentum by exp(k)",
        realization=r,
        kmax=kmax,
        closed_form=closed,
    )


def _shift_1d(kmax: int = 4) -> NamedRealization:
    def closed(km: int) -> List[GradedSeries]:
        return [
            GradedSeries(
                1, km, {((0,), (1,)): Fraction(1), ((1,), (0,)): Fraction(1)}
            )
        ]

    r = Realization(
        n=1,
        metric=(1,),
        phi=((_series_1d({(0, 0): Fraction(1)}),),),
        chi=(GradedSeries.zero(1, 0),),
    )
    return NamedRealization(
        name="shift",
        summary="one dimension, phi = 1, flow translates the momentum by k",
        realization=r,
        kmax=kmax,
        closed_form=closed,
    )


def _nilpotent_2d(kmax: int = 4) -> NamedRealization:
    lr = LinearRealization(2, ((Fraction(0), Fraction(1)), (Fraction(0), Fraction(0))))

    def closed(km: int) -> List[GradedSeries]:
        from .flows import linear_closed_form

        return linear_closed_form(lr, km)

    return NamedRealization(
        name="nilpotent-2d",
        summary="two dimensions, linear flow of a nilpotent matrix, terminates at first order",
        realization=lr.embedding(),
        kmax=kmax,
        closed_form=closed,
    )


def _minkowski_2d(kmax: int = 4) -> NamedRealization:
    zero = GradedSeries.zero(2, 0)
    p0 = GradedSeries.p_var(2, 0, 0)
    p1 = GradedSeries.p_var(2, 1, 0)
    r = Realization(
        n=2,
        metric=(-1, 1),
        phi=((p0, p1), (zero, p0)),
        chi=(zero, p0),
    )
    return NamedRealization(
        name="minkowski-2d",
        summary="two dimensions with metric (-1, 1) and a nonzero scalar part",
        realization=r,
        kmax=kmax,
    )


def _quadratic_2d(kmax: int = 4) -> NamedRealization:
    zero = GradedSeries.zero(2, 0)
    p0 = GradedSeries.p_var(2, 0, 0)
    p1 = GradedSeries.p_var(2, 1, 0)
    r = Realization(
        n=2,
        metric=(1, 1),
        phi=((p0 * p0, p0 * p1), (zero, p1 * p1)),
        chi=(p0, zero),
    )
    return NamedRealization(
        name="quadratic-2d",
        summary="two dimensions, quadratic phi entries and a linear scalar part",
        realization=r,
        kmax=kmax,
    )


def builtin_realizations() -> Dict[str, NamedRealization]:
    """The named realizations shipped with the package, keyed by name."""
    items = [
        _linear_1d(),
        _shift_1d(),
        power_law_family(2),
        power_law_family(3),
        power_law_family(4),
        _nilpotent_2d(),
        _minkowski_2d(),
        _quadratic_2d(),
    ]
    return {item.name: item for item in items}


# -- composition -------------------------------------------------------------------


@dataclass(frozen=True)
class CompositionReport:
    """Product of two flows, its recovered generator, and the oracle verdict.

    ``first_order`` is the naive sum of the two generating rows; the
    recovered generator equals it exactly when the two operators commute,
    and ``higher_corrections_vanish`` records whether that happened.
    """

    kmax: int
    composed: Tuple[GradedSeries, ...]
    generator: Tuple[GradedSeries, ...]
    first_order: Tuple[GradedSeries, ...]
    higher_corrections_vanish: bool
    oracle_equal: bool


def composition_report(r1: Realization, r2: Realization, kmax: int) -> CompositionReport:
    """Compose the flows of two scalar-free realizations and check the result.

    The composed momenta substitute the second flow into the first, which is
    the flow of the operator product first * second.  The oracle check
    multiplies the two exponentials in the Weyl algebra and compares with
    the normal-ordered form built from the composed exponents.
    """
    if r1.n != r2.n or r1.metric != r2.metric:
        raise ValueError("realizations must share dimension and metric")
    if any(not c.is_zero for c in r1.chi) or any(not c.is_zero for c in r2.chi):
        raise ValueError("composition needs both scalar parts to vanish")
    n = r1.n
    fr1 = compute_flow(r1, kmax)
    fr2 = compute_flow(r2, kmax)
    composed = compose_momenta(list(fr1.momenta), list(fr2.momenta))
    generator = recover_generator(composed)

    first_order: List[GradedSeries] = []
    for mu in range(n):
        row = GradedSeries.zero(n, kmax)
        for a in range(n):
            both = r1.phi[mu][a].with_kmax(kmax) + r2.phi[mu][a].with_kmax(kmax)
            if both.is_zero:
                continue
            row = row + GradedSeries.k_var(n, a, kmax) * both
        first_order.append(row)
    higher_vanish = all(generator[mu] == first_order[mu] for mu in range(n))

    sig = AlgebraSignature(n, r1.metric)
    lhs = coordinate_exponent(r1, kmax).exp() * coordinate_exponent(r2, kmax).exp()
    composed_result = FlowResult(
        momenta=tuple(composed),
        exponents=tuple(exponents_from_momenta(composed)),
        phase=GradedSeries.zero(n, kmax),
        kmax=kmax,
    )
    rhs = flow_normal_form(composed_result, sig)
    return CompositionReport(
        kmax=kmax,
        composed=tuple(composed),
        generator=tuple(generator),
        first_order=tuple(first_order),
        higher_corrections_vanish=higher_vanish,
        oracle_equal=(lhs - rhs).is_zero,
    )
