"""Finite Weyl-algebra elements kept in normal-ordered form.

This module is the independent referee for the flow engine.  It knows
nothing about flows: it multiplies operators.  An element is a finite sum
of monomials x^a p^b k^c with exact complex-rational coefficients, stored
with every x factor to the left of every p factor; the k variables are
formal scalars that commute with everything and carry the grading used for
truncation.

Coordinates and momenta obey [p_mu, x_nu] = -i eta_{mu nu} with a diagonal
signature eta, coordinates commuting among themselves and momenta likewise.
Products are normalized coordinate by coordinate through the closed-form
reordering

    p^b x^c = sum_j C(b,j) C(c,j) j! (-i eta)^j x^(c-j) p^(b-j)

so elements never leave normal-ordered form.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .flows import FlowResult, Realization, compute_flow
from .indices import Index, add, degree, iter_indices, unit, zeros
from .scalars import GaussianRational, ScalarLike
from .series import GradedSeries

WeylKey = Tuple[Index, Index, Index]


@dataclass(frozen=True)
class AlgebraSignature:
    """Dimension and diagonal metric entries of one Weyl algebra."""

    n: int
    metric: Tuple[int, ...]

    def __post_init__(self) -> None:
        metric = tuple(self.metric)
        if self.n < 1:
            raise ValueError("dimension must be at least 1")
        if len(metric) != self.n or any(e not in (-1, 1) for e in metric):
            raise ValueError("metric must list n entries, each +1 or -1")
        object.__setattr__(self, "metric", metric)


_REORDER_CACHE: Dict[Tuple[int, int, int], List[Tuple[int, GaussianRational]]] = {}


def _reorder_weights(b: int, c: int, eta: int) -> List[Tuple[int, GaussianRational]]:
    """Weights w_j with p^b x^c = sum_j w_j x^(c-j) p^(b-j), one coordinate."""
    key = (b, c, eta)
    cached = _REORDER_CACHE.get(key)
    if cached is not None:
        return cached
    out: List[Tuple[int, GaussianRational]] = []
    step = GaussianRational(0, -eta)
    power = GaussianRational(1)
    for j in range(min(b, c) + 1):
        out.append((j, power * (comb(b, j) * comb(c, j) * factorial(j))))
        power = power * step
    _REORDER_CACHE[key] = out
    return out


class WeylElement:
    __slots__ = ("sig", "kmax", "terms")

    def __init__(
        self,
        sig: AlgebraSignature,
        kmax: int,
        terms: Optional[Mapping[WeylKey, ScalarLike]] = None,
    ) -> None:
        if kmax < 0:
            raise ValueError("kmax must be non-negative")
        self.sig = sig
        self.kmax = kmax
        clean: Dict[WeylKey, GaussianRational] = {}
        n = sig.n
        for (xidx, pidx, kidx), raw in (terms or {}).items():
            if len(xidx) != n or len(pidx) != n or len(kidx) != n:
                raise ValueError("multi-index length does not match dimension")
            if degree(kidx) > kmax:
                continue
            coeff = GaussianRational.coerce(raw)
            if coeff:
                clean[(tuple(xidx), tuple(pidx), tuple(kidx))] = coeff
        self.terms = clean

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, sig: AlgebraSignature, kmax: int) -> "WeylElement":
        return cls(sig, kmax, {})

    @classmethod
    def scalar(cls, sig: AlgebraSignature, kmax: int, value: ScalarLike) -> "WeylElement":
        n = sig.n
        return cls(sig, kmax, {(zeros(n), zeros(n), zeros(n)): value})

    @classmethod
    def coordinate(cls, sig: AlgebraSignature, kmax: int, mu: int) -> "WeylElement":
        n = sig.n
        return cls(sig, kmax, {(unit(n, mu), zeros(n), zeros(n)): 1})

    @classmethod
    def momentum(cls, sig: AlgebraSignature, kmax: int, mu: int) -> "WeylElement":
        n = sig.n
        return cls(sig, kmax, {(zeros(n), unit(n, mu), zeros(n)): 1})

    @classmethod
    def from_series(cls, series: GradedSeries, sig: AlgebraSignature) -> "WeylElement":
        """Embed a series in k and p as an x-free element."""
        if series.n != sig.n:
            raise ValueError("series dimension does not match the signature")
        n = sig.n
        return cls(
            sig,
            series.kmax,
            {
                (zeros(n), pidx, kidx): c
                for (kidx, pidx), c in series.terms.items()
            },
        )

    # -- structure ---------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def min_k_degree(self) -> Optional[int]:
        return min((degree(k) for _, _, k in self.terms), default=None)

    def is_x_free(self) -> bool:
        return all(degree(x) == 0 for x, _, _ in self.terms)

    def at_x_zero(self) -> "WeylElement":
        """Drop every term carrying a coordinate factor.

        Elements are always normal ordered, so this is the substitution
        x -> 0 applied after ordering.
        """
        kept = {key: c for key, c in self.terms.items() if degree(key[0]) == 0}
        return WeylElement(self.sig, self.kmax, kept)

    def to_series(self) -> GradedSeries:
        """Reinterpret an x-free element as a graded series in k and p."""
        if not self.is_x_free():
            raise ValueError("element still carries coordinate factors")
        return GradedSeries(
            self.sig.n,
            self.kmax,
            {(kidx, pidx): c for (_, pidx, kidx), c in self.terms.items()},
        )

    def sorted_terms(self) -> List[Tuple[WeylKey, GaussianRational]]:
        return sorted(
            self.terms.items(),
            key=lambda item: (
                degree(item[0][0]),
                item[0][0],
                degree(item[0][1]),
                item[0][1],
                degree(item[0][2]),
                item[0][2],
            ),
        )

    # -- arithmetic -----------------------------------------------------------

    def _check_compatible(self, other: "WeylElement") -> None:
        if self.sig != other.sig:
            raise ValueError("elements live in different algebras")

    def __add__(self, other: object) -> "WeylElement":
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = WeylElement.scalar(self.sig, self.kmax, other)
        if not isinstance(other, WeylElement):
            return NotImplemented
        self._check_compatible(other)
        merged: Dict[WeylKey, GaussianRational] = dict(self.terms)
        for key, c in other.terms.items():
            acc = merged.get(key)
            merged[key] = c if acc is None else acc + c
        return WeylElement(self.sig, min(self.kmax, other.kmax), merged)

    __radd__ = __add__

    def __sub__(self, other: object) -> "WeylElement":
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = WeylElement.scalar(self.sig, self.kmax, other)
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self + (-other)

    def __neg__(self) -> "WeylElement":
        return WeylElement(
            self.sig, self.kmax, {key: -c for key, c in self.terms.items()}
        )

    def __mul__(self, other: object) -> "WeylElement":
        if isinstance(other, (int, Fraction, GaussianRational)):
            scalar = GaussianRational.coerce(other)
            return WeylElement(
                self.sig,
                self.kmax,
                {key: c * scalar for key, c in self.terms.items()},
            )
        if not isinstance(other, WeylElement):
            return NotImplemented
        self._check_compatible(other)
        n = self.sig.n
        metric = self.sig.metric
        kmax = min(self.kmax, other.kmax)
        out: Dict[WeylKey, GaussianRational] = {}
        for (x1, p1, k1), c1 in self.terms.items():
            for (x2, p2, k2), c2 in other.terms.items():
                kidx = add(k1, k2)
                if degree(kidx) > kmax:
                    continue
                combos: List[Tuple[Tuple[int, ...], Tuple[int, ...], GaussianRational]] = [
                    ((), (), c1 * c2)
                ]
                for m in range(n):
                    weights = _reorder_weights(p1[m], x2[m], metric[m])
                    grown = []
                    for xs, ps, cf in combos:
                        for j, w in weights:
                            grown.append(
                                (
                                    xs + (x1[m] + x2[m] - j,),
                                    ps + (p1[m] - j + p2[m],),
                                    cf * w,
                                )
                            )
                    combos = grown
                for xs, ps, cf in combos:
                    key = (xs, ps, kidx)
                    acc = out.get(key)
                    out[key] = cf if acc is None else acc + cf
        return WeylElement(self.sig, kmax, out)

    def __rmul__(self, other: object) -> "WeylElement":
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self * other
        return NotImplemented

    def __truediv__(self, other: ScalarLike) -> "WeylElement":
        scalar = GaussianRational.coerce(other)
        return self * (GaussianRational(1) / scalar)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeylElement):
            return NotImplemented
        return self.sig == other.sig and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.sig, frozenset(self.terms.items())))

    def commutator(self, other: "WeylElement") -> "WeylElement":
        return self * other - other * self

    def exp(self) -> "WeylElement":
        """Exponential, finite because every term must carry k-degree >= 1."""
        mindeg = self.min_k_degree()
        if mindeg is not None and mindeg < 1:
            raise ValueError("exp needs every term to carry k-degree >= 1")
        acc = WeylElement.scalar(self.sig, self.kmax, 1)
        term = acc
        for m in range(1, self.kmax + 1):
            term = (term * self) / m
            if term.is_zero:
                break
            acc = acc + term
        return acc

    def pretty(self) -> str:
        if not self.terms:
            return "0"
        pieces: List[str] = []
        for (xidx, pidx, kidx), c in self.sorted_terms():
            factors: List[str] = []
            for name, idx in (("x", xidx), ("k", kidx), ("p", pidx)):
                for i, e in enumerate(idx):
                    if e == 1:
                        factors.append(f"{name}_{i}")
                    elif e > 1:
                        factors.append(f"{name}_{i}^{e}")
            coeff = f"({c})" if not c.is_real() or c.re < 0 else str(c)
            body = "*".join([coeff] + factors) if factors else coeff
            pieces.append(body)
        return " + ".join(pieces)

    def __repr__(self) -> str:
        return f"WeylElement(n={self.sig.n}, kmax={self.kmax}, terms={len(self.terms)})"


# -- iterated commutators --------------------------------------------------------


def commutator_tower(seed: WeylElement, against: WeylElement, count: int) -> WeylElement:
    """count nested commutators [...[[seed, against], against], ...]."""
    out = seed
    for _ in range(count):
        out = out.commutator(against)
    return out


def conjugated_momentum(r: Realization, mu: int, kmax: int) -> GradedSeries:
    """e^(-E) p_mu e^(E) via the commutator expansion, E the full exponent.

    Each commutator with E raises the k-degree, so the sum stops on its own.
    The result of the algebra is x-free; any leftover coordinate factor would
    make to_series raise, which is exactly the bug alarm wanted here.
    """
    e = exponent_element(r, kmax)
    sig = e.sig
    acc = WeylElement.momentum(sig, kmax, mu)
    term = acc
    for m in range(1, kmax + 1):
        term = term.commutator(e) / m
        if term.is_zero:
            break
        acc = acc + term
    return acc.to_series()


# -- bridges between flows and the algebra ----------------------------------------


def coordinate_exponent(r: Realization, kmax: int) -> WeylElement:
    """i * sum_{a,b} eta_a x_a phi[a][b] k_b as a normal-ordered element.

    The metric factor rides along with each coordinate so that conjugation
    reproduces the metric-free flow for any signature.
    """
    sig = AlgebraSignature(r.n, r.metric)
    n = r.n
    out: Dict[WeylKey, GaussianRational] = {}
    for a in range(n):
        row = GradedSeries.zero(n, kmax)
        for b in range(n):
            if r.phi[a][b].is_zero:
                continue
            row = row + GradedSeries.k_var(n, b, kmax) * r.phi[a][b].with_kmax(kmax)
        row = row * GaussianRational(0, r.metric[a])
        xa = unit(n, a)
        for (kidx, pidx), c in row.terms.items():
            key = (xa, pidx, kidx)
            acc = out.get(key)
            out[key] = c if acc is None else acc + c
    return WeylElement(sig, kmax, out)


def scalar_exponent(r: Realization, kmax: int) -> WeylElement:
    """i * sum_b k_b chi[b] as an x-free element."""
    sig = AlgebraSignature(r.n, r.metric)
    n = r.n
    row = GradedSeries.zero(n, kmax)
    for b in range(n):
        if r.chi[b].is_zero:
            continue
        row = row + GradedSeries.k_var(n, b, kmax) * r.chi[b].with_kmax(kmax)
    return WeylElement.from_series(row * GaussianRational(0, 1), sig)


def exponent_element(r: Realization, kmax: int) -> WeylElement:
    """The full exponent: coordinate part plus scalar part."""
    return coordinate_exponent(r, kmax) + scalar_exponent(r, kmax)


def flow_normal_form(fr: FlowResult, sig: AlgebraSignature) -> WeylElement:
    """The normal-ordered product built from a flow result.

    This is the ordered exponential of the deformation exponents, each
    coordinate paired with its metric entry, times the scalar phase factor:
    every x sits left of every p by construction.
    """
    n = sig.n
    if fr.n != n:
        raise ValueError("flow result dimension does not match the signature")
    kmax = fr.kmax
    weighted = [
        fr.exponents[a] * GaussianRational(0, sig.metric[a]) for a in range(n)
    ]
    out: Dict[WeylKey, GaussianRational] = {}
    for xidx in iter_indices(n, kmax):
        series = GradedSeries.constant(n, kmax, 1)
        scale = Fraction(1)
        for a in range(n):
            for _ in range(xidx[a]):
                series = series * weighted[a]
            scale /= factorial(xidx[a])
        series = series * scale
        if series.is_zero:
            continue
        for (kidx, pidx), c in series.terms.items():
            key = (xidx, pidx, kidx)
            acc = out.get(key)
            out[key] = c if acc is None else acc + c
    ordered = WeylElement(sig, kmax, out)
    phase_factor = (fr.phase * GaussianRational(0, 1)).exp_truncated()
    return ordered * WeylElement.from_series(phase_factor, sig)


def verify_normal_ordering(r: Realization, kmax: int) -> Tuple[bool, WeylElement]:
    """Check exp(exponent) against the normal-ordered form, exactly.

    Returns the verdict and the discrepancy element, which is zero exactly
    when the two sides agree through the k cap.
    """
    fr = compute_flow(r, kmax)
    sig = AlgebraSignature(r.n, r.metric)
    lhs = exponent_element(r, kmax).exp()
    rhs = flow_normal_form(fr, sig)
    diff = lhs - rhs
    return (diff.is_zero, diff)


def bch_reference(a: WeylElement, b: WeylElement) -> WeylElement:
    """exp(a) exp(b) combined through the degree-3 commutator formula.

    Only valid through k-degree 3; the caller must truncate there.  Inputs
    must carry k-degree >= 1 in every term.
    """
    kmax = min(a.kmax, b.kmax)
    if kmax > 3:
        raise ValueError("the commutator formula here stops at k-degree 3")
    for e in (a, b):
        mindeg = e.min_k_degree()
        if mindeg is not None and mindeg < 1:
            raise ValueError("exponents must carry k-degree >= 1")
    ab = a.commutator(b)
    z = (
        a
        + b
        + ab / 2
        + (a.commutator(ab) + b.commutator(b.commutator(a))) / 12
    )
    return z.exp()
