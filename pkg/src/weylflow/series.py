"""Sparse graded series in commuting variables k_0..k_{n-1} and p_0..p_{n-1}.

A series is a dictionary mapping a pair of multi-indices (one for the k
variables, one for the p variables) to a nonzero ``GaussianRational``
coefficient.  Terms are graded by total k-degree and everything beyond
``kmax`` is discarded on construction and after every operation, so a
series is always an exact representative of a truncated power series in k.

``pmax`` is an optional cap on the total p-degree.  It is ``None`` for
polynomials (the common case) and set when a non-polynomial function of p
has been expanded to finite order; operations propagate the tightest cap
present among their operands.  Equality compares dimension and terms only,
never the truncation caps.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from .indices import Index, add, degree, unit, zeros
from .scalars import GaussianRational, ScalarLike, fraction_string

TermKey = Tuple[Index, Index]


def _min_cap(a: Optional[int], b: Optional[int]) -> Optional[int]:
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class GradedSeries:
    __slots__ = ("n", "kmax", "pmax", "terms")

    def __init__(
        self,
        n: int,
        kmax: int,
        terms: Optional[Mapping[TermKey, ScalarLike]] = None,
        pmax: Optional[int] = None,
    ) -> None:
        if n < 1:
            raise ValueError("dimension must be at least 1")
        if kmax < 0:
            raise ValueError("kmax must be non-negative")
        if pmax is not None and pmax < 0:
            raise ValueError("pmax must be non-negative when set")
        self.n = n
        self.kmax = kmax
        self.pmax = pmax
        clean: Dict[TermKey, GaussianRational] = {}
        for (kidx, pidx), raw in (terms or {}).items():
            if len(kidx) != n or len(pidx) != n:
                raise ValueError("multi-index length does not match dimension")
            if degree(kidx) > kmax:
                continue
            if pmax is not None and degree(pidx) > pmax:
                continue
            coeff = GaussianRational.coerce(raw)
            if coeff:
                clean[(tuple(kidx), tuple(pidx))] = coeff
        self.terms = clean

    # -- constructors ------------------------------------------------------

    @classmethod
    def zero(cls, n: int, kmax: int, pmax: Optional[int] = None) -> "GradedSeries":
        return cls(n, kmax, {}, pmax)

    @classmethod
    def constant(
        cls, n: int, kmax: int, value: ScalarLike, pmax: Optional[int] = None
    ) -> "GradedSeries":
        return cls(n, kmax, {(zeros(n), zeros(n)): value}, pmax)

    @classmethod
    def p_var(cls, n: int, i: int, kmax: int, pmax: Optional[int] = None) -> "GradedSeries":
        return cls(n, kmax, {(zeros(n), unit(n, i)): 1}, pmax)

    @classmethod
    def k_var(cls, n: int, i: int, kmax: int, pmax: Optional[int] = None) -> "GradedSeries":
        return cls(n, kmax, {(unit(n, i), zeros(n)): 1}, pmax)

    @classmethod
    def monomial(
        cls,
        n: int,
        kmax: int,
        kidx: Index,
        pidx: Index,
        coeff: ScalarLike = 1,
        pmax: Optional[int] = None,
    ) -> "GradedSeries":
        return cls(n, kmax, {(tuple(kidx), tuple(pidx)): coeff}, pmax)

    # -- structure queries ---------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def is_p_only(self) -> bool:
        return all(degree(kidx) == 0 for kidx, _ in self.terms)

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    def min_k_degree(self) -> Optional[int]:
        """Smallest total k-degree among the terms, or None for the zero series."""
        return min((degree(kidx) for kidx, _ in self.terms), default=None)

    def coefficient(self, kidx: Index, pidx: Index) -> GaussianRational:
        return self.terms.get((tuple(kidx), tuple(pidx)), GaussianRational(0))

    def sorted_terms(self) -> List[Tuple[TermKey, GaussianRational]]:
        """Terms in canonical order: k-degree, then k lex, then p-degree, then p lex."""
        return sorted(
            self.terms.items(),
            key=lambda item: (
                degree(item[0][0]),
                item[0][0],
                degree(item[0][1]),
                item[0][1],
            ),
        )

    def k_part(self, k_degree: int) -> "GradedSeries":
        """The slice of terms whose total k-degree equals ``k_degree``."""
        picked = {
            key: c for key, c in self.terms.items() if degree(key[0]) == k_degree
        }
        return GradedSeries(self.n, self.kmax, picked, self.pmax)

    def with_kmax(self, kmax: int) -> "GradedSeries":
        """Copy with a new k cap.

        Lowering the cap truncates.  Raising it is exact only when the series
        is known complete below the new cap, e.g. for p-only polynomials.
        """
        return GradedSeries(self.n, kmax, self.terms, self.pmax)

    def with_pmax(self, pmax: Optional[int]) -> "GradedSeries":
        return GradedSeries(self.n, self.kmax, self.terms, pmax)

    # -- ring operations -------------------------------------------------------

    def _check_compatible(self, other: "GradedSeries") -> None:
        if self.n != other.n:
            raise ValueError(
                f"dimension mismatch: {self.n} vs {other.n}"
            )

    def __add__(self, other: object) -> "GradedSeries":
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = GradedSeries.constant(self.n, self.kmax, other, self.pmax)
        if not isinstance(other, GradedSeries):
            return NotImplemented
        self._check_compatible(other)
        merged: Dict[TermKey, GaussianRational] = dict(self.terms)
        for key, c in other.terms.items():
            acc = merged.get(key)
            merged[key] = c if acc is None else acc + c
        return GradedSeries(
            self.n,
            min(self.kmax, other.kmax),
            merged,
            _min_cap(self.pmax, other.pmax),
        )

    __radd__ = __add__

    def __sub__(self, other: object) -> "GradedSeries":
        if isinstance(other, (int, Fraction, GaussianRational)):
            other = GradedSeries.constant(self.n, self.kmax, other, self.pmax)
        if not isinstance(other, GradedSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> "GradedSeries":
        return (-self) + other

    def __neg__(self) -> "GradedSeries":
        return GradedSeries(
            self.n, self.kmax, {key: -c for key, c in self.terms.items()}, self.pmax
        )

    def __mul__(self, other: object) -> "GradedSeries":
        if isinstance(other, (int, Fraction, GaussianRational)):
            scalar = GaussianRational.coerce(other)
            if not scalar:
                return GradedSeries.zero(self.n, self.kmax, self.pmax)
            return GradedSeries(
                self.n,
                self.kmax,
                {key: c * scalar for key, c in self.terms.items()},
                self.pmax,
            )
        if not isinstance(other, GradedSeries):
            return NotImplemented
        self._check_compatible(other)
        kmax = min(self.kmax, other.kmax)
        pmax = _min_cap(self.pmax, other.pmax)
        out: Dict[TermKey, GaussianRational] = {}
        for (k1, p1), c1 in self.terms.items():
            for (k2, p2), c2 in other.terms.items():
                kidx = add(k1, k2)
                if degree(kidx) > kmax:
                    continue
                pidx = add(p1, p2)
                if pmax is not None and degree(pidx) > pmax:
                    continue
                key = (kidx, pidx)
                acc = out.get(key)
                prod = c1 * c2
                out[key] = prod if acc is None else acc + prod
        return GradedSeries(self.n, kmax, out, pmax)

    __rmul__ = __mul__

    def __truediv__(self, other: ScalarLike) -> "GradedSeries":
        scalar = GaussianRational.coerce(other)
        if not scalar:
            raise ZeroDivisionError("division by zero scalar")
        return self * (GaussianRational(1) / scalar)

    def __pow__(self, exponent: int) -> "GradedSeries":
        if exponent < 0:
            raise ValueError("negative powers of a series are not defined here")
        out = GradedSeries.constant(self.n, self.kmax, 1, self.pmax)
        for _ in range(exponent):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedSeries):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self.terms.items())))

    # -- calculus ---------------------------------------------------------------

    def dp(self, i: int) -> "GradedSeries":
        """Partial derivative with respect to p_i."""
        out: Dict[TermKey, GaussianRational] = {}
        for (kidx, pidx), c in self.terms.items():
            e = pidx[i]
            if e == 0:
                continue
            lowered = tuple(v - 1 if j == i else v for j, v in enumerate(pidx))
            key = (kidx, lowered)
            term = c * e
            acc = out.get(key)
            out[key] = term if acc is None else acc + term
        return GradedSeries(self.n, self.kmax, out, self.pmax)

    def dk(self, i: int) -> "GradedSeries":
        """Partial derivative with respect to k_i, term by term on the k index."""
        out: Dict[TermKey, GaussianRational] = {}
        for (kidx, pidx), c in self.terms.items():
            e = kidx[i]
            if e == 0:
                continue
            lowered = tuple(v - 1 if j == i else v for j, v in enumerate(kidx))
            key = (lowered, pidx)
            term = c * e
            acc = out.get(key)
            out[key] = term if acc is None else acc + term
        return GradedSeries(self.n, self.kmax, out, self.pmax)

    def substitute_p(self, replacements: Sequence["GradedSeries"]) -> "GradedSeries":
        """Substitute p_i -> replacements[i]; k monomials pass through unchanged."""
        if len(replacements) != self.n:
            raise ValueError("need one replacement series per p variable")
        kmax = self.kmax
        pmax = self.pmax
        for r in replacements:
            self._check_compatible(r)
            kmax = min(kmax, r.kmax)
            pmax = _min_cap(pmax, r.pmax)
        # cache powers of each replacement as they are needed
        powers: List[List[GradedSeries]] = [
            [GradedSeries.constant(self.n, kmax, 1, pmax)] for _ in range(self.n)
        ]

        def power_of(i: int, e: int) -> GradedSeries:
            cache = powers[i]
            while len(cache) <= e:
                cache.append(cache[-1] * replacements[i])
            return cache[e]

        total = GradedSeries.zero(self.n, kmax, pmax)
        for (kidx, pidx), c in self.terms.items():
            piece = GradedSeries.monomial(self.n, kmax, kidx, zeros(self.n), c, pmax)
            for i, e in enumerate(pidx):
                if e:
                    piece = piece * power_of(i, e)
            total = total + piece
        return total

    def scale_k(self, factor: ScalarLike) -> "GradedSeries":
        """Multiply every term by factor**(total k-degree): the rescaling k -> factor*k."""
        scalar = GaussianRational.coerce(factor)
        out: Dict[TermKey, GaussianRational] = {}
        for (kidx, pidx), c in self.terms.items():
            out[(kidx, pidx)] = c * scalar ** degree(kidx)
        return GradedSeries(self.n, self.kmax, out, self.pmax)

    def exp_truncated(self) -> "GradedSeries":
        """exp of a series whose every term has k-degree >= 1.

        The grading makes the sum finite: the m-th power contributes only at
        k-degree >= m, so powers beyond kmax vanish.
        """
        mindeg = self.min_k_degree()
        if mindeg is not None and mindeg < 1:
            raise ValueError(
                "exp_truncated needs every term to carry k-degree >= 1"
            )
        acc = GradedSeries.constant(self.n, self.kmax, 1, self.pmax)
        term = GradedSeries.constant(self.n, self.kmax, 1, self.pmax)
        for m in range(1, self.kmax + 1):
            term = term * self / m
            if term.is_zero:
                break
            acc = acc + term
        return acc

    # -- evaluation and serialization ------------------------------------------

    def eval_at(self, kvals: Sequence[float], pvals: Sequence[float]) -> complex:
        """Numerically evaluate at the given k and p values."""
        if len(kvals) != self.n or len(pvals) != self.n:
            raise ValueError("need one value per variable")
        total = 0j
        for (kidx, pidx), c in self.terms.items():
            value = complex(c)
            for base, e in zip(kvals, kidx):
                if e:
                    value *= base ** e
            for base, e in zip(pvals, pidx):
                if e:
                    value *= base ** e
            total += value
        return total

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "kmax": self.kmax,
            "terms": [
                {
                    "k": list(kidx),
                    "p": list(pidx),
                    "re": fraction_string(c.re),
                    "im": fraction_string(c.im),
                }
                for (kidx, pidx), c in self.sorted_terms()
            ],
        }

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "GradedSeries":
        n = int(data["n"])
        kmax = int(data["kmax"])
        terms: Dict[TermKey, GaussianRational] = {}
        for entry in data["terms"]:
            kidx = tuple(int(v) for v in entry["k"])
            pidx = tuple(int(v) for v in entry["p"])
            if any(v < 0 for v in kidx) or any(v < 0 for v in pidx):
                raise ValueError("negative exponent in serialized series")
            coeff = GaussianRational(Fraction(entry["re"]), Fraction(entry["im"]))
            key = (kidx, pidx)
            acc = terms.get(key)
            terms[key] = coeff if acc is None else acc + coeff
        return cls(n, kmax, terms)

    def pretty(self) -> str:
        """Canonically ordered display form, e.g. ``p_0 + 3/2*k_0*p_1^2``.

        For a real series in the p variables alone the output is valid input
        for the expression parser.
        """
        if not self.terms:
            return "0"
        pieces: List[str] = []
        for (kidx, pidx), c in self.sorted_terms():
            factors: List[str] = []
            for i, e in enumerate(kidx):
                if e == 1:
                    factors.append(f"k_{i}")
                elif e > 1:
                    factors.append(f"k_{i}^{e}")
            for i, e in enumerate(pidx):
                if e == 1:
                    factors.append(f"p_{i}")
                elif e > 1:
                    factors.append(f"p_{i}^{e}")
            if c.is_real():
                negative = c.re < 0
                mag = abs(c.re)
                if mag.denominator == 1:
                    coeff_str = str(mag.numerator)
                else:
                    coeff_str = f"{mag.numerator}/{mag.denominator}"
                if factors and mag == 1:
                    body = "*".join(factors)
                elif factors:
                    body = "*".join([coeff_str] + factors)
                else:
                    body = coeff_str
            else:
                negative = False
                body = "*".join([f"({c})"] + factors) if factors else f"({c})"
            if not pieces:
                pieces.append(f"-{body}" if negative else body)
            else:
                pieces.append(f"- {body}" if negative else f"+ {body}")
        return " ".join(pieces)

    def __repr__(self) -> str:
        return (
            f"GradedSeries(n={self.n}, kmax={self.kmax}, pmax={self.pmax}, "
            f"terms={len(self.terms)})"
        )


def series_sum(items: Iterable[GradedSeries], n: int, kmax: int) -> GradedSeries:
    total = GradedSeries.zero(n, kmax)
    for s in items:
        total = total + s
    return total
