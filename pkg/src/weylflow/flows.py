"""Order-by-order momentum flows generated by first-order operators.

A realization supplies an n x n table ``phi`` of polynomial coefficient
functions and a vector ``chi`` of scalar ones, all in the p variables only.
The generating operator acts on a series f as

    V(f) = sum_{a,b} k_a * phi[b][a] * df/dp_b

and three objects are built from it, each graded by total k-degree and
truncated at a chosen kmax:

* the flowed momenta  J_mu = sum_m V^m(p_mu) / m!
* their deformation   psi_mu = J_mu - p_mu, also reachable through the
  combinator sum_m V^m(w_mu) / (m+1)! with w_mu = sum_a k_a*phi[mu][a]
* the scalar phase    h = sum_m V^m(w) / (m+1)! with w = sum_a k_a*chi[a]

Both routes to psi are computed and compared; disagreement means a bug in
this module, never bad input, and raises ConsistencyError.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from .scalars import GaussianRational
from .series import GradedSeries

RationalLike = Union[int, Fraction]


class ConsistencyError(RuntimeError):
    """Two independent computations of the same object disagreed."""


def _as_series_tuple(items: Sequence[GradedSeries], n: int, what: str) -> Tuple[GradedSeries, ...]:
    out = tuple(items)
    for s in out:
        if not isinstance(s, GradedSeries):
            raise TypeError(f"{what} entries must be GradedSeries")
        if s.n != n:
            raise ValueError(f"{what} entry has dimension {s.n}, expected {n}")
        if not s.is_p_only():
            raise ValueError(f"{what} entries must not depend on the k variables")
        if not s.is_real():
            raise ValueError(f"{what} entries must have real coefficients")
    return out


@dataclass(frozen=True)
class Realization:
    """Coefficient data for one generating operator.

    ``metric`` holds the diagonal signature entries (each +1 or -1).  It is
    carried along for the operator-algebra checks; the flow computations
    themselves never consult it.
    """

    n: int
    metric: Tuple[int, ...]
    phi: Tuple[Tuple[GradedSeries, ...], ...]
    chi: Tuple[GradedSeries, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("dimension must be at least 1")
        metric = tuple(self.metric)
        if len(metric) != self.n or any(e not in (-1, 1) for e in metric):
            raise ValueError("metric must list n entries, each +1 or -1")
        if len(self.phi) != self.n:
            raise ValueError("phi must be an n x n table")
        phi = tuple(
            _as_series_tuple(row, self.n, "phi") for row in self.phi
        )
        if any(len(row) != self.n for row in phi):
            raise ValueError("phi must be an n x n table")
        chi = _as_series_tuple(self.chi, self.n, "chi")
        if len(chi) != self.n:
            raise ValueError("chi must list n entries")
        object.__setattr__(self, "metric", metric)
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "chi", chi)

    def negated(self) -> "Realization":
        return Realization(
            self.n,
            self.metric,
            tuple(tuple(-e for e in row) for row in self.phi),
            tuple(-e for e in self.chi),
        )

    def scaled(self, factor: RationalLike) -> "Realization":
        c = Fraction(factor)
        return Realization(
            self.n,
            self.metric,
            tuple(tuple(e * c for e in row) for row in self.phi),
            tuple(e * c for e in self.chi),
        )

    def pmax(self) -> Optional[int]:
        caps = [e.pmax for row in self.phi for e in row] + [e.pmax for e in self.chi]
        caps = [c for c in caps if c is not None]
        return min(caps) if caps else None


@dataclass(frozen=True)
class LinearRealization:
    """phi linear in p through a single square matrix: phi[mu][0] = (A p)_mu."""

    n: int
    matrix: Tuple[Tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("dimension must be at least 1")
        rows = tuple(tuple(Fraction(v) for v in row) for row in self.matrix)
        if len(rows) != self.n or any(len(row) != self.n for row in rows):
            raise ValueError("matrix must be square of size n")
        object.__setattr__(self, "matrix", rows)

    def embedding(self, metric: Optional[Sequence[int]] = None) -> Realization:
        """The realization whose first phi column is A p and the rest vanish."""
        n = self.n
        zero = GradedSeries.zero(n, 0)
        phi: List[List[GradedSeries]] = [[zero] * n for _ in range(n)]
        for mu in range(n):
            col = GradedSeries.zero(n, 0)
            for nu in range(n):
                col = col + GradedSeries.p_var(n, nu, 0) * self.matrix[mu][nu]
            phi[mu][0] = col
        chi = [zero] * n
        sig = tuple(metric) if metric is not None else (1,) * n
        return Realization(n, sig, tuple(tuple(row) for row in phi), tuple(chi))


@dataclass(frozen=True)
class FlowResult:
    """Flowed momenta, their deformations, and the scalar phase at one kmax."""

    momenta: Tuple[GradedSeries, ...]
    exponents: Tuple[GradedSeries, ...]
    phase: GradedSeries
    kmax: int

    def __post_init__(self) -> None:
        momenta = tuple(self.momenta)
        exponents = tuple(self.exponents)
        if len(momenta) != len(exponents) or not momenta:
            raise ValueError("momenta and exponents must be parallel and nonempty")
        n = momenta[0].n
        for s in list(momenta) + list(exponents) + [self.phase]:
            if s.n != n:
                raise ValueError("all series must share one dimension")
            if not s.is_real():
                raise ConsistencyError("flow output grew an imaginary part")
        mindeg = self.phase.min_k_degree()
        if mindeg is not None and mindeg < 1:
            raise ValueError("phase must vanish at k = 0")
        object.__setattr__(self, "momenta", momenta)
        object.__setattr__(self, "exponents", exponents)

    @property
    def n(self) -> int:
        return self.momenta[0].n

    def to_json_dict(self) -> dict:
        return {
            "kmax": self.kmax,
            "J": [s.to_json_dict() for s in self.momenta],
            "phi": [s.to_json_dict() for s in self.exponents],
            "h": self.phase.to_json_dict(),
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "FlowResult":
        return cls(
            momenta=tuple(GradedSeries.from_json_dict(d) for d in data["J"]),
            exponents=tuple(GradedSeries.from_json_dict(d) for d in data["phi"]),
            phase=GradedSeries.from_json_dict(data["h"]),
            kmax=int(data["kmax"]),
        )


# -- the generating operator -------------------------------------------------


def apply_generator(r: Realization, f: GradedSeries) -> GradedSeries:
    """One application of V: sum over a, b of k_a * phi[b][a] * df/dp_b."""
    if f.n != r.n:
        raise ValueError("series dimension does not match the realization")
    out = GradedSeries.zero(f.n, f.kmax, f.pmax)
    for b in range(r.n):
        df = f.dp(b)
        if df.is_zero:
            continue
        for a in range(r.n):
            entry = r.phi[b][a]
            if entry.is_zero:
                continue
            ka = GradedSeries.k_var(f.n, a, f.kmax)
            out = out + ka * entry.with_kmax(f.kmax) * df
    return out


def _exp_of_generator(r: Realization, seed: GradedSeries, kmax: int) -> GradedSeries:
    """sum_m V^m(seed) / m! up to the k cap."""
    acc = seed
    term = seed
    for m in range(1, kmax + 1):
        term = apply_generator(r, term) / m
        if term.is_zero:
            break
        acc = acc + term
    return acc


def _combinator(r: Realization, seed: GradedSeries, kmax: int) -> GradedSeries:
    """sum_m V^m(seed) / (m+1)!, the (exp(V) - 1)/V action on the seed.

    Never an actual division: the series is built term by term.
    """
    acc = seed
    term = seed
    for m in range(1, kmax + 1):
        term = apply_generator(r, term) / (m + 1)
        if term.is_zero:
            break
        acc = acc + term
    return acc


def _weighted_seed(r: Realization, row: Sequence[GradedSeries], kmax: int) -> GradedSeries:
    """sum_a k_a * row[a], lifted to the working k cap."""
    out = GradedSeries.zero(r.n, kmax)
    for a in range(r.n):
        if row[a].is_zero:
            continue
        out = out + GradedSeries.k_var(r.n, a, kmax) * row[a].with_kmax(kmax)
    return out


# -- flows --------------------------------------------------------------------


def flow_momenta(r: Realization, kmax: int) -> List[GradedSeries]:
    """The flowed momenta J_mu as exact truncated series."""
    if kmax < 0:
        raise ValueError("kmax must be non-negative")
    return [
        _exp_of_generator(r, GradedSeries.p_var(r.n, mu, kmax), kmax)
        for mu in range(r.n)
    ]


def exponents_from_momenta(momenta: Sequence[GradedSeries]) -> List[GradedSeries]:
    """The deformation parts J_mu - p_mu."""
    n = momenta[0].n
    return [
        s - GradedSeries.p_var(n, mu, s.kmax, s.pmax) for mu, s in enumerate(momenta)
    ]


def exponents_via_combinator(r: Realization, kmax: int) -> List[GradedSeries]:
    """The deformation parts straight from the combinator, bypassing J."""
    return [
        _combinator(r, _weighted_seed(r, r.phi[mu], kmax), kmax) for mu in range(r.n)
    ]


def flow_exponents(r: Realization, kmax: int) -> List[GradedSeries]:
    """Deformation parts, computed both ways and cross-checked."""
    direct = exponents_from_momenta(flow_momenta(r, kmax))
    combinator = exponents_via_combinator(r, kmax)
    if direct != combinator:
        raise ConsistencyError(
            "subtraction route and combinator route for the exponents disagree"
        )
    return direct


def flow_phase(r: Realization, kmax: int) -> GradedSeries:
    """The scalar phase series h(k, p)."""
    if kmax < 0:
        raise ValueError("kmax must be non-negative")
    return _combinator(r, _weighted_seed(r, r.chi, kmax), kmax)


def compute_flow(r: Realization, kmax: int) -> FlowResult:
    """Momenta, exponents, and phase in one result, with the dual-route check."""
    momenta = flow_momenta(r, kmax)
    direct = exponents_from_momenta(momenta)
    combinator = exponents_via_combinator(r, kmax)
    if direct != combinator:
        raise ConsistencyError(
            "subtraction route and combinator route for the exponents disagree"
        )
    phase = flow_phase(r, kmax)
    return FlowResult(
        momenta=tuple(momenta),
        exponents=tuple(direct),
        phase=phase,
        kmax=kmax,
    )


# -- differential-equation residuals -------------------------------------------


def _euler_k(s: GradedSeries) -> GradedSeries:
    """The grading operator sum_b k_b * d/dk_b."""
    out = GradedSeries.zero(s.n, s.kmax, s.pmax)
    for b in range(s.n):
        d = s.dk(b)
        if d.is_zero:
            continue
        out = out + GradedSeries.k_var(s.n, b, s.kmax) * d
    return out


def flow_pde_residual(r: Realization, momenta: Sequence[GradedSeries]) -> List[GradedSeries]:
    """Residual of the defining equation for J, one series per component.

    For the true flow, k_b dJ_mu/dk_b - k_b phi[mu][b](J) vanishes term by
    term through the common k cap.
    """
    out = []
    for mu in range(r.n):
        s = momenta[mu]
        rhs = GradedSeries.zero(s.n, s.kmax, s.pmax)
        for b in range(r.n):
            entry = r.phi[mu][b]
            if entry.is_zero:
                continue
            composed = entry.with_kmax(s.kmax).substitute_p(list(momenta))
            rhs = rhs + GradedSeries.k_var(s.n, b, s.kmax) * composed
        out.append(_euler_k(s) - rhs)
    return out


def phase_pde_residual(
    r: Realization, momenta: Sequence[GradedSeries], phase: GradedSeries
) -> GradedSeries:
    """Residual of the defining equation for the phase series."""
    rhs = GradedSeries.zero(phase.n, phase.kmax, phase.pmax)
    for b in range(r.n):
        entry = r.chi[b]
        if entry.is_zero:
            continue
        composed = entry.with_kmax(phase.kmax).substitute_p(list(momenta))
        rhs = rhs + GradedSeries.k_var(phase.n, b, phase.kmax) * composed
    return _euler_k(phase) - rhs


# -- low-order cross-checks and closed forms -----------------------------------


def flow_third_order(r: Realization) -> List[GradedSeries]:
    """The momenta through k-degree 3, written out as literal nested sums.

    Deliberately not a call into the generic machinery: this spells out the
    first three orders the long way so the two can be compared.
    """
    n = r.n
    kmax = 3
    phi = [[e.with_kmax(kmax) for e in row] for row in r.phi]
    half = Fraction(1, 2)
    sixth = Fraction(1, 6)
    out: List[GradedSeries] = []
    for mu in range(n):
        acc = GradedSeries.p_var(n, mu, kmax)
        for a in range(n):
            ka = GradedSeries.k_var(n, a, kmax)
            acc = acc + ka * phi[mu][a]
        for a in range(n):
            ka = GradedSeries.k_var(n, a, kmax)
            for b in range(n):
                kb = GradedSeries.k_var(n, b, kmax)
                for d in range(n):
                    acc = acc + half * ka * kb * phi[mu][a].dp(d) * phi[d][b]
        for a in range(n):
            ka = GradedSeries.k_var(n, a, kmax)
            for b in range(n):
                kb = GradedSeries.k_var(n, b, kmax)
                for g in range(n):
                    kg = GradedSeries.k_var(n, g, kmax)
                    for d in range(n):
                        for rho in range(n):
                            acc = acc + sixth * ka * kb * kg * (
                                phi[mu][a].dp(d).dp(rho) * phi[d][b] * phi[rho][g]
                                + phi[mu][a].dp(d) * phi[d][b].dp(rho) * phi[rho][g]
                            )
        out.append(acc)
    return out


def _mat_mul(
    a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]
) -> List[List[Fraction]]:
    n = len(a)
    return [
        [sum((a[i][k] * b[k][j] for k in range(n)), Fraction(0)) for j in range(n)]
        for i in range(n)
    ]


def linear_closed_form(lr: LinearRealization, kmax: int) -> List[GradedSeries]:
    """Flowed momenta of the linear embedding, via matrix-exponential powers.

    J_mu = sum_nu [exp(k_0 A)]_{mu nu} p_nu truncated at kmax.  A nilpotent
    matrix makes the power loop stop early on its own.
    """
    n = lr.n
    power: List[List[Fraction]] = [
        [Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)
    ]
    weight = Fraction(1)
    terms: List[dict] = [dict() for _ in range(n)]
    for m in range(kmax + 1):
        if m:
            power = _mat_mul(power, lr.matrix)
            weight = weight / m
        if all(v == 0 for row in power for v in row):
            break
        kidx = tuple(m if i == 0 else 0 for i in range(n))
        for mu in range(n):
            for nu in range(n):
                c = power[mu][nu] * weight
                if c:
                    pidx = tuple(1 if i == nu else 0 for i in range(n))
                    terms[mu][(kidx, pidx)] = c
    return [GradedSeries(n, kmax, t) for t in terms]


# -- composition and generator recovery -----------------------------------------


def compose_momenta(
    outer: Sequence[GradedSeries], inner: Sequence[GradedSeries]
) -> List[GradedSeries]:
    """Substitute the inner flow into the outer one.

    The result is the flow of the product of the two exponential operators,
    first one on the left.  Both inputs must share one k cap; mixing caps
    would silently degrade the composition, so it is an error.
    """
    if len(outer) != len(inner):
        raise ValueError("flows must have the same number of components")
    caps = {s.kmax for s in outer} | {s.kmax for s in inner}
    if len(caps) != 1:
        raise ValueError("flows must be truncated at the same kmax to compose")
    return [s.substitute_p(list(inner)) for s in outer]


def generator_flow(gen: Sequence[GradedSeries], kmax: int) -> List[GradedSeries]:
    """exp of the vector field sum_b gen[b] d/dp_b applied to each momentum.

    Every component of gen must carry k-degree >= 1 so the sum terminates.
    """
    n = gen[0].n
    for g in gen:
        mindeg = g.min_k_degree()
        if mindeg is not None and mindeg < 1:
            raise ValueError("generator components must vanish at k = 0")

    def apply_v(f: GradedSeries) -> GradedSeries:
        out = GradedSeries.zero(f.n, f.kmax, f.pmax)
        for b in range(n):
            df = f.dp(b)
            if df.is_zero:
                continue
            out = out + gen[b].with_kmax(f.kmax) * df
        return out

    out: List[GradedSeries] = []
    for mu in range(n):
        acc = GradedSeries.p_var(n, mu, kmax)
        term = acc
        for m in range(1, kmax + 1):
            term = apply_v(term) / m
            if term.is_zero:
                break
            acc = acc + term
        out.append(acc)
    return out


def recover_generator(momenta: Sequence[GradedSeries]) -> List[GradedSeries]:
    """Invert generator_flow order by order in the k grading.

    Given momenta of the identity-plus-corrections shape, find the unique
    graded vector field components G_mu with exp(V_G)(p_mu) reproducing them
    through their k cap.
    """
    n = momenta[0].n
    kmax = momenta[0].kmax
    for mu, s in enumerate(momenta):
        if s.kmax != kmax or s.n != n:
            raise ValueError("momenta must share one dimension and k cap")
        deviation = s - GradedSeries.p_var(n, mu, kmax, s.pmax)
        mindeg = deviation.min_k_degree()
        if mindeg is not None and mindeg < 1:
            raise ValueError("momenta must reduce to p at k = 0")
    gen = [GradedSeries.zero(n, kmax, momenta[mu].pmax) for mu in range(n)]
    for order in range(1, kmax + 1):
        flowed = generator_flow(gen, kmax)
        for mu in range(n):
            gen[mu] = gen[mu] + (momenta[mu] - flowed[mu]).k_part(order)
    check = generator_flow(gen, kmax)
    if any(check[mu] != momenta[mu] for mu in range(n)):
        raise ConsistencyError("recovered generator does not reproduce the flow")
    return gen
