"""Distributions built from the commutator of a semicircular element with a
free partner.

Provides the brute-force cumulant sequences of s + i[s,x], i[s,x] and
x + i[x,s]; the additivity verdicts comparing kappa_n(s + i[s,x]) against
kappa_n(s) + kappa_n(i[s,x]); the signed double sums whose vanishing is
equivalent to that additivity; the fourth-order witness showing s and
i[s,x] are nevertheless not free; and the closed-form cumulant of
x + i[x,s] together with its independent expansion oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .cumulants import (
    GR_I,
    CumulantSequence,
    GaussianRational,
    Polynomial,
    cumulant_of_polynomials,
    cumulant_of_word_products,
    format_rational,
    real_cumulant,
    resolve_order_cap,
)
from .errors import DomainError, SizeLimitError, TruncationError
from .partitions import PartitionKind, assign_by_blocks, compose_interval, iter_partitions

I_S_X = "i[s,x]"
I_X_S = "i[x,s]"

_S_WORD = "s"
_X_WORD = "x"
_SX = "sx"
_XS = "xs"


def commutator_polynomial(which: str) -> Polynomial:
    """The two-term polynomial i*ab - i*ba for the requested letter order."""
    if which == I_S_X:
        return Polynomial([(_SX, GR_I), (_XS, -GR_I)])
    if which == I_X_S:
        return Polynomial([(_XS, GR_I), (_SX, -GR_I)])
    raise DomainError(f"which must be {I_S_X!r} or {I_X_S!r}, got {which!r}")


def letter_polynomial(letter: str) -> Polynomial:
    return Polynomial.from_word(letter)


def sum_with_commutator() -> Polynomial:
    """s + i[s,x]."""
    return letter_polynomial(_S_WORD) + commutator_polynomial(I_S_X)


def perturbed_partner() -> Polynomial:
    """x + i[x,s]."""
    return letter_polynomial(_X_WORD) + commutator_polynomial(I_X_S)


@dataclass(frozen=True)
class DistributionPair:
    """The standing data: cumulants of s (semicircular by default) and of a
    free partner x, plus the order everything is computed to."""

    dist_s: CumulantSequence
    dist_x: CumulantSequence
    max_order: int = 8

    @classmethod
    def standard(cls, dist_x: CumulantSequence, s_variance=1,
                 max_order: int = 8) -> "DistributionPair":
        return cls(CumulantSequence.semicircular(s_variance, max_order), dist_x, max_order)

    @property
    def semicircular_hypothesis(self) -> bool:
        return self.dist_s.is_semicircular


@dataclass(frozen=True)
class AdditivityReport:
    """One order of the additivity comparison."""

    n: int
    lhs: Fraction
    rhs_s: Fraction
    rhs_c: Fraction
    hypothesis_met: bool = True

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs_s + self.rhs_c

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "lhs": format_rational(self.lhs),
            "rhs_s": format_rational(self.rhs_s),
            "rhs_c": format_rational(self.rhs_c),
            "holds": self.holds,
        }


def cumulant_sequence_of(p: Polynomial, pair: DistributionPair, order: int,
                         *, order_cap: int | None = None,
                         cache: dict | None = None) -> CumulantSequence:
    """kappa_1..kappa_order of the polynomial, by full multilinear expansion.

    Imaginary parts must vanish for self-adjoint input; a violation is an
    engine bug, not a data error.
    """
    cap = resolve_order_cap(order_cap)
    if order > cap:
        raise SizeLimitError(
            f"order {order} exceeds the brute-force cap {cap} (override via order_cap)"
        )
    self_adjoint = p.is_self_adjoint
    shared = cache if cache is not None else {}
    values = []
    for n in range(1, order + 1):
        g = cumulant_of_polynomials([p] * n, pair.dist_s, pair.dist_x,
                                    order_cap=order_cap, cache=shared)
        values.append(real_cumulant(g, self_adjoint))
    return CumulantSequence(values)


def verify_additivity(pair: DistributionPair, order: int,
                      *, order_cap: int | None = None,
                      cache: dict | None = None) -> list[AdditivityReport]:
    """Compare kappa_n(s + i[s,x]) with kappa_n(s) + kappa_n(i[s,x]) for
    n = 1..order.

    With a non-semicircular s the comparison still runs (exploratory mode)
    and every report carries hypothesis_met = False.
    """
    if order > pair.dist_s.max_order:
        raise TruncationError(
            f"s cumulants available to order {pair.dist_s.max_order}, need {order}")
    hypothesis = pair.semicircular_hypothesis
    shared = cache if cache is not None else {}
    lhs = cumulant_sequence_of(sum_with_commutator(), pair, order,
                               order_cap=order_cap, cache=shared)
    rhs_c = cumulant_sequence_of(commutator_polynomial(I_S_X), pair, order,
                                 order_cap=order_cap, cache=shared)
    return [
        AdditivityReport(
            n=n,
            lhs=lhs.kappa(n),
            rhs_s=pair.dist_s.kappa(n),
            rhs_c=rhs_c.kappa(n),
            hypothesis_met=hypothesis,
        )
        for n in range(1, order + 1)
    ]


def freeness_witness(pair: DistributionPair) -> Fraction:
    """kappa_4(s, i[s,x], i[s,x], s): zero for a genuinely free pair, equal
    to kappa_2(s)^2 kappa_2(x) here, hence positive whenever both variances
    are — the witness that s and i[s,x] are not free."""
    s = letter_polynomial(_S_WORD)
    c = commutator_polynomial(I_S_X)
    value = cumulant_of_polynomials([s, c, c, s], pair.dist_s, pair.dist_x)
    return real_cumulant(value, self_adjoint=True)


def cancellation_sum(n: int, k: int, pair: DistributionPair,
                     *, order_cap: int | None = None,
                     cache: dict | None = None) -> GaussianRational:
    """The signed double sum over |B| = k and D subset of B of
    (-1)^|D| kappa_n(sx on B\\D, xs on D, s elsewhere); identically zero for
    semicircular s, which is exactly what makes the additivity work."""
    if not 1 <= k < n:
        raise DomainError(f"need 1 <= k < n, got k={k}, n={n}")
    cap = resolve_order_cap(order_cap)
    if n > cap:
        raise SizeLimitError(f"order {n} exceeds the cap {cap} (override via order_cap)")
    if not pair.semicircular_hypothesis:
        raise DomainError("cancellation_sum requires a semicircular s")
    grouped: dict[tuple[str, ...], int] = {}
    universe = range(1, n + 1)
    for b_set in combinations(universe, k):
        b = frozenset(b_set)
        members = list(b_set)
        for mask in range(1 << k):
            d = frozenset(members[i] for i in range(k) if mask >> i & 1)
            groups = []
            if b - d:
                groups.append((b - d, [_SX]))
            if d:
                groups.append((d, [_XS]))
            rest = frozenset(universe) - b
            if rest:
                groups.append((rest, [_S_WORD]))
            words = assign_by_blocks(groups)
            sign = -1 if len(d) % 2 else 1
            key = min(words[r:] + words[:r] for r in range(n))
            grouped[key] = grouped.get(key, 0) + sign
    shared = cache if cache is not None else {}
    total = Fraction(0)
    for words, weight in grouped.items():
        if weight == 0:
            continue
        val = cumulant_of_word_products(words, pair.dist_s, pair.dist_x,
                                        order_cap=order_cap, cache=shared)
        if val:
            total += weight * val
    return GaussianRational(total)


def closed_form_cumulant(n: int, dist_x: CumulantSequence) -> Fraction:
    """kappa_n(x + i[x,s]) for standard semicircular s (variance 1), by the
    combinatorial closed form: kappa_n(x) plus, over interval partitions of
    {1..n} with all blocks of size >= 2 and over non-crossing partitions of
    their block indices, the first-block size times the block-product of x
    cumulants of the merged partition."""
    if n < 1:
        raise DomainError(f"order must be positive, got {n}")
    total = dist_x.kappa(n)
    for sigma in iter_partitions(n, PartitionKind.INTERVAL_MIN2):
        weight = len(sigma.blocks[0])
        k = sigma.num_blocks
        for pi in iter_partitions(k, PartitionKind.NC):
            rho = compose_interval(pi, sigma)
            prod = Fraction(weight)
            for z in rho.blocks:
                kv = dist_x.kappa(len(z))
                if kv == 0:
                    prod = Fraction(0)
                    break
                prod *= kv
            total += prod
    return total


def expansion_cumulant(n: int, dist_x: CumulantSequence, s_variance=1,
                       *, order_cap: int | None = None,
                       cache: dict | None = None) -> Fraction:
    """kappa_n(x + i[x,s]) by full multilinear expansion — the independent
    oracle for :func:`closed_form_cumulant`; exposes the s variance, which
    the closed form normalizes to 1."""
    cap = resolve_order_cap(order_cap)
    if n > cap:
        raise SizeLimitError(f"order {n} exceeds the cap {cap} (override via order_cap)")
    pair = DistributionPair.standard(dist_x, s_variance, max_order=max(n, 2))
    value = cumulant_of_polynomials([perturbed_partner()] * n,
                                    pair.dist_s, pair.dist_x,
                                    order_cap=order_cap, cache=cache)
    return real_cumulant(value, self_adjoint=True)
