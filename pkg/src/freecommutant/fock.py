"""Operator model on a tensor space driven by the moments of one measure.

States are finite rational combinations of elementary tensors of powers of a
single random variable Y; slot j of a basis tensor carries Y^e for a stored
exponent e (0 means the constant 1).  Six operators act by appending,
multiplying into the last slot, or contracting against a moment of Y, split
into two families whose vacuum moments add up to the cumulants of x + i[x,s]
when the cumulants of x are the moments of the driving measure.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

from .cumulants import as_fraction, format_rational
from .errors import DomainError, TruncationError
from .partitions import PartitionKind, iter_partitions

_ZERO = Fraction(0)
_ONE = Fraction(1)


@dataclass(frozen=True)
class RhoMoments:
    """Moments m_0..m_N of the driving measure; m_0 = 1.

    ``genuine`` marks sequences that come from an actual positive measure
    (e.g. built from atoms); purely formal sequences leave it unset.
    """

    values: tuple[Fraction, ...]
    genuine: bool = False

    def __post_init__(self):
        vals = tuple(as_fraction(v) for v in self.values)
        if not vals or vals[0] != 1:
            raise DomainError("moment sequence must start with m_0 = 1")
        object.__setattr__(self, "values", vals)

    @property
    def max_order(self) -> int:
        return len(self.values) - 1

    def moment(self, k: int) -> Fraction:
        if not 0 <= k <= self.max_order:
            raise TruncationError(
                f"m_{k} of the driving measure requested, available to order {self.max_order}"
            )
        return self.values[k]

    @classmethod
    def from_atoms(cls, atoms: Sequence[tuple], order: int) -> "RhoMoments":
        """Moments of a finite atomic probability measure; genuine by
        construction."""
        pairs = [(as_fraction(w), as_fraction(a)) for w, a in atoms]
        if not pairs or any(w <= 0 for w, _ in pairs):
            raise DomainError("atom weights must be positive")
        if sum(w for w, _ in pairs) != 1:
            raise DomainError("atom weights must sum to 1")
        values = [sum((w * a ** k for w, a in pairs), _ZERO) for k in range(order + 1)]
        return cls(tuple(values), genuine=True)

    @classmethod
    def delta(cls, point, order: int) -> "RhoMoments":
        return cls.from_atoms([(1, point)], order)

    def to_json(self) -> list[str]:
        return [format_rational(v) for v in self.values]


class OperatorName(Enum):
    XHAT = "xhat"
    XSHAT = "xshat"
    SXHAT = "sxhat"
    XTILDE = "xtilde"
    XSTILDE = "xstilde"
    SXTILDE = "sxtilde"
    XSHAT_U = "xshat-u"
    XSHAT_D = "xshat-d"
    SXHAT_U = "sxhat-u"
    SXHAT_D = "sxhat-d"


HAT_SUM = (OperatorName.XHAT, OperatorName.XSHAT, OperatorName.SXHAT)
TILDE_SUM = (OperatorName.XTILDE, OperatorName.XSTILDE, OperatorName.SXTILDE)

# (operator, claimed adjoint) pairs asserted by the model
ADJOINT_PAIRS = (
    (OperatorName.XHAT, OperatorName.XHAT),
    (OperatorName.XSHAT, OperatorName.SXHAT),
    (OperatorName.XTILDE, OperatorName.XTILDE),
    (OperatorName.XSTILDE, OperatorName.SXTILDE),
)


def _check_tensor(t: tuple[int, ...]) -> None:
    if not t or any((not isinstance(e, int)) or e < 0 for e in t):
        raise DomainError(f"basis tensors are nonempty tuples of nonnegative ints, got {t!r}")


class FockVector:
    """Sparse rational combination of elementary tensors."""

    __slots__ = ("terms",)

    def __init__(self, terms: Iterable[tuple[tuple[int, ...], Fraction]] | dict = ()):
        items = terms.items() if isinstance(terms, dict) else terms
        acc: dict[tuple[int, ...], Fraction] = {}
        for t, c in items:
            t = tuple(t)
            _check_tensor(t)
            c = as_fraction(c)
            if c:
                acc[t] = acc.get(t, _ZERO) + c
                if not acc[t]:
                    del acc[t]
        object.__setattr__(self, "terms", acc)

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("FockVector is immutable")

    def __getstate__(self):
        return self.terms

    def __setstate__(self, state):
        object.__setattr__(self, "terms", state)

    @classmethod
    def vacuum(cls) -> "FockVector":
        return cls([((0,), _ONE)])

    @classmethod
    def zero(cls) -> "FockVector":
        return cls()

    def items(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return sorted(self.terms.items())

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "FockVector") -> "FockVector":
        acc = dict(self.terms)
        for t, c in other.terms.items():
            acc[t] = acc.get(t, _ZERO) + c
            if not acc[t]:
                del acc[t]
        return FockVector(acc)

    def scaled(self, c) -> "FockVector":
        f = as_fraction(c)
        return FockVector({t: v * f for t, v in self.terms.items()})

    def __eq__(self, other) -> bool:
        return isinstance(other, FockVector) and self.terms == other.terms

    def __repr__(self) -> str:
        return f"FockVector({self.items()!r})"

    def to_json(self) -> list[dict]:
        return [
            {"exponents": list(t), "coeff": format_rational(c)}
            for t, c in self.items()
        ]


def _apply_tensor(op: OperatorName, t: tuple[int, ...],
                  rho: RhoMoments) -> Iterator[tuple[tuple[int, ...], Fraction]]:
    n = len(t)
    odd = n % 2 == 1
    if op is OperatorName.XHAT:
        if odd:
            yield t[:-1] + (t[-1] + 1,), _ONE
    elif op is OperatorName.XTILDE:
        if not odd:
            yield t[:-1] + (t[-1] + 1,), _ONE
    elif op is OperatorName.XSHAT_U:
        if not odd:
            yield t + (1,), _ONE
    elif op is OperatorName.XSHAT_D:
        if not odd:
            yield t[:-2] + (t[-2] + 1,), rho.moment(t[-1])
    elif op is OperatorName.XSHAT:
        if not odd:
            yield t + (1,), _ONE
            yield t[:-2] + (t[-2] + 1,), rho.moment(t[-1])
    elif op is OperatorName.SXHAT_U:
        if odd:
            yield t[:-1] + (t[-1] + 1, 0), _ONE
    elif op is OperatorName.SXHAT_D:
        if odd and n > 1:
            yield t[:-1], rho.moment(t[-1] + 1)
    elif op is OperatorName.SXHAT:
        if odd:
            yield t[:-1] + (t[-1] + 1, 0), _ONE
            if n > 1:
                yield t[:-1], rho.moment(t[-1] + 1)
    elif op is OperatorName.XSTILDE:
        if odd:
            yield t + (1,), _ONE
            if n > 1:
                yield t[:-2] + (t[-2] + 1,), rho.moment(t[-1])
    elif op is OperatorName.SXTILDE:
        if not odd:
            yield t[:-1] + (t[-1] + 1, 0), _ONE
            yield t[:-1], rho.moment(t[-1] + 1)
    else:  # pragma: no cover
        raise DomainError(f"unknown operator {op!r}")


def apply(op: OperatorName, v: FockVector, rho: RhoMoments) -> FockVector:
    """Linear extension of the per-tensor operator action."""
    acc: dict[tuple[int, ...], Fraction] = {}
    for t, c in v.terms.items():
        for out, w in _apply_tensor(op, t, rho):
            cw = c * w
            if cw:
                acc[out] = acc.get(out, _ZERO) + cw
                if not acc[out]:
                    del acc[out]
    return FockVector(acc)


def inner_product(u: FockVector, v: FockVector, rho: RhoMoments) -> Fraction:
    """Bilinear extension of: tensors of different lengths are orthogonal,
    equal lengths pair slotwise through moments of Y."""
    total = _ZERO
    by_len: dict[int, list[tuple[tuple[int, ...], Fraction]]] = {}
    for t, c in v.terms.items():
        by_len.setdefault(len(t), []).append((t, c))
    for ta, ca in u.terms.items():
        for tb, cb in by_len.get(len(ta), ()):
            prod = ca * cb
            for ea, eb in zip(ta, tb):
                m = rho.moment(ea + eb)
                if m == 0:
                    prod = _ZERO
                    break
                prod *= m
            total += prod
    return total


def _vacuum_moment(ops: Sequence[OperatorName], n: int, rho: RhoMoments) -> Fraction:
    state = FockVector.vacuum()
    for _ in range(n):
        out = FockVector.zero()
        for op in ops:
            out = out + apply(op, state, rho)
        state = out
    return inner_product(state, FockVector.vacuum(), rho)


def model_cumulant_parts(n: int, rho: RhoMoments) -> tuple[Fraction, Fraction]:
    """Vacuum moments of the n-th powers of the two operator sums."""
    if n < 1:
        raise DomainError(f"order must be positive, got {n}")
    if rho.max_order < n + 1:
        raise TruncationError(
            f"model order {n} needs moments to order {n + 1}, have {rho.max_order}"
        )
    return _vacuum_moment(HAT_SUM, n, rho), _vacuum_moment(TILDE_SUM, n, rho)


def model_cumulant(n: int, rho: RhoMoments) -> Fraction:
    """kappa_n(x + i[x,s]) realized as the sum of the two vacuum moments,
    where kappa_m(x) = m_m(rho) and s is standard semicircular.  Exact: a
    word of n operators from the vacuum never exceeds tensor length n + 1."""
    hat, tilde = model_cumulant_parts(n, rho)
    return hat + tilde


def _compositions(total: int, minima: Sequence[int]) -> Iterator[tuple[int, ...]]:
    if not minima:
        if total == 0:
            yield ()
        return
    head_min = minima[0]
    tail = minima[1:]
    tail_min = sum(tail)
    for head in range(head_min, total - tail_min + 1):
        for rest in _compositions(total - head, tail):
            yield (head,) + rest


def composition_formula_cumulant(n: int, rho: RhoMoments) -> Fraction:
    """The same quantity as :func:`model_cumulant`, by the closed sums over
    compositions of n.

    One family runs over compositions whose outer parts may be single and
    inner parts are at least 2, paired with non-crossing partitions of the
    part indices joining first and last; the other over compositions with
    all parts at least 2, paired with all non-crossing partitions.  Each
    partition block contributes the moment of Y at the summed part sizes.
    """
    if n < 1:
        raise DomainError(f"order must be positive, got {n}")
    total = _ZERO
    for k in range(0, n // 2 + 1):
        minima = [1] + [2] * (k - 1) + [1] if k >= 1 else [1]
        for comp in _compositions(n, minima):
            for pi in iter_partitions(k + 1, PartitionKind.NC_IRREDUCIBLE):
                prod = _ONE
                for block in pi.blocks:
                    m = rho.moment(sum(comp[j - 1] for j in block))
                    if m == 0:
                        prod = _ZERO
                        break
                    prod *= m
                total += prod
    for k in range(1, n // 2 + 1):
        for comp in _compositions(n, [2] * k):
            for pi in iter_partitions(k, PartitionKind.NC):
                prod = _ONE
                for block in pi.blocks:
                    m = rho.moment(sum(comp[j - 1] for j in block))
                    if m == 0:
                        prod = _ZERO
                        break
                    prod *= m
                total += prod
    return total


def _random_vector(rng: random.Random) -> FockVector:
    terms = []
    for _ in range(rng.randint(1, 2)):
        length = rng.randint(1, 5)
        tensor = tuple(rng.randint(0, 3) for _ in range(length))
        coeff = Fraction(rng.randint(-3, 3), rng.randint(1, 3))
        terms.append((tensor, coeff))
    return FockVector(terms)


def verify_adjointness(pairs: Sequence[tuple[OperatorName, OperatorName]],
                       samples: int, rho: RhoMoments, seed: int) -> bool:
    """Check <A u, v> = <u, B v> exactly on seeded pseudo-random small states
    for each (A, B) pair; requires a genuine-measure moment sequence, since
    adjointness is only meaningful for a true bilinear form.  Needs moments
    to order 8 (tensor exponents up to 3, one operator application, slotwise
    pairing)."""
    if not rho.genuine:
        raise DomainError("adjointness checks need a genuine-measure moment sequence")
    rng = random.Random(seed)
    for _ in range(samples):
        u = _random_vector(rng)
        v = _random_vector(rng)
        for a, b in pairs:
            lhs = inner_product(apply(a, u, rho), v, rho)
            rhs = inner_product(u, apply(b, v, rho), rho)
            if lhs != rhs:
                return False
    return True
