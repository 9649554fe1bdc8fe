"""Exact free-cumulant calculus for words and polynomials in two letters.

The letters are ``s`` and ``x``, modelling two freely independent variables;
everything is exact rational arithmetic.  The central operation sums block
products of single-variable cumulants over non-crossing partitions whose
join with the word-grouping interval partition is full — the standard
products-as-entries evaluation — with a pruned fast path and a deliberately
naive unpruned oracle path.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    DomainError,
    EngineConsistencyError,
    GroundSetError,
    KindError,
    SizeLimitError,
    TruncationError,
)
from .partitions import Partition, PartitionKind, is_noncrossing, iter_partitions, joins_to_full

S = "s"
X = "x"
_ALPHABET = frozenset((S, X))

DEFAULT_ORDER_CAP = 8
ORDER_CAP_ENV = "FREECOMMUTANT_MAX_ORDER"

_ZERO = Fraction(0)
_ONE = Fraction(1)


def resolve_order_cap(cap: int | None = None) -> int:
    """Effective order cap: explicit argument, else the environment
    override, else the default of 8."""
    if cap is not None:
        if cap < 1:
            raise DomainError(f"order cap must be positive, got {cap}")
        return cap
    raw = os.environ.get(ORDER_CAP_ENV)
    if raw is None:
        return DEFAULT_ORDER_CAP
    try:
        value = int(raw)
    except ValueError as exc:
        raise DomainError(f"{ORDER_CAP_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise DomainError(f"{ORDER_CAP_ENV} must be positive, got {value}")
    return value


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and 'p/q' strings to Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise DomainError(f"not an exact rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """Render as 'p' or 'p/q'; the only numeric format the package emits."""
    return str(value)


@dataclass(frozen=True)
class GaussianRational:
    """Element of Q(i): exact real and imaginary rational parts."""

    re: Fraction = _ZERO
    im: Fraction = _ZERO

    @classmethod
    def of(cls, re=0, im=0) -> "GaussianRational":
        return cls(as_fraction(re), as_fraction(im))

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other) -> "GaussianRational":
        if isinstance(other, GaussianRational):
            return GaussianRational(
                self.re * other.re - self.im * other.im,
                self.re * other.im + self.im * other.re,
            )
        f = as_fraction(other)
        return GaussianRational(self.re * f, self.im * f)

    __rmul__ = __mul__

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __str__(self) -> str:
        if self.im == 0:
            return format_rational(self.re)
        return f"{format_rational(self.re)}{'+' if self.im >= 0 else ''}{format_rational(self.im)}i"


GR_ZERO = GaussianRational()
GR_ONE = GaussianRational(_ONE)
GR_I = GaussianRational(_ZERO, _ONE)


class CumulantSequence:
    """Free cumulants kappa_1..kappa_N of one distribution, exact rationals.

    Purely formal: no positivity is assumed anywhere.
    """

    __slots__ = ("values",)

    def __init__(self, values: Iterable):
        vals = tuple(as_fraction(v) for v in values)
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("CumulantSequence is immutable")

    def __getstate__(self):
        return self.values

    def __setstate__(self, state):
        object.__setattr__(self, "values", state)

    @property
    def max_order(self) -> int:
        return len(self.values)

    def kappa(self, k: int) -> Fraction:
        if not 1 <= k <= len(self.values):
            raise TruncationError(
                f"kappa_{k} requested but sequence holds orders 1..{len(self.values)}"
            )
        return self.values[k - 1]

    @property
    def is_semicircular(self) -> bool:
        """Only the second cumulant may be nonzero."""
        return all(v == 0 for k, v in enumerate(self.values, start=1) if k != 2)

    @classmethod
    def semicircular(cls, variance=1, order: int = DEFAULT_ORDER_CAP) -> "CumulantSequence":
        v = as_fraction(variance)
        return cls([v if k == 2 else 0 for k in range(1, order + 1)])

    @classmethod
    def free_poisson(cls, rate=1, order: int = DEFAULT_ORDER_CAP) -> "CumulantSequence":
        r = as_fraction(rate)
        return cls([r] * order)

    @classmethod
    def point_mass(cls, atom, order: int = DEFAULT_ORDER_CAP) -> "CumulantSequence":
        a = as_fraction(atom)
        return cls([a if k == 1 else 0 for k in range(1, order + 1)])

    @classmethod
    def zero(cls, order: int = DEFAULT_ORDER_CAP) -> "CumulantSequence":
        return cls([0] * order)

    def dilated(self, c) -> "CumulantSequence":
        """Cumulants of the dilation by c: kappa_k -> c^k kappa_k."""
        f = as_fraction(c)
        return CumulantSequence([v * f ** k for k, v in enumerate(self.values, start=1)])

    def to_json(self) -> list[str]:
        return [format_rational(v) for v in self.values]

    def __eq__(self, other) -> bool:
        return isinstance(other, CumulantSequence) and self.values == other.values

    def __hash__(self) -> int:
        return hash(self.values)

    def __repr__(self) -> str:
        return f"CumulantSequence({[str(v) for v in self.values]})"


class MomentSequence:
    """Moments m_0..m_N with m_0 = 1, exact rationals."""

    __slots__ = ("values",)

    def __init__(self, values: Iterable):
        vals = tuple(as_fraction(v) for v in values)
        if not vals or vals[0] != 1:
            raise DomainError("moment sequence must start with m_0 = 1")
        object.__setattr__(self, "values", vals)

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("MomentSequence is immutable")

    def __getstate__(self):
        return self.values

    def __setstate__(self, state):
        object.__setattr__(self, "values", state)

    @property
    def max_order(self) -> int:
        return len(self.values) - 1

    def moment(self, k: int) -> Fraction:
        if not 0 <= k <= self.max_order:
            raise TruncationError(
                f"m_{k} requested but sequence holds orders 0..{self.max_order}"
            )
        return self.values[k]

    def to_json(self) -> list[str]:
        return [format_rational(v) for v in self.values]

    def __eq__(self, other) -> bool:
        return isinstance(other, MomentSequence) and self.values == other.values

    def __hash__(self) -> int:
        return hash(self.values)

    def __repr__(self) -> str:
        return f"MomentSequence({[str(v) for v in self.values]})"


def _gap_sums(moments: list[Fraction], parts: int, total: int) -> Fraction:
    """Sum over compositions of ``total`` into ``parts`` nonnegative gaps of
    the product of the gap moments."""
    acc = [_ONE] + [_ZERO] * total
    for _ in range(parts):
        nxt = [_ZERO] * (total + 1)
        for r in range(total + 1):
            a = acc[r]
            if a == 0:
                continue
            for t in range(total - r + 1):
                m = moments[t]
                if m != 0:
                    nxt[r + t] += a * m
        acc = nxt
    return acc[total]


def moments_from_cumulants(seq: CumulantSequence, order: int) -> MomentSequence:
    """Moments of the distribution with the given free cumulants.

    Uses the first-block recursion over non-crossing partitions:
    m_n = sum_k kappa_k * (products of gap moments).
    """
    if order > seq.max_order:
        raise TruncationError(f"need cumulants to order {order}, have {seq.max_order}")
    m: list[Fraction] = [_ONE]
    for n in range(1, order + 1):
        total = _ZERO
        for k in range(1, n + 1):
            kv = seq.kappa(k)
            if kv != 0:
                total += kv * _gap_sums(m, k, n - k)
        m.append(total)
    return MomentSequence(m)


def cumulants_from_moments(mseq: MomentSequence, order: int) -> CumulantSequence:
    """Exact inverse of :func:`moments_from_cumulants`."""
    if order > mseq.max_order:
        raise TruncationError(f"need moments to order {order}, have {mseq.max_order}")
    m = [mseq.moment(k) for k in range(order + 1)]
    kappas: list[Fraction] = []
    for n in range(1, order + 1):
        value = m[n]
        for k in range(1, n):
            kv = kappas[k - 1]
            if kv != 0:
                value -= kv * _gap_sums(m, k, n - k)
        kappas.append(value)
    return CumulantSequence(kappas)


def _check_word(word: str) -> None:
    if not word or any(c not in _ALPHABET for c in word):
        raise DomainError(f"words are nonempty strings over {{'s','x'}}, got {word!r}")


class Polynomial:
    """Gaussian-rational combination of words in s and x plus a constant.

    Terms are kept sorted by word with zero coefficients dropped, so equality
    and hashing are canonical.
    """

    __slots__ = ("terms", "constant")

    def __init__(self, terms: Iterable[tuple[str, GaussianRational]] = (),
                 constant: GaussianRational = GR_ZERO):
        merged: dict[str, GaussianRational] = {}
        for word, coeff in terms:
            _check_word(word)
            merged[word] = merged.get(word, GR_ZERO) + coeff
        canon = tuple(sorted((w, c) for w, c in merged.items() if c))
        object.__setattr__(self, "terms", canon)
        object.__setattr__(self, "constant", constant)

    def __setattr__(self, name, value):  # pragma: no cover
        raise AttributeError("Polynomial is immutable")

    def __getstate__(self):
        return (self.terms, self.constant)

    def __setstate__(self, state):
        object.__setattr__(self, "terms", state[0])
        object.__setattr__(self, "constant", state[1])

    @classmethod
    def from_word(cls, word: str, coeff: GaussianRational = GR_ONE) -> "Polynomial":
        return cls([(word, coeff)])

    def __add__(self, other: "Polynomial") -> "Polynomial":
        return Polynomial(self.terms + other.terms, self.constant + other.constant)

    def scaled(self, coeff) -> "Polynomial":
        c = coeff if isinstance(coeff, GaussianRational) else GaussianRational.of(coeff)
        return Polynomial([(w, c * g) for w, g in self.terms], c * self.constant)

    def adjoint(self) -> "Polynomial":
        """Reverse every word and conjugate every coefficient."""
        return Polynomial(
            [(w[::-1], c.conjugate()) for w, c in self.terms],
            self.constant.conjugate(),
        )

    @property
    def is_self_adjoint(self) -> bool:
        return self == self.adjoint()

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Polynomial)
            and self.terms == other.terms
            and self.constant == other.constant
        )

    def __hash__(self) -> int:
        return hash((self.terms, self.constant))

    def __repr__(self) -> str:
        parts = [f"({c})*{w}" for w, c in self.terms]
        if self.constant:
            parts.append(f"({self.constant})")
        return " + ".join(parts) if parts else "0"


def kappa_block(letters: str, dist_s: CumulantSequence, dist_x: CumulantSequence) -> Fraction:
    """Cumulant of one block: zero when mixed, else the matching variable's
    cumulant at the block size."""
    _check_word(letters)
    if S in letters and X in letters:
        return _ZERO
    dist = dist_s if letters[0] == S else dist_x
    return dist.kappa(len(letters))


def kappa_pi(pi: Partition, letters: str,
             dist_s: CumulantSequence, dist_x: CumulantSequence) -> Fraction:
    """Block-multiplicative extension of :func:`kappa_block` over a
    non-crossing partition."""
    if pi.n != len(letters):
        raise GroundSetError(f"partition of {pi.n} against {len(letters)} letters")
    if not is_noncrossing(pi):
        raise KindError(f"kappa_pi is defined on non-crossing partitions only: {pi!r}")
    prod = _ONE
    for b in pi.blocks:
        kv = kappa_block("".join(letters[e - 1] for e in b), dist_s, dist_x)
        if kv == 0:
            return _ZERO
        prod *= kv
    return prod


def _grouping_partition(word_lengths: Sequence[int]) -> Partition:
    blocks = []
    start = 1
    for size in word_lengths:
        blocks.append(range(start, start + size))
        start += size
    return Partition(start - 1, blocks)


def _joined_cumulant_naive(words: tuple[str, ...],
                           dist_s: CumulantSequence, dist_x: CumulantSequence) -> Fraction:
    """Reference path: enumerate NC(L), filter by the join condition, and
    evaluate kappa_pi term by term.  Kept dumb on purpose."""
    letters = "".join(words)
    sigma_hat = _grouping_partition([len(w) for w in words])
    total = _ZERO
    for pi in iter_partitions(len(letters), PartitionKind.NC):
        if joins_to_full(pi, sigma_hat):
            total += kappa_pi(pi, letters, dist_s, dist_x)
    return total


def _kappa_table(dist: CumulantSequence, count: int, what: str) -> list[Fraction]:
    if count > dist.max_order:
        raise TruncationError(
            f"{count} letters '{what}' but cumulants available only to order {dist.max_order}"
        )
    return [_ZERO] + [dist.kappa(k) for k in range(1, count + 1)]


def _joined_cumulant_pruned(words: tuple[str, ...],
                            dist_s: CumulantSequence, dist_x: CumulantSequence) -> Fraction:
    """Fast path: depth-first generation of non-crossing partitions through a
    stack of open blocks, skipping any branch with a provably zero block and
    any branch whose word-connectivity can no longer reach the full join."""
    letters = "".join(words)
    length = len(letters)
    gid: list[int] = []
    glast: list[int] = []
    pos = 0
    for g, w in enumerate(words):
        gid.extend([g] * len(w))
        glast.append(pos + len(w) - 1)
        pos += len(w)
    m = len(words)

    ks = _kappa_table(dist_s, letters.count(S), S)
    kx = _kappa_table(dist_x, length - letters.count(S), X)
    table = {S: ks, X: kx}
    max_size = {
        S: max((k for k, v in enumerate(ks) if v != 0), default=0),
        X: max((k for k, v in enumerate(kx) if v != 0), default=0),
    }

    # union-find over word groups, with an undo trail for backtracking
    parent = list(range(m))
    csize = [1] * m
    copen = [0] * m          # open blocks attached to each component root
    clast = glast[:]         # last letter position seen by each component
    ncomp = [m]
    trail: list[tuple[int, int, int, int, int]] = []

    def find(a: int) -> int:
        while parent[a] != a:
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra == rb:
            return
        if csize[ra] < csize[rb]:
            ra, rb = rb, ra
        trail.append((rb, ra, copen[ra], clast[ra], csize[ra]))
        parent[rb] = ra
        csize[ra] += csize[rb]
        copen[ra] += copen[rb]
        if clast[rb] > clast[ra]:
            clast[ra] = clast[rb]
        ncomp[0] -= 1

    def rollback(mark: int) -> None:
        while len(trail) > mark:
            rb, ra, o, cl, sz = trail.pop()
            parent[rb] = rb
            copen[ra] = o
            clast[ra] = cl
            csize[ra] = sz
            ncomp[0] += 1

    stack: list[list] = []   # open blocks: [letter, size, member group]
    total = [_ZERO]

    def walk(i: int, acc: Fraction) -> None:
        if i == length:
            if ncomp[0] != 1:
                return
            for letter, size, _g in stack:
                kv = table[letter][size]
                if kv == 0:
                    return
                if kv != 1:
                    acc *= kv
            total[0] += acc
            return
        c = letters[i]
        g = gid[i]
        cmax = max_size[c]
        # start a new block at position i
        if cmax >= 1:
            root = find(g)
            copen[root] += 1
            stack.append([c, 1, g])
            walk(i + 1, acc)
            stack.pop()
            copen[root] -= 1
        # join an open block; blocks above the one joined must close first
        popped: list[list] = []
        reopened: list[int] = []
        while stack:
            blk = stack[-1]
            letter, size, mg = blk
            if letter == c and size < cmax:
                blk[1] = size + 1
                mark = len(trail)
                union(mg, g)
                walk(i + 1, acc)
                rollback(mark)
                blk[1] = size
            kv = table[letter][size]
            if kv == 0:
                break
            root = find(mg)
            copen[root] -= 1
            if copen[root] == 0 and clast[root] < i:
                copen[root] += 1
                break  # component sealed off from every later letter
            reopened.append(root)
            if kv != 1:
                acc *= kv
            popped.append(stack.pop())
        while popped:
            stack.append(popped.pop())
        while reopened:
            copen[reopened.pop()] += 1

    walk(0, _ONE)
    return total[0]


def cumulant_of_word_products(words: Sequence[str],
                              dist_s: CumulantSequence, dist_x: CumulantSequence,
                              *, pruned: bool = True,
                              order_cap: int | None = None,
                              cache: dict | None = None) -> Fraction:
    """Joint cumulant of the products spelled by ``words``.

    Evaluates the sum of kappa_pi over non-crossing partitions of the letter
    positions whose join with the word-grouping interval partition is the
    one-block partition.  ``cache`` (a dict owned by the caller) memoizes on
    the word tuple and must not be shared across distribution pairs.
    """
    tup = tuple(words)
    if not tup:
        raise DomainError("need at least one word")
    for w in tup:
        _check_word(w)
    letters_total = sum(len(w) for w in tup)
    cap = 2 * resolve_order_cap(order_cap)
    if letters_total > cap:
        raise SizeLimitError(
            f"{letters_total} letters exceeds the cap of {cap}"
            f" (= 2x order cap; raise via {ORDER_CAP_ENV} or order_cap)"
        )
    if cache is not None and tup in cache:
        return cache[tup]
    if pruned:
        value = _joined_cumulant_pruned(tup, dist_s, dist_x)
    else:
        value = _joined_cumulant_naive(tup, dist_s, dist_x)
    if cache is not None:
        cache[tup] = value
    return value


def _canonical_rotation(words: tuple[str, ...]) -> tuple[str, ...]:
    return min(words[r:] + words[:r] for r in range(len(words)))


def cumulant_of_polynomials(args: Sequence[Polynomial],
                            dist_s: CumulantSequence, dist_x: CumulantSequence,
                            *, order_cap: int | None = None,
                            cache: dict | None = None) -> GaussianRational:
    """Multilinear cumulant of polynomial arguments, one per slot.

    Constants contribute only to the first-order cumulant (higher cumulants
    are shift-invariant, so constant parts are dropped for n >= 2).  Word
    tuples are grouped under cyclic rotation — joint cumulants of a trace are
    rotation-invariant — before the grouped sums are evaluated.
    """
    polys = list(args)
    n = len(polys)
    if n == 0:
        raise DomainError("need at least one argument slot")
    if n == 1:
        p = polys[0]
        total = p.constant
        for word, coeff in p.terms:
            val = cumulant_of_word_products(
                (word,), dist_s, dist_x, order_cap=order_cap, cache=cache)
            if val:
                total = total + coeff * val
        return total
    grouped: dict[tuple[str, ...], GaussianRational] = {}
    for choice in itertools.product(*(p.terms for p in polys)):
        coeff = GR_ONE
        for _w, c in choice:
            coeff = coeff * c
        key = _canonical_rotation(tuple(w for w, _c in choice))
        prev = grouped.get(key)
        grouped[key] = coeff if prev is None else prev + coeff
    local_cache = cache if cache is not None else {}
    total = GR_ZERO
    for words, coeff in grouped.items():
        if not coeff:
            continue
        val = cumulant_of_word_products(
            words, dist_s, dist_x, order_cap=order_cap, cache=local_cache)
        if val:
            total = total + coeff * val
    return total


def real_cumulant(value: GaussianRational, self_adjoint: bool) -> Fraction:
    """Project a cumulant of a (claimed) self-adjoint tuple to its rational
    value, treating a residual imaginary part as an engine bug."""
    if value.im != 0:
        if self_adjoint:
            raise EngineConsistencyError(
                f"self-adjoint input produced imaginary cumulant part {value.im}"
            )
        raise DomainError(f"cumulant is not real: {value}")
    return value.re
