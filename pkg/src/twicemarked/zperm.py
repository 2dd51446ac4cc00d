"""Permutations of the integers with finite descriptions.

Two representations:

* :class:`Periodic` -- ``tau(n + k) = tau(n) + k``, stored by its values on
  ``0..k-1`` (elements of the extended affine symmetric group of period k);
* :class:`ShiftFinite` -- ``tau(n) = n - m`` off a finite exception set
  (permutations with finitely many inversions).

Both expose the counting function ``s(a, b) = #{n >= b : tau(n) < a}``
through :class:`SFunction`, and the Demazure product is available twice:
by folding simple reflections (:func:`demazure`) and by min-plus
multiplication of s-functions (:func:`tropical_star`).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping


class ZPermError(ValueError):
    """Malformed permutation or incompatible operands."""


class WindowError(LookupError):
    """An s-function was evaluated where its window cannot answer."""


@functools.total_ordering
class _Infinite:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "INFINITE"

    def __eq__(self, other) -> bool:
        return other is self

    def __lt__(self, other) -> bool:
        return False

    def __gt__(self, other) -> bool:
        return other is not self

    def __hash__(self) -> int:
        return hash("INFINITE")


INFINITE = _Infinite()


class ZPerm:
    """Common interface; equality is equality of permutations of Z."""

    __slots__ = ()

    def __call__(self, n: int) -> int:
        raise NotImplementedError

    @property
    def shift(self) -> int:
        """Asymptotic shift ``m``: tau behaves like ``n -> n - m``."""
        raise NotImplementedError

    def displacement_bounds(self) -> tuple[int, int]:
        """``(min, max)`` of ``tau(n) - n`` over all integers."""
        raise NotImplementedError

    def is_shift(self) -> bool:
        lo, hi = self.displacement_bounds()
        return lo == hi

    def canonical(self) -> tuple:
        raise NotImplementedError

    def __eq__(self, other) -> bool:
        return isinstance(other, ZPerm) and self.canonical() == other.canonical()

    def __hash__(self) -> int:
        return hash(self.canonical())


class Periodic(ZPerm):
    __slots__ = ("period", "values")

    def __init__(self, period: int, values: Iterable[int]):
        values = tuple(int(x) for x in values)
        if period < 1 or len(values) != period:
            raise ZPermError(f"need {period} window values, got {len(values)}")
        if sorted(x % period for x in values) != list(range(period)):
            raise ZPermError(f"window values {list(values)} are not a residue system mod {period}")
        self.period = period
        self.values = values

    def __call__(self, n: int) -> int:
        q, r = divmod(n, self.period)
        return self.values[r] + q * self.period

    @property
    def shift(self) -> int:
        total = sum(x - i for i, x in enumerate(self.values))
        return -total // self.period

    def displacement_bounds(self) -> tuple[int, int]:
        disp = [x - i for i, x in enumerate(self.values)]
        return min(disp), max(disp)

    def minimal_period(self) -> int:
        k = self.period
        for d in range(1, k + 1):
            if k % d == 0 and all(self(i + d) == self(i) + d for i in range(k)):
                return d
        return k

    def canonical(self) -> tuple:
        if self.is_shift():
            return ("shift", -self.displacement_bounds()[0])
        d = self.minimal_period()
        return ("periodic", d, self.values[:d])

    def __repr__(self) -> str:
        return f"Periodic({self.period}, {list(self.values)})"


class ShiftFinite(ZPerm):
    __slots__ = ("_shift", "exceptions", "_table")

    def __init__(self, shift: int, exceptions: Mapping[int, int] | None = None):
        shift = int(shift)
        table = {
            int(n): int(t) for n, t in (exceptions or {}).items() if int(t) != int(n) - shift
        }
        if sorted(table.values()) != sorted(n - shift for n in table):
            raise ZPermError("exceptions do not define a bijection")
        self._shift = shift
        self._table = table
        self.exceptions: tuple[tuple[int, int], ...] = tuple(sorted(table.items()))

    def __call__(self, n: int) -> int:
        return self._table.get(n, n - self._shift)

    @property
    def shift(self) -> int:
        return self._shift

    def displacement_bounds(self) -> tuple[int, int]:
        disp = [-self._shift] + [t - n for n, t in self.exceptions]
        return min(disp), max(disp)

    def support_window(self) -> tuple[int, int] | None:
        """Smallest interval containing every exception, or None."""
        if not self.exceptions:
            return None
        return self.exceptions[0][0], self.exceptions[-1][0]

    def canonical(self) -> tuple:
        if not self.exceptions:
            return ("shift", self._shift)
        return ("shift-finite", self._shift, self.exceptions)

    def __repr__(self) -> str:
        return f"ShiftFinite({self._shift}, {dict(self.exceptions)})"


# --- constructors ------------------------------------------------------------


def shift(m: int) -> ShiftFinite:
    """The shift ``n -> n - m``."""
    return ShiftFinite(m)


def identity() -> ShiftFinite:
    return ShiftFinite(0)


def simple_reflection(k: int, m: int) -> ZPerm:
    """Swap ``n`` and ``n + 1`` for every ``n = m (mod k)`` (k = 0: n = m)."""
    if k == 1 or k < 0:
        raise ZPermError(f"simple reflections need k = 0 or k >= 2, got {k}")
    if k == 0:
        return ShiftFinite(0, {m: m + 1, m + 1: m})
    r = m % k
    values = list(range(k))
    values[r] += 1
    # for r = k - 1 the partner of k - 1 is k, so residue 0 drops to -1
    values[(r + 1) % k] -= 1
    return Periodic(k, values)


def embed(p: ZPerm, period: int) -> Periodic:
    """View ``p`` as an element of the period-``period`` group."""
    if isinstance(p, Periodic):
        if period % p.period:
            raise ZPermError(f"period {p.period} does not divide {period}")
    elif not p.is_shift():
        raise ZPermError("a non-shift permutation with finite exceptions is not periodic")
    return Periodic(period, [p(i) for i in range(period)])


def _as_shift_finite(p: ZPerm) -> ShiftFinite:
    if isinstance(p, ShiftFinite):
        return p
    if not p.is_shift():
        raise ZPermError("a periodic non-shift permutation has infinitely many inversions")
    return ShiftFinite(p.shift)


def _align(p: ZPerm, q: ZPerm) -> tuple[ZPerm, ZPerm]:
    """Bring two permutations to a common representation."""
    if isinstance(p, Periodic) and isinstance(q, Periodic):
        k = math.lcm(p.period, q.period)
        return embed(p, k), embed(q, k)
    if isinstance(p, ShiftFinite) and isinstance(q, ShiftFinite):
        return p, q
    if isinstance(p, Periodic):
        if q.is_shift():
            return p, embed(q, p.period)
        return _as_shift_finite(p), q
    if p.is_shift():
        return embed(p, q.period), q
    return p, _as_shift_finite(q)


def compose(p: ZPerm, q: ZPerm) -> ZPerm:
    """``n -> p(q(n))``."""
    p, q = _align(p, q)
    if isinstance(p, Periodic):
        k = p.period
        return Periodic(k, [p(q(i)) for i in range(k)])
    candidates = {n for n, _ in q.exceptions} | {n + q.shift for n, _ in p.exceptions}
    m = p.shift + q.shift
    return ShiftFinite(m, {n: p(q(n)) for n in candidates})


def invert(p: ZPerm) -> ZPerm:
    if isinstance(p, Periodic):
        k = p.period
        values = [0] * k
        for i, x in enumerate(p.values):
            q, r = divmod(x, k)
            values[r] = i - q * k
        return Periodic(k, values)
    return ShiftFinite(-p.shift, {t: n for n, t in p.exceptions})


# --- inversions --------------------------------------------------------------


def inversions_ending_at(p: ZPerm, v: int) -> list[int]:
    """All ``u < v`` with ``p(u) > p(v)``."""
    lo, hi = p.displacement_bounds()
    start = v - (hi - lo)
    pv = p(v)
    return [u for u in range(start, v) if p(u) > pv]


def in_affine_group(p: ZPerm, k: int) -> bool:
    """Membership ``p(n + k) = p(n) + k`` for all n."""
    if k < 2:
        raise ZPermError(f"affine membership needs k >= 2, got {k}")
    if isinstance(p, Periodic):
        return k % p.minimal_period() == 0
    return p.is_shift()


def inv_k(p: ZPerm, k: int):
    """Number of k-classes of inversions (``INFINITE`` possible when k = 0)."""
    if k == 1 or k < 0:
        raise ZPermError(f"inv_k needs k = 0 or k >= 2, got {k}")
    if k == 0:
        if isinstance(p, Periodic):
            return 0 if p.is_shift() else INFINITE
        window = p.support_window()
        if window is None:
            return 0
        # every inversion touches an exception, so its right end v lies
        # within the exception hull widened by the displacement spread
        lo, hi = window
        d_lo, d_hi = p.displacement_bounds()
        return sum(len(inversions_ending_at(p, v)) for v in range(lo, hi + d_hi - d_lo + 1))
    if not in_affine_group(p, k):
        raise ZPermError(f"{p!r} is not in the period-{k} group")
    return sum(len(inversions_ending_at(p, v)) for v in range(k))


def reduced_word(q: ZPerm) -> tuple[int, list[int], int]:
    """Write ``q = shift(m) * s_{j1} * ... * s_{jL}`` with L = inv_k(q).

    Returns ``(m, [j1, ..., jL], k)`` where k is the period (0 for
    ShiftFinite).  Descents are removed leftmost first.
    """
    k = q.period if isinstance(q, Periodic) else 0
    cur = q
    descents: list[int] = []
    while True:
        if k:
            candidates: Iterable[int] = range(k)
        else:
            window = cur.support_window()
            candidates = range(window[0] - 1, window[1] + 1) if window else ()
        j = next((j for j in candidates if cur(j) > cur(j + 1)), None)
        if j is None:
            break
        cur = compose(cur, simple_reflection(k, j))
        descents.append(j)
    length = inv_k(q, k)
    if len(descents) != length:
        raise AssertionError(f"word length {len(descents)} != inv {length}")
    return cur.shift, descents[::-1], k


def demazure(p: ZPerm, q: ZPerm) -> ZPerm:
    """Demazure (0-Hecke) product by folding the reduced word of ``q``."""
    if q.is_shift():
        return compose(p, q)
    p, q = _align(p, q)
    m, word, k = reduced_word(q)
    result = compose(p, shift(m))
    for j in word:
        if result(j) < result(j + 1):
            result = compose(result, simple_reflection(k, j))
    return result


def demazure_fold(perms: Iterable[ZPerm]) -> ZPerm:
    out: ZPerm = identity()
    for p in perms:
        out = demazure(out, p)
    return out


# --- s-functions -------------------------------------------------------------


def count_below(p: ZPerm, a: int, b: int) -> int:
    """``#{n >= b : p(n) < a}``."""
    lo, _ = p.displacement_bounds()
    return sum(1 for n in range(b, a - lo) if p(n) < a)


def count_above_before(p: ZPerm, a: int, b: int) -> int:
    """``#{n < b : p(n) > a}``."""
    _, hi = p.displacement_bounds()
    return sum(1 for n in range(a - hi + 1, b) if p(n) > a)


@dataclass(frozen=True)
class SFunction:
    """Windowed integer function on Z^2 with closed-form tails.

    ``band = (lo, hi)``: the value is 0 when ``a - b <= lo`` and
    ``a - b + shift`` when ``a - b >= hi``.  Inside the band it is read from
    ``values``, which covers every b in ``b_range``; with a ``period`` the
    function is invariant under ``(a, b) -> (a + period, b + period)``.
    """

    values: Mapping[tuple[int, int], int]
    b_range: tuple[int, int]
    band: tuple[int, int]
    shift: int
    period: int | None = None

    def __call__(self, a: int, b: int) -> int:
        diff = a - b
        lo, hi = self.band
        if diff <= lo:
            return 0
        if diff >= hi:
            return diff + self.shift
        if self.period:
            t = (b - self.b_range[0]) // self.period
            a -= t * self.period
            b -= t * self.period
        try:
            return self.values[(a, b)]
        except KeyError:
            raise WindowError(f"s({a}, {b}) lies outside the window {self.b_range}") from None

    @property
    def a_range(self) -> tuple[int, int]:
        return self.b_range[0] + self.band[0] + 1, self.b_range[1] + self.band[1] - 1

    def points(self) -> Iterable[tuple[int, int]]:
        """Every (a, b) of the window, band interior plus one cell each side."""
        lo, hi = self.band
        for b in range(self.b_range[0], self.b_range[1] + 1):
            for a in range(b + lo, b + hi + 1):
                yield a, b

    def agrees_with(self, other: "SFunction", b_range: tuple[int, int] | None = None) -> bool:
        lo = min(self.band[0], other.band[0])
        hi = max(self.band[1], other.band[1])
        b_lo, b_hi = b_range or self.b_range
        return all(
            self(a, b) == other(a, b)
            for b in range(b_lo, b_hi + 1)
            for a in range(b + lo - 1, b + hi + 2)
        )


def tabulate(
    f: Callable[[int, int], int],
    b_range: tuple[int, int],
    band: tuple[int, int],
    shift: int,
    period: int | None = None,
) -> SFunction:
    lo, hi = band
    values = {
        (a, b): f(a, b)
        for b in range(b_range[0], b_range[1] + 1)
        for a in range(b + lo + 1, b + hi)
    }
    return SFunction(values, b_range, band, shift, period)


def s_function(p: ZPerm, b_range: tuple[int, int] | None = None) -> SFunction:
    """Windowed ``s_p(a, b) = #{n >= b : p(n) < a}``.

    Default window: one period for Periodic, the exception hull (padded by
    the displacement spread) for ShiftFinite.
    """
    lo, hi = p.displacement_bounds()
    period = p.period if isinstance(p, Periodic) else None
    if b_range is None:
        if period:
            b_range = (0, period - 1)
        else:
            window = p.support_window() or (0, 0)
            spread = hi - lo
            b_range = (window[0] - spread - 1, window[1] + spread + 1)
    return tabulate(lambda a, b: count_below(p, a, b), b_range, (lo, hi), p.shift, period)


def tropical_star(
    s1: SFunction, s2: SFunction, b_range: tuple[int, int] | None = None
) -> SFunction:
    """Min-plus product ``(s1 * s2)(a, b) = min_l s1(a, l) + s2(l, b)``.

    The minimum is attained for ``l`` in ``[b + lo2, b + hi2]`` where
    ``(lo2, hi2)`` is the band of ``s2``; any needed entry missing from the
    operand windows raises :class:`WindowError`.
    """
    lo = s1.band[0] + s2.band[0]
    hi = s1.band[1] + s2.band[1]
    period = None
    if s1.period and s2.period:
        period = s1.period * s2.period // math.gcd(s1.period, s2.period)
    if b_range is None:
        b_range = (0, period - 1) if period else s2.b_range
    lo2, hi2 = s2.band

    def entry(a: int, b: int) -> int:
        return min(s1(a, l) + s2(l, b) for l in range(b + lo2, b + hi2 + 1))

    return tabulate(entry, b_range, (lo, hi), s1.shift + s2.shift, period)


def permutation_from_s(s: SFunction, b_range: tuple[int, int] | None = None):
    """Read off ``tau(b)`` as the unique a with a unit mixed difference.

    Returns a :class:`Periodic` when ``s`` has a period, else a dict
    ``b -> tau(b)`` over ``b_range``.  Raises ZPermError if some column has
    no unique such a (the function is not an s-function of a permutation).
    """
    lo, hi = s.band
    if s.period and b_range is None:
        b_range = (0, s.period - 1)
    b_lo, b_hi = b_range or s.b_range
    tau = {}
    for b in range(b_lo, b_hi + 1):
        hits = []
        for a in range(b + lo, b + hi + 1):
            mixed = s(a + 1, b) - s(a, b) - s(a + 1, b + 1) + s(a, b + 1)
            if mixed < 0 or mixed > 1:
                raise ZPermError(f"mixed difference {mixed} at ({a}, {b})")
            if mixed:
                hits.append(a)
        if len(hits) != 1:
            raise ZPermError(f"column b={b} has {len(hits)} unit entries")
        tau[b] = hits[0]
    if s.period and (b_lo, b_hi) == (0, s.period - 1):
        return Periodic(s.period, [tau[b] for b in range(s.period)])
    return tau


def affine_balance_sets(p: Periodic) -> tuple[set[int], set[int]]:
    """``({n >= 0 : p(n) < 0}, {n < 0 : p(n) >= 0})``, both finite."""
    lo, hi = p.displacement_bounds()
    right = {n for n in range(0, max(0, -lo) + 1) if p(n) < 0}
    left = {n for n in range(min(0, -hi) - 1, 0) if p(n) >= 0}
    return right, left


def tropical_demazure(p: ZPerm, q: ZPerm) -> ZPerm:
    """Demazure product through min-plus multiplication of s-functions.

    Independent of :func:`demazure`: no reduced words, only counting and
    minimization.  ShiftFinite operands are tabulated on a window wide
    enough to contain every exception of the product.
    """
    p, q = _align(p, q)
    if isinstance(p, Periodic):
        return permutation_from_s(tropical_star(s_function(p), s_function(q)))
    hulls = [w for w in (p.support_window(), q.support_window()) if w]
    lo = min([w[0] for w in hulls] + [0])
    hi = max([w[1] for w in hulls] + [0])
    pad = sum(d_hi - d_lo for d_lo, d_hi in (p.displacement_bounds(), q.displacement_bounds()))
    pad += abs(p.shift) + abs(q.shift) + 2
    window = (lo - pad, hi + pad)
    q_lo, q_hi = q.displacement_bounds()
    sq = s_function(q, (window[0], window[1] + 1))
    sp = s_function(p, (window[0] + q_lo, window[1] + 1 + q_hi))
    star = tropical_star(sp, sq, (window[0], window[1] + 1))
    tau = permutation_from_s(star, window)
    return ShiftFinite(p.shift + q.shift, tau)
