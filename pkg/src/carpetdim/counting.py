"""Exact lift counting and log-domain partition sums.

Counts are Python integers throughout, so nothing saturates; only the
final transcendental step (log, fractional powers) leaves the exact
domain, and every log-domain accumulation carries a rounding-operation
counter from which an error bound is derived.

The partition sum S_n adds count(w)^theta over all occurring image
words w of length n.  The sum is nonlinear in the counts, so there is
no single transfer matrix; the sub-exponential lever is that the
per-symbol count vector propagates linearly, hence two prefixes with
proportional vectors generate subtrees whose sums differ by the exact
scalar c^theta.  Collapsed mode memoizes subtrees on the gcd-normalized
vector for this reason.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from math import gcd
from typing import Optional

from .errors import PreconditionError, ResourceError, SpecError
from .sft import EventuallyPeriodicPoint, FactorSystem

__all__ = [
    "DEFAULT_NODE_BUDGET",
    "LogReal",
    "FiberVector",
    "PartitionSum",
    "CollapsedEngine",
    "preimage_count",
    "brute_force_count",
    "image_word_counts",
    "partition_sum",
    "partition_series",
    "dn_count",
    "is_image_point",
    "viable_sets",
]

DEFAULT_NODE_BUDGET = 50_000_000
_BUDGET_ENV = "CARPETDIM_NODE_BUDGET"
_EPS = 2.0 ** -52


def resolve_node_budget(explicit: Optional[int]) -> int:
    if explicit is not None:
        if explicit < 1:
            raise PreconditionError("node budget must be >= 1")
        return explicit
    raw = os.environ.get(_BUDGET_ENV)
    if raw is not None:
        try:
            value = int(raw)
        except ValueError:
            raise SpecError(f"{_BUDGET_ENV} must be an integer, got {raw!r}")
        if value < 1:
            raise SpecError(f"{_BUDGET_ENV} must be >= 1")
        return value
    return DEFAULT_NODE_BUDGET


class LogReal:
    """A nonnegative real stored as its natural log with a tracked bound.

    ``err`` bounds the absolute error of ``log``, which is the relative
    error of the represented value to first order.  Addition is an
    order-stable two-term log-sum-exp; because the terms are
    nonnegative, the result's log error is a convex combination of the
    input errors, so the bound combines by max plus the per-operation
    rounding.  Multiplication adds logs, so there the bounds add.
    """

    __slots__ = ("log", "err")

    def __init__(self, log: float, err: float = 0.0):
        self.log = log
        self.err = err

    @classmethod
    def zero(cls) -> "LogReal":
        return cls(float("-inf"), 0.0)

    @classmethod
    def from_int(cls, n: int) -> "LogReal":
        # math.log accepts arbitrary-precision ints without overflow
        if n < 0:
            raise PreconditionError("LogReal represents nonnegative reals")
        if n == 0:
            return cls.zero()
        lv = math.log(n)
        return cls(lv, _EPS * (abs(lv) + 1.0))

    def is_zero(self) -> bool:
        return self.log == float("-inf")

    def add(self, other: "LogReal") -> "LogReal":
        if self.is_zero():
            return LogReal(other.log, other.err)
        if other.is_zero():
            return LogReal(self.log, self.err)
        hi, lo = (self.log, other.log) if self.log >= other.log else (other.log, self.log)
        out = hi + math.log1p(math.exp(lo - hi))
        return LogReal(out, max(self.err, other.err) + _EPS * (abs(out) + 3.0))

    def times(self, other: "LogReal") -> "LogReal":
        if self.is_zero() or other.is_zero():
            return LogReal.zero()
        out = self.log + other.log
        return LogReal(out, self.err + other.err + _EPS * (abs(out) + 1.0))

    def scaled_by_log(self, dlog: float) -> "LogReal":
        """Multiply by e^dlog, charging for dlog's own float rounding."""
        if self.is_zero():
            return LogReal.zero()
        out = self.log + dlog
        return LogReal(out, self.err + _EPS * (3.0 * abs(dlog) + abs(out) + 1.0))

    def powered(self, exponent: float) -> "LogReal":
        if self.is_zero():
            return LogReal.zero()
        out = self.log * exponent
        return LogReal(out, self.err * abs(exponent) + _EPS * (abs(out) + 1.0))

    @property
    def value(self) -> float:
        return math.exp(self.log)

    @property
    def err_bound(self) -> float:
        return self.err

    def __repr__(self):
        return f"LogReal(log={self.log!r}, err={self.err!r})"


@dataclass(frozen=True)
class FiberVector:
    """Per-symbol lift counts over the fiber of one image letter.

    ``counts[i]`` is the number of source words realizing the current
    image prefix and ending at the i-th symbol of the fiber.
    """

    image_letter: str
    counts: tuple[int, ...]

    def total(self) -> int:
        return sum(self.counts)

    def is_zero(self) -> bool:
        return not any(self.counts)

    def normalized(self) -> tuple[int, "FiberVector"]:
        """Extract the gcd; returns (scale, primitive vector)."""
        g = 0
        for c in self.counts:
            g = gcd(g, c)
        if g <= 1:
            return max(g, 1), self
        return g, FiberVector(self.image_letter, tuple(c // g for c in self.counts))


def _advance(vec: tuple[int, ...], block: tuple[tuple[int, ...], ...]) -> tuple[int, ...]:
    # row vector times 0/1 block, exact integers
    cols = len(block[0]) if block else 0
    return tuple(
        sum(vec[i] for i in range(len(vec)) if block[i][j])
        for j in range(cols)
    )


def _normalize(vec: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    g = 0
    for c in vec:
        g = gcd(g, c)
    if g <= 1:
        return 1, vec
    return g, tuple(c // g for c in vec)


def preimage_count(fs: FactorSystem, word: tuple[str, ...]) -> int:
    """Exact number of source words mapping letterwise onto ``word``.

    Computed as the grand sum of the product of fiber blocks along the
    word applied to the all-ones vector.  Words not in the image
    language (including words with unknown letters) count 0.
    """
    if not word:
        raise PreconditionError("word must be nonempty")
    idx = fs.image_index
    if any(letter not in idx for letter in word):
        return 0
    b = idx[word[0]]
    vec = tuple(1 for _ in fs.fibers[b])
    for letter in word[1:]:
        b2 = idx[letter]
        vec = _advance(vec, fs.fiber_blocks[(b, b2)])
        if not any(vec):
            return 0
        b = b2
    return sum(vec)


def brute_force_count(fs: FactorSystem, word: tuple[str, ...], limit: int = 12) -> int:
    """Independent oracle for ``preimage_count``: explicit DFS, no matrices."""
    if not word:
        raise PreconditionError("word must be nonempty")
    if len(word) > limit:
        raise PreconditionError(
            f"brute-force oracle refuses words longer than {limit}"
        )
    idx = fs.image_index
    if any(letter not in idx for letter in word):
        return 0
    sft = fs.source
    fibers_by_letter = [
        set(fs.fibers[idx[letter]]) for letter in word
    ]
    total = 0
    stack = [(0, x) for x in sorted(fibers_by_letter[0], reverse=True)]
    while stack:
        depth, x = stack.pop()
        if depth == len(word) - 1:
            total += 1
            continue
        for y in sft.successor_sets[x]:
            if y in fibers_by_letter[depth + 1]:
                stack.append((depth + 1, y))
    return total


def image_word_counts(fs: FactorSystem, n: int) -> dict[tuple[str, ...], int]:
    """All occurring image words of length n with their lift counts.

    Enumerates source paths one by one and buckets them by image word,
    so it is matrix-free and doubles as an exhaustive oracle.  Cost is
    the number of source words of length n; keep n small.
    """
    if n < 1:
        raise PreconditionError("word length must be >= 1")
    sft = fs.source
    letter_of = [fs.letter_map[s] for s in sft.symbols]
    out: dict[tuple[str, ...], int] = {}
    path: list[int] = []

    def walk(x, depth):
        path.append(x)
        if depth == n:
            key = tuple(letter_of[i] for i in path)
            out[key] = out.get(key, 0) + 1
        else:
            for y in sft.successor_sets[x]:
                walk(y, depth + 1)
        path.pop()

    for x in range(sft.alphabet_size):
        walk(x, 1)
    return out


@dataclass(frozen=True)
class PartitionSum:
    """log S_n plus the word count and search-effort counters."""

    n: int
    theta: float
    value: LogReal
    word_count: int
    visited_nodes: int
    collapsed_nodes: int
    mode: str

    @property
    def log_value(self) -> float:
        return self.value.log


class CollapsedEngine:
    """Shared memo table for proportional-vector-collapsed prefix sums.

    ``suffix_sum(b, vec, d)`` returns (sum over all d-letter extensions
    s of the current prefix of final_count^theta, word count), where the
    prefix ends in image letter b with gcd-normalized count vector vec.
    Two prefixes with proportional vectors share the entry; the caller
    applies the scalar gcd^theta once per subtree.
    """

    def __init__(self, fs: FactorSystem, theta: float, node_budget: Optional[int] = None):
        if not (0.0 < theta <= 1.0):
            raise PreconditionError("theta must be in (0, 1]")
        self.fs = fs
        self.theta = theta
        self.budget = resolve_node_budget(node_budget)
        self.visited = 0
        self._memo: dict[tuple[int, tuple[int, ...], int], tuple[LogReal, int]] = {}
        self._letters = range(len(fs.image_alphabet))

    @property
    def collapsed_nodes(self) -> int:
        return len(self._memo)

    def _tick(self):
        self.visited += 1
        if self.visited > self.budget:
            raise ResourceError(
                f"node budget exceeded ({self.budget} nodes); "
                f"raise the budget or lower the depth"
            )

    def suffix_sum(self, b: int, vec: tuple[int, ...], d: int) -> tuple[LogReal, int]:
        self._tick()
        key = (b, vec, d)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if d == 0:
            total = sum(vec)
            result = (LogReal.from_int(total).powered(self.theta), 1)
        else:
            acc = LogReal.zero()
            words = 0
            blocks = self.fs.fiber_blocks
            for b2 in self._letters:
                nxt = _advance(vec, blocks[(b, b2)])
                if not any(nxt):
                    continue
                g, prim = _normalize(nxt)
                sub, wc = self.suffix_sum(b2, prim, d - 1)
                if g > 1:
                    sub = sub.scaled_by_log(self.theta * math.log(g))
                acc = acc.add(sub)
                words += wc
            result = (acc, words)
        self._memo[key] = result
        return result

    def partition(self, n: int) -> PartitionSum:
        if n < 1:
            raise PreconditionError("depth must be >= 1")
        acc = LogReal.zero()
        words = 0
        for b in self._letters:
            ones = tuple(1 for _ in self.fs.fibers[b])
            sub, wc = self.suffix_sum(b, ones, n - 1)
            acc = acc.add(sub)
            words += wc
        return PartitionSum(
            n, self.theta, acc, words, self.visited, self.collapsed_nodes, "collapsed"
        )


def _exact_partition(fs: FactorSystem, n: int, theta: float, budget: int) -> PartitionSum:
    letters = range(len(fs.image_alphabet))
    blocks = fs.fiber_blocks
    acc = LogReal.zero()
    words = 0
    visited = 0
    # depth-first over the pruned prefix tree, letters in fixed order so
    # the accumulation order is deterministic
    stack = [
        (b, tuple(1 for _ in fs.fibers[b]), 1)
        for b in reversed(letters)
    ]
    while stack:
        b, vec, depth = stack.pop()
        visited += 1
        if visited > budget:
            raise ResourceError(
                f"node budget exceeded ({budget} nodes); "
                f"use collapsed mode, raise the budget, or lower the depth"
            )
        if depth == n:
            acc = acc.add(LogReal.from_int(sum(vec)).powered(theta))
            words += 1
            continue
        for b2 in reversed(letters):
            nxt = _advance(vec, blocks[(b, b2)])
            if any(nxt):
                stack.append((b2, nxt, depth + 1))
    return PartitionSum(n, theta, acc, words, visited, 0, "exact")


def partition_sum(
    fs: FactorSystem,
    n: int,
    theta: float,
    mode: str = "collapsed",
    node_budget: Optional[int] = None,
) -> PartitionSum:
    """S_n = sum of count(w)^theta over occurring image words of length n.

    ``mode="exact"`` walks the full pruned prefix tree; ``"collapsed"``
    memoizes on (letter, remaining depth, normalized vector) and agrees
    with exact up to tracked rounding error.  Exceeding the node budget
    raises ResourceError rather than truncating.
    """
    if n < 1:
        raise PreconditionError("depth must be >= 1")
    if not (0.0 < theta <= 1.0):
        raise PreconditionError("theta must be in (0, 1]")
    if mode == "exact":
        return _exact_partition(fs, n, theta, resolve_node_budget(node_budget))
    if mode == "collapsed":
        return CollapsedEngine(fs, theta, node_budget).partition(n)
    raise PreconditionError(f"unknown mode {mode!r}")


def partition_series(
    fs: FactorSystem,
    n_max: int,
    theta: float,
    node_budget: Optional[int] = None,
    engine: Optional[CollapsedEngine] = None,
) -> list[PartitionSum]:
    """S_1 .. S_{n_max} from one shared collapsed memo table."""
    if n_max < 1:
        raise PreconditionError("depth must be >= 1")
    eng = engine if engine is not None else CollapsedEngine(fs, theta, node_budget)
    return [eng.partition(n) for n in range(1, n_max + 1)]


def _cycle_viable(fs: FactorSystem, cycle: tuple[str, ...]) -> list[set[int]]:
    # Greatest fixed point of "has a successor in the next fiber" on the
    # product of the source graph with the cyclic tail automaton.
    idx = fs.image_index
    q = len(cycle)
    for letter in cycle:
        if letter not in idx:
            return [set() for _ in range(q)]
    fibers = [set(fs.fibers[idx[letter]]) for letter in cycle]
    viable = [set(f) for f in fibers]
    succ = fs.source.successor_sets
    changed = True
    while changed:
        changed = False
        for j in range(q):
            nxt = viable[(j + 1) % q]
            keep = {
                x for x in viable[j]
                if any(y in nxt for y in succ[x])
            }
            if keep != viable[j]:
                viable[j] = keep
                changed = True
    return viable


def viable_sets(fs: FactorSystem, point: EventuallyPeriodicPoint, upto: int) -> list[set[int]]:
    """Viable lift symbols at positions 0..upto-1 of the point.

    A symbol is viable at position i when some infinite lift of the tail
    from position i starts there.  Empty set at position 0 means the
    point is not in the image subshift.
    """
    if upto < 1:
        raise PreconditionError("need at least one position")
    idx = fs.image_index
    r = len(point.preperiod)
    q = len(point.cycle)
    cyc = _cycle_viable(fs, point.cycle)
    succ = fs.source.successor_sets

    def tail_viable(i: int) -> set[int]:
        return cyc[(i - r) % q]

    sets: dict[int, set[int]] = {}
    top = max(upto, r + 1)
    for i in range(top, -1, -1):
        if i >= r:
            sets[i] = tail_viable(i)
            continue
        letter = point.preperiod[i]
        if letter not in idx:
            sets[i] = set()
            continue
        fiber = fs.fibers[idx[letter]]
        nxt = sets[i + 1]
        sets[i] = {
            x for x in fiber if any(y in nxt for y in succ[x])
        }
    return [sets[i] for i in range(upto)]


def is_image_point(fs: FactorSystem, point: EventuallyPeriodicPoint) -> bool:
    """Whether the point lies in the image subshift (has an infinite lift)."""
    return bool(viable_sets(fs, point, 1)[0])


def dn_count(fs: FactorSystem, point: EventuallyPeriodicPoint, n: int) -> int:
    """Number of length-n lift prefixes that extend to full lifts of the point.

    Counts source words x_1..x_n in the fibers of the first n letters
    whose last symbol is tail-viable; every such word is the prefix of an
    infinite lift, and conversely.
    """
    if n < 1:
        raise PreconditionError("depth must be >= 1")
    sets = viable_sets(fs, point, n)
    if not sets[0]:
        return 0
    A = fs.source.matrix
    counts = {x: 1 for x in sorted(sets[0])}
    for i in range(1, n):
        nxt: dict[int, int] = {}
        for y in sorted(sets[i]):
            c = sum(cnt for x, cnt in counts.items() if A[x][y])
            if c:
                nxt[y] = c
        counts = nxt
        if not counts:
            return 0
    return sum(counts.values())
