"""Shifts of finite type, one-block factor maps, carpet digit systems.

An ``Sft`` is a vertex shift: symbols are vertices of a finite digraph
and a word of length n is a path visiting n vertices (n-1 transition
constraints).  A ``FactorSystem`` pairs an Sft with a one-block letter
map onto an image alphabet.  The image subshift is sofic and is never
presented on its own; every image-side quantity in this package is
derived from the pair (transition matrix, letter map) through the fiber
submatrices stored here.

All types are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Mapping, Optional, Sequence

from .errors import PreconditionError, SpecError

__all__ = [
    "Sft",
    "StructureReport",
    "FactorSystem",
    "CarpetSpec",
    "EventuallyPeriodicPoint",
    "validate_sft",
    "induced_factor",
    "singleton_clumps",
    "carpet_to_factor",
]


@dataclass(frozen=True)
class Sft:
    """A vertex shift given by named symbols and a 0/1 transition matrix.

    ``matrix[i][j] == 1`` means symbol ``symbols[j]`` may follow symbol
    ``symbols[i]``.  Construction rejects stranded symbols: every symbol
    must have at least one outgoing and one incoming transition, so that
    every finite word extends to a point of the shift.

    Examples
    --------
    >>> golden = Sft(("a", "b"), ((1, 1), (1, 0)))
    >>> golden.alphabet_size
    2
    >>> golden.word_count(3)
    5
    """

    symbols: tuple[str, ...]
    matrix: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.symbols:
            raise SpecError("alphabet must be nonempty")
        if len(set(self.symbols)) != len(self.symbols):
            raise SpecError("symbol names must be distinct")
        k = len(self.symbols)
        if len(self.matrix) != k or any(len(row) != k for row in self.matrix):
            raise SpecError("transition matrix must be square over the alphabet")
        for row in self.matrix:
            for entry in row:
                if entry not in (0, 1):
                    raise SpecError("transition entries must be 0 or 1")
        for i in range(k):
            if not any(self.matrix[i]):
                raise SpecError(f"symbol {self.symbols[i]!r} has no outgoing transition")
            if not any(self.matrix[j][i] for j in range(k)):
                raise SpecError(f"symbol {self.symbols[i]!r} has no incoming transition")

    @classmethod
    def from_edges(cls, symbols: Sequence[str], edges: Sequence[tuple[str, str]]) -> "Sft":
        """Build from an explicit edge list of (source, target) name pairs."""
        symbols = tuple(symbols)
        index = {s: i for i, s in enumerate(symbols)}
        rows = [[0] * len(symbols) for _ in symbols]
        for src, dst in edges:
            if src not in index or dst not in index:
                raise SpecError(f"edge ({src!r}, {dst!r}) mentions an unknown symbol")
            rows[index[src]][index[dst]] = 1
        return cls(symbols, tuple(tuple(row) for row in rows))

    @property
    def alphabet_size(self) -> int:
        return len(self.symbols)

    @cached_property
    def index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.symbols)}

    @cached_property
    def successor_sets(self) -> tuple[tuple[int, ...], ...]:
        return tuple(
            tuple(j for j, e in enumerate(row) if e) for row in self.matrix
        )

    def word_count(self, n: int) -> int:
        """Exact number of length-n words, via integer matrix powers."""
        if n < 1:
            raise PreconditionError("word length must be >= 1")
        k = self.alphabet_size
        vec = [1] * k
        # vec[i] = number of words of the current length ending at i
        for _ in range(n - 1):
            vec = [
                sum(vec[i] for i in range(k) if self.matrix[i][j])
                for j in range(k)
            ]
        return sum(vec)


@dataclass(frozen=True)
class StructureReport:
    """Connectivity facts about an Sft needed by the pressure bounds.

    ``mixing_index`` is the least M with every entry of A^M positive; it
    is present exactly when the shift is topologically mixing and obeys
    the Wielandt bound M <= (k - 1)^2 + 1.
    """

    irreducible: bool
    mixing: bool
    mixing_index: Optional[int]
    period: int


def _strongly_connected(sft: Sft) -> bool:
    k = sft.alphabet_size
    succ = sft.successor_sets

    def reach(start, forward):
        seen = {start}
        stack = [start]
        while stack:
            u = stack.pop()
            if forward:
                nxt = succ[u]
            else:
                nxt = [v for v in range(k) if sft.matrix[v][u]]
            for v in nxt:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    return len(reach(0, True)) == k and len(reach(0, False)) == k


def _cycle_gcd(sft: Sft) -> int:
    # gcd of all cycle lengths, computed per strongly connected component
    # from BFS level discrepancies.  Every essential SFT has a cycle.
    k = sft.alphabet_size
    succ = sft.successor_sets
    comp = _scc_ids(sft)
    g = 0
    for cid in set(comp):
        nodes = [v for v in range(k) if comp[v] == cid]
        has_internal_edge = any(comp[w] == cid for v in nodes for w in succ[v])
        if not has_internal_edge:
            continue
        root = nodes[0]
        level = {root: 0}
        queue = [root]
        local = 0
        while queue:
            u = queue.pop(0)
            for v in succ[u]:
                if comp[v] != cid:
                    continue
                if v not in level:
                    level[v] = level[u] + 1
                    queue.append(v)
                else:
                    local = gcd(local, level[u] + 1 - level[v])
        g = gcd(g, abs(local))
    return g if g else 1


def _scc_ids(sft: Sft) -> list[int]:
    return strongly_connected_components(sft.successor_sets)


def strongly_connected_components(succ: Sequence[Sequence[int]]) -> list[int]:
    # Iterative Tarjan; graphs here are tiny but recursion-free keeps
    # the routine safe for generated inputs.
    k = len(succ)
    index = [None] * k
    low = [0] * k
    on_stack = [False] * k
    comp = [-1] * k
    stack: list[int] = []
    counter = 0
    ncomp = 0
    for root in range(k):
        if index[root] is not None:
            continue
        work = [(root, 0)]
        while work:
            v, pi = work[-1]
            if pi == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            recurse = False
            for i in range(pi, len(succ[v])):
                w = succ[v][i]
                if index[w] is None:
                    work[-1] = (v, i + 1)
                    work.append((w, 0))
                    recurse = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp[w] = ncomp
                    if w == v:
                        break
                ncomp += 1
            work.pop()
            if work:
                u, _ = work[-1]
                low[u] = min(low[u], low[v])
    return comp


def validate_sft(sft: Sft) -> StructureReport:
    """Report irreducibility, period, mixing, and the minimal mixing power.

    Examples
    --------
    >>> validate_sft(Sft(("a", "b"), ((1, 1), (1, 1))))
    StructureReport(irreducible=True, mixing=True, mixing_index=1, period=1)
    >>> validate_sft(Sft(("a", "b"), ((1, 1), (1, 0)))).mixing_index
    2
    >>> r = validate_sft(Sft(("a", "b"), ((0, 1), (1, 0))))
    >>> (r.irreducible, r.mixing, r.period)
    (True, False, 2)
    """
    irreducible = _strongly_connected(sft)
    period = _cycle_gcd(sft)
    mixing = irreducible and period == 1
    mixing_index = None
    if mixing:
        k = sft.alphabet_size
        full = (1 << k) - 1
        base = [
            sum(1 << j for j, e in enumerate(row) if e) for row in sft.matrix
        ]
        power = list(base)
        bound = (k - 1) ** 2 + 1
        for m in range(1, bound + 1):
            if all(row == full for row in power):
                mixing_index = m
                break
            power = [
                _or_rows(power[i], base) for i in range(k)
            ]
        if mixing_index is None:
            # unreachable for a mixing matrix by the Wielandt bound
            raise SpecError("mixing power not found within the Wielandt bound")
    return StructureReport(irreducible, mixing, mixing_index, period)


def _or_rows(mask: int, rows: list[int]) -> int:
    out = 0
    i = 0
    while mask:
        if mask & 1:
            out |= rows[i]
        mask >>= 1
        i += 1
    return out


@dataclass(frozen=True)
class FactorSystem:
    """An Sft together with a one-block letter map onto an image alphabet.

    ``letter_map`` sends every source symbol to an image letter; the
    image alphabet is exactly the range of the map, so no fiber is ever
    empty.  ``fiber_blocks[(a, b)]`` is the submatrix of the transition
    matrix with rows restricted to the fiber of ``a`` and columns to the
    fiber of ``b``; products of these blocks drive all lift counting.
    """

    source: Sft
    letter_map: Mapping[str, str] = field(compare=False)
    _map_items: tuple[tuple[str, str], ...] = field(init=False, repr=False)

    def __post_init__(self):
        missing = [s for s in self.source.symbols if s not in self.letter_map]
        if missing:
            raise SpecError(f"letter map undefined on symbols {missing}")
        extra = [s for s in self.letter_map if s not in self.source.index]
        if extra:
            raise SpecError(f"letter map mentions unknown symbols {extra}")
        object.__setattr__(
            self,
            "_map_items",
            tuple((s, self.letter_map[s]) for s in self.source.symbols),
        )

    def __eq__(self, other):
        if not isinstance(other, FactorSystem):
            return NotImplemented
        return self.source == other.source and self._map_items == other._map_items

    def __hash__(self):
        return hash((self.source, self._map_items))

    @cached_property
    def image_alphabet(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.letter_map.values())))

    @cached_property
    def image_index(self) -> dict[str, int]:
        return {b: i for i, b in enumerate(self.image_alphabet)}

    @cached_property
    def fibers(self) -> tuple[tuple[int, ...], ...]:
        """For each image letter index, the source-symbol indices above it."""
        groups: list[list[int]] = [[] for _ in self.image_alphabet]
        for x, name in enumerate(self.source.symbols):
            groups[self.image_index[self.letter_map[name]]].append(x)
        return tuple(tuple(g) for g in groups)

    @cached_property
    def fiber_blocks(self) -> dict[tuple[int, int], tuple[tuple[int, ...], ...]]:
        blocks = {}
        A = self.source.matrix
        for a, rows in enumerate(self.fibers):
            for b, cols in enumerate(self.fibers):
                blocks[(a, b)] = tuple(
                    tuple(A[i][j] for j in cols) for i in rows
                )
        return blocks

    def fiber_symbols(self, letter: str) -> tuple[str, ...]:
        """Source symbol names above one image letter."""
        if letter not in self.image_index:
            raise SpecError(f"unknown image letter {letter!r}")
        return tuple(
            self.source.symbols[x] for x in self.fibers[self.image_index[letter]]
        )


def induced_factor(sft: Sft, letter_map: Mapping[str, str]) -> FactorSystem:
    """Materialize the factor system for a letter map on ``sft``.

    Examples
    --------
    >>> s = Sft(("p", "q"), ((1, 1), (1, 0)))
    >>> fs = induced_factor(s, {"p": "x", "q": "x"})
    >>> fs.image_alphabet
    ('x',)
    """
    return FactorSystem(sft, dict(letter_map))


def singleton_clumps(fs: FactorSystem) -> list[str]:
    """Image letters whose fiber is a single source symbol, sorted.

    Such a letter pins its lift symbol exactly, which is what makes the
    measure of full dimension unique downstream.
    """
    return sorted(
        b
        for b, fiber in zip(fs.image_alphabet, fs.fibers)
        if len(fiber) == 1
    )


@dataclass(frozen=True)
class CarpetSpec:
    """A self-affine carpet on the torus coded by a digit SFT.

    The torus map expands by ``l`` horizontally and ``m`` vertically with
    ``l > m >= 2``.  ``digits`` lists the selected cells (a, b) of the
    l-by-m digit grid; ``transitions`` is either the string ``"full"``
    (every digit may follow every digit) or a tuple of (i, j) index pairs
    into ``digits``.
    """

    l: int
    m: int
    digits: tuple[tuple[int, int], ...]
    transitions: object = "full"

    def __post_init__(self):
        if not (self.l > self.m >= 2):
            raise SpecError("carpet requires l > m >= 2")
        if not self.digits:
            raise SpecError("carpet requires at least one digit")
        seen = set()
        for a, b in self.digits:
            if not (0 <= a < self.l and 0 <= b < self.m):
                raise SpecError(f"digit ({a}, {b}) outside the {self.l}x{self.m} grid")
            if (a, b) in seen:
                raise SpecError(f"duplicate digit ({a}, {b})")
            seen.add((a, b))
        if self.transitions != "full":
            n = len(self.digits)
            for i, j in self.transitions:
                if not (0 <= i < n and 0 <= j < n):
                    raise SpecError(f"transition ({i}, {j}) outside the digit list")

    def alpha(self) -> float:
        """log l / log m - 1, strictly positive because l > m."""
        return math.log(self.l) / math.log(self.m) - 1.0

    def theta(self) -> float:
        """The partition-sum exponent 1 / (alpha + 1) = log m / log l."""
        return math.log(self.m) / math.log(self.l)

    def row_occupancy(self) -> tuple[int, ...]:
        """Number of selected digits in each of the m rows."""
        counts = [0] * self.m
        for _, b in self.digits:
            counts[b] += 1
        return tuple(counts)

    def is_full_shift(self) -> bool:
        return self.transitions == "full"

    def digit_symbol(self, pair: tuple[int, int]) -> str:
        a, b = pair
        return f"{a}.{b}"


def carpet_to_factor(spec: CarpetSpec) -> tuple[FactorSystem, float]:
    """Turn a carpet into its digit SFT factored onto row letters.

    The source shift lives on the digit pairs; the letter map projects a
    digit (a, b) to the row letter ``str(b)``.  Returns the factor system
    and alpha = log l / log m - 1.

    Examples
    --------
    >>> spec = CarpetSpec(3, 2, ((0, 0), (2, 0), (1, 1)))
    >>> fs, alpha = carpet_to_factor(spec)
    >>> fs.image_alphabet
    ('0', '1')
    >>> fs.fiber_symbols("0")
    ('0.0', '2.0')
    >>> round(alpha, 6)
    0.584963
    """
    names = tuple(spec.digit_symbol(p) for p in spec.digits)
    n = len(names)
    if spec.is_full_shift():
        matrix = tuple(tuple(1 for _ in range(n)) for _ in range(n))
    else:
        rows = [[0] * n for _ in range(n)]
        for i, j in spec.transitions:
            rows[i][j] = 1
        matrix = tuple(tuple(row) for row in rows)
    sft = Sft(names, matrix)
    letter_map = {
        name: str(b) for name, (_, b) in zip(names, spec.digits)
    }
    return FactorSystem(sft, letter_map), spec.alpha()


@dataclass(frozen=True)
class EventuallyPeriodicPoint:
    """An image point given by a finite preperiod and a repeating cycle.

    Membership in the image subshift is decided by the counting engine
    (nonempty viable lift states), not presumed here; this type only
    carries the combinatorial description.
    """

    preperiod: tuple[str, ...]
    cycle: tuple[str, ...]

    def __post_init__(self):
        if not self.cycle:
            raise SpecError("cycle word must be nonempty")

    def letter(self, i: int) -> str:
        """Letter at 0-based position i."""
        r = len(self.preperiod)
        if i < r:
            return self.preperiod[i]
        return self.cycle[(i - r) % len(self.cycle)]

    def head(self, n: int) -> tuple[str, ...]:
        return tuple(self.letter(i) for i in range(n))

    def shift(self, k: int = 1) -> "EventuallyPeriodicPoint":
        """The point with the first k letters dropped."""
        if k < 0:
            raise PreconditionError("shift amount must be >= 0")
        r = len(self.preperiod)
        if k <= r:
            return EventuallyPeriodicPoint(self.preperiod[k:], self.cycle)
        rot = (k - r) % len(self.cycle)
        return EventuallyPeriodicPoint(
            (), self.cycle[rot:] + self.cycle[:rot]
        )
