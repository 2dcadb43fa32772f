"""Finite-depth cylinder measures and the scans built on them.

The depth-l partition measure weights each image word u of length l by
count(u)^theta / S_l.  Everything here is a finite, exactly-defined
marginal or average of that measure: no sampling, no truncation of the
defining sums.  The gcd trick from the counting engine applies verbatim
because every mass is a sum of count^theta terms over word extensions,
and those sums scale by g^theta when the count vector scales by g.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional

from .counting import CollapsedEngine, LogReal, _advance, _normalize, resolve_node_budget
from .errors import NonMixingError, PreconditionError, ResourceError
from .pressure import (
    PressureEstimate,
    pressure_interval,
    superadditive_constants,
)
from .sft import FactorSystem, singleton_clumps, validate_sft

__all__ = [
    "CylinderDistribution",
    "GibbsEnvelope",
    "AdditivityScanReport",
    "UniquenessReport",
    "DEFAULT_REFUTATION_THRESHOLD",
    "nu_marginal",
    "gibbs_scan",
    "cesaro_average",
    "cesaro_defect",
    "additivity_scan",
    "uniqueness_report",
]

DEFAULT_REFUTATION_THRESHOLD = 0.01


@dataclass(frozen=True)
class CylinderDistribution:
    """A probability assignment to depth-n image cylinders.

    ``kind`` records the construction: ``nu_l_marginal`` for the depth-n
    marginal of the level-``level`` partition measure, ``cesaro`` for a
    finite Cesaro average of its shifts.  Masses always sum to 1 up to
    rounding, which the test suite asserts at 1e-10.
    """

    depth: int
    kind: str
    masses: dict[tuple[str, ...], float]
    level: int

    def total(self) -> float:
        return sum(self.masses.values())

    def mass(self, word: tuple[str, ...]) -> float:
        return self.masses.get(tuple(word), 0.0)


@dataclass(frozen=True)
class GibbsEnvelope:
    """Observed cylinder-mass ratios against their theoretical envelope.

    The scanned ratio is mass(w) * e^(n P) / count(w)^theta with the
    upper pressure bound standing in for P, so full-shift systems come
    out at exactly 1 up to rounding.  The envelope ends use the pressure
    interval conservatively: C1 with the upper bound, C2 with the lower.
    """

    C1_lower: float
    C2_upper: float
    min_ratio: float
    max_ratio: float
    pressure_interval_used: PressureEstimate
    level: int
    n_max: int

    @property
    def contained(self) -> bool:
        return self.C1_lower <= self.min_ratio and self.max_ratio <= self.C2_upper


@dataclass(frozen=True)
class AdditivityScanReport:
    """Concatenation-ratio extremes count(uv) / (count(u) count(v)).

    ``min_trend[k-1]`` is the minimum ratio over all pairs with both
    factor lengths at most k, so the series is nonincreasing by
    construction; a genuine almost-additivity failure shows up as a
    strictly decreasing tail heading under the threshold.  ``witness``
    is a concrete pair attaining ``min_ratio``.
    """

    max_len: int
    min_ratio: float
    max_ratio: float
    min_trend: tuple[float, ...]
    verdict: str
    witness: Optional[tuple[tuple[str, ...], tuple[str, ...]]]
    threshold: float


@dataclass(frozen=True)
class UniquenessReport:
    """Verdict record for uniqueness of the full-dimension measure."""

    singleton_clump: bool
    clump_letters: tuple[str, ...]
    almost_additive_evidence: str
    conclusion: str


def _words_up_to(fs: FactorSystem, n_max: int) -> Iterator[
    tuple[tuple[str, ...], int, tuple[int, ...]]
]:
    # Depth-first over occurring image words, letters in alphabet order;
    # yields (word, last letter index, exact count vector) at every depth.
    blocks = fs.fiber_blocks
    letters = range(len(fs.image_alphabet))
    names = fs.image_alphabet

    def rec(b, vec, word):
        yield word, b, vec
        if len(word) == n_max:
            return
        for b2 in letters:
            nxt = _advance(vec, blocks[(b, b2)])
            if any(nxt):
                yield from rec(b2, nxt, word + (names[b2],))

    for b in letters:
        ones = tuple(1 for _ in fs.fibers[b])
        yield from rec(b, ones, (names[b],))


def _words_at(fs: FactorSystem, n: int):
    for word, b, vec in _words_up_to(fs, n):
        if len(word) == n:
            yield word, b, vec


def nu_marginal(
    fs: FactorSystem,
    theta: float,
    level: int,
    depth: int,
    node_budget: Optional[int] = None,
    engine: Optional[CollapsedEngine] = None,
) -> CylinderDistribution:
    """Depth-``depth`` marginal of the level-``level`` partition measure.

    mass(w) = sum over length-``level`` words u extending w of
    count(u)^theta, divided by S_level.  The inner sum is a collapsed
    suffix sum, so the marginal at any depth costs little more than
    S_level itself.
    """
    if depth < 1:
        raise PreconditionError("depth must be >= 1")
    if level < depth:
        raise PreconditionError("level must be >= depth")
    eng = engine if engine is not None else CollapsedEngine(fs, theta, node_budget)
    total = eng.partition(level).value
    masses: dict[tuple[str, ...], float] = {}
    for word, b, vec in _words_at(fs, depth):
        g, prim = _normalize(vec)
        sub, _ = eng.suffix_sum(b, prim, level - depth)
        if sub.is_zero():
            continue
        log_mass = sub.log - total.log
        if g > 1:
            log_mass += theta * math.log(g)
        masses[word] = math.exp(log_mass)
    return CylinderDistribution(depth=depth, kind="nu_l_marginal", masses=masses, level=level)


def gibbs_scan(
    fs: FactorSystem,
    theta: float,
    level: int,
    n_max: int,
    node_budget: Optional[int] = None,
) -> GibbsEnvelope:
    """Scan mass-versus-count ratios on all cylinders of length <= n_max.

    For each occurring word w the observed ratio is
    mass_level(w) * e^(n * P_hi) / count(w)^theta, P_hi being the upper
    pressure bound at depth ``level``.  The envelope is
    [e^(-M P_hi) / K_tilde^2, K K_tilde e^(-M P_lo)].  Requires a mixing
    source and level > n_max + M so every suffix crosses a mixing window.
    """
    if n_max < 1:
        raise PreconditionError("n_max must be >= 1")
    eng = CollapsedEngine(fs, theta, node_budget)
    constants = superadditive_constants(fs, theta, engine=eng)
    if level <= n_max + constants.M:
        raise PreconditionError(
            f"level must exceed n_max + mixing index = {n_max + constants.M}"
        )
    estimate = pressure_interval(fs, theta, level, engine=eng, constants=constants)
    total = eng.partition(level).value
    p_hat = estimate.upper
    lo = math.inf
    hi = -math.inf
    for word, b, vec in _words_up_to(fs, n_max):
        n = len(word)
        _, prim = _normalize(vec)
        sub, _ = eng.suffix_sum(b, prim, level - n)
        if sub.is_zero():
            continue
        # the gcd cancels between the mass and count(w)^theta
        log_obs = sub.log - total.log + n * p_hat - theta * math.log(sum(prim))
        ratio = math.exp(log_obs)
        lo = min(lo, ratio)
        hi = max(hi, ratio)
    M = constants.M
    c1 = math.exp(-M * estimate.upper - 2.0 * constants.log_K_tilde)
    c2 = math.exp(math.log(constants.K) + constants.log_K_tilde - M * estimate.lower)
    return GibbsEnvelope(
        C1_lower=c1,
        C2_upper=c2,
        min_ratio=lo,
        max_ratio=hi,
        pressure_interval_used=estimate,
        level=level,
        n_max=n_max,
    )


def _forward_states(fs: FactorSystem, theta: float, steps: int):
    # states[i-1]: dict (letter, normalized vector) -> log sum over all
    # occurring length-i words u in that class of gcd(u)^theta
    blocks = fs.fiber_blocks
    letters = range(len(fs.image_alphabet))
    states: dict[tuple[int, tuple[int, ...]], LogReal] = {}
    for b in letters:
        ones = tuple(1 for _ in fs.fibers[b])
        states[(b, ones)] = LogReal(0.0)
    out = [states]
    for _ in range(1, steps):
        nxt: dict[tuple[int, tuple[int, ...]], LogReal] = {}
        for (b, prim), weight in states.items():
            for b2 in letters:
                vec = _advance(prim, blocks[(b, b2)])
                if not any(vec):
                    continue
                g, p = _normalize(vec)
                term = weight
                if g > 1:
                    term = term.scaled_by_log(theta * math.log(g))
                key = (b2, p)
                nxt[key] = term if key not in nxt else nxt[key].add(term)
        states = nxt
        out.append(states)
    return out


def _mass_at_position(fs, theta, eng, states_i, word_idx, remaining) -> LogReal:
    # unnormalized mass of the cylinder [word] at shift position i,
    # states_i being the forward state table after i letters (None at 0)
    blocks = fs.fiber_blocks
    acc = LogReal.zero()
    if states_i is None:
        vec = tuple(1 for _ in fs.fibers[word_idx[0]])
        b = word_idx[0]
        for b2 in word_idx[1:]:
            vec = _advance(vec, blocks[(b, b2)])
            if not any(vec):
                return acc
            b = b2
        g, p = _normalize(vec)
        sub, _ = eng.suffix_sum(b, p, remaining)
        if g > 1:
            sub = sub.scaled_by_log(theta * math.log(g))
        return sub
    for (b, prim), weight in states_i.items():
        vec = _advance(prim, blocks[(b, word_idx[0])])
        if not any(vec):
            continue
        cur = word_idx[0]
        dead = False
        for b2 in word_idx[1:]:
            vec = _advance(vec, blocks[(cur, b2)])
            if not any(vec):
                dead = True
                break
            cur = b2
        if dead:
            continue
        g, p = _normalize(vec)
        sub, _ = eng.suffix_sum(cur, p, remaining)
        term = weight.times(sub)
        if g > 1:
            term = term.scaled_by_log(theta * math.log(g))
        acc = acc.add(term)
    return acc


def _shift_masses(fs, theta, level, probe_depth, positions, node_budget):
    # masses[i][word] for each requested shift position i
    eng = CollapsedEngine(fs, theta, node_budget)
    total = eng.partition(level).value
    idx = fs.image_index
    top = max(positions)
    tables = _forward_states(fs, theta, top) if top >= 1 else []
    words = [
        (word, tuple(idx[a] for a in word)) for word, _, _ in _words_at(fs, probe_depth)
    ]
    out: dict[int, dict[tuple[str, ...], float]] = {}
    for i in positions:
        states_i = None if i == 0 else tables[i - 1]
        remaining = level - i - probe_depth
        masses = {}
        for word, word_idx in words:
            acc = _mass_at_position(fs, theta, eng, states_i, word_idx, remaining)
            masses[word] = 0.0 if acc.is_zero() else math.exp(acc.log - total.log)
        out[i] = masses
    return out


def cesaro_average(
    fs: FactorSystem,
    theta: float,
    level: int,
    n_terms: int,
    probe_depth: int,
    node_budget: Optional[int] = None,
) -> CylinderDistribution:
    """Average of the first ``n_terms`` shifts of the level measure.

    masses(w) = (1/N) * sum over i < N of the mass the level measure
    gives to the event "w occurs at position i".  Each term is a full
    probability distribution over depth-``probe_depth`` words, so the
    average is one as well.
    """
    if n_terms < 1:
        raise PreconditionError("n_terms must be >= 1")
    if probe_depth < 1:
        raise PreconditionError("probe depth must be >= 1")
    if level < n_terms + probe_depth:
        raise PreconditionError("level must be >= n_terms + probe_depth")
    tables = _shift_masses(
        fs, theta, level, probe_depth, list(range(n_terms)), node_budget
    )
    masses: dict[tuple[str, ...], float] = {}
    for i in range(n_terms):
        for word, m in tables[i].items():
            masses[word] = masses.get(word, 0.0) + m
    masses = {w: m / n_terms for w, m in masses.items()}
    return CylinderDistribution(
        depth=probe_depth, kind="cesaro", masses=masses, level=level
    )


def cesaro_defect(
    fs: FactorSystem,
    theta: float,
    level: int,
    n_terms: int,
    probe_depth: int,
    node_budget: Optional[int] = None,
) -> float:
    """Shift-invariance defect of the ``n_terms``-term Cesaro average.

    The average telescopes: applying one shift changes it by
    (mass at position N - mass at position 0) / N, so the defect is the
    maximum of that difference over all probed words.  It can never
    exceed 2/N and shrinks as the averages converge toward an invariant
    measure.
    """
    if n_terms < 1:
        raise PreconditionError("n_terms must be >= 1")
    if probe_depth < 1:
        raise PreconditionError("probe depth must be >= 1")
    if level < n_terms + probe_depth:
        raise PreconditionError("level must be >= n_terms + probe_depth")
    tables = _shift_masses(fs, theta, level, probe_depth, [0, n_terms], node_budget)
    first = tables[0]
    last = tables[n_terms]
    words = set(first) | set(last)
    worst = 0.0
    for w in words:
        worst = max(worst, abs(last.get(w, 0.0) - first.get(w, 0.0)))
    return worst / n_terms


def _advance_left(block, vec):
    # block times column vector, exact integers
    return tuple(
        sum(block[i][j] * vec[j] for j in range(len(vec)))
        for i in range(len(block))
    )


def additivity_scan(
    fs: FactorSystem,
    max_len: int,
    threshold: float = DEFAULT_REFUTATION_THRESHOLD,
    node_budget: Optional[int] = None,
) -> AdditivityScanReport:
    """Extremes of count(uv) / (count(u) count(v)) over short words.

    Pairs range over occurring words u, v with lengths up to ``max_len``
    whose concatenation also occurs.  The ratio only depends on the
    direction of u's ending count vector and of v's starting count
    vector, so words are grouped by normalized vector and one
    representative per group is kept; this makes the scan polynomial in
    the number of distinct directions instead of the number of words.

    The ratio never exceeds 1 (counts are submultiplicative).  The
    verdict is ``refuted-up-to-{max_len}`` when the minimum falls under
    ``threshold`` along a strictly decreasing stretch of at least four
    trend entries, with the witness pair stored; otherwise
    ``consistent-with-almost-additive``.
    """
    if max_len < 1:
        raise PreconditionError("max_len must be >= 1")
    budget = resolve_node_budget(node_budget)
    work = 0
    blocks = fs.fiber_blocks
    letters = range(len(fs.image_alphabet))
    names = fs.image_alphabet

    def tick(amount=1):
        nonlocal work
        work += amount
        if work > budget:
            raise ResourceError(
                f"node budget exceeded ({budget} nodes); "
                f"lower max_len or raise the budget"
            )

    # forward groups: (last letter, direction of the ending count vector)
    fwd: list[dict[tuple[int, tuple[int, ...]], tuple[str, ...]]] = []
    layer = {}
    for b in letters:
        ones = tuple(1 for _ in fs.fibers[b])
        layer[(b, ones)] = (names[b],)
    fwd.append(layer)
    for _ in range(1, max_len):
        nxt = {}
        for (b, prim), rep in fwd[-1].items():
            for b2 in letters:
                tick()
                vec = _advance(prim, blocks[(b, b2)])
                if not any(vec):
                    continue
                _, p = _normalize(vec)
                key = (b2, p)
                if key not in nxt:
                    nxt[key] = rep + (names[b2],)
        fwd.append(nxt)

    # backward groups: (first letter, direction of the starting vector)
    bwd: list[dict[tuple[int, tuple[int, ...]], tuple[str, ...]]] = []
    layer = {}
    for b in letters:
        ones = tuple(1 for _ in fs.fibers[b])
        layer[(b, ones)] = (names[b],)
    bwd.append(layer)
    for _ in range(1, max_len):
        nxt = {}
        for (b, prim), rep in bwd[-1].items():
            for b0 in letters:
                tick()
                vec = _advance_left(blocks[(b0, b)], prim)
                if not any(vec):
                    continue
                _, p = _normalize(vec)
                key = (b0, p)
                if key not in nxt:
                    nxt[key] = (names[b0],) + rep
        bwd.append(nxt)

    min_ratio = math.inf
    max_ratio = -math.inf
    witness = None
    cap_min = [math.inf] * (max_len + 1)
    row_cache: dict[tuple[int, tuple[int, ...], int], tuple[int, ...]] = {}
    for ju in range(1, max_len + 1):
        for (a, u_dir), u_rep in fwd[ju - 1].items():
            for jv in range(1, max_len + 1):
                for (b, v_dir), v_rep in bwd[jv - 1].items():
                    tick()
                    rkey = (a, u_dir, b)
                    row = row_cache.get(rkey)
                    if row is None:
                        row = _advance(u_dir, blocks[(a, b)])
                        row_cache[rkey] = row
                    num = sum(x * y for x, y in zip(row, v_dir))
                    if num == 0:
                        continue
                    ratio = num / (sum(u_dir) * sum(v_dir))
                    cap = max(ju, jv)
                    if ratio < cap_min[cap]:
                        cap_min[cap] = ratio
                    if ratio > max_ratio:
                        max_ratio = ratio
                    if ratio < min_ratio:
                        min_ratio = ratio
                        witness = (u_rep, v_rep)
    trend = []
    running = math.inf
    for cap in range(1, max_len + 1):
        running = min(running, cap_min[cap])
        trend.append(running)
    refuted = (
        min_ratio < threshold
        and _strictly_decreasing_run(trend, 4)
        and witness is not None
    )
    verdict = f"refuted-up-to-{max_len}" if refuted else "consistent-with-almost-additive"
    return AdditivityScanReport(
        max_len=max_len,
        min_ratio=min_ratio,
        max_ratio=max_ratio,
        min_trend=tuple(trend),
        verdict=verdict,
        witness=witness,
        threshold=threshold,
    )


def _strictly_decreasing_run(seq, length):
    run = 1
    for i in range(1, len(seq)):
        run = run + 1 if seq[i] < seq[i - 1] else 1
        if run >= length:
            return True
    return False


def uniqueness_report(fs: FactorSystem, scan: AdditivityScanReport) -> UniquenessReport:
    """Assemble the uniqueness verdict for the full-dimension measure.

    A singleton clump settles the question outright.  Failing that, a
    scan consistent with almost additivity supports (but does not prove)
    uniqueness through the Gibbs route.  Otherwise only uniqueness of
    the image-side equilibrium state survives, and nothing is claimed
    about its lifts.
    """
    report = validate_sft(fs.source)
    if not report.mixing:
        raise NonMixingError("uniqueness verdicts require a mixing source shift")
    clumps = tuple(singleton_clumps(fs))
    if clumps:
        conclusion = "unique-full-dimension-measure"
    elif scan.verdict == "consistent-with-almost-additive":
        conclusion = "unique-conditional-on-almost-additivity"
    else:
        conclusion = "image-uniqueness-only"
    return UniquenessReport(
        singleton_clump=bool(clumps),
        clump_letters=clumps,
        almost_additive_evidence=scan.verdict,
        conclusion=conclusion,
    )
