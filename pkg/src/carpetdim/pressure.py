"""Two-sided pressure and Hausdorff-dimension bounds from partition sums.

The sequence log S_n is subadditive, so log S_n / n is an upper bound
for the pressure at every n.  With a topologically mixing source one
also gets a splicing constant K_tilde making log(S_n / K_tilde)
superadditive, so (log S_n - log K_tilde) / n is a valid lower bound at
the same n.  Dimension is pressure divided by log m.  The only
inexactness is floating log conversion, and the tracked rounding bound
is folded into the interval ends conservatively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

from .counting import CollapsedEngine, LogReal, dn_count, is_image_point, partition_series
from .errors import NonMixingError, NotFullShiftError, PreconditionError
from .sft import (
    CarpetSpec,
    EventuallyPeriodicPoint,
    FactorSystem,
    carpet_to_factor,
    strongly_connected_components,
    validate_sft,
)

__all__ = [
    "SuperadditiveConstants",
    "PressureEstimate",
    "DimensionEstimate",
    "CompensationEstimate",
    "superadditive_constants",
    "pressure_interval",
    "convergence_rows",
    "hausdorff_dimension",
    "mcmullen_closed_form",
    "compensation_at_periodic",
    "perron_eigenvalue",
]


@dataclass(frozen=True)
class SuperadditiveConstants:
    """Splicing constants for the superadditive lower pressure bound.

    K is the partition sum at the mixing index M.  K_prime covers the
    finitely many short concatenations; K_tilde = max(K, K_prime)
    satisfies S_l * S_n <= K_tilde * S_{l+n} for every pair, which is
    spot-checked by the test suite rather than assumed.
    """

    M: int
    K: float
    K_prime: float
    K_tilde: float
    log_K_tilde: float
    rounding_bound: float


@dataclass(frozen=True)
class PressureEstimate:
    """A bracket [lower, upper] for the pressure, valid at this single n."""

    n: int
    upper: float
    lower: float
    theta: float
    constants: SuperadditiveConstants
    log_Sn: float
    rounding_bound: float


@dataclass(frozen=True)
class DimensionEstimate:
    """Hausdorff-dimension interval for a carpet at depth n."""

    alpha: float
    lower: float
    upper: float
    n: int
    closed_form: Optional[float]
    pressure: Optional[PressureEstimate]
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True)
class CompensationEstimate:
    """A finite evaluation of the relative-pressure function at one point.

    ``spectral`` is the exact growth rate of lift counts around the
    periodic tail; ``series`` is the finite-depth slope of the
    extendable-prefix counts.  The two presentations agree almost
    everywhere but not necessarily pointwise, so reports carry both and
    never claim equality.
    """

    point: EventuallyPeriodicPoint
    value: float
    method: str
    depth: Optional[int] = None


def superadditive_constants(
    fs: FactorSystem,
    theta: float,
    node_budget: Optional[int] = None,
    engine: Optional[CollapsedEngine] = None,
) -> SuperadditiveConstants:
    """Compute M, K = S_M, K_prime, K_tilde for a mixing source shift."""
    report = validate_sft(fs.source)
    if not report.mixing:
        raise NonMixingError(
            "source shift is not topologically mixing; "
            "superadditive constants would be unsound"
        )
    M = report.mixing_index
    series = partition_series(fs, 2 * M, theta, node_budget=node_budget, engine=engine)
    logs = [p.value.log for p in series]
    err = max(p.value.err_bound for p in series)
    log_K = logs[M - 1]
    log_K_prime = float("-inf")
    for l in range(1, 2 * M):
        for n in range(1, 2 * M - l + 1):
            log_K_prime = max(log_K_prime, logs[l - 1] + logs[n - 1] - logs[l + n - 1])
    log_K_tilde = max(log_K, log_K_prime)
    return SuperadditiveConstants(
        M=M,
        K=math.exp(log_K),
        K_prime=math.exp(log_K_prime),
        K_tilde=math.exp(log_K_tilde),
        log_K_tilde=log_K_tilde,
        rounding_bound=3.0 * err,
    )


def pressure_interval(
    fs: FactorSystem,
    theta: float,
    n: int,
    mode: str = "collapsed",
    node_budget: Optional[int] = None,
    engine: Optional[CollapsedEngine] = None,
    constants: Optional[SuperadditiveConstants] = None,
) -> PressureEstimate:
    """Bracket the pressure using S_n and the splicing constants.

    upper = log S_n / n holds by subadditivity; lower = (log S_n -
    log K_tilde) / n by superadditivity.  Both ends are padded by the
    tracked rounding bound so the interval stays conservative.
    """
    if n < 1:
        raise PreconditionError("depth must be >= 1")
    if constants is None:
        constants = superadditive_constants(
            fs, theta, node_budget=node_budget, engine=engine
        )
    if mode == "collapsed":
        eng = engine if engine is not None else CollapsedEngine(fs, theta, node_budget)
        ps = eng.partition(n)
    else:
        from .counting import partition_sum

        ps = partition_sum(fs, n, theta, mode=mode, node_budget=node_budget)
    err = ps.value.err_bound + constants.rounding_bound
    upper = (ps.value.log + err) / n
    lower = (ps.value.log - err - constants.log_K_tilde) / n
    return PressureEstimate(
        n=n,
        upper=upper,
        lower=lower,
        theta=theta,
        constants=constants,
        log_Sn=ps.value.log,
        rounding_bound=err,
    )


def mcmullen_closed_form(spec: CarpetSpec) -> float:
    """Closed-form dimension for carpets whose digit shift is full.

    With every transition allowed the lift count of an image word
    factorizes over its letters, and the dimension reduces to
    log_m(sum over rows j of t_j^(log_l m)) with t_j the number of
    selected digits in row j.
    """
    if not spec.is_full_shift():
        raise NotFullShiftError(
            "closed form requires the full digit shift (transitions == 'full')"
        )
    theta = spec.theta()
    total = sum(t ** theta for t in spec.row_occupancy() if t)
    return math.log(total) / math.log(spec.m)


def hausdorff_dimension(
    spec: CarpetSpec,
    n: int,
    mode: str = "collapsed",
    node_budget: Optional[int] = None,
) -> DimensionEstimate:
    """Dimension interval for a carpet at depth n.

    The pressure interval is divided by log m; the closed form is
    attached when the digit shift is full.  For a source shift that is
    not mixing only the subadditive upper bound is reported and the
    lower end falls back to the trivial 0, flagged in the warnings.
    """
    fs, alpha = carpet_to_factor(spec)
    theta = spec.theta()
    log_m = math.log(spec.m)
    closed = mcmullen_closed_form(spec) if spec.is_full_shift() else None
    warnings: list[str] = []
    try:
        estimate = pressure_interval(fs, theta, n, mode=mode, node_budget=node_budget)
    except NonMixingError:
        from .counting import partition_sum

        ps = partition_sum(fs, n, theta, mode=mode, node_budget=node_budget)
        err = ps.value.err_bound
        upper = min(2.0, (ps.value.log + err) / (n * log_m))
        warnings.append(
            "source shift is not mixing: lower bound unavailable, 0 reported"
        )
        return DimensionEstimate(
            alpha=alpha,
            lower=0.0,
            upper=upper,
            n=n,
            closed_form=closed,
            pressure=None,
            warnings=tuple(warnings),
        )
    lower = max(0.0, estimate.lower / log_m)
    upper = min(2.0, estimate.upper / log_m)
    return DimensionEstimate(
        alpha=alpha,
        lower=lower,
        upper=upper,
        n=n,
        closed_form=closed,
        pressure=estimate,
        warnings=tuple(warnings),
    )


def convergence_rows(
    fs: FactorSystem,
    theta: float,
    n_max: int,
    node_budget: Optional[int] = None,
) -> list[dict]:
    """Pressure brackets at every depth 1..n_max from one shared memo.

    Each row carries n, log S_n, the occurring-word count, and the
    upper/lower pressure bounds valid at that n.  Feeds the CSV series
    and the convergence plots.
    """
    engine = CollapsedEngine(fs, theta, node_budget)
    constants = superadditive_constants(fs, theta, engine=engine)
    rows = []
    for n in range(1, n_max + 1):
        estimate = pressure_interval(
            fs, theta, n, engine=engine, constants=constants
        )
        words = engine.partition(n).word_count
        rows.append(
            {
                "n": n,
                "log_Sn": estimate.log_Sn,
                "words": words,
                "upper_bound": estimate.upper,
                "lower_bound": estimate.lower,
            }
        )
    return rows


def _float_matrix(matrix: Sequence[Sequence[object]]) -> tuple[list[list[float]], int]:
    # Scale huge integer entries down by a power of two before float
    # conversion; returns (float matrix, binary exponent of the scale).
    max_bits = 0
    for row in matrix:
        for x in row:
            if isinstance(x, int) and x > 0:
                max_bits = max(max_bits, x.bit_length())
    shift = max(0, max_bits - 512)
    out = []
    for row in matrix:
        out.append(
            [float(x >> shift) if (shift and isinstance(x, int)) else float(x) for x in row]
        )
    return out, shift


def perron_eigenvalue(
    matrix: Sequence[Sequence[object]],
    tol: float = 1e-13,
    max_iter: int = 200_000,
) -> float:
    """Spectral radius of a nonnegative square matrix by power iteration.

    Deterministic all-ones start; iteration on each strongly connected
    component with a +1 diagonal shift (which makes an irreducible
    component primitive without moving its Perron vector).  Reducible
    matrices return the maximum over components.  If the iteration cap
    is hit the midpoint of the last min/max quotient bracket is
    returned instead of failing.
    """
    k = len(matrix)
    if k == 0 or any(len(row) != k for row in matrix):
        raise PreconditionError("matrix must be square and nonempty")
    for row in matrix:
        for x in row:
            if x < 0 or (isinstance(x, float) and math.isnan(x)):
                raise PreconditionError("matrix must be nonnegative")
    floats, shift = _float_matrix(matrix)
    # adjacency from the original entries so scaling can't drop an edge
    succ = [[j for j in range(k) if matrix[i][j]] for i in range(k)]
    comp = strongly_connected_components(succ)
    best = 0.0
    for cid in set(comp):
        nodes = [i for i in range(k) if comp[i] == cid]
        internal = [
            (i, j) for i in nodes for j in succ[i] if comp[j] == cid
        ]
        if not internal:
            continue
        if len(nodes) == 1:
            i = nodes[0]
            best = max(best, floats[i][i])
            continue
        sub = [[floats[i][j] for j in nodes] for i in nodes]
        best = max(best, _power_iterate(sub, tol, max_iter))
    return math.ldexp(best, shift) if shift else best


def _power_iterate(sub: list[list[float]], tol: float, max_iter: int) -> float:
    s = len(sub)
    shifted = [
        [sub[i][j] + (1.0 if i == j else 0.0) for j in range(s)] for i in range(s)
    ]
    x = [1.0] * s
    prev = None
    lo = hi = 0.0
    for _ in range(max_iter):
        y = [sum(shifted[i][j] * x[j] for j in range(s)) for i in range(s)]
        quotients = [y[i] / x[i] for i in range(s) if x[i] > 0.0]
        lo, hi = min(quotients), max(quotients)
        num = sum(x[i] * y[i] for i in range(s))
        den = sum(x[i] * x[i] for i in range(s))
        rayleigh = num / den
        norm = max(y)
        x = [v / norm for v in y]
        if prev is not None and abs(rayleigh - prev) < tol * max(1.0, abs(rayleigh)):
            return rayleigh - 1.0
        prev = rayleigh
    # cap exceeded: report the centre of the last Collatz bracket
    return (lo + hi) / 2.0 - 1.0


def compensation_at_periodic(
    fs: FactorSystem,
    point: EventuallyPeriodicPoint,
    depth: int = 12,
) -> tuple[CompensationEstimate, CompensationEstimate]:
    """Evaluate the compensation function at an eventually periodic point.

    Returns (spectral, series).  The spectral value is log of the
    Perron root of the fiber-block product around the cycle divided by
    the cycle length, which is the exact exponential growth rate of the
    lift counts along the tail.  The series value is the depth-n slope
    log(extendable-prefix count) / n.  No pointwise equality between
    the two is claimed.
    """
    report = validate_sft(fs.source)
    if not report.irreducible:
        raise PreconditionError("compensation evaluation requires an irreducible source")
    if depth < 1:
        raise PreconditionError("depth must be >= 1")
    if not is_image_point(fs, point):
        raise PreconditionError(
            "point is not in the image subshift (its tail has no infinite lift)"
        )
    idx = fs.image_index
    cycle = [idx[letter] for letter in point.cycle]
    q = len(cycle)
    product = None
    for step in range(q):
        block = fs.fiber_blocks[(cycle[step], cycle[(step + 1) % q])]
        product = block if product is None else _int_matmul(product, block)
    if all(x == 0 for row in product for x in row):
        raise PreconditionError("fiber-block product around the cycle is zero")
    rho = perron_eigenvalue(product)
    spectral = CompensationEstimate(
        point=point, value=math.log(rho) / q, method="spectral"
    )
    d = dn_count(fs, point, depth)
    series = CompensationEstimate(
        point=point, value=math.log(d) / depth, method="series", depth=depth
    )
    return spectral, series


def _int_matmul(a, b):
    rows = len(a)
    inner = len(b)
    cols = len(b[0]) if inner else 0
    return tuple(
        tuple(
            sum(a[i][t] * b[t][j] for t in range(inner)) for j in range(cols)
        )
        for i in range(rows)
    )
