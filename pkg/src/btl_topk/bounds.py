"""Information-theoretic calculators: divergences, the minimax lower bound on L,
the achievability threshold, the swap-hypothesis KL sum, and Bernstein radii.

All logarithms are natural. Divergences that are infinite at the boundary of the
simplex return ``math.inf`` rather than raising.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import asdict, dataclass, fields

from .spectral_mle import xi_bounds

MAX_ENUM_N = 12

BELOW = "below lower bound"
BETWEEN = "between"
ABOVE = "above achievability"


def _plogp_ratio(a: float, b: float) -> float:
    if a == 0:
        return 0.0
    if b == 0:
        return math.inf
    return a * math.log(a / b)


def bernoulli_kl(p: float, q: float) -> float:
    """KL(Bernoulli(p) || Bernoulli(q))."""
    if not (0 <= p <= 1 and 0 <= q <= 1):
        raise ValueError(f"probabilities must lie in [0, 1], got p={p}, q={q}")
    return max(0.0, _plogp_ratio(p, q) + _plogp_ratio(1 - p, 1 - q))


def bernoulli_chi2(p: float, q: float) -> float:
    if not (0 <= p <= 1 and 0 <= q <= 1):
        raise ValueError(f"probabilities must lie in [0, 1], got p={p}, q={q}")
    if q in (0.0, 1.0):
        return 0.0 if p == q else math.inf
    return (p - q) ** 2 / (q * (1 - q))


@dataclass(frozen=True)
class RegimeSpec:
    n: int
    p_obs: float
    L: float
    delta: float
    K: int = 1
    w_min: float = 0.5
    w_max: float = 1.0
    eps: float = 0.25

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be at least 2, got {self.n}")
        if not 0 < self.p_obs <= 1:
            raise ValueError(f"p_obs must lie in (0, 1], got {self.p_obs}")
        if self.L <= 0:
            raise ValueError(f"L must be positive, got {self.L}")
        if self.delta < 0:
            raise ValueError(f"delta must be nonnegative, got {self.delta}")
        if not 1 <= self.K < self.n:
            raise ValueError(f"K must satisfy 1 <= K < n, got {self.K}")
        if not 0 < self.w_min <= self.w_max:
            raise ValueError("need 0 < w_min <= w_max")
        if not 0 < self.eps < 0.5:
            raise ValueError(f"eps must lie in (0, 1/2), got {self.eps}")


def fano_constant(w_min: float, w_max: float) -> float:
    return w_min**4 / (2 * w_max**4)


def fano_min_L(spec: RegimeSpec) -> float:
    """Largest L at which some score vector still forces error probability >= eps."""
    num = (1 - spec.eps) * math.log(spec.n) - 2
    if num <= 0:
        return 0.0
    if spec.delta == 0:
        return math.inf
    c = fano_constant(spec.w_min, spec.w_max)
    return c * num / (spec.n * spec.p_obs * spec.delta**2)


def separation_criterion_L(n: int, p_obs: float, delta: float, c: float = 1.0) -> float:
    """``c * log(n) / (n p_obs delta^2)``: L needed for separation ``delta``."""
    if delta == 0:
        return math.inf
    return c * math.log(n) / (n * p_obs * delta**2)


def bernstein_bound(variance_sum: float, B: float, n: int, a: float = 2.0) -> float:
    """Deviation radius exceeded with probability at most ``2 / n**a``.

    ``variance_sum`` is the sum of second moments of the summands and ``B``
    bounds their magnitude.
    """
    if a < 2:
        raise ValueError("a must be at least 2")
    if variance_sum < 0 or B < 0:
        raise ValueError("variance_sum and B must be nonnegative")
    log_n = math.log(n)
    return math.sqrt(2 * a * log_n * variance_sum) + (2 * a / 3) * B * log_n


def swap_family(n: int, K: int) -> list[frozenset]:
    """Hypothesis top-K sets, each one swap away from ``{0, ..., K-1}``.

    The family has ``max(K, n - K) + 1`` members.
    """
    if n > MAX_ENUM_N:
        raise ValueError(f"enumeration is limited to n <= {MAX_ENUM_N}, got {n}")
    if not 1 <= K < n:
        raise ValueError(f"K must satisfy 1 <= K < n, got {K}")
    if K < n / 2:
        core = set(range(1, K))
        return [frozenset(core | {i}) for i in [0, *range(K, n)]]
    full = set(range(K + 1))
    return [frozenset(full - {i}) for i in range(K + 1)]


def _check_hypothesis(s, n: int, K: int) -> frozenset:
    s = frozenset(s)
    if len(s) != K or any(not 0 <= i < n for i in s):
        raise ValueError(f"hypothesis {sorted(s)} is not a {K}-subset of range({n})")
    return s


def _hypothesis_probs(w_K, w_K1, s, n):
    w = [w_K if i in s else w_K1 for i in range(n)]
    return {(i, j): w[i] / (w[i] + w[j]) for i, j in itertools.permutations(range(n), 2)}


def hypothesis_kl_sum(w_K: float, w_K1: float, s1, s2, n: int, K: int) -> float:
    """Sum over ordered pairs of single-comparison KL divergences between two hypotheses.

    A hypothesis is the set of items carrying the high score ``w_K``; all other
    items carry ``w_K1``.
    """
    if n > MAX_ENUM_N:
        raise ValueError(f"enumeration is limited to n <= {MAX_ENUM_N}, got {n}")
    if not (w_K > 0 and w_K1 > 0):
        raise ValueError("scores must be positive")
    s1, s2 = _check_hypothesis(s1, n, K), _check_hypothesis(s2, n, K)
    r1 = _hypothesis_probs(w_K, w_K1, s1, n)
    r2 = _hypothesis_probs(w_K, w_K1, s2, n)
    return sum(bernoulli_kl(r1[k], r2[k]) for k in r1)


def differing_pairs(w_K: float, w_K1: float, s1, s2, n: int, K: int) -> int:
    """Number of unordered pairs whose comparison law differs between the hypotheses."""
    s1, s2 = _check_hypothesis(s1, n, K), _check_hypothesis(s2, n, K)
    r1 = _hypothesis_probs(w_K, w_K1, s1, n)
    r2 = _hypothesis_probs(w_K, w_K1, s2, n)
    return sum(1 for (i, j) in r1 if i < j and r1[i, j] != r2[i, j])


def kl_sum_bound(n: int, delta: float, w_min: float, w_max: float) -> float:
    return 2 * w_max**4 / w_min**4 * n * delta**2


@dataclass(frozen=True)
class FeasibilityReport:
    n: int
    p_obs: float
    L: float
    K: int
    delta_K: float
    eps: float
    w_min: float
    w_max: float
    fano_min_L: float
    separation_L: float
    xi_min: float
    xi_max: float
    classification: str

    def lines(self) -> list[tuple[str, str]]:
        return [(f.name, _fmt(getattr(self, f.name))) for f in fields(self)]

    def to_text(self) -> str:
        rows = self.lines()
        width = max(len(k) for k, _ in rows)
        return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        rows = self.lines()
        w.writerow([k for k, _ in rows])
        w.writerow([v for _, v in rows])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "FeasibilityReport":
        header, values = list(csv.reader(io.StringIO(text)))[:2]
        raw = dict(zip(header, values))
        kw = {}
        for f in fields(cls):
            v = raw[f.name]
            kw[f.name] = v if f.type == "str" else (int(v) if f.type == "int" else float(v))
        return cls(**kw)

    def asdict(self) -> dict:
        return asdict(self)


def _fmt(v) -> str:
    if isinstance(v, float):
        return format(v, ".15g")
    return str(v)


def feasibility_report(spec: RegimeSpec) -> FeasibilityReport:
    lower = fano_min_L(spec)
    upper = separation_criterion_L(spec.n, spec.p_obs, spec.delta, c=1.0)
    if spec.L <= lower:
        cls = BELOW
    elif spec.L >= upper:
        cls = ABOVE
    else:
        cls = BETWEEN
    xi_min, xi_max = xi_bounds(spec.n, spec.p_obs, spec.L)
    return FeasibilityReport(
        spec.n, spec.p_obs, spec.L, spec.K, spec.delta, spec.eps, spec.w_min, spec.w_max,
        lower, upper, xi_min, xi_max, cls,
    )
