"""Earth mover's distance between stochastic languages.

The ground distance is the unit-cost Levenshtein distance on activity
sequences, normalised by the longer sequence's length. The transport problem
is solved exactly with the HiGHS dual simplex, which returns a vertex of the
transportation polytope.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

import numpy as np
from scipy.optimize import linprog
from scipy.sparse import coo_matrix

from .event_log import StochasticLanguage, Variant

MASS_TOL = 1e-9


def levenshtein(s: Sequence[str], t: Sequence[str]) -> int:
    if len(s) < len(t):
        s, t = t, s
    if not t:
        return len(s)
    previous = list(range(len(t) + 1))
    for i, a in enumerate(s, start=1):
        current = [i]
        for j, b in enumerate(t, start=1):
            current.append(min(previous[j] + 1, current[j - 1] + 1, previous[j - 1] + (a != b)))
        previous = current
    return previous[-1]


def levenshtein_norm(s: Sequence[str], t: Sequence[str]) -> float:
    longest = max(len(s), len(t))
    if longest == 0:
        return 0.0
    return levenshtein(s, t) / longest


class DistanceCache:
    """Memoised ``levenshtein_norm`` keyed on unordered variant pairs.

    Safe to share between threads; a race can only compute the same value
    twice.
    """

    def __init__(self):
        self._values: dict[tuple[Variant, Variant], float] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._values)

    def distance(self, s: Variant, t: Variant) -> float:
        if s == t:
            return 0.0
        key = (s, t) if s < t else (t, s)
        value = self._values.get(key)
        if value is None:
            value = levenshtein_norm(s, t)
            with self._lock:
                self._values[key] = value
        return value

    def matrix(self, rows: Sequence[Variant], cols: Sequence[Variant]) -> np.ndarray:
        return np.array([[self.distance(s, t) for t in cols] for s in rows], dtype=float).reshape(
            len(rows), len(cols)
        )


@dataclass(frozen=True)
class TransportPlan:
    sources: tuple[Variant, ...]
    targets: tuple[Variant, ...]
    flows: Mapping[tuple[int, int], float]
    cost: float

    def transposed(self) -> "TransportPlan":
        return TransportPlan(
            self.targets,
            self.sources,
            {(j, i): m for (i, j), m in sorted(self.flows.items(), key=lambda kv: (kv[0][1], kv[0][0]))},
            self.cost,
        )

    def row_sums(self) -> list[float]:
        sums = [0.0] * len(self.sources)
        for (i, _), m in self.flows.items():
            sums[i] += m
        return sums

    def col_sums(self) -> list[float]:
        sums = [0.0] * len(self.targets)
        for (_, j), m in self.flows.items():
            sums[j] += m
        return sums


@dataclass(frozen=True)
class EmdResult:
    value: float
    plan: Optional[TransportPlan] = None


def _check_language(lang: Mapping[Variant, float], name: str) -> None:
    if not lang:
        raise ValueError(f"{name}: empty stochastic language")
    total = 0.0
    for v, p in lang.items():
        if p < 0 or not math.isfinite(p):
            raise ValueError(f"{name}: invalid probability {p!r} for {v!r}")
        total += p
    if abs(total - 1.0) > MASS_TOL:
        raise ValueError(f"{name}: probabilities sum to {total!r}, not 1")


def _canonical(lang: Mapping[Variant, float]) -> tuple:
    return tuple(sorted(lang.items()))


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def emd(
    a: Mapping[Variant, float],
    b: Mapping[Variant, float],
    cache: Optional[DistanceCache] = None,
    retain_plan: bool = False,
) -> EmdResult:
    """Exact earth mover's distance between two stochastic languages.

    The result does not depend on the insertion order of either mapping, and
    ``emd(a, b)`` and ``emd(b, a)`` solve the very same LP.
    """
    _check_language(a, "source")
    _check_language(b, "target")
    cache = cache if cache is not None else DistanceCache()
    ka, kb = _canonical(a), _canonical(b)
    if kb < ka:
        res = _solve(kb, ka, cache, retain_plan)
        return EmdResult(res.value, res.plan.transposed() if res.plan else None)
    return _solve(ka, kb, cache, retain_plan)


def _solve(ka: tuple, kb: tuple, cache: DistanceCache, retain_plan: bool) -> EmdResult:
    rows = tuple(v for v, _ in ka)
    cols = tuple(v for v, _ in kb)
    p = np.array([m for _, m in ka], dtype=float)
    q = np.array([m for _, m in kb], dtype=float)
    m, n = len(rows), len(cols)

    if ka == kb:
        flows = {(i, i): float(p[i]) for i in range(m) if p[i] > 0}
        return EmdResult(0.0, TransportPlan(rows, cols, flows, 0.0) if retain_plan else None)

    cost = cache.matrix(rows, cols)
    if m == 1 or n == 1:
        # single source or single target: the only feasible plan
        x = np.outer(np.ones(m), q) if m == 1 else np.outer(p, np.ones(n))
    else:
        x = _solve_lp(p / p.sum(), q / q.sum(), cost)

    value = _clamp(float(np.sum(x * cost)))
    plan = None
    if retain_plan:
        flows = {(i, j): float(x[i, j]) for i in range(m) for j in range(n) if x[i, j] > 0}
        plan = TransportPlan(rows, cols, flows, value)
    return EmdResult(value, plan)


def _solve_lp(p: np.ndarray, q: np.ndarray, cost: np.ndarray) -> np.ndarray:
    m, n = cost.shape
    cells = np.arange(m * n)
    row_of, col_of = np.divmod(cells, n)
    a_eq = coo_matrix(
        (np.ones(2 * m * n), (np.concatenate([row_of, m + col_of]), np.concatenate([cells, cells]))),
        shape=(m + n, m * n),
    ).tocsr()
    res = linprog(
        cost.ravel(),
        A_eq=a_eq,
        b_eq=np.concatenate([p, q]),
        bounds=(0, None),
        method="highs-ds",
    )
    if res.status != 0:
        raise RuntimeError(f"transport LP failed: {res.message}")
    x = np.asarray(res.x, dtype=float).reshape(m, n)
    x[x < 0] = 0.0
    return x


ORACLE_MAX_CELLS = 9
_EXHAUSTED = 1e-12


def emd_oracle(a: Mapping[Variant, float], b: Mapping[Variant, float]) -> float:
    """Brute-force EMD for tiny supports.

    Every vertex of the transportation polytope is produced by greedily
    allocating ``min(row remainder, column remainder)`` to the cells in some
    order. Cells that would receive nothing can be skipped without changing
    the outcome, so the search branches only on cells that still take mass;
    the set of reachable plans equals that of all ``(m*n)!`` orderings.
    """
    _check_language(a, "source")
    _check_language(b, "target")
    rows, cols = list(a), list(b)
    m, n = len(rows), len(cols)
    if m * n > ORACLE_MAX_CELLS:
        raise ValueError(f"support too large for the oracle: {m}x{n} > {ORACLE_MAX_CELLS} cells")
    cost = [[levenshtein_norm(s, t) for t in cols] for s in rows]
    best = math.inf

    def search(row_left: list, col_left: list, used: frozenset, acc: float) -> None:
        nonlocal best
        branched = False
        for i in range(m):
            if row_left[i] <= _EXHAUSTED:
                continue
            for j in range(n):
                if (i, j) in used or col_left[j] <= _EXHAUSTED:
                    continue
                branched = True
                mass = min(row_left[i], col_left[j])
                row_left[i] -= mass
                col_left[j] -= mass
                search(row_left, col_left, used | {(i, j)}, acc + mass * cost[i][j])
                row_left[i] += mass
                col_left[j] += mass
        if not branched:
            best = min(best, acc)

    search([a[s] for s in rows], [b[t] for t in cols], frozenset(), 0.0)
    return best
