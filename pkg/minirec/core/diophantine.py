"""
Diophantine Approximation - Effective Kronecker approximation on T^d

Features:
- Exhaustive search in the order 0, 1, -1, 2, -2, ... (the reference oracle)
- Lattice search (Kannan embedding + LLL) whose candidates are always re-verified
- Injective embedding of Z_k^d into Z: w -> n_w with ||n_w alpha_j - w_j/k|| < eps
- Translate search maximizing |(A + t) & F|
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum, auto
from fractions import Fraction
from itertools import combinations, product
from typing import Any, Dict, Iterable, List, Sequence, Tuple

import numpy as np
from sympy import ZZ
from sympy.polys.matrices import DomainMatrix

from .errors import CapExceededError, EmbeddingError, NotFound, ValidationError
from .torus import DEFAULT_GUARD, FrequencyVector, TorusPoint, orbit_norms, to_fraction
from .windows import WindowedSet, spiral_chunks, spiral_key

logger = logging.getLogger(__name__)

DEFAULT_EMBEDDING_CAP = 4096


class Strategy(Enum):
    """Search strategy for kronecker_approximate"""
    EXHAUSTIVE = auto()
    LATTICE = auto()

    @classmethod
    def parse(cls, value: Any) -> "Strategy":
        if isinstance(value, Strategy):
            return value
        try:
            return cls[str(value).upper()]
        except KeyError:
            raise ValidationError(f"Unknown strategy '{value}' (expected exhaustive or lattice)")


@dataclass(frozen=True)
class ApproxQuery:
    """Find n with max_j ||n alpha_j - z_j|| < eps and |n| <= search_bound"""
    freq: FrequencyVector
    target: Tuple[TorusPoint, ...]
    eps: Fraction
    search_bound: int
    strategy: Strategy = Strategy.EXHAUSTIVE
    exclude_zero: bool = False
    guard: Fraction = DEFAULT_GUARD

    def __post_init__(self):
        object.__setattr__(self, 'eps', to_fraction(self.eps))
        object.__setattr__(self, 'target', tuple(TorusPoint.of(z) for z in self.target))
        object.__setattr__(self, 'strategy', Strategy.parse(self.strategy))
        if self.eps <= 0:
            raise ValidationError(f"eps must be positive, got {self.eps}")
        if len(self.target) != self.freq.d:
            raise ValidationError(f"Target has {len(self.target)} coordinates, frequency has {self.freq.d}")
        if self.search_bound < 0:
            raise ValidationError(f"search_bound must be non-negative, got {self.search_bound}")
        if not self.freq.certified:
            logger.warning("Frequency vector %s carries no independence certificate", self.freq)


@dataclass
class ApproxResult:
    """A verified solution of an ApproxQuery"""
    n: int
    norms: Tuple[float, ...]
    strategy: str

    @property
    def max_norm(self) -> float:
        return max(self.norms)

    def to_dict(self) -> Dict[str, Any]:
        return {'n': self.n, 'norms': list(self.norms), 'max_norm': self.max_norm,
                'strategy': self.strategy}


def _exhaustive(q: ApproxQuery, label: str = "exhaustive") -> ApproxResult:
    best_n, best_norm = None, math.inf
    for chunk in spiral_chunks(q.search_bound):
        if q.exclude_zero:
            chunk = chunk[chunk != 0]
        if chunk.size == 0:
            continue
        table = orbit_norms(q.freq, chunk, q.target)
        yes, _ = table.below(q.eps, q.guard)
        ok = yes.all(axis=1)
        if ok.any():
            i = int(np.argmax(ok))
            return ApproxResult(int(chunk[i]), tuple(float(v) for v in table.values[i]), label)
        worst = table.values.max(axis=1)
        i = int(np.argmin(worst))
        if worst[i] < best_norm:
            best_n, best_norm = int(chunk[i]), float(worst[i])
    raise NotFound(f"No n with |n| <= {q.search_bound} approximates the target within {q.eps}",
                   best_n, best_norm)


def _lattice_candidates(q: ApproxQuery) -> List[int]:
    """Small n read off an LLL-reduced Kannan embedding"""
    d = q.freq.d
    bound = max(q.search_bound, 1)
    bits = max(32, math.ceil(math.log2(bound / q.eps)) + 24)
    C = 1 << bits
    W = max(1, round(C * q.eps / bound))
    K = max(1, round(C * q.eps))

    rows = [[W] + [p.fixed(bits) for p in q.freq.entries] + [0]]
    for j in range(d):
        row = [0] * (d + 2)
        row[j + 1] = C
        rows.append(row)
    rows.append([0] + [-z.fixed(bits) for z in q.target] + [K])

    basis = DomainMatrix([[ZZ(v) for v in row] for row in rows], (d + 2, d + 2), ZZ)
    reduced = [[int(v) for v in row] for row in basis.lll().to_Matrix().tolist()]

    vectors = list(reduced)
    for u, v in combinations(reduced, 2):
        vectors.append([a + b for a, b in zip(u, v)])
        vectors.append([a - b for a, b in zip(u, v)])

    found = set()
    for v in vectors:
        if abs(v[-1]) != K:
            continue
        head = v[0] if v[-1] == K else -v[0]
        if head % W:
            continue
        n = head // W
        if abs(n) <= q.search_bound and not (q.exclude_zero and n == 0):
            found.add(n)
    return sorted(found, key=spiral_key)


def kronecker_approximate(q: ApproxQuery) -> ApproxResult:
    """
    Solve max_j ||n alpha_j - z_j|| < eps.

    The exhaustive strategy returns the first solution in the order
    0, 1, -1, 2, -2, ... (smallest |n|, positive first). The lattice strategy
    verifies every candidate directly and falls back to the exhaustive search
    when none passes, so both strategies agree on solvability.
    """
    if q.strategy is Strategy.LATTICE:
        candidates = _lattice_candidates(q)
        if candidates:
            table = orbit_norms(q.freq, np.array(candidates, dtype=np.int64), q.target)
            yes, _ = table.below(q.eps, q.guard)
            ok = yes.all(axis=1)
            if ok.any():
                i = int(np.argmax(ok))
                return ApproxResult(candidates[i], tuple(float(v) for v in table.values[i]), "lattice")
        logger.info("Lattice candidates failed verification; falling back to exhaustive search")
        return _exhaustive(q, "lattice+exhaustive-fallback")
    return _exhaustive(q)


# ============================================================================
# Embedding Z_k^d into Z
# ============================================================================

@dataclass
class EmbeddingTable:
    """Injective map w -> n_w with ||n_w alpha_j - w_j/k|| < eps for all j"""
    k: int
    d: int
    eps: Fraction
    mapping: Dict[Tuple[int, ...], int] = field(default_factory=dict)

    def __getitem__(self, w: Sequence[int]) -> int:
        return self.mapping[tuple(w)]

    def values(self) -> List[int]:
        return list(self.mapping.values())

    def inverse(self) -> Dict[int, Tuple[int, ...]]:
        return {n: w for w, n in self.mapping.items()}

    def check(self, freq: FrequencyVector, guard: Fraction = DEFAULT_GUARD) -> List[str]:
        """Re-verify injectivity and approximation quality"""
        problems = []
        if len(set(self.mapping.values())) != len(self.mapping):
            problems.append("embedding is not injective")
        for w, n in self.mapping.items():
            table = orbit_norms(freq, [n], [Fraction(c, self.k) for c in w])
            yes, _ = table.below(self.eps, guard)
            if not yes.all():
                problems.append(f"n_w={n} misses w={w}")
        return problems

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k': self.k, 'd': self.d, 'eps': str(self.eps),
            'table': [{'w': list(w), 'n': n} for w, n in sorted(self.mapping.items())],
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EmbeddingTable":
        mapping = {tuple(item['w']): int(item['n']) for item in data['table']}
        return cls(int(data['k']), int(data['d']), Fraction(data['eps']), mapping)


def embed_group(freq: FrequencyVector, k: int, eps: Any, search_bound: int,
                cap: int = DEFAULT_EMBEDDING_CAP, guard: Fraction = DEFAULT_GUARD) -> EmbeddingTable:
    """
    Cover Z_k^d (lexicographic order) with distinct integers.

    Each w takes the first unused solution in the order 0, 1, -1, ...;
    collisions move on to the next candidate.
    """
    if k < 1:
        raise ValidationError(f"k must be positive, got {k}")
    eps = to_fraction(eps)
    size = k ** freq.d
    if size > cap:
        raise CapExceededError("embedding size k^d", size, cap, "lower k or d, or raise the embedding cap")

    table = EmbeddingTable(k, freq.d, eps)
    used = set()
    failures = []
    for w in product(range(k), repeat=freq.d):
        targets = [Fraction(c, k) for c in w]
        chosen = None
        for chunk in spiral_chunks(search_bound, start_size=1024):
            yes, _ = orbit_norms(freq, chunk, targets).below(eps, guard)
            for i in np.flatnonzero(yes.all(axis=1)):
                n = int(chunk[i])
                if n not in used:
                    chosen = n
                    break
            if chosen is not None:
                break
        if chosen is None:
            failures.append(w)
            continue
        used.add(chosen)
        table.mapping[w] = chosen
    if failures:
        raise EmbeddingError(failures)
    return table


def find_translate(A: WindowedSet, F: Iterable[int]) -> Tuple[int, int]:
    """
    Return (t, count) maximizing |(A + t) & F| over t with F - t inside A's window.

    Ties go to the smallest |t|, then the positive one.
    """
    F = sorted(set(int(f) for f in F))
    if not F:
        raise ValidationError("find_translate needs a nonempty F")
    lo, hi = A.window.lo, A.window.hi
    t_min, t_max = F[-1] - hi, F[0] - lo
    if t_min > t_max:
        raise ValidationError(f"Window {A.window} is too small to slide a set of diameter {F[-1] - F[0]}")
    ts = np.arange(t_min, t_max + 1, dtype=np.int64)
    mask = A.mask()
    counts = np.zeros(ts.size, dtype=np.int64)
    for f in F:
        counts += mask[f - ts - lo]
    best = int(counts.max())
    t = min((int(v) for v in ts[counts == best]), key=spiral_key)
    return t, best
