"""
Kleitman - Hamming-ball pigeonhole checks on Z_k^d and the witness extractor

Features:
- Exhaustive and sampled checks: every A in Z_k^d with |A| >= ceil(delta k^d)
  has distinct a, b with a - b in U_r(x), for every center x
- Deterministic first counterexample (center, then subset in lexicographic order)
- Center-partitioned scans over a process pool
- Empirical smallest dimension at which the exhaustive check holds
- Constructive extraction of a, b in A with a - b in BH(alpha; eps, eps) + m
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum, auto
from fractions import Fraction
from itertools import combinations, product
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from .bohr import BohrHammingSpec, HammingBall, bh_contains, hamming_ball_contains
from .diophantine import DEFAULT_EMBEDDING_CAP, embed_group, find_translate
from .errors import CapExceededError, EmbeddingError, ValidationError
from .torus import DEFAULT_GUARD, FrequencyVector, Verdict, orbit_norms, to_fraction
from .windows import WindowedSet

logger = logging.getLogger(__name__)

DEFAULT_KLEITMAN_CAP = 16
SAMPLED_SET_CAP = 1024


class Mode(Enum):
    EXHAUSTIVE = auto()
    SAMPLED = auto()

    @classmethod
    def parse(cls, value: Any) -> "Mode":
        if isinstance(value, Mode):
            return value
        try:
            return cls[str(value).upper()]
        except KeyError:
            raise ValidationError(f"Unknown mode '{value}' (expected exhaustive or sampled)")


@dataclass(frozen=True)
class KleitmanInstance:
    k: int
    d: int
    delta: Fraction
    r: int
    mode: Mode = Mode.EXHAUSTIVE
    trials: int = 1000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'delta', to_fraction(self.delta))
        object.__setattr__(self, 'mode', Mode.parse(self.mode))
        if self.k < 2 or self.d < 1:
            raise ValidationError(f"Need k >= 2 and d >= 1, got k={self.k}, d={self.d}")
        if not 0 <= self.r <= self.d:
            raise ValidationError(f"radius must satisfy 0 <= r <= d, got r={self.r}")
        if not 0 < self.delta <= 1:
            raise ValidationError(f"delta must lie in (0, 1], got {self.delta}")
        if self.trials < 1:
            raise ValidationError(f"trials must be positive, got {self.trials}")

    @property
    def size(self) -> int:
        return self.k ** self.d

    @property
    def min_size(self) -> int:
        """ceil(delta k^d)"""
        return math.ceil(self.delta * self.size)

    def to_dict(self) -> Dict[str, Any]:
        return {'k': self.k, 'd': self.d, 'delta': str(self.delta), 'r': self.r,
                'mode': self.mode.name.lower(), 'trials': self.trials, 'seed': self.seed}


@dataclass
class KleitmanResult:
    instance: KleitmanInstance
    holds: bool
    counterexample: Optional[Tuple[List[Tuple[int, ...]], Tuple[int, ...]]] = None
    subsets_checked: int = 0
    subsets_covered: int = 0
    centers_checked: int = 0
    runtime: float = 0.0

    def to_dict(self, timings: bool = False) -> Dict[str, Any]:
        data = {
            'instance': self.instance.to_dict(),
            'holds': self.holds,
            'counterexample': None if self.counterexample is None else {
                'A': [list(a) for a in self.counterexample[0]],
                'x': list(self.counterexample[1]),
            },
            'subsets_checked': self.subsets_checked,
            'subsets_covered': self.subsets_covered,
            'centers_checked': self.centers_checked,
        }
        if timings:
            data['runtime'] = round(self.runtime, 6)
        return data


def _elements(k: int, d: int) -> List[Tuple[int, ...]]:
    return list(product(range(k), repeat=d))


def _adjacency(k: int, d: int, r: int, center: Tuple[int, ...]) -> List[int]:
    """adj[a] = bitmask of b != a with a - b or b - a in U_r(center)"""
    elements = _elements(k, d)
    index = {e: i for i, e in enumerate(elements)}
    ball = HammingBall(k, d, r, center)
    inball = [hamming_ball_contains(ball, e) for e in elements]
    adj = [0] * len(elements)
    for i, a in enumerate(elements):
        for j in range(i + 1, len(elements)):
            b = elements[j]
            ab = index[tuple((x - y) % k for x, y in zip(a, b))]
            ba = index[tuple((y - x) % k for x, y in zip(a, b))]
            if inball[ab] or inball[ba]:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    return adj


def _scan_center(args: Tuple[int, int, int, Tuple[int, ...], int, bool]) -> Tuple[Optional[Tuple[int, ...]], int]:
    """First pair-free subset for one center, and the number of subsets examined"""
    k, d, r, center, m0, all_sizes = args
    adj = _adjacency(k, d, r, center)
    n = len(adj)
    checked = 0
    sizes = range(m0, n + 1) if all_sizes else (m0,)
    for s in sizes:
        for combo in combinations(range(n), s):
            checked += 1
            mask = 0
            for i in combo:
                mask |= 1 << i
            if not any(adj[i] & mask for i in combo):
                return combo, checked
    return None, checked


def _exhaustive(inst: KleitmanInstance, cap: int, workers: int, all_sizes: bool) -> KleitmanResult:
    if inst.size > cap:
        raise CapExceededError("exhaustive group size k^d", inst.size, cap,
                               "use --mode sampled for larger groups")
    elements = _elements(inst.k, inst.d)
    m0 = inst.min_size
    covered = sum(math.comb(inst.size, s) for s in range(m0, inst.size + 1))
    units = [(inst.k, inst.d, inst.r, x, m0, all_sizes) for x in elements]

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_scan_center, units))
    else:
        outcomes = []
        for unit in units:
            outcomes.append(_scan_center(unit))
            if outcomes[-1][0] is not None:
                break

    result = KleitmanResult(inst, True, subsets_covered=covered)
    for x, (combo, checked) in zip(elements, outcomes):
        result.subsets_checked += checked
        result.centers_checked += 1
        if combo is not None:
            result.holds = False
            result.counterexample = ([elements[i] for i in combo], x)
            break
    return result


def _sampled(inst: KleitmanInstance) -> KleitmanResult:
    m0 = inst.min_size
    if m0 > SAMPLED_SET_CAP:
        raise CapExceededError("sampled set size ceil(delta k^d)", m0, SAMPLED_SET_CAP,
                               "lower delta or the group size")
    if inst.size >= 1 << 62:
        raise ValidationError(f"k^d = {inst.size} is too large to index")
    rng = np.random.default_rng(inst.seed)
    powers = inst.k ** np.arange(inst.d - 1, -1, -1, dtype=np.int64)
    all_centers = inst.size <= 4096
    centers = np.array(_elements(inst.k, inst.d), dtype=np.int64) if all_centers else None
    result = KleitmanResult(inst, True, subsets_covered=inst.trials)
    off_diagonal = ~np.eye(m0, dtype=bool)

    for _ in range(inst.trials):
        idx = np.sort(rng.choice(inst.size, size=m0, replace=False)) if inst.size <= 1 << 24 \
            else np.unique(rng.integers(0, inst.size, size=m0))
        digits = (idx[:, None] // powers) % inst.k
        diff = np.mod(digits[:, None, :] - digits[None, :, :], inst.k)
        trial_centers = centers if all_centers else rng.integers(0, inst.k, size=(1, inst.d))
        result.subsets_checked += 1
        for x in trial_centers:
            result.centers_checked += 1
            mismatches = (diff != x).sum(axis=2)
            if not ((mismatches <= inst.r) & off_diagonal[:len(idx), :len(idx)]).any():
                result.holds = False
                result.counterexample = ([tuple(int(v) for v in row) for row in digits],
                                         tuple(int(v) for v in x))
                return result
    return result


def kleitman_check(inst: KleitmanInstance, cap: int = DEFAULT_KLEITMAN_CAP, workers: int = 1,
                   all_sizes: bool = False) -> KleitmanResult:
    """
    Check that every large A has distinct a, b with a - b in U_r(x).

    Pair-free sets are closed under taking subsets, so the exhaustive scan
    only visits sets of size exactly ceil(delta k^d): the verdict and the
    first counterexample coincide with a scan over all larger sizes, which
    ``all_sizes`` performs literally.
    """
    start = time.perf_counter()
    if inst.mode is Mode.EXHAUSTIVE:
        result = _exhaustive(inst, cap, max(1, workers), all_sizes)
    else:
        result = _sampled(inst)
    result.runtime = time.perf_counter() - start
    logger.info("kleitman k=%d d=%d delta=%s r=%d: %s after %d subsets",
                inst.k, inst.d, inst.delta, inst.r, "holds" if result.holds else "counterexample",
                result.subsets_checked)
    return result


def radius_profile(k: int, d: int, delta: Any, cap: int = DEFAULT_KLEITMAN_CAP,
                   workers: int = 1) -> Dict[int, bool]:
    """Exhaustive verdict for every radius 0..d; holding is monotone in r"""
    verdicts = {}
    for r in range(d + 1):
        verdicts[r] = kleitman_check(KleitmanInstance(k, d, delta, r), cap, workers).holds
    return verdicts


def monotonicity_violations(verdicts: Dict[int, bool]) -> List[int]:
    return [r for r in sorted(verdicts) if r + 1 in verdicts and verdicts[r] and not verdicts[r + 1]]


def empirical_dimension(k: int, delta: Any, r: int, d_max: int,
                        cap: int = DEFAULT_KLEITMAN_CAP, workers: int = 1) -> Dict[str, Any]:
    """Smallest d <= d_max (k^d within cap) at which the exhaustive check holds"""
    rows = []
    found = None
    for d in range(1, d_max + 1):
        if k ** d > cap:
            logger.info("Stopping at d=%d: k^d=%d exceeds cap %d", d, k ** d, cap)
            break
        result = kleitman_check(KleitmanInstance(k, d, delta, min(r, d)), cap, workers)
        rows.append({'d': d, 'radius': min(r, d), 'holds': result.holds})
        if result.holds and found is None:
            found = d
    return {'k': k, 'delta': str(to_fraction(delta)), 'r': r, 'rows': rows, 'dimension': found}


# ============================================================================
# Witness extraction
# ============================================================================

@dataclass
class HammingWitness:
    """a, b in A with #{j : ||(a - b - m) alpha_j|| < eps} >= ceil((1 - eps) d)"""
    a: int
    b: int
    m: int
    passing_indices: Tuple[int, ...]
    norms: Tuple[float, ...]
    w: Tuple[int, ...] = ()
    w_prime: Tuple[int, ...] = ()
    translate: int = 0
    radius: int = 0

    def to_dict(self) -> Dict[str, Any]:
        return {
            'a': self.a, 'b': self.b, 'm': self.m,
            'passing_indices': list(self.passing_indices),
            'norms': {str(j): self.norms[j] for j in self.passing_indices},
            'w': list(self.w), 'w_prime': list(self.w_prime),
            'translate': self.translate, 'radius': self.radius,
        }


@dataclass
class WitnessFailure:
    """The first pipeline stage that could not be completed"""
    stage: str
    diagnostics: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {'stage': self.stage, 'diagnostics': self.diagnostics}


def _residue_point(freq: FrequencyVector, m: int, k: int) -> Tuple[int, ...]:
    """w^(m): nearest point of (Z/k)^d to m alpha"""
    out = []
    for p in freq.entries:
        x = p.scaled(m).dyadic()
        out.append(round(x * k) % k)
    return tuple(out)


def hamming_recurrence_witness(freq: FrequencyVector, eps: Any, m: int, A: WindowedSet, k: int,
                               search_bound: int, radius: Optional[int] = None,
                               delta: Any = None, embedding_cap: int = DEFAULT_EMBEDDING_CAP,
                               guard: Fraction = DEFAULT_GUARD):
    """
    Find a, b in A with a - b in BH(alpha; eps, eps) + m.

    Z_k^d is embedded at quality eps/3, A is slid onto the embedded copy, and a
    pair w, w' of the translate with w - w' in the Hamming ball around w^(m)
    gives a = n_w - t, b = n_w' - t. Returns HammingWitness or WitnessFailure.
    """
    eps = to_fraction(eps)
    if not 0 < eps <= 1:
        raise ValidationError(f"eps must lie in (0, 1], got {eps}")
    if k * eps <= 3:
        raise ValidationError(f"Need k > 3/eps, got k={k}, eps={eps}")
    d = freq.d
    threshold = math.ceil((1 - eps) * d)
    radius = d - threshold if radius is None else radius
    if not 0 <= radius <= d:
        raise ValidationError(f"radius must satisfy 0 <= r <= d, got {radius}")
    if delta is not None and A.density() <= to_fraction(delta):
        logger.warning("Window density %s of A does not exceed delta=%s", A.density(), delta)

    try:
        table = embed_group(freq, k, eps / 3, search_bound, embedding_cap, guard)
    except (EmbeddingError, CapExceededError) as e:
        return WitnessFailure("embedding", {'error': str(e)})

    center = _residue_point(freq, m, k)
    try:
        t, count = find_translate(A, table.values())
    except ValidationError as e:
        return WitnessFailure("translate", {'error': str(e)})
    inverse = table.inverse()
    shifted = sorted(inverse[n] for n in table.values() if (n - t) in A)
    if len(shifted) < 2:
        return WitnessFailure("translate", {'translate': t, 'overlap': count,
                                            'reason': "fewer than two embedded points land in A"})

    ball = HammingBall(k, d, radius, center)
    spec = BohrHammingSpec(freq, eps, eps, shift=m, guard=guard)
    tried = 0
    for w in shifted:
        for w2 in shifted:
            if w == w2:
                continue
            diff = tuple((x - y) % k for x, y in zip(w, w2))
            if not hamming_ball_contains(ball, diff):
                continue
            tried += 1
            a, b = table[w] - t, table[w2] - t
            norms = orbit_norms(freq, [a - b - m])
            yes, _ = norms.below(eps, guard)
            passing = tuple(int(j) for j in np.flatnonzero(yes[0]))
            if len(passing) < threshold or bh_contains(spec, a - b) is not Verdict.YES:
                logger.debug("Pair %s, %s fails the direct check", w, w2)
                continue
            return HammingWitness(a, b, m, passing, tuple(float(v) for v in norms.values[0]),
                                  w, w2, t, radius)
    return WitnessFailure("pair", {'translate': t, 'overlap': count, 'center': list(center),
                                   'radius': radius, 'pairs_in_ball': tried})
