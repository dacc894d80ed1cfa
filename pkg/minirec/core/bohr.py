"""
Bohr Sets and Bohr-Hamming Neighborhoods

Features:
- Bohr(alpha, eta) = {n : max_j ||n alpha_j|| < eta}, membership and windowed enumeration
- Hamming balls U_r(x) in Z_k^d with exact counting
- BH(alpha; eps, eta) + m: at least ceil((1 - eta) d) coordinates within eps
- Windowed checks of the sumset containment and of shifted covers
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import NotFound, ValidationError
from .torus import (DEFAULT_GUARD, FrequencyVector, TorusPoint, Verdict,
                    arc_threshold, orbit_norms, to_fraction)
from .windows import Window, WindowedSet

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BohrSpec:
    """Bohr(alpha, eta); ``degenerate`` when eta > 1/2 (the whole of Z)"""
    freq: FrequencyVector
    eta: Fraction
    guard: Fraction = DEFAULT_GUARD

    def __post_init__(self):
        object.__setattr__(self, 'eta', to_fraction(self.eta))
        if self.eta <= 0:
            raise ValidationError(f"eta must be positive, got {self.eta}")

    @property
    def degenerate(self) -> bool:
        return self.eta > Fraction(1, 2)

    def describe(self) -> str:
        return f"Bohr({self.freq}, {self.eta})"

    def to_dict(self) -> Dict[str, Any]:
        return {'freq': self.freq.to_dict(), 'eta': str(self.eta), 'degenerate': self.degenerate}


def bohr_masks(spec: BohrSpec, ns: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    if spec.degenerate:
        ones = np.ones(len(ns), dtype=bool)
        return ones, ~ones
    yes, amb = orbit_norms(spec.freq, ns).below(spec.eta, spec.guard)
    all_yes = yes.all(axis=1)
    # no coordinate definitely fails, at least one undecided
    undecided = ~all_yes & (yes | amb).all(axis=1)
    return all_yes, undecided


def bohr_contains(spec: BohrSpec, n: int) -> Verdict:
    """n in Bohr(alpha, eta), with AMBIGUOUS inside the guard margin"""
    yes, amb = bohr_masks(spec, np.array([n]))
    if yes[0]:
        return Verdict.YES
    return Verdict.AMBIGUOUS if amb[0] else Verdict.NO


def bohr_enumerate(spec: BohrSpec, window: Window) -> WindowedSet:
    """Bohr(alpha, eta) inside ``window``; boundary cases listed as ambiguous"""
    window = Window.parse(window)
    yes, amb = bohr_masks(spec, window.values())
    if amb.any():
        logger.info("%d ambiguous Bohr memberships in %s", int(amb.sum()), window)
    return WindowedSet.from_mask(window, yes, spec.describe(), amb)


# ============================================================================
# Hamming balls
# ============================================================================

def hamming_ball_size(k: int, d: int, r: int) -> int:
    """|U_r(x)| = sum_{i <= r} C(d, i) (k - 1)^i"""
    if k < 2:
        raise ValidationError(f"k must be at least 2, got {k}")
    if not 0 <= r <= d:
        raise ValidationError(f"radius must satisfy 0 <= r <= d, got r={r}, d={d}")
    return sum(math.comb(d, i) * (k - 1) ** i for i in range(r + 1))


@dataclass(frozen=True)
class HammingBall:
    """U_r(center) in Z_k^d, elements as integer tuples mod k"""
    k: int
    d: int
    r: int
    center: Tuple[int, ...]

    def __post_init__(self):
        if self.k < 2 or self.d < 1:
            raise ValidationError(f"Need k >= 2 and d >= 1, got k={self.k}, d={self.d}")
        if not 0 <= self.r <= self.d:
            raise ValidationError(f"radius must satisfy 0 <= r <= d, got r={self.r}")
        if len(self.center) != self.d:
            raise ValidationError(f"center has dimension {len(self.center)}, expected {self.d}")
        object.__setattr__(self, 'center', tuple(int(c) % self.k for c in self.center))

    def members(self):
        for y in product(range(self.k), repeat=self.d):
            if hamming_ball_contains(self, y):
                yield y

    def size(self) -> int:
        return hamming_ball_size(self.k, self.d, self.r)


def hamming_ball_contains(ball: HammingBall, y: Sequence[int]) -> bool:
    """#{j : x_j = y_j} >= d - r"""
    if len(y) != ball.d:
        raise ValidationError(f"Dimension mismatch: ball has d={ball.d}, point has {len(y)} coordinates")
    agree = sum(1 for x, v in zip(ball.center, y) if x == int(v) % ball.k)
    return agree >= ball.d - ball.r


# ============================================================================
# Bohr-Hamming neighborhoods
# ============================================================================

@dataclass(frozen=True)
class BohrHammingSpec:
    """
    {n : #{j : ||(n - m) alpha_j - z_j|| < eps} >= ceil((1 - eta) d)}.

    With targets z = 0 this is BH(alpha; eps, eta) + m.
    """
    freq: FrequencyVector
    eps: Fraction
    eta_frac: Fraction
    shift: int = 0
    targets: Optional[Tuple[TorusPoint, ...]] = None
    guard: Fraction = DEFAULT_GUARD

    def __post_init__(self):
        object.__setattr__(self, 'eps', to_fraction(self.eps))
        object.__setattr__(self, 'eta_frac', to_fraction(self.eta_frac))
        if self.eps <= 0:
            raise ValidationError(f"eps must be positive, got {self.eps}")
        if not 0 < self.eta_frac <= 1:
            raise ValidationError(f"eta_frac must lie in (0, 1], got {self.eta_frac}")
        if self.targets is not None:
            targets = tuple(TorusPoint.of(t) for t in self.targets)
            if len(targets) != self.freq.d:
                raise ValidationError(f"{len(targets)} targets for a {self.freq.d}-dimensional frequency")
            object.__setattr__(self, 'targets', targets)

    @property
    def d(self) -> int:
        return self.freq.d

    @property
    def threshold(self) -> int:
        return math.ceil((1 - self.eta_frac) * self.d)

    def describe(self) -> str:
        base = f"BH({self.freq}; {self.eps}, {self.eta_frac})"
        if self.targets is not None:
            base += " at (" + ", ".join(str(t) for t in self.targets) + ")"
        return base + (f" + {self.shift}" if self.shift else "")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'freq': self.freq.to_dict(),
            'eps': str(self.eps),
            'eta_frac': str(self.eta_frac),
            'shift': self.shift,
            'targets': [t.to_json() for t in self.targets] if self.targets is not None else None,
            'threshold': self.threshold,
        }


@dataclass
class CountTable:
    """Per-n counts of definite and undecided coordinates"""
    ns: np.ndarray
    yes_count: np.ndarray
    ambiguous_count: np.ndarray
    norms: np.ndarray
    threshold: int

    @property
    def yes(self) -> np.ndarray:
        return self.yes_count >= self.threshold

    @property
    def no(self) -> np.ndarray:
        return self.yes_count + self.ambiguous_count < self.threshold

    @property
    def ambiguous(self) -> np.ndarray:
        return ~self.yes & ~self.no


def bh_counts(spec: BohrHammingSpec, ns: np.ndarray) -> CountTable:
    ns = np.asarray(ns, dtype=np.int64)
    table = orbit_norms(spec.freq, ns - spec.shift, spec.targets)
    yes, amb = table.below(spec.eps, spec.guard)
    return CountTable(ns, yes.sum(axis=1), amb.sum(axis=1), table.values, spec.threshold)


def bh_contains(spec: BohrHammingSpec, n: int) -> Verdict:
    counts = bh_counts(spec, np.array([n]))
    if counts.yes[0]:
        return Verdict.YES
    return Verdict.NO if counts.no[0] else Verdict.AMBIGUOUS


def bh_enumerate(spec: BohrHammingSpec, window: Window) -> WindowedSet:
    window = Window.parse(window)
    counts = bh_counts(spec, window.values())
    return WindowedSet.from_mask(window, counts.yes, spec.describe(), counts.ambiguous)


def enumeration_rows(counts: CountTable) -> List[List[Any]]:
    """CSV rows: n, per-coordinate norms, membership flag"""
    rows = []
    flags = np.where(counts.yes, 'yes', np.where(counts.no, 'no', 'ambiguous'))
    for i, n in enumerate(counts.ns):
        rows.append([int(n)] + [float(v) for v in counts.norms[i]] + [str(flags[i])])
    return rows


# ============================================================================
# Structural containments
# ============================================================================

@dataclass
class SumsetReport:
    """Outcome of a windowed containment check"""
    statement: str
    window: Window
    checked: int = 0
    violations: List[Tuple[int, int]] = field(default_factory=list)
    ambiguous_skipped: int = 0

    @property
    def holds(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict[str, Any]:
        return {
            'statement': self.statement,
            'window': self.window.to_dict(),
            'checked': self.checked,
            'violations': [list(v) for v in self.violations],
            'ambiguous_skipped': self.ambiguous_skipped,
            'holds': self.holds,
        }


def _check_translates(report: SumsetReport, offsets: Sequence[int], inner_yes: np.ndarray,
                      outer: CountTable, window: Window, limit: int = 100) -> None:
    """For each offset b and inner member h with b + h in window: b + h must be in outer"""
    size = len(window)
    for b in offsets:
        if abs(b) >= size:
            continue
        if b >= 0:
            src = slice(0, size - b)
            dst = slice(b, size)
        else:
            src = slice(-b, size)
            dst = slice(0, size + b)
        members = inner_yes[src]
        report.checked += int(members.sum())
        bad = members & outer.no[dst]
        report.ambiguous_skipped += int((members & outer.ambiguous[dst]).sum())
        if bad.any():
            hs = window.values()[src][bad]
            for h in hs[:max(0, limit - len(report.violations))]:
                report.violations.append((int(b), int(h)))


def check_sumset_containment(freq: FrequencyVector, eps: Any, eta_frac: Any, window: Window,
                             guard: Fraction = DEFAULT_GUARD) -> SumsetReport:
    """Bohr(alpha, eps/2) + BH(alpha; eps/2, eta) inside BH(alpha; eps, eta), windowed"""
    window = Window.parse(window)
    eps = to_fraction(eps)
    half = BohrSpec(freq, eps / 2, guard)
    inner = BohrHammingSpec(freq, eps / 2, eta_frac, guard=guard)
    outer = BohrHammingSpec(freq, eps, eta_frac, guard=guard)

    values = window.values()
    offsets = bohr_enumerate(half, window).members
    inner_counts = bh_counts(inner, values)
    outer_counts = bh_counts(outer, values)

    report = SumsetReport(f"Bohr(a, {eps / 2}) + BH(a; {eps / 2}, {inner.eta_frac}) in "
                          f"BH(a; {eps}, {outer.eta_frac})", window)
    _check_translates(report, offsets, inner_counts.yes, outer_counts, window)
    if report.violations:
        logger.error("Sumset containment failed at %d pairs", len(report.violations))
    return report


@dataclass
class CoverReport:
    """A shift m together with the windowed check BH + m inside C"""
    m: int
    statement: str
    containment: SumsetReport
    approximation: Dict[str, Any]

    @property
    def holds(self) -> bool:
        return self.containment.holds

    def to_dict(self) -> Dict[str, Any]:
        return {'m': self.m, 'statement': self.statement,
                'containment': self.containment.to_dict(), 'approximation': self.approximation}


def _cover(freq: FrequencyVector, z: Sequence[Any], radius: Fraction, eps_inner: Fraction,
           eta_frac: Any, target_set: BohrHammingSpec, search_bound: int, window: Window,
           guard: Fraction, strategy: str) -> CoverReport:
    from .diophantine import ApproxQuery, Strategy, kronecker_approximate

    window = Window.parse(window)
    query = ApproxQuery(freq, tuple(z), radius, search_bound, Strategy.parse(strategy), guard=guard)
    result = kronecker_approximate(query)
    m = result.n
    shifted = BohrHammingSpec(freq, eps_inner, eta_frac, shift=m, guard=guard)

    values = window.values()
    inner_yes = bh_counts(shifted, values).yes
    outer = bh_counts(target_set, values)
    report = SumsetReport(f"{shifted.describe()} in {target_set.describe()}", window)
    _check_translates(report, [0], inner_yes, outer, window)
    return CoverReport(m, report.statement, report, result.to_dict())


def shifted_bh_cover(freq: FrequencyVector, z: Sequence[Any], eps: Any, eta_frac: Any,
                     search_bound: int, window: Window, guard: Fraction = DEFAULT_GUARD,
                     strategy: str = "exhaustive") -> CoverReport:
    """
    Find m with ||m alpha_j - z_j|| < eps/2 and check
    BH(alpha; eps/2, eta) + m inside C = {n : #{j : ||n alpha_j - z_j|| < eps} >= (1 - eta) d}.

    Raises NotFound when no m exists within ``search_bound``.
    """
    eps = to_fraction(eps)
    target_set = BohrHammingSpec(freq, eps, eta_frac, targets=tuple(z), guard=guard)
    return _cover(freq, z, eps / 2, eps / 2, eta_frac, target_set, search_bound, window, guard, strategy)


def char_cover(freq: FrequencyVector, z: Sequence[Any], eps: Any, eta_frac: Any,
               search_bound: int, window: Window, guard: Fraction = DEFAULT_GUARD,
               strategy: str = "exhaustive") -> CoverReport:
    """
    Character form of the cover: E = {n : #{j : |e(n alpha_j) - e(z_j)| < eps} >= (1 - eta) d}
    contains BH(alpha; theta/2, eta) + m where theta = asin(eps/2)/pi.
    """
    theta = arc_threshold(eps, freq.precision_bits)
    target_set = BohrHammingSpec(freq, theta, eta_frac, targets=tuple(z), guard=guard)
    return _cover(freq, z, theta / 2, theta / 2, eta_frac, target_set, search_bound, window, guard, strategy)
