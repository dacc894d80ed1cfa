"""
Construction - Nested interval families, stage measures and the staged pipeline

Features:
- Cantor families satisfying nesting, exact branching and shrinking diameters
- Uniform stage measures with exact rational weights and ancestor-mass checks
- L1(sigma) distances between phase functions and characters e_n
- Windowed Q_{f,k} sets with a rigorous sup bound over each interval
- One refinement stage: independent points, phase tables, S_{psi,k}
  selections, certified shrink radius and child intervals
- The full pipeline over targets m_1, m_2, ...: stage chains, measures
  sigma_t, nested sets S_t, the diagonal selection S' and rigidity profiles
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from mpmath import mp, mpf

from .config import Caps
from .dynamics import delta_recurrence_falsify, structured_corpus
from .errors import PrecisionError, ValidationError
from .torus import (DEFAULT_GUARD, DEFAULT_PRECISION, Arc, FrequencyVector, TorusPoint,
                    arc_threshold, chord_from_norm, make_independent_frequencies,
                    orbit_fractions, orbit_norms, to_fraction)
from .windows import Window, WindowedSet, spiral, spiral_key

logger = logging.getLogger(__name__)

# 355/113 > pi, so certificates built on it are exact rational statements
PI_UPPER = Fraction(355, 113)
SHRINK_DIVISOR = 13


# ============================================================================
# Interval families
# ============================================================================

@dataclass
class IntervalFamily:
    """Disjoint closed arcs of stage k, each mapped to its stage k-1 parent"""
    stage: int
    intervals: List[Arc]
    parent_map: List[int] = field(default_factory=list)
    branching: int = 1

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def max_diameter(self) -> Fraction:
        return max(min(a.length, Fraction(1, 2)) for a in self.intervals)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'stage': self.stage,
            'branching': self.branching,
            'intervals': [a.to_dict() for a in self.intervals],
            'parent_map': list(self.parent_map),
            'max_diameter': str(self.max_diameter),
        }


def check_families(families: Sequence[IntervalFamily]) -> List[str]:
    """Nesting, exact branching, strictly shrinking diameters and disjointness"""
    problems = []
    for fam in families:
        for i, a in enumerate(fam.intervals):
            for b in fam.intervals[i + 1:]:
                if not a.disjoint(b):
                    problems.append(f"stage {fam.stage}: intervals {a} and {b} overlap")
    for prev, fam in zip(families, families[1:]):
        children = [0] * len(prev)
        for child, parent in zip(fam.intervals, fam.parent_map):
            children[parent] += 1
            if not prev.intervals[parent].contains_arc(child):
                problems.append(f"stage {fam.stage}: {child} escapes its parent {prev.intervals[parent]}")
        if any(c != fam.branching for c in children):
            problems.append(f"stage {fam.stage}: child counts {children} differ from b={fam.branching}")
        if not fam.max_diameter < prev.max_diameter:
            problems.append(f"stage {fam.stage}: max diameter {fam.max_diameter} does not shrink")
    return problems


def ancestor(families: Sequence[IntervalFamily], stage: int, index: int, target_stage: int) -> int:
    """Index of the stage ``target_stage`` interval containing interval ``index`` of ``stage``"""
    while stage > target_stage:
        index = families[stage].parent_map[index]
        stage -= 1
    return index


def build_cantor(branching: Sequence[int], start: Arc = Arc(0, 1), shrink: Any = Fraction(1, 3),
                 precision_bits: int = DEFAULT_PRECISION) -> List[IntervalFamily]:
    """
    Stage 0 is ``start``; each interval of width w gets b equal children of
    width w * min(shrink, 1/(b+1)) separated by equal gaps.
    """
    shrink = to_fraction(shrink)
    if not 0 < shrink < 1:
        raise ValidationError(f"shrink must lie in (0, 1), got {shrink}")
    families = [IntervalFamily(0, [start], [-1], 1)]
    for k, b in enumerate(branching, start=1):
        if b < 2:
            raise ValidationError(f"branching b_{k} must be at least 2, got {b}")
        intervals, parents = [], []
        for p, parent in enumerate(families[-1].intervals):
            w = parent.length
            width = w * min(shrink, Fraction(1, b + 1))
            if width * (1 << precision_bits) < 1:
                raise PrecisionError(f"Stage {k} intervals are narrower than 2^-{precision_bits}",
                                     precision_bits + math.ceil(math.log2(1 / float(width))) + 1)
            gap = (w - b * width) / (b + 1)
            for i in range(b):
                lo = parent.lo + gap + i * (width + gap)
                intervals.append(Arc(lo, lo + width))
                parents.append(p)
        families.append(IntervalFamily(k, intervals, parents, b))
    return families


# ============================================================================
# Measures
# ============================================================================

@dataclass
class DiscreteMeasure:
    """Atoms x_I with rational weights"""
    atoms: List[Tuple[TorusPoint, Fraction]]

    @property
    def total_mass(self) -> Fraction:
        return sum((w for _, w in self.atoms), Fraction(0))

    def mass_of(self, arc: Arc) -> Fraction:
        return sum((w for x, w in self.atoms if arc.contains(x)), Fraction(0))

    def points(self) -> List[TorusPoint]:
        return [x for x, _ in self.atoms]

    def rows(self) -> List[List[Any]]:
        return [[x.to_json(), str(w)] for x, w in self.atoms]

    def to_dict(self) -> Dict[str, Any]:
        return {'atoms': [{'x': x.to_json(), 'weight': str(w)} for x, w in self.atoms]}


def stage_measure(fam: IntervalFamily, points: Optional[Sequence[Any]] = None) -> DiscreteMeasure:
    """sigma_k: weight 1/#I^(k) at one point per interval (default: the centers)"""
    if points is None:
        points = [TorusPoint.of(a.center) for a in fam.intervals]
    if len(points) != len(fam):
        raise ValidationError(f"{len(points)} points for {len(fam)} intervals")
    weight = Fraction(1, len(fam))
    atoms = []
    for arc, x in zip(fam.intervals, points):
        x = TorusPoint.of(x)
        if not arc.contains(x):
            raise ValidationError(f"Point {x} lies outside its interval {arc}")
        atoms.append((x, weight))
    return DiscreteMeasure(atoms)


def continuity_check(families: Sequence[IntervalFamily], measures: Sequence[DiscreteMeasure]) -> List[str]:
    """sigma_k'(I) == 1/#I^(j) for every stage-j interval I and every k' >= j"""
    problems = []
    for kp, mu in enumerate(measures):
        if mu.total_mass != 1:
            problems.append(f"sigma_{kp} has total mass {mu.total_mass}")
        for j in range(kp + 1):
            expected = Fraction(1, len(families[j]))
            for arc in families[j].intervals:
                mass = mu.mass_of(arc)
                if mass != expected:
                    problems.append(f"sigma_{kp}({arc}) = {mass}, expected {expected}")
    return problems


def _mpf(q: Fraction) -> mpf:
    return mpf(q.numerator) / q.denominator


def l1_char_distance(mu: DiscreteMeasure, f: Callable[[int, TorusPoint], Any], n: int) -> mpf:
    """
    sum_x w(x) |f(x) - e(n x)| where f(i, x) returns the phase phi with
    f(x) = e(phi) for atom number i at x.
    """
    bits = max(x.precision_bits for x, _ in mu.atoms) + 32
    with mp.workprec(bits):
        total = mpf(0)
        for i, (x, w) in enumerate(mu.atoms):
            phase = TorusPoint.of(f(i, x)).as_mpf()
            total += _mpf(w) * 2 * abs(mp.sinpi(phase - n * x.as_mpf()))
        return total


def character_phase(m: int) -> Callable[[int, TorusPoint], Any]:
    """The phase of e_m"""
    def phase(_: int, x: TorusPoint) -> Any:
        return x.scaled(m).value
    return phase


# ============================================================================
# Q_{f,k}
# ============================================================================

def q_members(fam: IntervalFamily, phases: Sequence[int], k: int, ns: np.ndarray) -> np.ndarray:
    """
    For each n: #{I : sup_{x in I} |e(f_I/k) - e(n x)| < 1/k} >= (1 - 1/k) #I,
    with the sup bounded by |e(f_I/k) - e(n c_I)| + 2 pi |n| r_I.
    """
    ns = np.asarray(ns, dtype=np.int64)
    if len(phases) != len(fam):
        raise ValidationError(f"{len(phases)} phases for {len(fam)} intervals")
    threshold = math.ceil((1 - Fraction(1, k)) * len(fam))
    if threshold == 0:
        return np.ones(ns.size, dtype=bool)
    centers = [TorusPoint.of(a.center) for a in fam.intervals]
    targets = [Fraction(int(p) % k, k) for p in phases]
    table = orbit_norms(centers, ns, targets)
    norms = np.minimum(table.values + table.error, 0.5)
    radii = np.array([float(a.radius) for a in fam.intervals])
    sup = chord_from_norm(norms) + 2 * np.pi * np.abs(ns)[:, None] * radii[None, :] * (1 + 1e-12) + 1e-12
    good = (sup < 1.0 / k).sum(axis=1)
    return good >= threshold


def q_set(fam: IntervalFamily, phases: Sequence[int], k: int, S: WindowedSet,
          window: Optional[Window] = None) -> WindowedSet:
    """Q_{f,k} & window for the interval-constant f = e(phases/k)"""
    window = Window.parse(window) if window is not None else S.window
    ns = np.array([n for n in S.members if n in window], dtype=np.int64)
    keep = q_members(fam, phases, k, ns)
    return WindowedSet(window, tuple(int(n) for n in ns[keep]), f"Q_(f,{k})")


# ============================================================================
# Kronecker condition on finite point sets
# ============================================================================

@dataclass
class KroneckerReport:
    k: int
    witnesses: Dict[Tuple[int, ...], int] = field(default_factory=dict)
    missing: List[Tuple[int, ...]] = field(default_factory=list)
    sampled: bool = False

    @property
    def holds(self) -> bool:
        return not self.missing

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k': self.k, 'holds': self.holds, 'sampled': self.sampled,
            'witnesses': [{'f': list(f), 'n': n} for f, n in sorted(self.witnesses.items())],
            'missing': [list(f) for f in self.missing],
        }


def _phase_functions(size: int, k: int, cap: int, samples: int,
                     rng: np.random.Generator) -> Tuple[List[Tuple[int, ...]], bool]:
    if k ** size <= cap:
        return list(product(range(k), repeat=size)), False
    logger.info("Sampling %d of %d phase functions", samples, k ** size)
    drawn = {tuple(int(v) for v in rng.integers(0, k, size=size)) for _ in range(samples)}
    drawn.add((0,) * size)
    return sorted(drawn), True


def kronecker_condition(points: Sequence[Any], k: int, window: Window, cap: int = 256,
                        samples: int = 64, seed: int = 0,
                        guard: Fraction = DEFAULT_GUARD) -> KroneckerReport:
    """For every f: points -> Lambda_k, some n in window with |f(x) - e(n x)| < 1/k at every point"""
    window = Window.parse(window)
    points = [TorusPoint.of(p) for p in points]
    theta = arc_threshold(Fraction(1, k))
    functions, sampled = _phase_functions(len(points), k, cap, samples, np.random.default_rng(seed))
    ns = window.values()
    order = np.lexsort((ns < 0, np.abs(ns)))
    ns = ns[order]
    report = KroneckerReport(k, sampled=sampled)
    for f in functions:
        yes, _ = orbit_norms(points, ns, [Fraction(v, k) for v in f]).below(theta, guard)
        hit = yes.all(axis=1)
        if hit.any():
            report.witnesses[f] = int(ns[int(np.argmax(hit))])
        else:
            report.missing.append(f)
    return report


# ============================================================================
# One refinement stage
# ============================================================================

@dataclass
class PsiEntry:
    psi: Tuple[int, ...]
    size: int
    selection: Tuple[int, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {'psi': list(self.psi), 'size': self.size, 'selection': list(self.selection)}


@dataclass
class StageRecord:
    """Points K_k, the phase table, selections S'_k and the shrink certificate"""
    k: int
    points: FrequencyVector
    psi_table: List[PsiEntry]
    selection: Tuple[int, ...]
    shrink_radius: Fraction
    certificate: Dict[str, Any]
    gaps: List[Tuple[int, ...]] = field(default_factory=list)
    sampled: bool = False
    target_psi: Optional[Tuple[int, ...]] = None

    def entry(self, psi: Tuple[int, ...]) -> Optional[PsiEntry]:
        for e in self.psi_table:
            if e.psi == psi:
                return e
        return None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'k': self.k,
            'points': self.points.to_dict(),
            'lambda': [str(Fraction(i, self.k)) for i in range(self.k)],
            'psi_table': [e.to_dict() for e in self.psi_table],
            'selection': list(self.selection),
            'shrink_radius': str(self.shrink_radius),
            'certificate': self.certificate,
            'gaps': [list(g) for g in self.gaps],
            'sampled': self.sampled,
            'target_psi': list(self.target_psi) if self.target_psi is not None else None,
        }


def _slot_intervals(prev: IntervalFamily, b: int) -> Tuple[List[Tuple[Fraction, Fraction]], List[int], List[Fraction]]:
    """Middle half of each of b equal slots per parent, as sub-intervals of [0, 1]"""
    intervals, parents, widths = [], [], []
    for p, arc in enumerate(prev.intervals):
        slot = arc.length / b
        for i in range(b):
            lo = arc.lo + i * slot + slot / 4
            hi = lo + slot / 2
            if lo >= 1:
                lo, hi = lo - 1, hi - 1
            elif hi > 1:
                hi = Fraction(1)
            intervals.append((lo, hi))
            parents.append(p)
            widths.append(slot)
    return intervals, parents, widths


def certified_radius(k: int, selection: Sequence[int], precision_bits: int = DEFAULT_PRECISION,
                     ceiling: Optional[Fraction] = None) -> Tuple[Fraction, Dict[str, Any]]:
    """
    Dyadic radius r with 2 pi |n| (r + 2^-P) < 1/(2k) for every selected n,
    so |e(n x) - e(n alpha)| < 1/(2k) across the interval around alpha.
    """
    n_max = max((abs(int(n)) for n in selection), default=1) or 1
    one = 1 << precision_bits
    radius = Fraction(one // (SHRINK_DIVISOR * k * n_max), one)
    if ceiling is not None:
        radius = min(radius, ceiling)
    slack = 2 * PI_UPPER * n_max * (radius + Fraction(1, one))
    certificate = {
        'n_max': n_max,
        'radius': str(radius),
        'bound': str(slack),
        'limit': str(Fraction(1, 2 * k)),
        'holds': radius > 0 and slack < Fraction(1, 2 * k),
    }
    if not certificate['holds']:
        raise PrecisionError(f"Stage {k} shrink radius cannot be certified",
                             precision_bits + 2 * n_max.bit_length() + 8)
    return radius, certificate


def phase_of_character(points: FrequencyVector, m: int, k: int) -> Tuple[int, ...]:
    """psi_m: the Lambda_k phase nearest to m x at every point"""
    return tuple(round(p.scaled(m).dyadic() * k) % k for p in points.entries)


def refine_stage(prev: IntervalFamily, k: int, S: WindowedSet, caps: Caps, branching: int = 2,
                 target: int = 0, precision_bits: int = DEFAULT_PRECISION,
                 guard: Fraction = DEFAULT_GUARD,
                 rng: Optional[np.random.Generator] = None) -> Tuple[StageRecord, IntervalFamily]:
    """
    Build stage k from stage k-1.

    ``branching`` independent points go into every parent; S_{psi,k} is
    S & window restricted to n with
    #{x : |e(psi(x)/k) - e(n x)| < 1/(2k)} >= (1 - 1/k)|K_k|; its
    ``select_cap`` first members in the order 0, 1, -1, ... form S'_{psi,k}.
    Children are centered at the points with a radius certifying
    |e(n x) - e(n alpha)| < 1/(2k) for every selected n.
    """
    if k < 1:
        raise ValidationError(f"stage index must be positive, got {k}")
    rng = rng if rng is not None else np.random.default_rng(0)
    slots, parents, widths = _slot_intervals(prev, branching)
    points = make_independent_frequencies(len(slots), slots, precision_bits,
                                          certificate_cap=caps.certificate_cap)
    bits = points.precision_bits
    d = points.d

    # code[:, j] = i when ||n x_j - i/k|| < theta, else -1
    ns = np.asarray(S.members, dtype=np.int64)
    order = np.lexsort((ns < 0, np.abs(ns)))
    ns = ns[order]
    theta = arc_threshold(Fraction(1, 2 * k), bits)
    code = np.full((ns.size, d), -1, dtype=np.int64)
    for j, x in enumerate(points.entries):
        for i in range(k):
            yes, _ = orbit_norms([x], ns, [Fraction(i, k)]).below(theta, guard)
            code[yes[:, 0], j] = i
    threshold = math.ceil((1 - Fraction(1, k)) * d)

    target_psi = phase_of_character(points, target, k)
    functions, sampled = _phase_functions(d, k, caps.psi_cap, caps.psi_samples, rng)
    if target_psi not in functions:
        functions = sorted(set(functions) | {target_psi})

    table, gaps, union = [], [], set()
    for psi in functions:
        hits = (code == np.asarray(psi, dtype=np.int64)[None, :]).sum(axis=1) >= threshold
        members = ns[hits]
        selection = tuple(int(n) for n in members[:caps.select_cap])
        if not selection:
            gaps.append(psi)
        union.update(selection)
        table.append(PsiEntry(psi, int(members.size), selection))
    if gaps:
        logger.warning("Stage %d: %d phase functions have no element of S in the window", k, len(gaps))

    selection = tuple(sorted(union, key=spiral_key))
    radius, certificate = certified_radius(k, selection, bits, min(widths) / 8)

    children = [Arc(x.dyadic(bits) - radius, x.dyadic(bits) + radius) for x in points.entries]
    family = IntervalFamily(k, children, parents, branching)
    record = StageRecord(k, points, table, selection, radius, certificate, gaps, sampled, target_psi)
    logger.info("Stage %d: %d points, %d phase functions, |S'_k| = %d, radius %.3g",
                k, d, len(functions), len(selection), float(radius))
    return record, family


def q_containment(record: StageRecord, family: IntervalFamily) -> List[str]:
    """S'_{psi,k} inside Q_{f,k} for the interval-constant extension f of psi"""
    problems = []
    for entry in record.psi_table:
        if not entry.selection:
            continue
        inside = q_members(family, entry.psi, record.k, np.array(entry.selection, dtype=np.int64))
        for n, ok in zip(entry.selection, inside):
            if not ok:
                problems.append(f"stage {record.k}: n={n} of S'_psi for psi={entry.psi} is not in Q_(f,k)")
    return problems


def stage_bound_check(families: Sequence[IntervalFamily], measures: Sequence[DiscreteMeasure],
                      record: StageRecord, psi: Sequence[int], n: int) -> List[Dict[str, Any]]:
    """||f~ - e_n||_{L1(sigma_k')} against 3/k for every built k' >= k"""
    k = record.k
    rows = []
    for kp in range(k, len(measures)):
        def phase(i: int, _: TorusPoint, kp=kp) -> Fraction:
            return Fraction(int(psi[ancestor(families, kp, i, k)]) % k, k)
        value = l1_char_distance(measures[kp], phase, n)
        bound = Fraction(3, k)
        rows.append({'stage': k, 'measure_stage': kp, 'n': n, 'value': float(value),
                     'bound': str(bound), 'ok': bool(value < _mpf(bound))})
    return rows


# ============================================================================
# Rigidity profiles
# ============================================================================

def rigidity_profile(seq: Sequence[int], mu: DiscreteMeasure, m: int,
                     bounds: Optional[Sequence[Any]] = None) -> List[Dict[str, Any]]:
    """integral |e((s - m) x) - 1| d mu for every s, with an optional bound per element"""
    rows = []
    for i, s in enumerate(seq):
        value = l1_char_distance(mu, lambda _, x: 0, s - m)
        row = {'s': int(s), 'm': int(m), 'value': float(value)}
        if bounds is not None:
            bound = bounds[i]
            if isinstance(bound, mpf):
                row['bound'] = mp.nstr(bound, 12)
            else:
                bound = to_fraction(bound)
                row['bound'] = str(bound)
                bound = _mpf(bound)
            row['ok'] = bool(value < bound)
        rows.append(row)
    return rows


def character_gap(mu: DiscreteMeasure, mu_stage: int, families: Sequence[IntervalFamily],
                  stage: int, psi: Sequence[int], m: int) -> mpf:
    """
    max over the atoms of sigma_{mu_stage} of |e(m x) - f~(x)|, f~ the
    interval-constant extension of the stage ``stage`` phase table psi.
    """
    worst = mpf(0)
    with mp.workprec(DEFAULT_PRECISION + 32):
        for i, (x, _) in enumerate(mu.atoms):
            phase = Fraction(int(psi[ancestor(families, mu_stage, i, stage)]) % stage, stage)
            worst = max(worst, 2 * abs(mp.sinpi(_mpf(phase) - m * x.as_mpf())))
    return worst


# ============================================================================
# Pipeline
# ============================================================================

@dataclass
class Chain:
    """Stage families, records and measures built for one target m"""
    target: int
    families: List[IntervalFamily]
    records: List[StageRecord]
    measures: List[DiscreteMeasure]
    reduced: List[int] = field(default_factory=list)

    @property
    def sigma(self) -> DiscreteMeasure:
        return self.measures[-1]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'target': self.target,
            'families': [f.to_dict() for f in self.families],
            'records': [r.to_dict() for r in self.records],
            'measures': [m.to_dict() for m in self.measures],
            'reduced_stages': self.reduced,
        }


@dataclass
class PipelineReport:
    source: str
    window: Window
    targets: List[int]
    chains: List[Chain] = field(default_factory=list)
    nested_sets: List[Dict[str, Any]] = field(default_factory=list)
    diagonal: List[int] = field(default_factory=list)
    diagonal_sources: List[Dict[str, Any]] = field(default_factory=list)
    profile: List[Dict[str, Any]] = field(default_factory=list)
    stage_bounds: List[Dict[str, Any]] = field(default_factory=list)
    falsification: List[Dict[str, Any]] = field(default_factory=list)
    gaps: List[str] = field(default_factory=list)
    violations: List[str] = field(default_factory=list)

    def profile_rows(self) -> List[List[Any]]:
        return [[r['s'], r['m'], r['value'], r.get('bound', ''), r.get('ok', ''), r['kind'], r['stage']]
                for r in self.profile]

    def measure_rows(self) -> List[List[Any]]:
        rows = []
        for chain in self.chains:
            for x, w in chain.sigma.atoms:
                rows.append([chain.target, x.to_json(), str(w)])
        return rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            'source': self.source,
            'window': self.window.to_dict(),
            'targets': self.targets,
            'chains': [c.to_dict() for c in self.chains],
            'nested_sets': self.nested_sets,
            'diagonal': self.diagonal,
            'diagonal_sources': self.diagonal_sources,
            'stage_bounds': self.stage_bounds,
            'falsification': self.falsification,
            'gaps': self.gaps,
            'violations': self.violations,
        }


def _branching_for(count: int, max_points: int) -> int:
    return 2 if count * 2 <= max_points else 1


def build_chain(S: WindowedSet, target: int, stages: int, caps: Caps, start: Arc = Arc(0, 1),
                precision_bits: int = DEFAULT_PRECISION, guard: Fraction = DEFAULT_GUARD,
                rng: Optional[np.random.Generator] = None) -> Chain:
    """Stages 1..K refining ``start``, each aimed at the phase of e_target"""
    rng = rng if rng is not None else np.random.default_rng(0)
    families = [IntervalFamily(0, [start], [-1], 1)]
    records = []
    reduced = []
    for k in range(1, stages + 1):
        b = _branching_for(len(families[-1]), caps.max_points)
        if b == 1:
            # stage k keeps one child per interval, so b_k >= 2 fails here
            logger.warning("Stage %d: branching reduced to 1 by max_points=%d", k, caps.max_points)
            reduced.append(k)
        record, family = refine_stage(families[-1], k, S, caps, b, target, precision_bits, guard, rng)
        records.append(record)
        families.append(family)
    measures = [stage_measure(f) for f in families]
    return Chain(target, families, records, measures, reduced)


def _integral_table(mu: DiscreteMeasure, ns: np.ndarray, m: int) -> Tuple[np.ndarray, float]:
    """integral |e((n - m) x) - 1| d mu for all n, float64 with an error bound"""
    fracs, err = orbit_fractions(mu.points(), ns - m)
    norms = np.minimum(fracs, 1.0 - fracs)
    weights = np.array([float(w) for _, w in mu.atoms])
    values = chord_from_norm(norms) @ weights
    return values, 2 * np.pi * err + 1e-12


def _spiral_sorted(values: np.ndarray) -> np.ndarray:
    return values[np.lexsort((values < 0, np.abs(values)))]


def build_ks_pipeline(S: WindowedSet, targets: Sequence[int], stages: int, caps: Caps,
                      precision_bits: int = DEFAULT_PRECISION, guard: Fraction = DEFAULT_GUARD,
                      seed: int = 0) -> PipelineReport:
    """
    For each target m_t: build sigma_t from a chain of ``stages`` refinements
    of S_{t-1}, form E_r = {n in S_{t-1} : integral |e(n x) - e(m_t x)| d sigma_t < 1/r}
    for r <= r_cap, and set S_t to the union of the first members of each E_r.
    The diagonal S' takes one new member of each E_r per target.
    """
    if not S.members:
        raise ValidationError(f"S has no members in the window {S.window}")
    if stages < 1:
        raise ValidationError(f"stages must be positive, got {stages}")
    rng = np.random.default_rng(seed)
    report = PipelineReport(S.source, S.window, list(targets))
    current = S
    chosen: List[int] = []

    for t, m in enumerate(targets, start=1):
        chain = build_chain(current, m, stages, caps, precision_bits=precision_bits, guard=guard, rng=rng)
        report.chains.append(chain)
        for record in chain.records:
            for psi in record.gaps:
                report.gaps.append(f"target {m}, stage {record.k}: no selection for psi={list(psi)}")
        for k in chain.reduced:
            report.gaps.append(f"target {m}, stage {k}: branching 1 (max_points={caps.max_points})")

        ns = _spiral_sorted(np.asarray(current.members, dtype=np.int64))
        values, err = _integral_table(chain.sigma, ns, m)
        expanded = set()
        for r in range(1, caps.r_cap + 1):
            E_r = ns[values + err < 1.0 / r]
            first = [int(n) for n in E_r[:caps.expand_cap]]
            expanded.update(first)
            if not first:
                report.gaps.append(f"target {m}: E_{r} is empty in the window")
                continue
            fresh = next((n for n in first if n not in chosen), None)
            if fresh is not None and len(chosen) < caps.diag_cap:
                chosen.append(fresh)
                report.diagonal_sources.append({'s': fresh, 'target': m, 'r': r})

        nxt = WindowedSet(S.window, tuple(sorted(expanded)), f"S_{t}")
        if not set(nxt.members) <= set(current.members):
            report.violations.append(f"S_{t} is not contained in S_{t - 1}")
        report.nested_sets.append({'index': t, 'target': m, 'size': len(nxt),
                                   'members': list(nxt.spiral_members()[:64])})
        current = nxt

    report.diagonal = chosen
    _check_pipeline(report, S, caps, seed)
    return report


def _check_pipeline(report: PipelineReport, S: WindowedSet, caps: Caps, seed: int = 0) -> None:
    """Re-check every invariant of a finished run and fill the profile tables"""
    members = set(S.members)
    corpus = structured_corpus(Window.symmetric(caps.corpus_window), seed) if caps.falsify else []
    for n in report.diagonal:
        if n not in members:
            report.violations.append(f"S' element {n} is not in S")

    for chain in report.chains:
        m = chain.target
        report.violations.extend(check_families(chain.families))
        report.violations.extend(continuity_check(chain.families, chain.measures))
        for record, family in zip(chain.records, chain.families[1:]):
            if not record.certificate['holds']:
                report.violations.append(f"target {m}, stage {record.k}: shrink certificate fails")
            report.violations.extend(q_containment(record, family))
            for entry in record.psi_table:
                for n in entry.selection:
                    rows = stage_bound_check(chain.families, chain.measures, record, entry.psi, n)
                    for row in rows:
                        row['target'] = m
                        if not row['ok']:
                            report.violations.append(
                                f"target {m}, stage {record.k}: ||f - e_{n}|| = {row['value']:.6g} "
                                f">= 3/{record.k} at sigma_{row['measure_stage']}")
                    report.stage_bounds.extend(rows)

            # stage profile for the selection aimed at e_m
            entry = record.entry(record.target_psi)
            if entry and entry.selection:
                for kp in range(record.k, len(chain.measures)):
                    mu = chain.measures[kp]
                    gap = character_gap(mu, kp, chain.families, record.k, record.target_psi, m) \
                        if m != 0 else mpf(0)
                    bound = _mpf(Fraction(3, record.k)) + gap
                    for row in rigidity_profile(entry.selection, mu, m, [bound] * len(entry.selection)):
                        row.update(kind='stage', stage=record.k, measure_stage=kp)
                        report.profile.append(row)
                        if not row['ok']:
                            report.violations.append(
                                f"target {m}: profile value {row['value']:.6g} at s={row['s']} "
                                f"exceeds its stage-{record.k} bound")

            if caps.falsify:
                report.falsification.extend(_falsify_selection(record, corpus))

        # diagonal rows: each s of S' against the sigma_t it was drawn for, bound 1/r
        for source in report.diagonal_sources:
            if source['target'] != m:
                continue
            s, r = source['s'], source['r']
            row = rigidity_profile([s], chain.sigma, m, [Fraction(1, r)])[0]
            row.update(kind='diagonal', stage=len(chain.records), measure_stage=len(chain.records))
            report.profile.append(row)
            if not row['ok']:
                report.violations.append(f"target {m}: diagonal s={s} fails its 1/{r} bound")

    if report.violations:
        logger.error("Pipeline finished with %d violations", len(report.violations))


def _falsify_selection(record: StageRecord, corpus: Sequence[WindowedSet]) -> List[Dict[str, Any]]:
    """Empirical 1/k-recurrence labels for S'_k + m, |m| <= k"""
    if not record.selection:
        return []
    delta = Fraction(1, record.k)
    labels = []
    for m in spiral(record.k):
        shifted = [n + int(m) for n in record.selection]
        S = WindowedSet(Window(min(shifted), max(shifted)), tuple(shifted), f"S'_{record.k} + {int(m)}")
        found = delta_recurrence_falsify(S, delta, corpus)
        labels.append({
            'stage': record.k, 'm': int(m), 'delta': str(delta),
            'label': "falsified" if found else "not falsified (empirical)",
            'witness': found.to_dict() if found else None,
        })
    return labels
