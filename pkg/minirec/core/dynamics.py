"""
Dynamics - Rotation systems, return-time sets and the density harness

Features:
- Torus rotations, cyclic rotations and their finite products
- Finite unions of boxes (arcs x residue sets) with exact measures
- mu(D & T^n D) exact for rational rotations, rigorously bracketed otherwise
- Return-time sets R_c(T; D) over a window
- S & (E + R_0(T; D)) and S & (E + Bohr) with witnesses
- Upper Banach density estimates, difference sets and a falsification
  harness for delta-recurrence against a corpus of structured sets
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum, auto
from fractions import Fraction
from itertools import product
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple, Union

import numpy as np

from .bohr import BohrSpec, bohr_enumerate
from .errors import ValidationError
from .torus import (Arc, FrequencyVector, TorusPoint, make_independent_frequencies,
                    orbit_fractions, to_fraction)
from .windows import Window, WindowedSet

logger = logging.getLogger(__name__)

Factor = Union[Arc, FrozenSet[int]]


class SystemKind(Enum):
    TORUS = auto()
    CYCLIC = auto()
    PRODUCT = auto()


@dataclass(frozen=True)
class Coordinate:
    """One flattened coordinate: a circle rotated by alpha, or Z_k shifted by step"""
    kind: SystemKind
    alpha: Optional[TorusPoint] = None
    k: int = 0
    step: int = 0


@dataclass(frozen=True)
class RotationSystem:
    """A torus rotation, a cyclic rotation, or a product of such systems"""
    kind: SystemKind
    freq: Optional[FrequencyVector] = None
    k: int = 0
    step: int = 0
    components: Tuple["RotationSystem", ...] = ()

    def __post_init__(self):
        if self.kind is SystemKind.TORUS and self.freq is None:
            raise ValidationError("A torus rotation needs a frequency vector")
        if self.kind is SystemKind.CYCLIC:
            if self.k < 1:
                raise ValidationError(f"Cyclic rotation needs k >= 1, got {self.k}")
            if not 0 <= self.step < self.k:
                raise ValidationError(f"Cyclic step must lie in [0, {self.k}), got {self.step}")
        if self.kind is SystemKind.PRODUCT and len(self.components) < 2:
            raise ValidationError("A product system needs at least two components")

    @property
    def coordinates(self) -> Tuple[Coordinate, ...]:
        if self.kind is SystemKind.TORUS:
            return tuple(Coordinate(SystemKind.TORUS, alpha=a) for a in self.freq.entries)
        if self.kind is SystemKind.CYCLIC:
            return (Coordinate(SystemKind.CYCLIC, k=self.k, step=self.step),)
        return tuple(c for comp in self.components for c in comp.coordinates)

    @property
    def exact(self) -> bool:
        return all(c.kind is SystemKind.CYCLIC or c.alpha.exact for c in self.coordinates)

    def describe(self) -> str:
        if self.kind is SystemKind.TORUS:
            return f"torus{self.freq}"
        if self.kind is SystemKind.CYCLIC:
            return f"cyclic(k={self.k}, step={self.step})"
        return " x ".join(c.describe() for c in self.components)

    def to_dict(self) -> Dict[str, Any]:
        if self.kind is SystemKind.TORUS:
            return {'kind': 'torus', 'freq': self.freq.to_dict()}
        if self.kind is SystemKind.CYCLIC:
            return {'kind': 'cyclic', 'k': self.k, 'step': self.step}
        return {'kind': 'product', 'components': [c.to_dict() for c in self.components]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RotationSystem":
        kind = str(data.get('kind', '')).lower()
        if kind == 'torus':
            return torus_system(FrequencyVector.from_dict(data['freq']))
        if kind == 'cyclic':
            return cyclic_system(int(data['k']), int(data['step']))
        if kind == 'product':
            comps = [cls.from_dict(c) for c in data['components']]
            system = comps[0]
            for comp in comps[1:]:
                system = product_system(system, comp)
            return system
        raise ValidationError(f"Unknown system kind '{data.get('kind')}'")


def torus_system(freq: FrequencyVector) -> RotationSystem:
    return RotationSystem(SystemKind.TORUS, freq=freq)


def cyclic_system(k: int, step: int) -> RotationSystem:
    return RotationSystem(SystemKind.CYCLIC, k=k, step=step % k if k else step)


def product_system(s1: RotationSystem, s2: RotationSystem) -> RotationSystem:
    """s1 x s2, with nested products flattened"""
    parts = []
    for s in (s1, s2):
        parts.extend(s.components if s.kind is SystemKind.PRODUCT else (s,))
    return RotationSystem(SystemKind.PRODUCT, components=tuple(parts))


@dataclass(frozen=True)
class BoxSet:
    """Finite union of boxes; each box has one factor per coordinate"""
    boxes: Tuple[Tuple[Factor, ...], ...] = ()

    def __post_init__(self):
        boxes = tuple(tuple(frozenset(int(r) for r in f) if not isinstance(f, Arc) else f for f in box)
                      for box in self.boxes)
        object.__setattr__(self, 'boxes', boxes)

    @classmethod
    def bohr_box(cls, d: int, eta: Any) -> "BoxSet":
        """{x in T^d : ||x_j|| < eta/2 for all j}"""
        half = to_fraction(eta) / 2
        return cls(((Arc(-half, half),) * d,))

    @classmethod
    def corner_box(cls, d: int, eta: Any) -> "BoxSet":
        """[0, eta/2)^d"""
        half = to_fraction(eta) / 2
        return cls(((Arc(0, half),) * d,))

    def to_dict(self) -> Dict[str, Any]:
        return {'boxes': [[{'arc': f.to_dict()} if isinstance(f, Arc) else {'residues': sorted(f)}
                           for f in box] for box in self.boxes]}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "BoxSet":
        boxes = []
        for box in data.get('boxes', []):
            factors = []
            for f in box:
                if 'arc' in f:
                    factors.append(Arc.from_dict(f['arc']))
                elif 'residues' in f:
                    factors.append(frozenset(int(r) for r in f['residues']))
                else:
                    raise ValidationError(f"Box factor needs 'arc' or 'residues', got {f}")
            boxes.append(tuple(factors))
        return cls(tuple(boxes))


def _check_boxes(system: RotationSystem, D: BoxSet) -> Tuple[Coordinate, ...]:
    coords = system.coordinates
    for box in D.boxes:
        if len(box) != len(coords):
            raise ValidationError(f"Box has {len(box)} factors, system has {len(coords)} coordinates")
        for f, c in zip(box, coords):
            if c.kind is SystemKind.TORUS and not isinstance(f, Arc):
                raise ValidationError("Torus coordinates take arcs")
            if c.kind is SystemKind.CYCLIC and isinstance(f, Arc):
                raise ValidationError("Cyclic coordinates take residue sets")
    return coords


def _coordinate_atoms(coord: Coordinate, factors: Sequence[Factor]) -> List[Factor]:
    """Refinement of one coordinate by all the box factors on it"""
    if coord.kind is SystemKind.CYCLIC:
        return [frozenset([r]) for r in range(coord.k)]
    cuts = sorted({f.lo % 1 for f in factors} | {f.hi % 1 for f in factors})
    if not cuts:
        return [Arc(0, 1)]
    return [Arc(a, b) for a, b in zip(cuts, cuts[1:] + [cuts[0] + 1])]


def _atom_inside(atom: Factor, factor: Factor) -> bool:
    if isinstance(atom, Arc):
        return factor.contains_arc(atom)
    return atom <= factor


def _factor_weight(factor: Factor, coord: Coordinate) -> Fraction:
    if isinstance(factor, Arc):
        return factor.length
    return Fraction(len(factor), coord.k)


def disjoint_boxes(system: RotationSystem, D: BoxSet) -> List[Tuple[Factor, ...]]:
    """Pairwise disjoint boxes of atoms with the same union as D"""
    coords = _check_boxes(system, D)
    atoms = [_coordinate_atoms(c, [box[j] for box in D.boxes]) for j, c in enumerate(coords)]
    seen = set()
    out = []
    for box in D.boxes:
        choices = [[i for i, a in enumerate(atoms[j]) if _atom_inside(a, box[j])] for j in range(len(coords))]
        for combo in product(*choices):
            if combo not in seen:
                seen.add(combo)
                out.append(tuple(atoms[j][i] for j, i in enumerate(combo)))
    return out


def measure(system: RotationSystem, D: BoxSet) -> Fraction:
    """Exact Haar x counting measure of D; overlaps are never double counted"""
    coords = system.coordinates
    total = Fraction(0)
    for box in disjoint_boxes(system, D):
        weight = Fraction(1)
        for f, c in zip(box, coords):
            weight *= _factor_weight(f, c)
        total += weight
    return total


# ============================================================================
# mu(D & T^n D)
# ============================================================================

def _arc_pieces(a1: Arc, a2: Arc, s: Fraction) -> List[Fraction]:
    """Signed overlap pieces of a1 with a2 + s; the overlap is the sum of their positive parts"""
    c = (a2.lo + s) % 1
    d = c + a2.length
    return [min(a1.hi, d + t) - max(a1.lo, c + t) for t in (-1, 0, 1)]


def arc_overlap(a1: Arc, a2: Arc, s: Any) -> Fraction:
    """Length of a1 & (a2 + s) on T"""
    return sum((max(Fraction(0), p) for p in _arc_pieces(a1, a2, to_fraction(s))), Fraction(0))


def _arc_overlap_bounds(a1: Arc, a2: Arc, s: Fraction, err: Fraction) -> Tuple[Fraction, Fraction, Fraction]:
    """min, value, max of the overlap for shifts in [s - err, s + err]"""
    value = arc_overlap(a1, a2, s)
    if err == 0:
        return value, value, value
    candidates = [s - err, s + err]
    # kinks of the piecewise linear overlap
    for beta in (a1.lo - a2.lo, a1.hi - a2.lo, a1.lo - a2.hi, a1.hi - a2.hi):
        t = math.ceil(s - err - beta)
        if beta + t <= s + err:
            candidates.append(beta + t)
    values = [arc_overlap(a1, a2, x) for x in candidates]
    return min(values), value, max(values)


def _shift(coord: Coordinate, n: int) -> Tuple[Any, Fraction]:
    if coord.kind is SystemKind.CYCLIC:
        return (n * coord.step) % coord.k, Fraction(0)
    alpha = coord.alpha
    if alpha.exact:
        return (alpha.value * n) % 1, Fraction(0)
    bits = alpha.precision_bits
    grid = alpha.fixed(bits)
    return Fraction((n * grid) % (1 << bits), 1 << bits), Fraction(2 * abs(n) + 1, 1 << bits)


def intersection_bounds(system: RotationSystem, D: BoxSet, n: int) -> Tuple[Fraction, Fraction, Fraction]:
    """(lower, estimate, upper) for mu(D & T^n D); all equal for exact systems"""
    return _boxes_bounds(system.coordinates, disjoint_boxes(system, D), n)


def _boxes_bounds(coords: Sequence[Coordinate], boxes: Sequence[Tuple[Factor, ...]],
                  n: int) -> Tuple[Fraction, Fraction, Fraction]:
    shifts = [_shift(c, n) for c in coords]
    lower = value = upper = Fraction(0)
    for b1 in boxes:
        for b2 in boxes:
            lo = mid = hi = Fraction(1)
            for f1, f2, c, (s, err) in zip(b1, b2, coords, shifts):
                if c.kind is SystemKind.CYCLIC:
                    w = Fraction(len(f1 & frozenset((r + s) % c.k for r in f2)), c.k)
                    lo, mid, hi = lo * w, mid * w, hi * w
                else:
                    a, b, e = _arc_overlap_bounds(f1, f2, s, err)
                    lo, mid, hi = lo * a, mid * b, hi * e
                if hi == 0:
                    break
            lower, value, upper = lower + lo, value + mid, upper + hi
    return lower, value, upper


def intersection_measure(system: RotationSystem, D: BoxSet, n: int) -> Fraction:
    """mu(D & T^n D); exact for rational rotations, dyadic estimate otherwise"""
    return intersection_bounds(system, D, n)[1]


def period(system: RotationSystem) -> Optional[int]:
    """A common period of n -> T^n for exact systems, None otherwise"""
    if not system.exact:
        return None
    p = 1
    for c in system.coordinates:
        p = math.lcm(p, c.k if c.kind is SystemKind.CYCLIC else c.alpha.value.denominator)
    return p


def _float_bounds(system: RotationSystem, D: BoxSet, ns: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorised (lower, estimate, upper) using the fixed-point orbit"""
    coords = system.coordinates
    boxes = disjoint_boxes(system, D)
    torus_idx = [j for j, c in enumerate(coords) if c.kind is SystemKind.TORUS]
    fracs, err = orbit_fractions([coords[j].alpha for j in torus_idx], ns) if torus_idx else (None, 0.0)
    err += 8 * 2.0 ** -52
    lower = np.zeros(ns.size)
    value = np.zeros(ns.size)
    upper = np.zeros(ns.size)
    for b1 in boxes:
        for b2 in boxes:
            lo = np.ones(ns.size)
            mid = np.ones(ns.size)
            hi = np.ones(ns.size)
            for j, (f1, f2, c) in enumerate(zip(b1, b2, coords)):
                if c.kind is SystemKind.CYCLIC:
                    table = np.array([len(f1 & frozenset((r + s) % c.k for r in f2)) / c.k for s in range(c.k)])
                    w = table[np.mod(ns * c.step, c.k)]
                    lo, mid, hi = lo * w, mid * w, hi * w
                    continue
                s = fracs[:, torus_idx.index(j)]
                start = np.mod(float(f2.lo) + s, 1.0)
                end = start + float(f2.length)
                p_lo = np.zeros(ns.size)
                p_mid = np.zeros(ns.size)
                p_hi = np.zeros(ns.size)
                for t in (-1.0, 0.0, 1.0):
                    piece = np.minimum(float(f1.hi), end + t) - np.maximum(float(f1.lo), start + t)
                    p_lo += np.maximum(0.0, piece - err)
                    p_mid += np.maximum(0.0, piece)
                    p_hi += np.maximum(0.0, piece + err)
                lo, mid, hi = lo * p_lo, mid * p_mid, hi * np.minimum(p_hi, 1.0)
            lower += lo
            value += mid
            upper += hi
    return lower, value, upper


@dataclass
class ReturnSet:
    """R_c(T; D) inside a window, with mu(D & T^n D) for every n"""
    system: RotationSystem
    D: BoxSet
    c: Fraction
    window: Window
    members: WindowedSet
    values: Dict[int, Any] = field(default_factory=dict)

    @property
    def ambiguous(self) -> Tuple[int, ...]:
        return self.members.ambiguous

    def rows(self) -> List[List[Any]]:
        """CSV rows: n, mu(D & T^n D), member flag"""
        flags = {n: 'yes' for n in self.members.members}
        flags.update({n: 'ambiguous' for n in self.members.ambiguous})
        return [[n, float(v), flags.get(n, 'no')] for n, v in sorted(self.values.items())]

    def to_dict(self) -> Dict[str, Any]:
        return {
            'system': self.system.to_dict(),
            'set': self.D.to_dict(),
            'c': str(self.c),
            'members': self.members.to_dict(),
        }


def return_set(system: RotationSystem, D: BoxSet, c: Any, window: Window) -> ReturnSet:
    """R_c(T; D) = {n in window : mu(D & T^n D) > c}"""
    window = Window.parse(window)
    c = to_fraction(c)
    if c < 0:
        raise ValidationError(f"threshold c must be non-negative, got {c}")
    ns = window.values()
    yes = np.zeros(ns.size, dtype=bool)
    amb = np.zeros(ns.size, dtype=bool)
    values: Dict[int, Any] = {}

    if system.exact:
        # T^n depends only on n mod the period
        coords = system.coordinates
        boxes = disjoint_boxes(system, D)
        p = period(system)
        by_residue: Dict[int, Fraction] = {}
        for i, n in enumerate(ns):
            r = int(n) % p
            v = by_residue.get(r)
            if v is None:
                v = by_residue[r] = _boxes_bounds(coords, boxes, r)[1]
            values[int(n)] = v
            yes[i] = v > c
    else:
        lower, value, upper = _float_bounds(system, D, ns)
        fc = float(c)
        yes = lower > fc
        undecided = ~yes & ~(upper <= fc)
        for i, n in enumerate(ns):
            values[int(n)] = float(value[i])
        coords = system.coordinates
        boxes = disjoint_boxes(system, D)
        for i in np.flatnonzero(undecided):
            lo, mid, hi = _boxes_bounds(coords, boxes, int(ns[i]))
            values[int(ns[i])] = mid
            if lo > c:
                yes[i] = True
            elif hi > c:
                amb[i] = True
        if amb.any():
            logger.info("%d ambiguous return times in %s", int(amb.sum()), window)

    source = f"R_{c}({system.describe()})"
    return ReturnSet(system, D, c, window, WindowedSet.from_mask(window, yes, source, amb), values)


@dataclass
class BohrReturnReport:
    """mu(D) and the windowed inclusion R_0(T_alpha; D) in Bohr(alpha, eta) for both box forms"""
    eta: Fraction
    window: Window
    forms: Dict[str, Dict[str, Any]] = field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return all(f['measure_ok'] and not f['violations'] for f in self.forms.values())

    def to_dict(self) -> Dict[str, Any]:
        return {'eta': str(self.eta), 'window': self.window.to_dict(), 'forms': self.forms, 'holds': self.holds}


def bohr_return_check(freq: FrequencyVector, eta: Any, window: Window) -> BohrReturnReport:
    """
    Compare R_0 for D = [0, eta/2)^d (measure eta^d 2^-d) and for the
    symmetric D = {||x_j|| < eta/2} (measure eta^d) against Bohr(alpha, eta).
    """
    eta = to_fraction(eta)
    if not 0 < eta <= 1:
        raise ValidationError(f"eta must lie in (0, 1], got {eta}")
    window = Window.parse(window)
    system = torus_system(freq)
    bohr = bohr_enumerate(BohrSpec(freq, eta), window)
    allowed = set(bohr.members) | set(bohr.ambiguous)
    report = BohrReturnReport(eta, window)
    for name, D, expected in (("corner", BoxSet.corner_box(freq.d, eta), eta ** freq.d / 2 ** freq.d),
                              ("symmetric", BoxSet.bohr_box(freq.d, eta), min(eta, Fraction(1)) ** freq.d)):
        mu = measure(system, D)
        R0 = return_set(system, D, 0, window)
        violations = [n for n in R0.members.members if n not in allowed]
        report.forms[name] = {
            'measure': str(mu), 'expected': str(expected), 'measure_ok': mu == expected,
            'return_times': len(R0.members), 'violations': violations[:100],
        }
    return report


# ============================================================================
# Translates of return-time sets
# ============================================================================

@dataclass
class AuraReport:
    """S & (E + R) inside a window, each member with a witness (m, n), m in E, n in R"""
    members: WindowedSet
    witnesses: Dict[int, Tuple[int, int]] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'members': self.members.to_dict(),
            'witnesses': [[s, m, n] for s, (m, n) in sorted(self.witnesses.items())],
        }


def _aura(S: WindowedSet, E: WindowedSet, R_mask: np.ndarray, R_window: Window,
          window: Window, source: str) -> AuraReport:
    size = len(window)
    s_mask = S.mask(window)
    found = np.zeros(size, dtype=bool)
    witness_m = np.zeros(size, dtype=np.int64)
    values = window.values()
    for m in E.members:
        # n = s - m must be a return time
        idx = values - m - R_window.lo
        ok = s_mask & ~found & R_mask[idx]
        witness_m[ok] = m
        found |= ok
    witnesses = {int(s): (int(witness_m[i]), int(s - witness_m[i]))
                 for i, s in enumerate(values) if found[i]}
    return AuraReport(WindowedSet.from_mask(window, found, source), witnesses)


def aura_demo(S: WindowedSet, E: WindowedSet, system: RotationSystem, D: BoxSet,
              window: Window) -> AuraReport:
    """S & (E + R_0(T; D)) within window; R_0 is computed on the window shifted by E"""
    window = Window.parse(window)
    if not E.members:
        return AuraReport(WindowedSet(window, (), "empty"))
    R_window = window.expand(max(E.members), -min(E.members))
    R = return_set(system, D, 0, R_window)
    return _aura(S, E, R.members.mask(), R_window, window,
                 f"({S.source}) & (({E.source}) + R_0)")


def bohr_aura(S: WindowedSet, E: WindowedSet, spec: BohrSpec, window: Window) -> AuraReport:
    """S & (E + Bohr(alpha, eta)) within window"""
    window = Window.parse(window)
    if not E.members:
        return AuraReport(WindowedSet(window, (), "empty"))
    B_window = window.expand(max(E.members), -min(E.members))
    bohr = bohr_enumerate(spec, B_window)
    return _aura(S, E, bohr.mask(), B_window, window,
                 f"({S.source}) & (({E.source}) + {spec.describe()})")


# ============================================================================
# Density harness
# ============================================================================

@dataclass
class DensityEstimate:
    """Block counts max_n |A & {n+1..n+L}| per length L and the running-min envelope"""
    rows: List[Tuple[int, int, Fraction]] = field(default_factory=list)
    skipped: List[int] = field(default_factory=list)

    @property
    def envelope(self) -> List[Fraction]:
        out, best = [], None
        for _, _, dens in self.rows:
            best = dens if best is None else min(best, dens)
            out.append(best)
        return out

    @property
    def estimate(self) -> Optional[Fraction]:
        env = self.envelope
        return env[-1] if env else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            'rows': [{'length': L, 'max_count': c, 'density': str(dn), 'envelope': str(e)}
                     for (L, c, dn), e in zip(self.rows, self.envelope)],
            'skipped': self.skipped,
            'estimate': str(self.estimate) if self.estimate is not None else None,
        }


def upper_banach_density(A: WindowedSet, block_lengths: Sequence[int]) -> DensityEstimate:
    mask = A.mask().astype(np.int64)
    cumulative = np.concatenate(([0], np.cumsum(mask)))
    est = DensityEstimate()
    for L in sorted(set(int(v) for v in block_lengths)):
        if L < 1 or L > mask.size:
            logger.warning("Block length %d does not fit the window %s; skipped", L, A.window)
            est.skipped.append(L)
            continue
        counts = cumulative[L:] - cumulative[:-L]
        best = int(counts.max())
        est.rows.append((L, best, Fraction(best, L)))
    return est


def difference_set(A: WindowedSet) -> WindowedSet:
    """A - A, on the window [-(hi - lo), hi - lo]"""
    span = A.window.hi - A.window.lo
    window = Window(-span, span)
    mask = A.mask().astype(np.float64)
    if mask.size <= 1 << 14:
        conv = np.convolve(mask, mask[::-1])
    else:
        size = 1 << int(math.ceil(math.log2(2 * mask.size)))
        conv = np.fft.irfft(np.fft.rfft(mask, size) * np.fft.rfft(mask[::-1], size), size)[:2 * mask.size - 1]
    return WindowedSet.from_mask(window, conv > 0.5, f"({A.source}) - ({A.source})")


@dataclass
class Falsification:
    """A corpus set A with density > delta whose difference set misses S"""
    index: int
    witness: WindowedSet
    density: Fraction

    def to_dict(self) -> Dict[str, Any]:
        return {'index': self.index, 'source': self.witness.source, 'density': str(self.density)}


def delta_recurrence_falsify(S: WindowedSet, delta: Any, corpus: Sequence[WindowedSet]) -> Optional[Falsification]:
    """The first corpus set A with density(A) > delta and S & (A - A) empty, else None"""
    delta = to_fraction(delta)
    for i, A in enumerate(corpus):
        density = A.density()
        if density <= delta:
            continue
        diffs = difference_set(A)
        if not (S.mask(diffs.window) & diffs.mask()).any():
            return Falsification(i, A, density)
    return None


def structured_corpus(window: Window, seed: int = 0) -> List[WindowedSet]:
    """Arithmetic progressions, Bohr sets, seeded random dense sets and quadratic residues"""
    window = Window.parse(window)
    values = window.values()
    corpus = []
    for q in range(2, 7):
        corpus.append(WindowedSet.from_mask(window, np.mod(values, q) == 0, f"ap(0,{q})"))
    sqrt2 = make_independent_frequencies(1)
    sqrt23 = make_independent_frequencies(2)
    for freq in (sqrt2, sqrt23):
        for eta in (Fraction(1, 4), Fraction(1, 8)):
            corpus.append(bohr_enumerate(BohrSpec(freq, eta), window))
    rng = np.random.default_rng(seed)
    for p in (0.25, 0.5):
        corpus.append(WindowedSet.from_mask(window, rng.random(values.size) < p, f"random(p={p}, seed={seed})"))
    for p in (5, 7, 11, 13):
        residues = sorted({(x * x) % p for x in range(1, p)})
        corpus.append(WindowedSet.from_mask(window, np.isin(np.mod(values, p), residues), f"qr({p})"))
    return corpus
