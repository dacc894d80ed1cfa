"""
Torus Core - Arithmetic on the circle group T = R/Z

Features:
- TorusPoint: exact (Fraction) or high-precision (mpmath) representatives in [0, 1)
- The norm ||x||, the character distance |e(x) - 1| and vectorised versions
- FrequencyVector: d-tuples alpha_j = r_j + sqrt(p_j)/M_j mod 1 with a
  small-relation certificate
- NormTable: ||n x_j - z_j|| over many n at once, exact for small rationals and
  fixed-point (2^-64 grid) otherwise, with a tracked error bound
- Three-valued comparisons (YES / NO / AMBIGUOUS) against a guard margin
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum, auto
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from mpmath import mp, mpf
from sympy import prime

from .errors import PrecisionError, ValidationError

logger = logging.getLogger(__name__)

DEFAULT_PRECISION = 128
MIN_PRECISION = 64
DEFAULT_GUARD = Fraction(1, 2 ** 40)
DEFAULT_CERTIFICATE_BOUND = 50
CERTIFICATE_CAP = 2_000_000

_FIXED_BITS = 64
_FIXED_ONE = 1 << _FIXED_BITS
_EXACT_DENOMINATOR_LIMIT = 1 << 31

Real = Union[Fraction, mpf]


class Verdict(Enum):
    """Outcome of a strict inequality evaluated with a guard margin"""
    YES = auto()
    NO = auto()
    AMBIGUOUS = auto()

    @classmethod
    def combine_all(cls, verdicts) -> "Verdict":
        """Verdict of a conjunction"""
        verdicts = list(verdicts)
        if any(v is cls.NO for v in verdicts):
            return cls.NO
        if all(v is cls.YES for v in verdicts):
            return cls.YES
        return cls.AMBIGUOUS


def to_fraction(value: Any) -> Fraction:
    """Convert user input to an exact Fraction; decimal strings stay exact."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ValidationError(f"Expected a number, got {value!r}")
    if isinstance(value, (int, str)):
        try:
            return Fraction(str(value).strip())
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"Cannot interpret {value!r} as a rational number")
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, mpf):
        man, exp = value.man_exp
        return Fraction(int(man)) * Fraction(2) ** int(exp)
    raise ValidationError(f"Cannot interpret {value!r} as a rational number")


def _frac_mpf(value: mpf) -> mpf:
    return value - mp.floor(value)


@dataclass(frozen=True)
class TorusPoint:
    """A point of T, stored by its representative in [0, 1)"""
    value: Any
    precision_bits: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.precision_bits < MIN_PRECISION:
            raise ValidationError(f"precision_bits must be at least {MIN_PRECISION}, got {self.precision_bits}")
        if not (0 <= self.value < 1):
            raise ValidationError(f"TorusPoint value must lie in [0, 1), got {self.value}")

    @classmethod
    def of(cls, value: Any, precision_bits: int = DEFAULT_PRECISION) -> "TorusPoint":
        """Reduce any real (int, Fraction, decimal string, mpf) modulo 1"""
        if isinstance(value, TorusPoint):
            return value
        if isinstance(value, mpf):
            with mp.workprec(precision_bits + 32):
                return cls(_frac_mpf(value), precision_bits)
        q = to_fraction(value)
        return cls(q - math.floor(q), precision_bits)

    @property
    def exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def as_mpf(self) -> mpf:
        with mp.workprec(self.precision_bits + 32):
            if self.exact:
                return mpf(self.value.numerator) / self.value.denominator
            return +self.value

    def fixed(self, bits: int = _FIXED_BITS) -> int:
        """floor(value * 2^bits), the dyadic grid representative"""
        if self.exact:
            return (self.value.numerator << bits) // self.value.denominator
        with mp.workprec(self.precision_bits + bits + 32):
            return int(mp.floor(self.value * mpf(2) ** bits))

    def dyadic(self, bits: Optional[int] = None) -> Fraction:
        """Exact value for rationals, else floor(value * 2^P) / 2^P"""
        if self.exact:
            return self.value
        bits = bits or self.precision_bits
        return Fraction(self.fixed(bits), 1 << bits)

    def scaled(self, n: int) -> "TorusPoint":
        """The point n * x"""
        if self.exact:
            return TorusPoint.of(self.value * n, self.precision_bits)
        n = int(n)
        with mp.workprec(self.precision_bits + n.bit_length() + 32):
            return TorusPoint(_frac_mpf(self.value * n), self.precision_bits)

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        if self.exact:
            return str(self.value)
        return mp.nstr(self.value, 20)

    def to_json(self) -> str:
        if self.exact:
            return str(self.value)
        digits = int(self.precision_bits * math.log10(2)) + 2
        return mp.nstr(self.value, digits, strip_zeros=False)

    @classmethod
    def from_json(cls, text: str, precision_bits: int = DEFAULT_PRECISION) -> "TorusPoint":
        if "/" in text or len(text) <= 20:
            return cls.of(text, precision_bits)
        with mp.workprec(precision_bits + 32):
            return cls.of(mpf(text), precision_bits)


def torus_norm(x: Any) -> Real:
    """||x|| = distance from x to the nearest integer"""
    x = TorusPoint.of(x)
    if x.exact:
        return min(x.value, 1 - x.value)
    with mp.workprec(x.precision_bits + 32):
        return min(x.value, 1 - x.value)


def char_distance(x: Any) -> mpf:
    """|e(x) - 1| = 2 |sin(pi x)|"""
    x = TorusPoint.of(x)
    with mp.workprec(x.precision_bits + 32):
        return 2 * abs(mp.sinpi(x.as_mpf()))


def torus_norm_array(values: np.ndarray) -> np.ndarray:
    frac = np.mod(values, 1.0)
    return np.minimum(frac, 1.0 - frac)


def char_distance_array(values: np.ndarray) -> np.ndarray:
    return 2.0 * np.abs(np.sin(np.pi * torus_norm_array(values)))


def chord_from_norm(norms: np.ndarray) -> np.ndarray:
    """Chord length |e(x) - 1| from ||x||"""
    return 2.0 * np.sin(np.pi * norms)


def arc_threshold(chord: Any, precision_bits: int = DEFAULT_PRECISION) -> Fraction:
    """
    Largest dyadic theta with: ||x|| < theta implies |e(x) - 1| < chord.

    The chord condition is equivalent to ||x|| < asin(chord/2)/pi; rounding
    down keeps the implication.
    """
    chord = to_fraction(chord)
    if chord <= 0:
        raise ValidationError(f"chord threshold must be positive, got {chord}")
    if chord >= 2:
        return Fraction(1, 2)
    with mp.workprec(precision_bits + 32):
        theta = mp.asin(mpf(chord.numerator) / chord.denominator / 2) / mp.pi
        return Fraction(int(mp.floor(theta * mpf(2) ** precision_bits)), 1 << precision_bits)


# ============================================================================
# Frequency vectors
# ============================================================================

@dataclass(frozen=True)
class Generator:
    """alpha = shift + sqrt(prime) / scale  (mod 1)"""
    prime: int
    shift: Fraction = Fraction(0)
    scale: int = 1

    def evaluate(self, precision_bits: int) -> TorusPoint:
        with mp.workprec(precision_bits + 32):
            value = mpf(self.shift.numerator) / self.shift.denominator + mp.sqrt(self.prime) / self.scale
            return TorusPoint.of(value, precision_bits)

    def __str__(self) -> str:
        core = f"sqrt({self.prime})" + (f"/{self.scale}" if self.scale != 1 else "")
        return core if self.shift == 0 else f"{self.shift}+{core}"

    def to_dict(self) -> Dict[str, Any]:
        return {'prime': self.prime, 'shift': str(self.shift), 'scale': self.scale}

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Generator":
        return cls(int(data['prime']), Fraction(data.get('shift', '0')), int(data.get('scale', 1)))


@dataclass(frozen=True)
class FrequencyVector:
    """
    alpha = (alpha_1, ..., alpha_d) in T^d.

    ``certified`` is True only when every entry comes from a generator with
    distinct primes (exact independence) and the small-relation scan up to
    ``certificate_bound`` found nothing within ``tolerance``.
    """
    entries: Tuple[TorusPoint, ...]
    generators: Tuple[Optional[Generator], ...] = ()
    certificate_bound: int = 0
    certified: bool = False
    tolerance: Fraction = DEFAULT_GUARD

    def __post_init__(self):
        if not self.entries:
            raise ValidationError("FrequencyVector needs at least one entry")
        values = [e.dyadic(96) if not e.exact else e.value for e in self.entries]
        if len(set(values)) != len(values):
            raise ValidationError("FrequencyVector entries must be mutually distinct")
        if self.generators and len(self.generators) != len(self.entries):
            raise ValidationError("generators must match entries one-to-one")

    @property
    def d(self) -> int:
        return len(self.entries)

    @property
    def exact(self) -> bool:
        return all(e.exact for e in self.entries)

    @property
    def precision_bits(self) -> int:
        return max(e.precision_bits for e in self.entries)

    @classmethod
    def rational(cls, values: Sequence[Any]) -> "FrequencyVector":
        """Uncertified vector of exact rationals (dependent by construction)"""
        return cls(tuple(TorusPoint.of(to_fraction(v)) for v in values))

    @classmethod
    def from_points(cls, points: Sequence[TorusPoint],
                    generators: Sequence[Optional[Generator]] = ()) -> "FrequencyVector":
        return cls(tuple(points), tuple(generators))

    def __str__(self) -> str:
        labels = [str(g) if g else str(e) for g, e in zip(self.generators or [None] * self.d, self.entries)]
        return "(" + ", ".join(labels) + ")"

    def to_dict(self) -> Dict[str, Any]:
        return {
            'entries': [e.to_json() for e in self.entries],
            'generators': [g.to_dict() if g else None for g in self.generators],
            'certificate_bound': self.certificate_bound,
            'certified': self.certified,
            'precision_bits': self.precision_bits,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FrequencyVector":
        bits = int(data.get('precision_bits', DEFAULT_PRECISION))
        generators = tuple(Generator.from_dict(g) if g else None for g in data.get('generators') or ())
        entries = []
        for i, text in enumerate(data['entries']):
            gen = generators[i] if generators else None
            entries.append(gen.evaluate(bits) if gen else TorusPoint.from_json(text, bits))
        return cls(tuple(entries), generators, int(data.get('certificate_bound', 0)),
                   bool(data.get('certified', False)))


def _interval_bounds(interval: Sequence[Any]) -> Tuple[Fraction, Fraction]:
    lo, hi = (to_fraction(v) for v in interval)
    if not (0 <= lo < hi <= 1):
        raise ValidationError(f"Degenerate interval ({lo}, {hi}): need 0 <= lo < hi <= 1")
    return lo, hi


def make_independent_frequencies(d: int,
                                 intervals: Optional[Sequence[Sequence[Any]]] = None,
                                 precision_bits: int = DEFAULT_PRECISION,
                                 certificate_bound: int = DEFAULT_CERTIFICATE_BOUND,
                                 tolerance: Fraction = DEFAULT_GUARD,
                                 auto_precision: bool = True,
                                 certificate_cap: int = CERTIFICATE_CAP) -> FrequencyVector:
    """
    Build independent alpha_j = r_j + sqrt(p_j)/M_j with distinct primes p_j.

    Without intervals alpha_j = frac(sqrt(p_j)) for p = 2, 3, 5, ...
    With open intervals (lo_j, hi_j), r_j = lo_j + w_j/4 and M_j is the
    smallest power of two with sqrt(p_j)/M_j < w_j/4, so alpha_j lies in
    (lo_j + w_j/4, lo_j + w_j/2).
    """
    if d < 1:
        raise ValidationError(f"d must be positive, got {d}")
    primes = [int(prime(j + 1)) for j in range(d)]

    if intervals is None:
        generators = [Generator(p) for p in primes]
    else:
        if len(intervals) != d:
            raise ValidationError(f"Expected {d} intervals, got {len(intervals)}")
        bounds = [_interval_bounds(iv) for iv in intervals]
        ordered = sorted(bounds)
        for (lo1, hi1), (lo2, hi2) in zip(ordered, ordered[1:]):
            if hi1 > lo2:
                raise ValidationError(f"Intervals ({lo1}, {hi1}) and ({lo2}, {hi2}) overlap")

        narrowest = min(hi - lo for lo, hi in bounds)
        required = MIN_PRECISION + max(0, math.ceil(math.log2(8 / narrowest)))
        if precision_bits < required:
            if not auto_precision:
                raise PrecisionError("Interval widths are below the working resolution", required)
            logger.info("Raising precision from %d to %d bits for narrow intervals", precision_bits, required)
            precision_bits = required

        generators = []
        for p, (lo, hi) in zip(primes, bounds):
            width = hi - lo
            scale = 1
            # need p / scale^2 < width^2 / 16
            while p * 16 * width.denominator ** 2 >= width.numerator ** 2 * scale ** 2:
                scale *= 2
            generators.append(Generator(p, lo + width / 4, scale))

    entries = tuple(g.evaluate(precision_bits) for g in generators)
    vector = FrequencyVector(entries, tuple(generators))
    bound, passed = certify(vector, certificate_bound, tolerance, certificate_cap)
    if not passed:
        # independence is exact here; a hit means the tolerance is too coarse
        raise PrecisionError("Small-relation scan found a near relation; reduce the tolerance",
                             precision_bits * 2)
    return FrequencyVector(entries, tuple(generators), bound, True, tolerance)


def certify(vector: FrequencyVector, bound: int = DEFAULT_CERTIFICATE_BOUND,
            tolerance: Fraction = DEFAULT_GUARD, cap: int = CERTIFICATE_CAP) -> Tuple[int, bool]:
    """
    Exhaustive scan for integer relations: no nonzero (n_1..n_d) with
    max |n_j| <= B may have ||sum n_j alpha_j|| < tolerance.

    B is lowered until (2B+1)^d fits the cap. Returns (B used, passed).
    """
    d = vector.d
    while bound > 0 and (2 * bound + 1) ** d > cap:
        bound -= 1
    if bound < 1:
        logger.warning("Certificate cap %d too small for d=%d; no relations scanned", cap, d)
        return 0, True
    axis = np.arange(-bound, bound + 1, dtype=np.int64)
    grids = np.meshgrid(*([axis] * d), indexing='ij')
    acc = np.zeros(grids[0].size, dtype=np.uint64)
    for j, entry in enumerate(vector.entries):
        coeff = np.ascontiguousarray(grids[j].ravel()).view(np.uint64)
        acc += coeff * np.uint64(entry.fixed(_FIXED_BITS) % _FIXED_ONE)

    zero = np.all(np.stack([g.ravel() for g in grids]) == 0, axis=0)
    frac = acc.astype(np.float64) * 2.0 ** -_FIXED_BITS
    dist = np.minimum(frac, 1.0 - frac)
    # each fixed-point entry is off by < 1 unit
    error = (d * bound + 1) * 2.0 ** -_FIXED_BITS + 2.0 ** -52
    near = (dist <= float(tolerance) + error) & ~zero
    if near.any():
        idx = int(np.flatnonzero(near)[0])
        relation = tuple(int(g.ravel()[idx]) for g in grids)
        logger.warning("Near relation %s for %s (||.|| = %.3g)", relation, vector, dist[idx])
        return bound, False
    return bound, True


# ============================================================================
# Orbit norm tables
# ============================================================================

@lru_cache(maxsize=256)
def _fixed_entries(points: Tuple[TorusPoint, ...]) -> Tuple[int, ...]:
    return tuple(p.fixed(_FIXED_BITS) % _FIXED_ONE for p in points)


@dataclass
class NormTable:
    """
    ||n x_j - z_j|| for every n in ``ns`` (rows) and coordinate j (columns).

    ``values`` is float64 with absolute error at most ``error``. When every
    point and target is a rational with small denominator, ``residues`` holds
    the exact integer residues modulo ``denominator`` and comparisons against
    rational bounds are exact.
    """
    ns: np.ndarray
    values: np.ndarray
    error: float
    residues: Optional[np.ndarray] = None
    denominator: int = 0

    @property
    def exact(self) -> bool:
        return self.residues is not None

    def below(self, bound: Any, guard: Fraction = DEFAULT_GUARD) -> Tuple[np.ndarray, np.ndarray]:
        """(yes, ambiguous) masks for the strict inequality ||.|| < bound"""
        if self.exact and isinstance(bound, (Fraction, int)):
            bound = Fraction(bound)
            L = self.denominator
            dist = np.minimum(self.residues, L - self.residues)
            if bound.denominator * L < (1 << 62) and bound.numerator * L < (1 << 62):
                yes = dist * bound.denominator < bound.numerator * L
            else:
                yes = dist.astype(object) * bound.denominator < bound.numerator * L
                yes = yes.astype(bool)
            return yes, np.zeros_like(yes, dtype=bool)
        b = float(bound)
        margin = float(guard) + self.error + abs(b) * 2.0 ** -52
        yes = self.values < b - margin
        no = self.values >= b + margin
        return yes, ~(yes | no)

    def verdict_row(self, i: int, bound: Any, guard: Fraction = DEFAULT_GUARD) -> List[Verdict]:
        yes, amb = self.below(bound, guard)
        return [Verdict.YES if y else (Verdict.AMBIGUOUS if a else Verdict.NO)
                for y, a in zip(yes[i], amb[i])]


def _as_points(points: Any) -> Tuple[TorusPoint, ...]:
    if isinstance(points, FrequencyVector):
        return points.entries
    return tuple(TorusPoint.of(p) for p in points)


def orbit_norms(points: Any, ns: Any, targets: Optional[Sequence[Any]] = None) -> NormTable:
    """Compute ||n x_j - z_j|| for all n in ``ns``; targets default to 0."""
    pts = _as_points(points)
    d = len(pts)
    ns = np.ascontiguousarray(np.asarray(ns, dtype=np.int64).reshape(-1))
    tgts = tuple(TorusPoint.of(t) for t in targets) if targets is not None else tuple(TorusPoint.of(0) for _ in pts)
    if len(tgts) != d:
        raise ValidationError(f"Target dimension {len(tgts)} does not match frequency dimension {d}")
    if ns.size == 0:
        empty = np.zeros((0, d))
        return NormTable(ns, empty, 0.0)

    nmax = int(np.max(np.abs(ns)))
    if all(p.exact for p in pts + tgts):
        L = 1
        for p in pts + tgts:
            L = L * p.value.denominator // math.gcd(L, p.value.denominator)
        if L <= _EXACT_DENOMINATOR_LIMIT:
            residues = np.empty((ns.size, d), dtype=np.int64)
            n_mod = np.mod(ns, L)
            for j, (p, z) in enumerate(zip(pts, tgts)):
                a = p.value.numerator * (L // p.value.denominator) % L
                c = z.value.numerator * (L // z.value.denominator) % L
                residues[:, j] = np.mod(n_mod * a - c, L)
            dist = np.minimum(residues, L - residues) / float(L)
            return NormTable(ns, dist, 2.0 ** -52, residues, L)

    bits = min(p.precision_bits for p in pts)
    A = _fixed_entries(pts)
    Z = _fixed_entries(tgts)
    unsigned = ns.view(np.uint64)
    values = np.empty((ns.size, d), dtype=np.float64)
    for j in range(d):
        r = unsigned * np.uint64(A[j]) - np.uint64(Z[j])
        frac = r.astype(np.float64) * 2.0 ** -_FIXED_BITS
        values[:, j] = np.minimum(frac, 1.0 - frac)
    error = (nmax * (1 + 2.0 ** (_FIXED_BITS - bits)) + 2) * 2.0 ** -_FIXED_BITS + 2.0 ** -52
    return NormTable(ns, values, error)


def orbit_fractions(points: Any, ns: Any) -> Tuple[np.ndarray, float]:
    """frac(n x_j) as float64, shape (len(ns), d), with an absolute error bound"""
    pts = _as_points(points)
    ns = np.ascontiguousarray(np.asarray(ns, dtype=np.int64).reshape(-1))
    out = np.empty((ns.size, len(pts)), dtype=np.float64)
    if ns.size == 0:
        return out, 0.0
    A = _fixed_entries(pts)
    unsigned = ns.view(np.uint64)
    for j in range(len(pts)):
        out[:, j] = (unsigned * np.uint64(A[j])).astype(np.float64) * 2.0 ** -_FIXED_BITS
    np.minimum(out, np.nextafter(1.0, 0.0), out=out)
    nmax = int(np.max(np.abs(ns)))
    bits = min(p.precision_bits for p in pts)
    error = (nmax * (1 + 2.0 ** (_FIXED_BITS - bits)) + 1) * 2.0 ** -_FIXED_BITS + 2.0 ** -52
    return out, error


# ============================================================================
# Arcs
# ============================================================================

@dataclass(frozen=True)
class Arc:
    """
    The closed arc [lo, hi] of T with rational endpoints.

    Stored lifted: 0 <= lo < 1 and lo <= hi <= lo + 1, so arcs crossing 0
    live inside [0, 2).
    """
    lo: Fraction
    hi: Fraction

    def __post_init__(self):
        lo, hi = to_fraction(self.lo), to_fraction(self.hi)
        if hi < lo or hi - lo > 1:
            raise ValidationError(f"Arc [{lo}, {hi}] must satisfy lo <= hi <= lo + 1")
        shift = math.floor(lo)
        object.__setattr__(self, 'lo', lo - shift)
        object.__setattr__(self, 'hi', hi - shift)

    @property
    def length(self) -> Fraction:
        return self.hi - self.lo

    @property
    def center(self) -> Fraction:
        return (self.lo + self.hi) / 2

    @property
    def radius(self) -> Fraction:
        return self.length / 2

    def contains(self, x: Any) -> bool:
        """Closed containment of a point of T"""
        x = TorusPoint.of(x).dyadic()
        return (x - self.lo) % 1 <= self.length

    def contains_arc(self, other: "Arc") -> bool:
        offset = (other.lo - self.lo) % 1
        return offset + other.length <= self.length

    def disjoint(self, other: "Arc") -> bool:
        return (other.lo - self.lo) % 1 > self.length and (self.lo - other.lo) % 1 > other.length

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"

    def to_dict(self) -> List[str]:
        return [str(self.lo), str(self.hi)]

    @classmethod
    def from_dict(cls, data: Sequence[Any]) -> "Arc":
        return cls(to_fraction(data[0]), to_fraction(data[1]))
