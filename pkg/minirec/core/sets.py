"""
Sets - Evaluation of set expressions over integer windows

Turns a parsed set expression into membership masks, single-point
membership and WindowedSet enumerations. Bohr pieces use the guarded
orbit tables, so boundary cases surface as ambiguous members.
"""

import json
import logging
import os
from fractions import Fraction
from typing import Any, Dict, Tuple

import numpy as np

from ..parser.parser import (AllIntegers, BohrSet, Explicit, FileImport, Progression,
                             Shifted, Squares, Union, parse_set_spec)
from .bohr import BohrSpec, bohr_masks
from .errors import ValidationError
from .torus import DEFAULT_GUARD, DEFAULT_PRECISION, FrequencyVector, Generator, TorusPoint
from .windows import Window, WindowedSet

logger = logging.getLogger(__name__)


def frequency_from_terms(terms, precision_bits: int = DEFAULT_PRECISION) -> FrequencyVector:
    """Build a FrequencyVector from parsed frequency terms"""
    points, generators = [], []
    for term in terms:
        if term.radicand is None:
            points.append(TorusPoint.of(term.shift, precision_bits))
            generators.append(None)
        else:
            gen = Generator(term.radicand, term.shift, term.scale)
            points.append(gen.evaluate(precision_bits))
            generators.append(gen)
    return FrequencyVector.from_points(points, generators)


class SetEvaluator:
    """Evaluates set expressions; ``base_dir`` resolves file(...) imports"""

    def __init__(self, base_dir: str = ".", precision_bits: int = DEFAULT_PRECISION,
                 guard: Fraction = DEFAULT_GUARD):
        self.base_dir = base_dir
        self.precision_bits = precision_bits
        self.guard = guard
        self._files: Dict[str, WindowedSet] = {}

    def parse(self, spec: Any) -> Any:
        if isinstance(spec, (str, dict)):
            return parse_set_spec(spec)
        return spec

    def mask(self, spec: Any, window: Window) -> Tuple[np.ndarray, np.ndarray]:
        """(members, ambiguous) boolean masks over ``window``"""
        expr = self.parse(spec)
        window = Window.parse(window)
        return self._mask(expr, window)

    def contains(self, spec: Any, n: int) -> bool:
        yes, _ = self.mask(spec, Window(n, n))
        return bool(yes[0])

    def enumerate(self, spec: Any, window: Window) -> WindowedSet:
        expr = self.parse(spec)
        window = Window.parse(window)
        yes, amb = self._mask(expr, window)
        return WindowedSet.from_mask(window, yes, str(expr), amb)

    def _mask(self, expr: Any, window: Window) -> Tuple[np.ndarray, np.ndarray]:
        values = window.values()
        none = np.zeros(values.size, dtype=bool)

        if isinstance(expr, AllIntegers):
            return np.ones(values.size, dtype=bool), none
        if isinstance(expr, Squares):
            roots = np.floor(np.sqrt(np.maximum(values, 0).astype(np.float64))).astype(np.int64)
            square = none.copy()
            for delta in (-1, 0, 1):
                r = np.maximum(roots + delta, 0)
                square |= (values >= 0) & (r * r == values)
            return square, none
        if isinstance(expr, Progression):
            return np.mod(values - expr.a, expr.q) == 0, none
        if isinstance(expr, Shifted):
            return self._mask(expr.inner, Window(window.lo - expr.m, window.hi - expr.m))
        if isinstance(expr, Union):
            yes = none.copy()
            amb = none.copy()
            for part in expr.parts:
                y, a = self._mask(part, window)
                yes |= y
                amb |= a
            return yes, amb & ~yes
        if isinstance(expr, BohrSet):
            freq = frequency_from_terms(expr.freqs, self.precision_bits)
            yes, amb = bohr_masks(BohrSpec(freq, expr.eta, self.guard), values)
            if expr.negated:
                # ambiguous n count as Bohr members and stay out of the complement
                return ~(yes | amb), amb
            return yes, amb
        if isinstance(expr, Explicit):
            return np.isin(values, np.asarray(expr.values, dtype=np.int64)), none
        if isinstance(expr, FileImport):
            imported = self._load(expr.path)
            if window.lo < imported.window.lo or window.hi > imported.window.hi:
                logger.warning("Window %s extends beyond the imported window %s of %s",
                               window, imported.window, expr.path)
            return imported.mask(window), none
        raise ValidationError(f"Unsupported set expression {expr!r}")

    def _load(self, path: str) -> WindowedSet:
        full = path if os.path.isabs(path) else os.path.join(self.base_dir, path)
        if full in self._files:
            return self._files[full]
        if not os.path.exists(full):
            raise ValidationError(f"Set file not found: {full}")
        with open(full, 'r') as f:
            text = f.read()
        try:
            data = json.loads(text)
        except json.JSONDecodeError:
            data = None
        if isinstance(data, dict) and 'members' in data:
            members = [int(v) for v in data['members']]
            window = Window.parse(data['window']) if 'window' in data else None
        else:
            try:
                members = [int(line) for line in text.split() if line.strip()]
            except ValueError:
                raise ValidationError(f"{full}: expected a WindowedSet JSON or one integer per line")
            window = None
        if window is None:
            window = Window(min(members), max(members)) if members else Window(0, 0)
        result = WindowedSet(window, tuple(members), f"file({path})")
        self._files[full] = result
        return result
