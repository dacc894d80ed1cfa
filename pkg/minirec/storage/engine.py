"""
Storage Engine - Handles persistence of run artifacts to disk

Features:
- One output directory per run, one file per artifact
- JSON serialization with exact rationals, high-precision reals and enums
- CSV tables for per-n and per-atom rows
- Sorted keys and fixed indentation so identical runs write identical bytes
"""

import csv
import json
import os
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Sequence

import numpy as np
from mpmath import mp, mpf

from ..core.errors import ValidationError


class ResultEncoder(json.JSONEncoder):
    """JSON encoder for Fractions, mpmath reals, enums, numpy scalars and to_dict objects"""
    def default(self, obj):
        if isinstance(obj, Fraction):
            return {'__fraction__': str(obj)}
        if isinstance(obj, mpf):
            return {'__mpf__': mp.nstr(obj, 30)}
        if isinstance(obj, Enum):
            return obj.name.lower()
        if isinstance(obj, np.integer):
            return int(obj)
        if isinstance(obj, np.floating):
            return float(obj)
        if isinstance(obj, np.bool_):
            return bool(obj)
        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (set, frozenset)):
            return sorted(obj)
        if hasattr(obj, 'to_dict'):
            return obj.to_dict()
        return super().default(obj)


def result_decoder(dct):
    """Custom JSON decoder restoring Fractions and mpmath reals"""
    if '__fraction__' in dct and len(dct) == 1:
        return Fraction(dct['__fraction__'])
    if '__mpf__' in dct and len(dct) == 1:
        return mpf(dct['__mpf__'])
    return dct


@dataclass
class ArtifactStore:
    """
    Writes the artifacts of one run into ``output_dir``.
    Keeps the list of written files for the run summary.
    """
    output_dir: str
    written: List[str] = field(default_factory=list)

    def __post_init__(self):
        os.makedirs(self.output_dir, exist_ok=True)

    def path(self, name: str) -> str:
        return os.path.join(self.output_dir, name)

    def _record(self, path: str) -> None:
        if path not in self.written:
            self.written.append(path)

    def write_json(self, name: str, data: Any) -> str:
        """Persist ``data`` as sorted, indented JSON"""
        path = self.path(name)
        with open(path, 'w') as f:
            json.dump(data, f, cls=ResultEncoder, indent=2, sort_keys=True)
            f.write('\n')
        self._record(path)
        return path

    def write_csv(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> str:
        path = self.path(name)
        with open(path, 'w', newline='') as f:
            writer = csv.writer(f, lineterminator='\n')
            writer.writerow(header)
            for row in rows:
                writer.writerow([_cell(v) for v in row])
        self._record(path)
        return path

    def read_json(self, name: str) -> Any:
        return read_json(self.path(name))


def _cell(value: Any) -> Any:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, mpf):
        return mp.nstr(value, 20)
    if isinstance(value, (np.integer, np.floating, np.bool_)):
        return value.item()
    return value


def read_json(path: str) -> Any:
    """Load an artifact written by ArtifactStore"""
    if not os.path.exists(path):
        raise ValidationError(f"Artifact not found: {path}")
    with open(path, 'r') as f:
        try:
            return json.load(f, object_hook=result_decoder)
        except json.JSONDecodeError as e:
            raise ValidationError(f"{path} is not valid JSON: {e}")


def read_csv(path: str) -> Dict[str, List[str]]:
    """Column-wise view of a CSV artifact"""
    if not os.path.exists(path):
        raise ValidationError(f"Artifact not found: {path}")
    with open(path, 'r', newline='') as f:
        rows = list(csv.reader(f))
    if not rows:
        return {}
    header, body = rows[0], rows[1:]
    return {name: [row[i] for row in body] for i, name in enumerate(header)}
