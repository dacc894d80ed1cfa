"""Core module - Torus arithmetic, Bohr sets, approximation, dynamics, constructions, Workbench, CLI"""

from .bohr import BohrHammingSpec, BohrSpec, HammingBall, bh_contains, bohr_contains
from .config import Caps, RunConfig
from .construction import build_cantor, build_ks_pipeline, rigidity_profile, stage_measure
from .diophantine import ApproxQuery, embed_group, find_translate, kronecker_approximate
from .dynamics import BoxSet, RotationSystem, cyclic_system, delta_recurrence_falsify, return_set, torus_system
from .errors import (CapExceededError, ConfigError, EmbeddingError, InvariantViolation, MinirecError,
                     NotFound, PrecisionError, ValidationError)
from .kleitman import KleitmanInstance, hamming_recurrence_witness, kleitman_check
from .torus import FrequencyVector, TorusPoint, Verdict, char_distance, make_independent_frequencies, torus_norm
from .windows import Window, WindowedSet
from .workbench import RunResult, Workbench

__all__ = [
    'BohrHammingSpec', 'BohrSpec', 'HammingBall', 'bh_contains', 'bohr_contains',
    'Caps', 'RunConfig',
    'build_cantor', 'build_ks_pipeline', 'rigidity_profile', 'stage_measure',
    'ApproxQuery', 'embed_group', 'find_translate', 'kronecker_approximate',
    'BoxSet', 'RotationSystem', 'cyclic_system', 'delta_recurrence_falsify', 'return_set', 'torus_system',
    'CapExceededError', 'ConfigError', 'EmbeddingError', 'InvariantViolation', 'MinirecError',
    'NotFound', 'PrecisionError', 'ValidationError',
    'KleitmanInstance', 'hamming_recurrence_witness', 'kleitman_check',
    'FrequencyVector', 'TorusPoint', 'Verdict', 'char_distance', 'make_independent_frequencies', 'torus_norm',
    'Window', 'WindowedSet',
    'RunResult', 'Workbench',
]
