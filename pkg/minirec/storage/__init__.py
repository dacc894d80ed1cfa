"""Storage module - Artifact persistence"""

from .engine import ArtifactStore, ResultEncoder, read_csv, read_json, result_decoder

__all__ = ['ArtifactStore', 'ResultEncoder', 'read_csv', 'read_json', 'result_decoder']
