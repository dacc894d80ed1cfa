"""
Config Module - Run configuration and its schema validation

Supports:
- Typed fields (integers, exact fractions, windows, frequency lists, set expressions)
- Required fields, defaults, choices and lower bounds
- One schema per subcommand
- JSON configuration files with command-line flags layered on top
- Resource caps as a nested mapping
"""

import json
import logging
import os
from dataclasses import dataclass, field, fields
from enum import Enum, auto
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple

from ..parser.parser import FreqTerm, parse_frequency
from .errors import ConfigError, ValidationError
from .torus import DEFAULT_GUARD, DEFAULT_PRECISION, MIN_PRECISION, to_fraction
from .windows import Window

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = "./minirec_out"


class FieldType(Enum):
    """Supported configuration field types"""
    INTEGER = auto()
    FRACTION = auto()
    FRACTION_LIST = auto()
    WINDOW = auto()
    BOOLEAN = auto()
    STRING = auto()
    PATH = auto()
    INT_LIST = auto()
    MAPPING = auto()
    FREQUENCIES = auto()
    SET = auto()


@dataclass
class Field:
    """One configuration field"""
    name: str
    ftype: FieldType
    required: bool = False
    default: Any = None
    choices: Optional[Tuple[str, ...]] = None
    minimum: Any = None
    help: str = ""


def _split(value: Any) -> List[Any]:
    if isinstance(value, (list, tuple)):
        return list(value)
    text = str(value).strip()
    if text.startswith('[') and text.endswith(']'):
        text = text[1:-1]
    return [part.strip() for part in text.split(',') if part.strip()]


def _load_set(value: Any) -> str:
    """Set expressions pass through; a path is read as {"expr": ...} or imported as a set file"""
    if isinstance(value, dict):
        if 'expr' not in value:
            raise ValidationError("A set mapping needs an 'expr' field")
        return str(value['expr'])
    text = str(value)
    if os.path.isfile(text):
        path = os.path.abspath(text)
        if path.endswith('.json'):
            with open(path, 'r') as f:
                try:
                    data = json.load(f)
                except json.JSONDecodeError as e:
                    raise ValidationError(f"{text}: invalid JSON ({e})")
            if isinstance(data, dict) and 'expr' in data:
                return str(data['expr'])
        return 'file("' + path.replace('"', '\\"') + '")'
    return text


class ConfigValidator:
    """Validates and converts raw values (JSON or command-line strings)"""

    @staticmethod
    def convert(value: Any, f: Field) -> Any:
        ftype = f.ftype
        try:
            if ftype == FieldType.INTEGER:
                if isinstance(value, bool):
                    raise ValueError("booleans are not integers")
                if isinstance(value, float) and not value.is_integer():
                    raise ValueError("not an integer")
                result = int(value)
            elif ftype == FieldType.FRACTION:
                result = to_fraction(value)
            elif ftype == FieldType.FRACTION_LIST:
                result = tuple(to_fraction(v) for v in _split(value))
            elif ftype == FieldType.WINDOW:
                result = Window.parse(value)
            elif ftype == FieldType.BOOLEAN:
                if isinstance(value, bool):
                    result = value
                elif str(value).upper() in ('TRUE', '1', 'YES'):
                    result = True
                elif str(value).upper() in ('FALSE', '0', 'NO'):
                    result = False
                else:
                    raise ValueError("expected true or false")
            elif ftype == FieldType.STRING:
                result = str(value)
            elif ftype == FieldType.PATH:
                result = os.path.expanduser(str(value))
            elif ftype == FieldType.INT_LIST:
                result = tuple(int(v) for v in _split(value))
            elif ftype == FieldType.MAPPING:
                if isinstance(value, str):
                    value = json.loads(value)
                if not isinstance(value, dict):
                    raise ValueError("expected a JSON object")
                result = dict(value)
            elif ftype == FieldType.FREQUENCIES:
                result = tuple(v if isinstance(v, FreqTerm) else parse_frequency(str(v))
                               for v in _split(value))
                if not result:
                    raise ValueError("empty frequency list")
            elif ftype == FieldType.SET:
                result = _load_set(value)
            else:
                result = value
        except ConfigError:
            raise
        except (ValueError, TypeError, ArithmeticError) as e:
            raise ConfigError(f"cannot convert {value!r} to {ftype.name}: {e}", f.name)

        if f.choices is not None and str(result).lower() not in f.choices:
            raise ConfigError(f"must be one of {', '.join(f.choices)}, got {result!r}", f.name)
        if f.minimum is not None and result < f.minimum:
            raise ConfigError(f"must be at least {f.minimum}, got {result}", f.name)
        return result

    @staticmethod
    def serialize(value: Any) -> Any:
        """Inverse of convert, for config echoes in artifacts"""
        if isinstance(value, Fraction):
            return str(value)
        if isinstance(value, Window):
            return value.to_dict()
        if isinstance(value, FreqTerm):
            return str(value)
        if isinstance(value, tuple):
            return [ConfigValidator.serialize(v) for v in value]
        return value


@dataclass
class ConfigSchema:
    """The fields accepted by one subcommand"""
    name: str
    fields: List[Field] = field(default_factory=list)

    def __post_init__(self):
        self._field_map: Dict[str, Field] = {f.name: f for f in self.fields}

    def get_field(self, name: str) -> Optional[Field]:
        return self._field_map.get(name)

    def validate(self, data: Dict[str, Any]) -> Dict[str, Any]:
        """Validate and convert a mapping; unknown keys are errors"""
        unknown = sorted(set(data) - set(self._field_map))
        if unknown:
            raise ConfigError(f"unknown field(s) for '{self.name}': {', '.join(unknown)}")
        validated = {}
        for f in self.fields:
            value = data.get(f.name)
            if value is None:
                if f.required:
                    raise ConfigError(f"required by '{self.name}'" + (f" ({f.help})" if f.help else ""), f.name)
                validated[f.name] = f.default
                continue
            validated[f.name] = ConfigValidator.convert(value, f)
        return validated


# ============================================================================
# Caps
# ============================================================================

@dataclass
class Caps:
    """Resource limits shared by every subcommand"""
    kleitman_cap: int = 16
    embedding_cap: int = 4096
    certificate_cap: int = 2_000_000
    max_points: int = 4
    psi_cap: int = 256
    psi_samples: int = 64
    select_cap: int = 8
    r_cap: int = 6
    expand_cap: int = 64
    diag_cap: int = 16
    corpus_window: int = 200
    falsify: bool = True

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> "Caps":
        data = dict(data or {})
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(data) - set(known))
        if unknown:
            raise ConfigError(f"unknown cap(s): {', '.join(unknown)}", "caps")
        values = {}
        for name, value in data.items():
            if known[name].type in (bool, 'bool'):
                values[name] = ConfigValidator.convert(value, Field(name, FieldType.BOOLEAN))
            else:
                values[name] = ConfigValidator.convert(value, Field(name, FieldType.INTEGER, minimum=1))
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


# ============================================================================
# Subcommand schemas
# ============================================================================

def _freq() -> List[Field]:
    return [
        Field('freq', FieldType.FREQUENCIES, help="frequencies such as sqrt(2),1/3+sqrt(5)/8"),
        Field('d', FieldType.INTEGER, minimum=1, help="independent frequencies sqrt(p_j) when freq is absent"),
    ]


def _window(required: bool = True) -> Field:
    return Field('window', FieldType.WINDOW, required=required, help="LO:HI")


STRATEGIES = ('exhaustive', 'lattice')

COMMON_FIELDS = [
    Field('precision_bits', FieldType.INTEGER, default=DEFAULT_PRECISION, minimum=MIN_PRECISION),
    Field('guard', FieldType.FRACTION, default=DEFAULT_GUARD, minimum=Fraction(0)),
    Field('seed', FieldType.INTEGER, default=0),
    Field('workers', FieldType.INTEGER, default=1, minimum=1),
    Field('output_dir', FieldType.PATH, default=DEFAULT_OUTPUT_DIR),
    Field('timings', FieldType.BOOLEAN, default=False),
    Field('verify', FieldType.PATH),
    Field('caps', FieldType.MAPPING, default=None),
]

COMMAND_FIELDS: Dict[Tuple[str, str], List[Field]] = {
    ('bohr', 'enumerate'): _freq() + [
        Field('eta', FieldType.FRACTION, required=True, minimum=Fraction(0)),
        _window(),
    ],
    ('bh', 'enumerate'): _freq() + [
        Field('eps', FieldType.FRACTION, required=True),
        Field('eta_frac', FieldType.FRACTION, required=True),
        Field('shift', FieldType.INTEGER, default=0),
        Field('targets', FieldType.FRACTION_LIST),
        _window(),
    ],
    ('bh', 'check-sumset'): _freq() + [
        Field('eps', FieldType.FRACTION, required=True),
        Field('eta_frac', FieldType.FRACTION, required=True),
        _window(),
    ],
    ('bh', 'cover'): _freq() + [
        Field('z', FieldType.FRACTION_LIST, required=True, help="target point, one coordinate per frequency"),
        Field('eps', FieldType.FRACTION, required=True),
        Field('eta_frac', FieldType.FRACTION, required=True),
        Field('search_bound', FieldType.INTEGER, default=100_000, minimum=0),
        Field('strategy', FieldType.STRING, default='exhaustive', choices=STRATEGIES),
        Field('form', FieldType.STRING, default='norm', choices=('norm', 'char')),
        _window(),
    ],
    ('kronecker', 'solve'): _freq() + [
        Field('target', FieldType.FRACTION_LIST, required=True),
        Field('eps', FieldType.FRACTION, required=True),
        Field('search_bound', FieldType.INTEGER, default=100_000, minimum=0),
        Field('strategy', FieldType.STRING, default='exhaustive', choices=STRATEGIES),
        Field('exclude_zero', FieldType.BOOLEAN, default=False),
    ],
    ('kronecker', 'embed'): _freq() + [
        Field('k', FieldType.INTEGER, required=True, minimum=1),
        Field('eps', FieldType.FRACTION, required=True),
        Field('search_bound', FieldType.INTEGER, default=100_000, minimum=0),
    ],
    ('system', 'returns'): _freq() + [
        Field('cyclic', FieldType.INT_LIST, help="k,step of a cyclic factor"),
        Field('eta', FieldType.FRACTION, help="box side of the default D"),
        Field('form', FieldType.STRING, default='symmetric', choices=('symmetric', 'corner')),
        Field('boxes', FieldType.MAPPING, help="explicit D as a BoxSet mapping"),
        Field('c', FieldType.FRACTION, default=Fraction(0), minimum=Fraction(0)),
        _window(),
    ],
    ('system', 'aura'): _freq() + [
        Field('set', FieldType.SET, required=True),
        Field('e', FieldType.SET, required=True),
        Field('cyclic', FieldType.INT_LIST),
        Field('eta', FieldType.FRACTION, required=True),
        Field('form', FieldType.STRING, default='symmetric', choices=('symmetric', 'corner')),
        Field('bohr', FieldType.BOOLEAN, default=False, help="use Bohr(alpha, eta) in place of R_0"),
        _window(),
    ],
    ('system', 'bohr-check'): _freq() + [
        Field('eta', FieldType.FRACTION, required=True),
        _window(),
    ],
    ('density', 'falsify'): [
        Field('set', FieldType.SET, required=True),
        Field('delta', FieldType.FRACTION, required=True),
        _window(),
    ],
    ('density', 'estimate'): [
        Field('set', FieldType.SET, required=True),
        Field('blocks', FieldType.INT_LIST, default=(10, 100, 1000)),
        _window(),
    ],
    ('kleitman', 'verify'): [
        Field('k', FieldType.INTEGER, required=True, minimum=2),
        Field('d', FieldType.INTEGER, required=True, minimum=1),
        Field('delta', FieldType.FRACTION, required=True),
        Field('r', FieldType.INTEGER, required=True, minimum=0),
        Field('mode', FieldType.STRING, default='exhaustive', choices=('exhaustive', 'sampled')),
        Field('trials', FieldType.INTEGER, default=1000, minimum=1),
        Field('all_sizes', FieldType.BOOLEAN, default=False),
    ],
    ('kleitman', 'witness'): _freq() + [
        Field('set', FieldType.SET, required=True),
        Field('eps', FieldType.FRACTION, required=True),
        Field('m', FieldType.INTEGER, default=0),
        Field('k', FieldType.INTEGER, required=True, minimum=2),
        Field('search_bound', FieldType.INTEGER, default=100_000, minimum=0),
        Field('radius', FieldType.INTEGER, minimum=0),
        Field('delta', FieldType.FRACTION),
        _window(),
    ],
    ('kleitman', 'dimension'): [
        Field('k', FieldType.INTEGER, required=True, minimum=2),
        Field('delta', FieldType.FRACTION, required=True),
        Field('r', FieldType.INTEGER, required=True, minimum=0),
        Field('d_max', FieldType.INTEGER, default=4, minimum=1),
    ],
    ('ks', 'build'): [
        Field('set', FieldType.SET, required=True),
        Field('targets', FieldType.INT_LIST),
        Field('target_count', FieldType.INTEGER, default=1, minimum=1),
        Field('stages', FieldType.INTEGER, default=2, minimum=1),
        _window(),
    ],
    ('ks', 'profile'): [
        Field('branching', FieldType.INT_LIST, required=True),
        Field('shrink', FieldType.FRACTION, default=Fraction(1, 3)),
        Field('seq', FieldType.INT_LIST),
        Field('set', FieldType.SET),
        Field('m', FieldType.INTEGER, default=0),
        Field('bound', FieldType.FRACTION),
        _window(required=False),
    ],
    ('ks', 'kronecker'): [
        Field('points', FieldType.FREQUENCIES, required=True),
        Field('k', FieldType.INTEGER, required=True, minimum=1),
        _window(),
    ],
}

SCHEMAS: Dict[Tuple[str, str], ConfigSchema] = {
    key: ConfigSchema(f"{key[0]} {key[1]}", COMMON_FIELDS + extra)
    for key, extra in COMMAND_FIELDS.items()
}


def get_schema(command: str, action: str) -> ConfigSchema:
    schema = SCHEMAS.get((command, action))
    if schema is None:
        raise ConfigError(f"unknown subcommand '{command} {action}'")
    return schema


def load_config_file(path: str) -> Dict[str, Any]:
    """Read a JSON run configuration; 'command' and 'action' keys are optional"""
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}", "config")
    with open(path, 'r') as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"invalid JSON in {path}: {e}", "config")
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must hold a JSON object", "config")
    return data


# ============================================================================
# RunConfig
# ============================================================================

@dataclass
class RunConfig:
    """A validated configuration for one subcommand"""
    command: str
    action: str
    values: Dict[str, Any]
    caps: Caps = field(default_factory=Caps)

    def __getitem__(self, name: str) -> Any:
        return self.values[name]

    def get(self, name: str, default: Any = None) -> Any:
        value = self.values.get(name)
        return default if value is None else value

    @property
    def precision_bits(self) -> int:
        return self.values['precision_bits']

    @property
    def guard(self) -> Fraction:
        return self.values['guard']

    @property
    def seed(self) -> int:
        return self.values['seed']

    @property
    def workers(self) -> int:
        return self.values['workers']

    @property
    def output_dir(self) -> str:
        return self.values['output_dir']

    @property
    def timings(self) -> bool:
        return self.values['timings']

    @classmethod
    def from_sources(cls, command: str, action: str, file_values: Optional[Dict[str, Any]] = None,
                     flag_values: Optional[Dict[str, Any]] = None) -> "RunConfig":
        """Flags override the config file; None-valued flags are treated as absent"""
        merged = dict(file_values or {})
        for key in ('command', 'action'):
            declared = merged.pop(key, None)
            expected = command if key == 'command' else action
            if declared is not None and declared != expected:
                raise ConfigError(f"config is for '{declared}', not '{expected}'", key)
        for key, value in (flag_values or {}).items():
            if value is not None:
                merged[key] = value
        values = get_schema(command, action).validate(merged)
        caps = Caps.from_dict(values.pop('caps', None))
        logger.debug("Config for %s %s: %s", command, action, values)
        return cls(command, action, values, caps)

    def to_dict(self) -> Dict[str, Any]:
        """Echo of the effective configuration, without the output location"""
        values = {k: ConfigValidator.serialize(v) for k, v in sorted(self.values.items())
                  if k not in ('output_dir', 'verify') and v is not None}
        values['caps'] = self.caps.to_dict()
        return {'command': self.command, 'action': self.action, 'values': values}
