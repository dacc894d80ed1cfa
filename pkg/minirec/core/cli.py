"""
CLI - Command-line front end for minirec

Every module is exposed as a ``<command> <action>`` subcommand. Values come
from an optional JSON config file (``--config``) with flags layered on top.

Exit codes:
    0  success (including "not found" search outcomes)
    2  validation error
    3  invariant violation detected during the run
    4  resource cap exceeded
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional

from .config import COMMAND_FIELDS, FieldType, RunConfig, load_config_file
from .errors import ConfigError, MinirecError
from .workbench import RunResult, Workbench

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# schema fields every subcommand shares
COMMON_OPTIONS = ('precision_bits', 'guard', 'seed', 'workers', 'output_dir', 'timings', 'caps')


def _common_parser() -> argparse.ArgumentParser:
    """Options accepted both before and after the subcommand"""
    common = argparse.ArgumentParser(add_help=False)
    # SUPPRESS keeps a subparser from resetting a value given before the subcommand
    opt = dict(default=argparse.SUPPRESS)
    common.add_argument('-c', '--config', help='JSON run configuration; flags override its fields', **opt)
    common.add_argument('-o', '--output-dir', help='Directory for result files (default: ./minirec_out)', **opt)
    common.add_argument('--precision-bits', help='Working precision in bits', **opt)
    common.add_argument('--guard', help='Ambiguity margin tau, e.g. 2^-40 or 1e-12', **opt)
    common.add_argument('--seed', help='Seed for sampled modes', **opt)
    common.add_argument('--workers', help='Worker processes for partitionable scans', **opt)
    common.add_argument('--caps', help='Resource caps as a JSON object or a path to one', **opt)
    common.add_argument('--timings', action='store_const', const=True, help='Record wall-clock runtime', **opt)
    common.add_argument('--verify', metavar='RESULT', help='Re-check the claims of a result file', **opt)
    common.add_argument('-v', '--verbose', action='count', help='More logging (-vv for debug)', **opt)
    common.add_argument('--log-file', help='Also write the log to this file', **opt)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog='minirec',
        description='minirec - recurrence, Bohr sets and Kronecker-type constructions on the torus',
        parents=[common],
    )
    commands = parser.add_subparsers(dest='command', metavar='COMMAND')
    groups: Dict[str, Any] = {}
    for (command, action), fields in COMMAND_FIELDS.items():
        if command not in groups:
            sub = commands.add_parser(command, help=f"{command} subcommands")
            groups[command] = sub.add_subparsers(dest='action', metavar='ACTION')
        leaf = groups[command].add_parser(action, parents=[common], help=f"{command} {action}")
        for f in fields:
            flag = '--' + f.name.replace('_', '-')
            text = f.help or None
            if f.ftype == FieldType.BOOLEAN:
                leaf.add_argument(flag, dest=f.name, action='store_const', const=True, default=None, help=text)
            else:
                if f.choices:
                    text = (text + '; ' if text else '') + '|'.join(f.choices)
                leaf.add_argument(flag, dest=f.name, default=None, help=text)
    return parser


def _load_caps(value: str) -> Dict[str, Any]:
    text = value.strip()
    if text.startswith('{'):
        try:
            return json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"not valid JSON: {e}", "caps")
    return load_config_file(text)


def _flag_values(args: argparse.Namespace) -> Dict[str, Any]:
    fields = COMMAND_FIELDS.get((args.command, args.action), [])
    values = {f.name: getattr(args, f.name, None) for f in fields}
    for name in COMMON_OPTIONS:
        if hasattr(args, name):
            values[name] = getattr(args, name)
    if isinstance(values.get('caps'), str):
        values['caps'] = _load_caps(values['caps'])
    return values


def configure_logging(verbosity: int = 0, log_file: Optional[str] = None) -> None:
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)


def print_result(result: RunResult, out=None) -> None:
    out = out or sys.stdout
    print(result.summary, file=out)
    for path in result.artifacts:
        print(f"  wrote {path}", file=out)
    for violation in result.violations:
        print(f"  VIOLATION: {violation}", file=out)


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point; returns the process exit status"""
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(getattr(args, 'verbose', 0) or 0, getattr(args, 'log_file', None))

    bench = Workbench()
    try:
        verify_path = getattr(args, 'verify', None)
        if verify_path:
            result = bench.verify(verify_path)
        else:
            if not args.command or not getattr(args, 'action', None):
                parser.print_help(sys.stderr)
                return 2
            file_values = load_config_file(args.config) if getattr(args, 'config', None) else None
            config = RunConfig.from_sources(args.command, args.action, file_values, _flag_values(args))
            logger.info("Running %s %s", args.command, args.action)
            result = bench.run(config)
    except MinirecError as e:
        print(f"Error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2

    print_result(result)
    return 3 if result.violations else 0


if __name__ == '__main__':
    sys.exit(main())
