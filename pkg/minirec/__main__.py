#!/usr/bin/env python3
"""
minirec - Recurrence experiments on the torus
Entry point script

Run a subcommand:
    python -m minirec bohr enumerate --freq "sqrt(2)" --eta 0.15 --window 0:10

Or use as a library:
    from minirec import RunConfig, Workbench
    config = RunConfig.from_sources('kleitman', 'verify',
                                    flag_values={'k': 2, 'd': 2, 'delta': '1/4', 'r': 1})
    print(Workbench().run(config).summary)
"""

import sys

from minirec.core.cli import main

if __name__ == '__main__':
    sys.exit(main())
