# QMARGIN v1.0
import logging
import os
import sys

from rich.logging import RichHandler

from cli.ui import err_console, print_header, show_error

COMMANDS = ('solve', 'sweep', 'verify', 'mixed-bound', 'history')

USAGE = """usage: main.py <command> [options]

commands:
  solve         optimal measurement for one instance
  sweep         (eta1, margin) grid to CSV
  verify        random cross-checks against the brute-force oracle
  mixed-bound   upper bound for two density matrices
  history       recent runs (needs QMARGIN_RUN_LOG=1)

Run 'main.py <command> --help' for the options of a command."""


def setup_logging():
    '''Root logger to stderr via rich; level from QMARGIN_LOG_LEVEL.'''
    level = os.environ.get('QMARGIN_LOG_LEVEL', 'WARNING').upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format='%(message)s',
        datefmt='[%X]',
        handlers=[RichHandler(console=err_console, show_path=False)],
    )


def _command_module(command):
    if command == 'solve':
        from cli import solve as module
    elif command == 'sweep':
        from cli import sweep as module
    elif command == 'verify':
        from cli import verify as module
    elif command == 'mixed-bound':
        from cli import mixed as module
    else:
        from cli import history as module
    return module


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)

    if not argv or argv[0] in ('-h', '--help'):
        print(USAGE)
        return 0 if argv else 2

    command, rest = argv[0], argv[1:]
    if command not in COMMANDS:
        show_error(f"Unknown command: {command}")
        print(USAGE, file=sys.stderr)
        return 2

    setup_logging()

    writes_stdout_data = '--json' in rest or (command == 'sweep' and '--output' not in rest and '-o' not in rest)
    if sys.stdout.isatty() and not writes_stdout_data:
        print_header()

    try:
        return _command_module(command).run(rest)
    except ValueError as e:
        # DiscriminationError and flag validation both land here
        show_error(str(e))
        return 2
    except OSError as e:
        show_error(str(e))
        return 2


if __name__ == "__main__":
    sys.exit(main())
