# QMARGIN v1.0 - history command
import argparse
from datetime import datetime

from rich.table import Table

from cli.ui import console, show_info, show_warning
from utils.run_log import RunEventType, get_run_logger, run_log_enabled


def build_parser():
    parser = argparse.ArgumentParser(prog='main.py history', description='Show recent command runs.')
    parser.add_argument('--limit', type=int, default=20)
    parser.add_argument('--command', choices=[e.value.lower() for e in RunEventType],
                        help='only show runs of this command')
    return parser


def events_table(events):
    table = Table(title="Recent Runs", show_header=True, header_style="bold cyan")
    table.add_column("Time", style="cyan")
    table.add_column("User", style="magenta")
    table.add_column("Command", style="yellow")
    table.add_column("Summary", style="green")
    table.add_column("Details", style="dim")

    for event in events:
        try:
            time_str = datetime.fromisoformat(event['timestamp']).strftime("%Y-%m-%d %H:%M:%S")
        except (KeyError, ValueError):
            time_str = event.get('timestamp', '')
        details = event.get('details') or {}
        detail_str = ', '.join(f'{k}={v}' for k, v in details.items())
        if len(detail_str) > 60:
            detail_str = detail_str[:57] + '...'
        table.add_row(
            time_str,
            event.get('user', 'unknown'),
            event.get('event_type', ''),
            event.get('summary', ''),
            detail_str,
        )
    return table


def run(argv):
    args = build_parser().parse_args(argv)
    if args.limit < 1:
        raise ValueError("--limit must be at least 1")

    logger = get_run_logger()
    event_type = args.command.upper() if args.command else None
    events = logger.get_recent_events(limit=args.limit, event_type=event_type)

    if not events:
        if not run_log_enabled():
            show_info("Run history is off; set QMARGIN_RUN_LOG=1 to record runs")
        show_warning("No runs recorded")
        return 0

    console.print(events_table(events))
    return 0
