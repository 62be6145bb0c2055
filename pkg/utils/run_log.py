# QMARGIN v1.0
import getpass
import json
import os
from datetime import datetime
from enum import Enum

from config import QMARGIN_CONFIG_DIR


class RunEventType(Enum):
    """Types of recorded command runs"""
    SOLVE = "SOLVE"
    SWEEP = "SWEEP"
    VERIFY = "VERIFY"
    MIXED_BOUND = "MIXED_BOUND"


RUN_LOG_FILE = QMARGIN_CONFIG_DIR / 'runs.log'
RUN_DAILY_DIR = QMARGIN_CONFIG_DIR / 'daily'


class RunLogger:
    """
    JSON-lines history of command runs.
    Disabled unless QMARGIN_RUN_LOG=1
    """

    def __init__(self, enabled=False, log_file=None, daily_dir=None):
        self.enabled = enabled
        self.log_file = log_file or RUN_LOG_FILE
        self.daily_dir = daily_dir or RUN_DAILY_DIR

    def log_event(self, event_type: RunEventType, summary: str, details: dict = None):
        """Record one run; never raises"""
        if not self.enabled:
            return

        try:
            event = {
                'timestamp': datetime.now().isoformat(),
                'user': self._get_current_user(),
                'event_type': event_type.value,
                'summary': summary,
                'details': details or {}
            }

            self.log_file.parent.mkdir(parents=True, exist_ok=True)
            with open(self.log_file, 'a', encoding='utf-8') as f:
                f.write(json.dumps(event, default=str) + '\n')

            self._write_daily_log(event)

        except Exception:
            # History must never break a command
            pass

    def _write_daily_log(self, event):
        """Human-readable companion line in daily/<date>.txt"""
        try:
            self.daily_dir.mkdir(parents=True, exist_ok=True)
            today = datetime.now().strftime('%Y-%m-%d')
            daily_file = self.daily_dir / f'{today}.txt'

            ts = event.get('timestamp', '')[:19]
            details = event.get('details', {})
            detail_str = ', '.join(f'{k}={v}' for k, v in details.items()) if details else ''

            line = f"[{ts}] [{event.get('user', 'unknown')}] {event.get('event_type', '')} {event.get('summary', '')}"
            if detail_str:
                line += f' ({detail_str})'

            with open(daily_file, 'a', encoding='utf-8') as f:
                f.write(line + '\n')
        except Exception:
            pass

    def _get_current_user(self):
        try:
            return getpass.getuser()
        except Exception:
            return "unknown"

    def get_recent_events(self, limit=20, event_type=None):
        """Newest first, optionally filtered by event type value"""
        if not self.log_file.exists():
            return []

        events = []
        try:
            with open(self.log_file, 'r', encoding='utf-8') as f:
                lines = f.readlines()[::-1]

            for line in lines:
                if not line.strip():
                    continue
                try:
                    event = json.loads(line)
                except json.JSONDecodeError:
                    continue
                if event_type and event.get('event_type') != event_type:
                    continue
                events.append(event)
                if len(events) >= limit:
                    break
        except OSError:
            pass

        return events


_run_logger = None


def run_log_enabled():
    return os.environ.get('QMARGIN_RUN_LOG', '').strip().lower() in ('1', 'true', 'yes', 'on')


def get_run_logger():
    """Global run logger; enabled state follows QMARGIN_RUN_LOG"""
    global _run_logger
    if _run_logger is None:
        _run_logger = RunLogger(enabled=run_log_enabled())
    else:
        _run_logger.enabled = run_log_enabled()
    return _run_logger
