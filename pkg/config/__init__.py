# QMARGIN v1.0
import os
from pathlib import Path

import yaml
from dotenv import load_dotenv

load_dotenv()

# Central directory for run history and user overrides
QMARGIN_CONFIG_DIR = Path(os.environ.get('QMARGIN_HOME', Path.home() / '.qmargin'))

DEFAULTS_FILE = Path(__file__).parent / 'defaults.yaml'
USER_OVERRIDES_FILE = QMARGIN_CONFIG_DIR / 'overrides.yaml'

_cache = None


def _load():
    '''Load shipped defaults, then shallow-merge user overrides per section.'''
    global _cache
    if _cache is not None:
        return _cache

    with open(DEFAULTS_FILE, 'r', encoding='utf-8') as f:
        data = yaml.safe_load(f) or {}

    if USER_OVERRIDES_FILE.exists():
        try:
            with open(USER_OVERRIDES_FILE, 'r', encoding='utf-8') as f:
                overrides = yaml.safe_load(f) or {}
            for section, values in overrides.items():
                if isinstance(values, dict):
                    data.setdefault(section, {}).update(values)
        except (yaml.YAMLError, OSError):
            pass

    _cache = data
    return data


def get_tolerances():
    '''Numerical tolerances (dict of float).'''
    return {k: float(v) for k, v in _load().get('tolerances', {}).items()}


def get_search_defaults():
    '''Default oracle search parameters.'''
    return dict(_load().get('search', {}))


def get_env_int(name, default=None):
    '''Read an integer environment variable, ignoring malformed values.'''
    raw = os.environ.get(name)
    if raw is None or not raw.strip():
        return default
    try:
        return int(raw)
    except ValueError:
        return default
