# QMARGIN v1.0 - Command-line value validation
import math
import re


def parse_probability(value, name="value", open_interval=False):
    '''Parse a float in [0, 1] (or (0, 1)). Returns float or raises ValueError.'''
    try:
        value = float(value)
    except (ValueError, TypeError):
        raise ValueError(f"{name} must be a number")

    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite")

    if open_interval:
        if not (0.0 < value < 1.0):
            raise ValueError(f"{name} must lie strictly between 0 and 1")
    elif not (0.0 <= value <= 1.0):
        raise ValueError(f"{name} must lie between 0 and 1")

    return value


def parse_ket(text, name="state"):
    '''Parse a two-component complex vector such as "1,0" or "(0.6+0.2j, 0.77)".'''
    if not text or not isinstance(text, str):
        raise ValueError(f"{name} is required")

    body = text.strip().strip('()[]')
    parts = [p.strip().replace(' ', '') for p in body.split(',')]
    if len(parts) != 2 or not all(parts):
        raise ValueError(f"{name} must have exactly two comma-separated components")

    try:
        ket = tuple(complex(p.replace('i', 'j')) for p in parts)
    except ValueError:
        raise ValueError(f"{name} has a component that is not a complex number: {text!r}")

    if not all(math.isfinite(c.real) and math.isfinite(c.imag) for c in ket):
        raise ValueError(f"{name} must have finite components")

    return ket


def parse_range(text, name="range", open_interval=False):
    '''Parse "lo:hi" with 0 <= lo <= hi <= 1 (strict ends for open_interval).'''
    if not text or not isinstance(text, str):
        raise ValueError(f"{name} is required")

    match = re.match(r'^\s*([^:]+)\s*:\s*([^:]+)\s*$', text)
    if not match:
        raise ValueError(f"{name} must look like LO:HI")

    lo = parse_probability(match.group(1), f"{name} lower end", open_interval)
    hi = parse_probability(match.group(2), f"{name} upper end", open_interval)
    if lo > hi:
        raise ValueError(f"{name} lower end exceeds upper end")

    return lo, hi


def validate_steps(steps, name="steps"):
    '''Grid size of a sweep axis. Returns int or raises ValueError.'''
    try:
        steps = int(steps)
    except (ValueError, TypeError):
        raise ValueError(f"{name} must be an integer")

    if steps < 2:
        raise ValueError(f"{name} must be at least 2")

    return steps


def validate_output_path(path, allowed_extensions=None):
    '''Validate an output file path (no null bytes, optional extension check).'''
    if not path or not isinstance(path, str):
        raise ValueError("Output path is required")

    path = path.strip()

    if '\x00' in path:
        raise ValueError("Invalid output path")

    if allowed_extensions:
        ext = path.rsplit('.', 1)[-1].lower() if '.' in path else ''
        if ext not in allowed_extensions:
            raise ValueError(f"Output type not allowed: .{ext}")

    return path


def validate_columns(columns, available, default=None):
    '''Split a comma list of column names and check each one exists.

    An empty selection gives ``default`` (all available columns when None).
    '''
    if not columns:
        return list(available if default is None else default)

    selected = [c.strip() for c in columns.split(',') if c.strip()]
    unknown = [c for c in selected if c not in available]
    if unknown:
        raise ValueError(f"Unknown column(s): {', '.join(unknown)}")

    return selected
