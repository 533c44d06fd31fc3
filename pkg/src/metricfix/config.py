"""Default tolerances and size caps.

Every CLI report echoes the values actually used, so nothing here is hidden
configuration.
"""

import os

from .errors import InputError

TRIANGLE_TOL = 1e-9
STRICT_TOL = 1e-12
TIE_TOL = 1e-9

SPACE_CAP = 5_000
PROFILE_CAP = 100_000

CAP_ENV = "METRICFIX_CAP"


def _env_caps() -> tuple[int, int] | None:
    raw = os.environ.get(CAP_ENV)
    if not raw:
        return None
    try:
        parts = [int(p) for p in raw.split(",")]
    except ValueError:
        raise InputError(f"{CAP_ENV} must be an integer or 'space,profile', got {raw!r}")
    if len(parts) == 1:
        parts = parts * 2
    if len(parts) != 2 or min(parts) < 1:
        raise InputError(f"{CAP_ENV} must be an integer or 'space,profile', got {raw!r}")
    return parts[0], parts[1]


def space_cap() -> int:
    caps = _env_caps()
    return SPACE_CAP if caps is None else caps[0]


def profile_cap() -> int:
    caps = _env_caps()
    return PROFILE_CAP if caps is None else caps[1]
