"""Principal branch of the Lambert W function on the real line."""

import math

from .errors import DomainError

#: -1/e, the branch point of W.
BRANCH_POINT = -math.exp(-1.0)

_DOMAIN_SLACK = 1e-15
_BRANCH_SNAP = 1e-12
_MAX_ITER = 50
_STEP_TOL = 1e-15


def _initial_guess(z):
    if z < -0.25:
        # series in p = sqrt(2(ez + 1)) about the branch point
        p = math.sqrt(max(2.0 * (math.e * z + 1.0), 0.0))
        return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3
    if z < 3.0:
        return math.log1p(z)
    lz = math.log(z)
    return lz - math.log(lz)


def lambert_w0(z):
    """Evaluate the principal branch W0 at a real ``z >= -1/e``.

    Halley iteration from a branch-point series (negative ``z``) or
    logarithmic seed. Inputs within 1e-12 of -1/e return exactly -1.

    Parameters
    ----------
    z : float
        Argument; must satisfy ``z > -1/e`` up to a 1e-15 slack.

    Returns
    -------
    float
        ``w`` with ``w * exp(w) == z``; ``w`` lies in ``[-1, 0]`` for
        ``z`` in ``[-1/e, 0]``.

    Raises
    ------
    DomainError
        If ``z`` is below the branch point or not finite.
    """
    z = float(z)
    if not math.isfinite(z):
        raise DomainError(f"lambert_w0 needs a finite argument, got {z!r}")
    if z < BRANCH_POINT - _DOMAIN_SLACK:
        raise DomainError(f"lambert_w0 undefined for z={z!r} < -1/e")
    if z - BRANCH_POINT <= _BRANCH_SNAP:
        return -1.0
    if z == 0.0:
        return 0.0

    w = _initial_guess(z)
    for _ in range(_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - z
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0:
            break
        step = f / denom
        w -= step
        if abs(step) <= _STEP_TOL * max(1.0, abs(w)):
            break
    if z < 0.0:
        # keep the bracket exact despite roundoff in the last step
        w = min(max(w, -1.0), 0.0)
    return w
