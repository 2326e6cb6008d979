"""Small numeric helpers used by more than one module."""

import numpy as np


def quintic_smoothstep(t):
    """C^2 ramp 6t^5 - 15t^4 + 10t^3 on [0, 1], clamped outside.

    Equals 0 at t <= 0 and 1 at t >= 1 exactly; maximum slope is 15/8 at t = 1/2.
    """
    t = np.clip(t, 0.0, 1.0)
    return t * t * t * (t * (6.0 * t - 15.0) + 10.0)


QUINTIC_MAX_SLOPE = 15.0 / 8.0
