"""Named analytic profiles for right-hand sides and test data.

Discontinuous profiles take the half-value at grid nodes that hit a jump
exactly; combined with a grid-aligned origin this keeps quadrature of
piecewise-smooth data second-order accurate.  The jump node itself still
carries the sampled-jump ambiguity (the samples cannot locate mass within
one cell), so comparisons against closed forms should skip a few nodes
around each jump.
"""

import numpy as np


def box(t, a, b):
    """Characteristic function of [a, b], half-value at the endpoints."""
    t = np.asarray(t, float)
    inner = ((t > a) & (t < b)).astype(float)
    inner = inner + 0.5 * np.isclose(t, a) + 0.5 * np.isclose(t, b)
    return np.minimum(inner, 1.0)


def heaviside(t, a=0.0):
    """Unit step at t = a, half-value at the jump node."""
    t = np.asarray(t, float)
    return (t > a).astype(float) + 0.5 * np.isclose(t, a)


def gauss_bump(t, center, width=1.0):
    """exp(-((t - center)/width)^2), edge-negligible for wide windows."""
    x = (np.asarray(t, float) - center) / width
    return np.exp(-x * x)


def exp_decay(t, rate=1.0, a=0.0):
    """exp(-rate (t - a)) for t >= a, zero before, half-value at the jump."""
    t = np.asarray(t, float)
    return np.exp(-rate * np.maximum(t - a, 0.0)) * heaviside(t, a)


def jump_mask(times, jumps, dt, width=3.5):
    """Boolean mask of nodes farther than ``width * dt`` from every jump."""
    keep = np.ones(len(times), bool)
    for s in jumps:
        keep &= np.abs(times - s) > width * dt
    return keep


# registry used by the CLI config layer; every profile is (callable, jumps)
# where jumps lists the discontinuity locations given the parameters
TIME_PROFILES = {
    "box": lambda p: (lambda t: box(t, p.get("a", 0.0), p.get("b", 1.0)),
                      [p.get("a", 0.0), p.get("b", 1.0)]),
    "heaviside": lambda p: (lambda t: heaviside(t, p.get("a", 0.0)),
                            [p.get("a", 0.0)]),
    "gauss_bump": lambda p: (lambda t: gauss_bump(t, p.get("center", 1.0),
                                                  p.get("width", 0.25)),
                             []),
    "exp_decay": lambda p: (lambda t: exp_decay(t, p.get("rate", 1.0),
                                                p.get("a", 0.0)),
                            [p.get("a", 0.0)]),
}


def make_time_profile(name, params):
    if name not in TIME_PROFILES:
        raise ValueError(f"unknown time profile {name!r}; "
                         f"known: {sorted(TIME_PROFILES)}")
    return TIME_PROFILES[name](params or {})
