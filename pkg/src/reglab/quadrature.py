"""Graded composite Gauss-Legendre rules for polar integrals on the plane.

All rules return ``(nodes, weights)`` as float arrays; weights already carry
the polar Jacobian where stated. Panels are graded geometrically toward
breakpoints so that Gauss nodes never land on a singular radius or angle.
"""
from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

TWO_PI = 2.0 * math.pi


@lru_cache(maxsize=None)
def gauss_legendre(order: int) -> tuple:
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def panel_rule(breaks, order: int) -> tuple:
    """Composite rule on consecutive breakpoints (sorted, duplicates ignored)."""
    b = np.unique(np.asarray(breaks, dtype=float))
    x, w = gauss_legendre(order)
    lo, hi = b[:-1], b[1:]
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def graded_breaks(a: float, b: float, uniform: int, targets=(), layers: int = 0,
                  ratio: float = 0.5) -> np.ndarray:
    """Breakpoints on ``[a, b]``: ``uniform`` equal panels plus geometric layers
    around each target (from both sides when interior)."""
    pts = list(np.linspace(a, b, uniform + 1))
    span = b - a
    for t in targets:
        if not (a <= t <= b):
            continue
        pts.append(t)
        for side in (-1.0, 1.0):
            room = (t - a) if side < 0 else (b - t)
            if room <= 0:
                continue
            # start from the nearest uniform break so layers nest cleanly
            h = min(room, span / max(uniform, 1))
            for k in range(1, layers + 1):
                pts.append(t + side * h * ratio ** k)
    return np.unique(np.clip(np.asarray(pts), a, b))


def _fold_octant(t: float) -> float:
    s = float(t) % (math.pi / 2)
    return math.pi / 2 - s if s > math.pi / 4 else s


def angular_rule(n_panels: int, order: int, singular_angles=(), layers: int = 0,
                 symmetric: bool = False, ratio: float = 0.5) -> tuple:
    """Rule on ``[0, 2pi)``.

    With ``symmetric`` the rule is built on ``[0, pi/4]`` and carried around by
    reflections and quarter turns, so the node set is invariant under
    ``z -> conj(z)``, ``z -> -conj(z)`` and ``z -> i z``.
    """
    if not symmetric:
        targets = [float(t) % TWO_PI for t in singular_angles]
        targets += [TWO_PI for t in targets if t == 0.0]
        return panel_rule(graded_breaks(0.0, TWO_PI, n_panels, targets, layers, ratio), order)
    eighth = math.pi / 4
    per = max(1, -(-n_panels // 8))
    targets = sorted({_fold_octant(t) for t in singular_angles})
    t0, w0 = panel_rule(graded_breaks(0.0, eighth, per, targets, layers, ratio), order)
    q = np.concatenate([t0, math.pi / 2 - t0[::-1]])
    wq = np.concatenate([w0, w0[::-1]])
    t = np.concatenate([q + k * math.pi / 2 for k in range(4)])
    return t, np.tile(wq, 4)


def radial_rule(r_min: float, r_max: float, n_panels: int, order: int,
                singular_radii=(), layers: int = 0, ratio: float = 0.5,
                grade_inner: bool = True) -> tuple:
    """Rule for ``int f(r) r dr`` on ``[r_min, r_max]``; weights include ``r``.
    Panels are geometric in ``r`` (log-uniform) when ``r_min > 0``."""
    if r_max <= r_min:
        return np.empty(0), np.empty(0)
    if r_min > 0:
        lo, hi = math.log(r_min), math.log(r_max)
        targets = [math.log(s) for s in singular_radii if r_min < s < r_max]
        if grade_inner:
            targets.append(lo)
        u_breaks = graded_breaks(lo, hi, n_panels, targets, layers, ratio)
        u, wu = panel_rule(u_breaks, order)
        r = np.exp(u)
        return r, wu * r * r
    targets = [s for s in singular_radii if 0 < s < r_max]
    breaks = list(graded_breaks(0.0, r_max, n_panels, targets, layers, ratio))
    first = breaks[1] if len(breaks) > 1 else r_max
    breaks += [first * ratio ** k for k in range(1, 2 * layers + 2)]
    r, w = panel_rule(breaks, order)
    return r, w * r


def outer_rule(r_out: float, n_panels: int, order: int, singular_radii=(),
               layers: int = 0, ratio: float = 0.5) -> tuple:
    """Rule for ``int_{r_out}^{oo} f(r) r dr`` via ``rho = 1/r``."""
    rho_max = 1.0 / r_out
    targets = [1.0 / s for s in singular_radii if s > r_out]
    breaks = list(graded_breaks(0.0, rho_max, n_panels, targets, layers, ratio))
    first = breaks[1] if len(breaks) > 1 else rho_max
    breaks += [first * ratio ** k for k in range(1, 2 * layers + 2)]
    rho, w = panel_rule(breaks, order)
    return 1.0 / rho, w / rho ** 3
