"""Composite Gauss-Legendre quadrature for piecewise-smooth 2D integrands.

The probability integrals in this package are double integrals whose
integrands are smooth except for kinks along fixed lines (the thresholds)
and the diagonal t = s.  Regions are therefore set up so that every panel
sees a smooth integrand:

* ``integrate_rect``  handles  s in [sa, sb], t in [ta, tb];
* ``integrate_wedge`` handles  s in [sa, sb], t in [s, thi], mapping the
  wedge to the unit square via t = s + (thi - s) v so that panels never
  straddle the diagonal.

Both routines double the panel count per axis until two successive
estimates agree to the requested absolute tolerance.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import NumericError

_NODES_PER_PANEL = 8
_MAX_PANELS = 256


@lru_cache(maxsize=None)
def _base_rule(order: int):
    x, w = np.polynomial.legendre.leggauss(order)
    return x, w


def panel_rule(a: float, b: float, panels: int, order: int = _NODES_PER_PANEL):
    """Composite Gauss-Legendre nodes/weights over [a, b] with equal panels."""
    x, w = _base_rule(order)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return pts, wts


def _tensor_estimate(f, s_pts, s_wts, t_pts, t_wts):
    vals = np.asarray(f(s_pts[:, None], t_pts[None, :]), dtype=float)
    vals = np.broadcast_to(vals, (s_pts.size, t_pts.size))
    return float(s_wts @ vals @ t_wts)


def _refine(estimate, tol: float) -> float:
    prev = estimate(1)
    panels = 2
    while panels <= _MAX_PANELS:
        cur = estimate(panels)
        if abs(cur - prev) < tol:
            return cur
        prev = cur
        panels *= 2
    raise NumericError(f"quadrature did not reach tol={tol}")


def integrate_rect(f, sa: float, sb: float, ta: float, tb: float,
                   tol: float = 1e-10) -> float:
    """Integral of f(s, t) over the rectangle [sa, sb] x [ta, tb]."""
    if sa >= sb or ta >= tb:
        return 0.0

    def estimate(panels: int) -> float:
        s_pts, s_wts = panel_rule(sa, sb, panels)
        t_pts, t_wts = panel_rule(ta, tb, panels)
        return _tensor_estimate(f, s_pts, s_wts, t_pts, t_wts)

    return _refine(estimate, tol)


def integrate_wedge(f, sa: float, sb: float, thi: float,
                    tol: float = 1e-10) -> float:
    """Integral of f(s, t) over { sa <= s <= sb, s <= t <= thi }."""
    if sa >= sb:
        return 0.0

    def estimate(panels: int) -> float:
        s_pts, s_wts = panel_rule(sa, sb, panels)
        v_pts, v_wts = panel_rule(0.0, 1.0, panels)
        s = s_pts[:, None]
        span = thi - s  # may vanish at s = thi; weight then vanishes too
        t = s + span * v_pts[None, :]
        vals = np.asarray(f(np.broadcast_to(s, t.shape), t), dtype=float) * span
        vals = np.broadcast_to(vals, t.shape)
        return float(s_wts @ vals @ v_wts)

    return _refine(estimate, tol)
