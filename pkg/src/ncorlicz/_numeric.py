"""Vectorized bracketing helpers shared by the function, norm and search code.

Every routine here works elementwise on numpy arrays so that a whole batch of
independent root or minimum problems advances in lock step.
"""

import numpy as np

from .errors import BracketOverflowError

INV_GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


def expand_upper(f, target, start, factor=4.0, limit=1e300):
    """Grow ``start`` geometrically until ``f(hi) >= target`` everywhere."""
    hi = np.array(start, dtype=float, copy=True)
    target = np.broadcast_to(np.asarray(target, dtype=float), hi.shape)
    with np.errstate(over="ignore", invalid="ignore"):
        need = f(hi) < target
        while np.any(need):
            hi[need] *= factor
            if np.any(hi[need] > limit):
                raise BracketOverflowError(
                    "value exceeds representable range before bracketing succeeded")
            need = f(hi) < target
    return hi


def bisect_increasing(f, target, lo, hi, rtol=1e-14, ftol=0.0, max_iter=400):
    """Bisection for ``f(x) = target`` with ``f`` nondecreasing.

    ``lo`` and ``hi`` must bracket the root elementwise.  Iteration stops per
    element once the bracket width drops below ``rtol * hi`` or the residual
    ``|f(mid) - target|`` is at most ``ftol * |target|``.  Returns the
    final ``(lo, hi)`` pair; ``f(lo) <= target <= f(hi)`` is preserved.
    """
    lo = np.array(lo, dtype=float, copy=True)
    hi = np.array(hi, dtype=float, copy=True)
    lo, hi = np.broadcast_arrays(lo, hi)
    lo, hi = lo.copy(), hi.copy()
    target = np.broadcast_to(np.asarray(target, dtype=float), lo.shape)
    scale = np.abs(target)
    active = hi - lo > rtol * np.abs(hi)
    for _ in range(max_iter):
        if not np.any(active):
            break
        mid = 0.5 * (lo + hi)
        with np.errstate(over="ignore", invalid="ignore"):
            fm = f(mid)
        below = fm < target
        lo = np.where(active & below, mid, lo)
        hi = np.where(active & ~below, mid, hi)
        if ftol > 0.0:
            hit = active & (np.abs(fm - target) <= ftol * scale)
            lo = np.where(hit, mid, lo)
            hi = np.where(hit, mid, hi)
        stuck = (mid <= lo) & (mid >= hi)
        active = active & (hi - lo > rtol * np.abs(hi)) & ~stuck
    return lo, hi


def golden_section_min(h, a, b, iters=200, rtol=1e-12, atol=0.0):
    """Minimize unimodal ``h`` elementwise on ``[a, b]``.

    Stops once every bracket is narrower than ``rtol * |x| + atol``.

    Returns ``(x_best, h_best, width)`` where ``h_best`` is the smallest value
    actually evaluated, so it is an upper bound of the true minimum.
    """
    a = np.array(a, dtype=float, copy=True)
    b = np.array(b, dtype=float, copy=True)
    c = b - INV_GOLDEN * (b - a)
    d = a + INV_GOLDEN * (b - a)
    hc = h(c)
    hd = h(d)
    best_x = np.where(hc <= hd, c, d)
    best_h = np.minimum(hc, hd)
    for _ in range(iters):
        width = b - a
        if np.all(width <= rtol * np.abs(best_x) + atol):
            break
        left = hc <= hd
        # left: keep [a, d], old c becomes new d; else keep [c, b], old d becomes new c
        new_a = np.where(left, a, c)
        new_b = np.where(left, d, b)
        new_c = np.where(left, new_b - INV_GOLDEN * (new_b - new_a), d)
        new_d = np.where(left, c, new_a + INV_GOLDEN * (new_b - new_a))
        probe = np.where(left, new_c, new_d)
        hp = h(probe)
        new_hc = np.where(left, hp, hd)
        new_hd = np.where(left, hc, hp)
        a, b, c, d, hc, hd = new_a, new_b, new_c, new_d, new_hc, new_hd
        improved = hp < best_h
        best_x = np.where(improved, probe, best_x)
        best_h = np.where(improved, hp, best_h)
    return best_x, best_h, b - a
