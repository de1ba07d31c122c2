"""Luxemburg, Orlicz and Schatten norms of single operators.

The ``*_from_spectrum`` helpers work on stacks of singular-value vectors and
are what the verification suites call; the matrix-level functions wrap them
for one operator and return a :class:`NormResult`.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._numeric import bisect_increasing, golden_section_min
from .errors import BracketOverflowError, InvalidParameterError
from .functions import conjugate, inverse
from .spectral import modular_from_spectrum, singular_values

LADDER = 60
AMEMIYA_TOL = 1e-10


@dataclass(frozen=True)
class NormResult:
    value: float
    method: str
    residual: float


def _rows(S):
    S = np.asarray(S, dtype=float)
    return S.reshape(-1, S.shape[-1]), S.shape[:-1]


def luxemburg_from_spectrum(phi, S, return_residual=False):
    """Luxemburg norm ``inf{lam > 0 : sum phi(s_k / lam) <= 1}`` per row of ``S``.

    Bisection on ``x = 1/lam`` where the modular is nondecreasing.  The
    returned ``lam`` sits on the feasible side, so the modular at ``1/lam``
    never exceeds 1 by more than rounding.
    """
    R, lead = _rows(S)
    m, n = R.shape
    s1 = np.max(R, axis=1) if n else np.zeros(m)
    zero = s1 <= 0
    s1 = np.where(zero, 1.0, s1)
    R = np.where(zero[:, None], 0.0, R)
    R = np.where(zero[:, None] & (np.arange(n) == 0), 1.0, R)

    def g(x):
        return modular_from_spectrum(phi, R, x)

    # At x = a1/s1 the top term alone equals 1; at x = an/s1 every term is <= 1/n.
    a1 = float(inverse(phi, 1.0))
    an = float(inverse(phi, 1.0 / n))
    x_hi = a1 / s1
    x_lo = an / s1
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(200):
            bad = g(x_hi) < 1.0
            if not np.any(bad):
                break
            x_hi = np.where(bad, 2.0 * x_hi, x_hi)
        for _ in range(200):
            bad = g(x_lo) > 1.0
            if not np.any(bad):
                break
            x_lo = np.where(bad, 0.5 * x_lo, x_lo)
    x_lo, x_hi = bisect_increasing(g, 1.0, x_lo, x_hi, rtol=1e-15)
    lam = np.where(zero, 0.0, 1.0 / x_lo)
    values = lam.reshape(lead)
    if not return_residual:
        return values
    resid = np.where(zero, 0.0, np.abs(g(x_lo) - 1.0)).reshape(lead)
    return values, resid


def luxemburg_norm(phi, T):
    """Luxemburg norm ``||T||_(phi)`` of one matrix."""
    s = singular_values(T)
    value, resid = luxemburg_from_spectrum(phi, s[None, :], return_residual=True)
    v = float(value[0])
    return NormResult(v, "closed_form" if v == 0.0 else "bisection", float(resid[0]))


def schatten_norm(p, T):
    """Schatten norm ``(sum s_n^p)^(1/p)`` for finite ``p >= 1``."""
    p = float(p)
    if not (p >= 1.0 and math.isfinite(p)):
        raise InvalidParameterError(f"schatten_norm needs finite p >= 1, got {p}")
    return schatten_from_spectrum(p, singular_values(T))


def schatten_from_spectrum(p, S):
    S = np.asarray(S, dtype=float)
    top = np.max(S, axis=-1, keepdims=True)
    safe = np.where(top > 0, top, 1.0)
    return top[..., 0] * np.sum((S / safe) ** p, axis=-1) ** (1.0 / p)


def amemiya_from_spectrum(phi, S, return_residual=False):
    """Orlicz norm in Amemiya form ``inf_k (1 + sum phi(k s_j)) / k`` per row.

    The objective is unimodal in ``log k``.  A doubling ladder around
    ``k = 1/||s||_(phi)`` brackets the minimum, then golden-section search
    narrows it to ``AMEMIYA_TOL`` in ``log k``.
    """
    R, lead = _rows(S)
    m = R.shape[0]
    if phi.power == 1.0:
        vals = np.sum(R, axis=1).reshape(lead)
        return (vals, np.zeros(lead)) if return_residual else vals
    lux = luxemburg_from_spectrum(phi, R)
    zero = lux <= 0
    t0 = -np.log(np.where(zero, 1.0, lux))
    R = np.where(zero[:, None], 0.0, R)

    def h(t):
        k = np.exp(t)
        with np.errstate(over="ignore", invalid="ignore"):
            return (1.0 + modular_from_spectrum(phi, R, k)) / k

    steps = np.arange(-LADDER, LADDER + 1) * math.log(2.0)
    grid = t0[:, None] + steps[None, :]
    with np.errstate(over="ignore", invalid="ignore"):
        k = np.exp(grid)
        vals = (1.0 + np.sum(phi.eval(k[:, :, None] * R[:, None, :]), axis=-1)) / k
    vals = np.where(np.isnan(vals), np.inf, vals)
    j = np.argmin(vals, axis=1)
    edge = ((j == 0) | (j == steps.size - 1)) & ~zero
    if np.any(edge):
        raise BracketOverflowError(
            f"Amemiya minimum for {phi.label} not bracketed within 2^{LADDER} of the start")
    j = np.clip(j, 1, steps.size - 2)
    rows = np.arange(m)
    a = grid[rows, j - 1]
    b = grid[rows, j + 1]
    _, best, width = golden_section_min(h, a, b, iters=300, rtol=0.0, atol=AMEMIYA_TOL)
    best = np.minimum(best, vals[rows, j])
    out = np.where(zero, 0.0, best).reshape(lead)
    if return_residual:
        return out, np.where(zero, 0.0, width).reshape(lead)
    return out


def orlicz_norm(phi, T):
    """Orlicz norm ``||T||_phi`` via the Amemiya formula."""
    s = singular_values(T)
    if not np.any(s):
        return NormResult(0.0, "closed_form", 0.0)
    value, width = amemiya_from_spectrum(phi, s[None, :], return_residual=True)
    method = "closed_form" if phi.power == 1.0 else "amemiya"
    return NormResult(float(value[0]), method, float(width[0]))


def _unit_modular_scale(psi, D):
    """Largest ``t`` per row with ``sum psi(t d) <= 1`` (rows of ``D`` nonzero)."""
    def g(t):
        return modular_from_spectrum(psi, D, t)

    top = np.max(D, axis=1)
    hi = float(inverse(psi, 1.0)) / top
    lo = float(inverse(psi, 1.0 / D.shape[1])) / top
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(200):
            bad = g(hi) < 1.0
            if not np.any(bad):
                break
            hi = np.where(bad, 2 * hi, hi)
        for _ in range(200):
            bad = g(lo) > 1.0
            if not np.any(bad):
                break
            lo = np.where(bad, lo / 2, lo)
    lo, _ = bisect_increasing(g, 1.0, lo, hi, rtol=1e-14)
    return lo


def orlicz_norm_dual_search(phi, T, budget=4000, seed=0, psi=None):
    """Lower estimate of ``sup{tr|TB| : tr psi(B) <= 1}`` over diagonal ``B``.

    ``B`` is taken diagonal in the singular basis of ``T``.  Directions on
    the simplex are sampled at random, scaled onto the boundary
    ``sum psi(b) = 1``, then refined by coordinate moves of shrinking size.
    """
    s = singular_values(T)
    if not np.any(s):
        return 0.0
    if psi is None:
        psi = conjugate(phi)
    n = s.size
    rng = np.random.default_rng(seed)

    def score(D):
        D = D / np.sum(D, axis=1, keepdims=True)
        t = _unit_modular_scale(psi, D)
        return t * (D @ s), D

    n_random = max(1, budget // 2)
    D = rng.dirichlet(np.ones(n), size=n_random)
    D = np.vstack([D, np.eye(n), np.full((1, n), 1.0 / n)])
    vals, D = score(D)
    i = int(np.argmax(vals))
    best, d = float(vals[i]), D[i]
    used = D.shape[0]
    step = 0.25
    moves = np.vstack([np.eye(n), -np.eye(n)])
    while used < budget and step > 1e-10:
        cand = np.clip(d[None, :] + step * moves, 0.0, None)
        cand = cand[np.sum(cand, axis=1) > 0]
        cvals, cand = score(cand)
        used += cand.shape[0]
        j = int(np.argmax(cvals))
        if cvals[j] > best:
            best, d = float(cvals[j]), cand[j]
        else:
            step *= 0.5
    return best
