"""Orlicz (N-)functions and the objects derived from them.

An :class:`OrliczFunction` bundles a vectorized evaluator with its left
derivative and, when known, a closed-form inverse.  Functions without a
closed form (complementary functions, intermediate functions, user tables)
are carried by a :class:`GridFunction`.
"""

import csv
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from ._numeric import bisect_increasing, expand_upper, golden_section_min
from .errors import (BracketOverflowError, InvalidFunctionError,
                     InvalidInputError, InvalidParameterError)

INVERSE_RTOL = 1e-12
BRACKET_FACTOR = 4.0
INDEX_KMIN = 8
INDEX_KMAX = 40
INDEX_TAIL = 8
INDEX_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class OrliczFunction:
    """A convex N-function ``phi`` on ``[0, inf)``.

    ``eval`` and ``left_deriv`` must accept numpy arrays.  ``inverse_hint`` is
    an exact inverse used by :func:`inverse` when present.  ``params`` carries
    descriptive metadata (e.g. ``{"kind": "power", "p": 2.0}``).
    """

    label: str
    eval: Callable
    left_deriv: Optional[Callable] = None
    inverse_hint: Optional[Callable] = None
    params: dict = field(default_factory=dict)

    def __call__(self, u):
        return self.eval(np.asarray(u, dtype=float))

    def deriv(self, t):
        t = np.asarray(t, dtype=float)
        if self.left_deriv is not None:
            return self.left_deriv(t)
        h = np.maximum(1e-7 * t, 1e-12)
        return (self.eval(t) - self.eval(np.maximum(t - h, 0.0))) / np.minimum(h, np.maximum(t, 1e-300))

    def inverse(self, v):
        return inverse(self, v)

    @property
    def power(self):
        """Exponent ``p`` if this is ``u**p``, else ``None``."""
        if self.params.get("kind") == "power":
            return self.params["p"]
        return None

    def __repr__(self):
        return f"OrliczFunction({self.label!r})"


def power_function(p):
    """``u -> u**p`` for ``p >= 1``; the modular of the Schatten class ``S_p``."""
    p = float(p)
    if not p >= 1.0 or not math.isfinite(p):
        raise InvalidParameterError(f"power exponent must be finite and >= 1, got {p}")

    def ev(u):
        return np.power(np.abs(u), p)

    def deriv(t):
        return p * np.power(np.abs(t), p - 1.0)

    def inv(v):
        return np.power(np.asarray(v, dtype=float), 1.0 / p)

    return OrliczFunction(f"power:{p:g}", ev, deriv, inv, {"kind": "power", "p": p})


def inverse(phi, v):
    """Solve ``phi(u) = v`` for ``u >= 0``.

    Uses ``phi.inverse_hint`` when available; otherwise bisection on a bracket
    grown by a factor of 4 until it contains the root.
    """
    v = np.asarray(v, dtype=float)
    if np.any(v < 0) or np.any(np.isnan(v)):
        raise InvalidParameterError("inverse is defined for v >= 0")
    if phi.inverse_hint is not None:
        return phi.inverse_hint(v)
    flat = np.atleast_1d(v).astype(float)
    out = np.zeros_like(flat)
    pos = flat > 0
    if np.any(pos):
        target = flat[pos]
        hi = expand_upper(phi.eval, target, np.ones_like(target), factor=BRACKET_FACTOR)
        lo = np.zeros_like(hi)
        lo, hi = bisect_increasing(phi.eval, target, lo, hi, rtol=1e-15, ftol=INVERSE_RTOL)
        fl, fh = phi.eval(lo), phi.eval(hi)
        out[pos] = np.where(np.abs(fh - target) <= np.abs(fl - target), hi, lo)
    return out.reshape(v.shape) if v.ndim else out[0]


# ---------------------------------------------------------------------------
# tabulated functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GridFunction:
    """Tabulated nondecreasing function through ``(nodes[i], values[i])``.

    ``interp`` selects the carrier between nodes:

    * ``"linear"``: piecewise-linear; beyond the last node the last chord
      slope continues linearly.
    * ``"loglog"``: piecewise power law ``v = v_i (u/u_i)**b_i``; both tails
      extend the neighbouring power law.  Power functions are reproduced
      exactly, which keeps equality cases of the norm inequalities sharp.
    """

    nodes: np.ndarray
    values: np.ndarray
    interp: str = "linear"

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        y = np.asarray(self.values, dtype=float)
        if x.ndim != 1 or x.shape != y.shape or x.size < 2:
            raise InvalidInputError("grid needs matching 1-D nodes/values with >= 2 entries")
        if x[0] != 0.0 or y[0] != 0.0:
            raise InvalidFunctionError("grid must start at (0, 0)")
        if np.any(np.diff(x) <= 0):
            raise InvalidFunctionError("grid nodes must be strictly increasing")
        if np.any(np.diff(y) < 0):
            raise InvalidFunctionError("grid values must be nondecreasing")
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(y)):
            raise InvalidFunctionError("grid entries must be finite")
        if self.interp not in ("linear", "loglog"):
            raise InvalidParameterError(f"unknown interpolation {self.interp!r}")
        if self.interp == "loglog" and np.any(y[1:] <= 0):
            raise InvalidFunctionError("loglog interpolation needs positive values off zero")
        object.__setattr__(self, "nodes", x)
        object.__setattr__(self, "values", y)

    @property
    def slopes(self):
        return np.diff(self.values) / np.diff(self.nodes)

    def is_convex(self, rtol=1e-9):
        s = self.slopes
        return bool(np.all(np.diff(s) >= -rtol * np.maximum(1.0, np.abs(s[1:]))))

    @cached_property
    def _loglog(self):
        lx = np.log(self.nodes[1:])
        ly = np.log(self.values[1:])
        if lx.size == 1:
            b = np.array([ly[0] / lx[0] if lx[0] != 0 else 1.0])
            return lx, ly, b
        return lx, ly, np.diff(ly) / np.diff(lx)

    def __call__(self, u):
        u = np.abs(np.asarray(u, dtype=float))
        x, y = self.nodes, self.values
        if self.interp == "linear":
            last = (y[-1] - y[-2]) / (x[-1] - x[-2])
            return np.where(u <= x[-1], np.interp(u, x, y), y[-1] + last * (u - x[-1]))
        lx, ly, b = self._loglog
        with np.errstate(divide="ignore"):
            lu = np.log(u)
        inner = np.interp(lu, lx, ly)
        low = ly[0] + b[0] * (lu - lx[0])
        high = ly[-1] + b[-1] * (lu - lx[-1])
        lv = np.where(lu < lx[0], low, np.where(lu > lx[-1], high, inner))
        with np.errstate(over="ignore"):
            return np.where(u > 0, np.exp(lv), 0.0)

    def deriv(self, t):
        t = np.abs(np.asarray(t, dtype=float))
        x = self.nodes
        if self.interp == "linear":
            s = self.slopes
            idx = np.clip(np.searchsorted(x, t, side="left") - 1, 0, s.size - 1)
            return np.where(t > 0, s[idx], 0.0)
        lx, _, b = self._loglog
        with np.errstate(divide="ignore"):
            lt = np.log(t)
        idx = np.clip(np.searchsorted(lx, lt, side="left") - 1, 0, b.size - 1)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(t > 0, b[idx] * self(t) / np.where(t > 0, t, 1.0), 0.0)

    @property
    def strictly_increasing(self):
        return bool(np.all(np.diff(self.values) > 0))

    def inverse(self, v):
        """Inverse of the interpolant (requires strictly increasing values)."""
        v = np.asarray(v, dtype=float)
        x, y = self.nodes, self.values
        if self.interp == "linear":
            last = (y[-1] - y[-2]) / (x[-1] - x[-2])
            return np.where(v <= y[-1], np.interp(v, y, x), x[-1] + (v - y[-1]) / last)
        lx, ly, b = self._loglog
        with np.errstate(divide="ignore"):
            lv = np.log(v)
        inner = np.interp(lv, ly, lx)
        low = lx[0] + (lv - ly[0]) / b[0]
        high = lx[-1] + (lv - ly[-1]) / b[-1]
        lu = np.where(lv < ly[0], low, np.where(lv > ly[-1], high, inner))
        with np.errstate(over="ignore"):
            return np.where(v > 0, np.exp(lu), 0.0)

    def to_orlicz(self, label, inverse_hint=None, params=None):
        if inverse_hint is None and self.strictly_increasing:
            inverse_hint = self.inverse
        meta = {"kind": "grid", "interp": self.interp}
        meta.update(params or {})
        return OrliczFunction(label, self.__call__, self.deriv, inverse_hint, meta)

    @classmethod
    def from_csv(cls, path, interp="linear"):
        """Read a ``u,phi`` CSV; a ``(0, 0)`` row is prepended if missing."""
        try:
            with open(path, newline="") as fh:
                rows = list(csv.reader(fh))
        except OSError as exc:
            raise InvalidInputError(f"cannot read grid file {path}: {exc}") from exc
        if not rows or [c.strip().lower() for c in rows[0]] != ["u", "phi"]:
            raise InvalidInputError(f"{path}: expected header 'u,phi'")
        try:
            data = np.array([[float(c) for c in r] for r in rows[1:] if r], dtype=float)
        except ValueError as exc:
            raise InvalidInputError(f"{path}: non-numeric grid entry") from exc
        if data.ndim != 2 or data.shape[1] != 2:
            raise InvalidInputError(f"{path}: each row must hold two values")
        if data[0, 0] != 0.0:
            data = np.vstack([[0.0, 0.0], data])
        return cls(data[:, 0], data[:, 1], interp)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["u", "phi"])
            for a, b in zip(self.nodes, self.values):
                w.writerow([repr(float(a)), repr(float(b))])


@dataclass(frozen=True)
class GridSpec:
    """Log-spaced abscissae ``lo .. hi`` (``n`` nodes) plus the origin."""

    lo: float
    hi: float
    n: int = 2049

    def __post_init__(self):
        if not (0 < self.lo < self.hi) or self.n < 2:
            raise InvalidParameterError("grid spec needs 0 < lo < hi and n >= 2")

    def points(self):
        return np.geomspace(self.lo, self.hi, self.n)


def parse_phi(text):
    """Parse ``"power:<p>"`` or ``"grid:<path>"``."""
    kind, sep, arg = str(text).partition(":")
    if not sep:
        raise InvalidInputError(f"function spec {text!r} must look like kind:arg")
    kind = kind.strip().lower()
    if kind == "power":
        try:
            p = float(arg)
        except ValueError as exc:
            raise InvalidInputError(f"bad power exponent in {text!r}") from exc
        return power_function(p)
    if kind == "grid":
        g = GridFunction.from_csv(Path(arg))
        return g.to_orlicz(f"grid:{arg}")
    raise InvalidInputError(f"unknown function kind {kind!r}")


# ---------------------------------------------------------------------------
# derived functions
# ---------------------------------------------------------------------------

def default_conjugate_grid(phi):
    """Grid covering the range of ``psi`` exercised by norm computations."""
    y_unit = float(phi.deriv(inverse(phi, 1.0)))
    if not y_unit > 0:
        y_unit = 1.0
    return GridSpec(1e-8 * y_unit, 1e4 * y_unit, 2049)


def conjugate(phi, grid_spec=None):
    """Complementary function ``psi(y) = sup_x (x*y - phi(x))`` on a grid.

    Each node is an independent concave maximization: a scan over a factor-4
    ladder brackets the maximizer, then golden-section search refines it.
    """
    if grid_spec is None:
        grid_spec = default_conjugate_grid(phi)
    y = grid_spec.points()

    # Coarse scan on a factor-4 ladder brackets the maximizer of each concave gain.
    ladder = np.power(2.0, np.arange(-1000, 1001, 2, dtype=float))
    with np.errstate(over="ignore", invalid="ignore"):
        scan = ladder[:, None] * y[None, :] - phi.eval(ladder)[:, None]
    scan = np.where(np.isnan(scan), -np.inf, scan)
    j = np.argmax(scan, axis=0)
    if np.any(j == ladder.size - 1):
        raise BracketOverflowError(f"conjugate of {phi.label} is infinite on part of the grid")
    lo = np.where(j > 0, ladder[np.maximum(j - 1, 0)], 0.0)
    hi = ladder[np.minimum(j + 1, ladder.size - 1)]

    def loss(x):
        with np.errstate(over="ignore", invalid="ignore"):
            return -(x * y - phi.eval(x))

    _, best, _ = golden_section_min(loss, lo, hi, iters=400, rtol=1e-15)
    values = np.maximum(-best, 0.0)
    nodes = np.concatenate([[0.0], y])
    vals = np.concatenate([[0.0], values])
    interp = "loglog" if np.all(values > 0) else "linear"
    vals = np.maximum.accumulate(vals)
    grid = GridFunction(nodes, vals, interp)
    return grid.to_orlicz(f"conjugate({phi.label})",
                          params={"kind": "conjugate", "of": phi.label, "grid": grid})


def intermediate(phi1, phi2, s, *, exact=False, n_nodes=2048, value_range=(1e-8, 1e4)):
    """Intermediate function ``phi_s`` with ``phi_s^{-1} = (phi1^{-1})^{1-s} (phi2^{-1})^s``.

    The inverse is available in closed form from the two inverses and is used
    directly as ``inverse_hint``.  ``phi_s`` itself is the inverse of that
    monotone composite: with ``exact=True`` every evaluation runs a bisection;
    by default the composite is tabulated at ``n_nodes`` log-spaced modular
    values in ``value_range`` and ``phi_s`` is read off that table.
    """
    s = float(s)
    if not 0.0 <= s <= 1.0:
        raise InvalidParameterError(f"s must lie in [0, 1], got {s}")

    def composite(u):
        u = np.asarray(u, dtype=float)
        a = np.asarray(inverse(phi1, u), dtype=float)
        b = np.asarray(inverse(phi2, u), dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.power(a, 1.0 - s) * np.power(b, s)
        return np.where(u > 0, out, 0.0)

    label = f"intermediate({phi1.label},{phi2.label},s={s:g})"
    params = {"kind": "intermediate", "phi1": phi1.label, "phi2": phi2.label, "s": s}
    if exact:
        def ev(v):
            v = np.asarray(v, dtype=float)
            flat = np.atleast_1d(np.abs(v)).astype(float)
            out = np.zeros_like(flat)
            pos = flat > 0
            if np.any(pos):
                target = flat[pos]
                hi = expand_upper(composite, target, np.ones_like(target), BRACKET_FACTOR)
                lo = np.zeros_like(hi)
                lo, hi = bisect_increasing(composite, target, lo, hi, rtol=1e-15)
                out[pos] = 0.5 * (lo + hi)
            return out.reshape(v.shape) if v.ndim else out[0]

        return OrliczFunction(label, ev, None, composite, dict(params, exact=True))

    u = np.geomspace(value_range[0], value_range[1], n_nodes)
    v = composite(u)
    grid = GridFunction(np.concatenate([[0.0], v]), np.concatenate([[0.0], u]), "loglog")
    return grid.to_orlicz(label, inverse_hint=composite, params=params)


@dataclass(frozen=True)
class IndexEstimate:
    alpha: float
    beta: float
    converged: bool
    ratios: tuple


def dyadic_indices(phi, k_min=INDEX_KMIN, k_max=INDEX_KMAX, tail=INDEX_TAIL, tol=INDEX_TOL):
    """Estimate the lower/upper indices from ``phi^{-1}(u)/phi^{-1}(2u)`` at ``u = 2**-k``."""
    k = np.arange(k_min, k_max + 1, dtype=float)
    u = np.power(2.0, -k)
    ratios = np.asarray(inverse(phi, u)) / np.asarray(inverse(phi, 2.0 * u))
    window = ratios[-tail:]
    lo, hi = float(window.min()), float(window.max())
    return IndexEstimate(lo, hi, hi - lo <= tol, tuple(float(r) for r in ratios))


def index_alpha(phi, **kw):
    return dyadic_indices(phi, **kw).alpha


def index_beta(phi, **kw):
    return dyadic_indices(phi, **kw).beta


def delta2_probe(phi, u_max, n_samples=100):
    """Largest sampled ``phi(2u)/phi(u)`` over log-uniform ``u`` in ``(0, u_max]``.

    Convexity with ``phi(0) = 0`` forces the result to be at least 2.
    """
    if not u_max > 0 or n_samples < 2:
        raise InvalidParameterError("delta2_probe needs u_max > 0 and n_samples >= 2")
    u = u_max * np.geomspace(2.0 ** -30, 1.0, int(n_samples))
    base = np.asarray(phi(u), dtype=float)
    if np.any(base <= 0):
        raise InvalidFunctionError(f"{phi.label} vanishes at a positive argument")
    return float(np.max(np.asarray(phi(2.0 * u)) / base))


def validate(phi, grid=None):
    """Return a list of violated Orlicz-function invariants on a sample grid."""
    if grid is None:
        grid = np.concatenate([[0.0], np.geomspace(1e-4, 1e3, 400)])
    grid = np.sort(np.asarray(grid, dtype=float))
    problems = []
    vals = np.asarray(phi(grid), dtype=float)
    if vals[0] != 0.0:
        problems.append("phi(0) != 0")
    if np.any(vals[1:] <= 0):
        problems.append("phi vanishes at a positive argument")
    if np.any(np.diff(vals) < -1e-12 * np.abs(vals[1:])):
        problems.append("phi is not nondecreasing")
    a, b = np.meshgrid(grid[::8], grid[::8])
    mid = np.asarray(phi((a + b) / 2))
    avg = (np.asarray(phi(a)) + np.asarray(phi(b))) / 2
    if np.any(mid > avg * (1 + 1e-9) + 1e-300):
        problems.append("phi is not midpoint convex")
    ladder = np.asarray(phi(np.power(2.0, np.arange(0, 40))))
    if not (np.all(np.diff(ladder) > 0) and ladder[-1] > ladder[0]):
        problems.append("phi is not unbounded along the doubling ladder")
    d = np.asarray(phi.deriv(grid[1:]), dtype=float)
    if np.any(d < 0) or np.any(np.diff(d) < -1e-7 * np.maximum(1.0, np.abs(d[1:]))):
        problems.append("left derivative is not nonnegative and nondecreasing")
    return problems
