"""Finite real matrices standing in for compact operators.

All routines accept a single ``(n, n)`` array or a stack ``(..., n, n)``;
stacks are processed in one vectorized pass.
"""

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ConvergenceError, DimensionMismatchError, InvalidInputError

JACOBI_TOL = 1e-13
MAX_SWEEPS = 100
CLAMP = 1e-12


def as_matrix(T):
    """Validate and return ``T`` as a float array of square matrices."""
    A = np.asarray(T, dtype=float)
    if A.ndim < 2 or A.shape[-1] != A.shape[-2] or A.shape[-1] < 1:
        raise InvalidInputError(f"expected square matrices, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidInputError("matrix entries must be finite")
    return A


def _is_diagonal(A):
    n = A.shape[-1]
    off = A * (1.0 - np.eye(n))
    return not np.any(off)


def _jacobi_column_norms(A):
    """One-sided (Hestenes) Jacobi: orthogonalize columns, return their norms."""
    U = np.array(A, dtype=float, copy=True)
    n = U.shape[-1]
    if n == 1:
        return np.abs(U[..., 0, :])
    fro2 = np.sum(U * U, axis=(-2, -1))
    pairs = [(i, j) for i in range(n - 1) for j in range(i + 1, n)]
    for _ in range(MAX_SWEEPS):
        off2 = np.zeros(U.shape[:-2])
        for i, j in pairs:
            ui = U[..., :, i]
            uj = U[..., :, j]
            alpha = np.sum(ui * ui, axis=-1)
            beta = np.sum(uj * uj, axis=-1)
            gamma = np.sum(ui * uj, axis=-1)
            off2 += gamma * gamma
            rotate = np.abs(gamma) > 1e-300
            if not np.any(rotate):
                continue
            g = np.where(rotate, gamma, 1.0)
            zeta = (beta - alpha) / (2.0 * g)
            t = np.sign(zeta) / (np.abs(zeta) + np.hypot(1.0, zeta))
            t = np.where(zeta == 0, 1.0, t)
            t = np.where(rotate, t, 0.0)
            c = 1.0 / np.sqrt(1.0 + t * t)
            s = c * t
            new_i = c[..., None] * ui - s[..., None] * uj
            new_j = s[..., None] * ui + c[..., None] * uj
            U[..., :, i] = new_i
            U[..., :, j] = new_j
        if np.all(np.sqrt(2.0 * off2) <= JACOBI_TOL * fro2):
            return np.sqrt(np.sum(U * U, axis=-2))
    raise ConvergenceError(f"Jacobi SVD did not converge in {MAX_SWEEPS} sweeps")


def singular_values(T):
    """Singular values sorted nonincreasing along the last axis."""
    A = as_matrix(T)
    if _is_diagonal(A):
        sv = np.abs(np.diagonal(A, axis1=-2, axis2=-1))
    else:
        sv = _jacobi_column_norms(A)
    sv = np.where((sv < 0) & (sv > -CLAMP), 0.0, sv)
    return -np.sort(-sv, axis=-1)


def modular_from_spectrum(phi, s, lam=1.0):
    """``sum_k phi(lam * s_k)`` over the last axis; overflow gives ``inf``."""
    s = np.asarray(s, dtype=float)
    lam = np.asarray(lam, dtype=float)
    with np.errstate(over="ignore", invalid="ignore"):
        vals = phi.eval(lam[..., None] * s) if lam.ndim else phi.eval(lam * s)
        return np.sum(vals, axis=-1)


def modular_trace(phi, T, lam=1.0):
    """``tr phi(lam |T|) = sum_n phi(lam s_n(T))``."""
    if np.any(np.asarray(lam) <= 0):
        raise InvalidInputError("lambda must be positive")
    return modular_from_spectrum(phi, singular_values(T), lam)


def _same_shape(T, B):
    A, C = as_matrix(T), as_matrix(B)
    if A.shape[-1] != C.shape[-1]:
        raise DimensionMismatchError(f"dimension mismatch: {A.shape[-1]} vs {C.shape[-1]}")
    return A, C


def abs_product_trace(T, B):
    """``tr|TB|``, the trace norm of the product."""
    A, C = _same_shape(T, B)
    return np.sum(singular_values(A @ C), axis=-1)


def add(T, B):
    A, C = _same_shape(T, B)
    return A + C


def sub(T, B):
    A, C = _same_shape(T, B)
    return A - C


def scale(c, T):
    return float(c) * as_matrix(T)


def matmul(T, B):
    A, C = _same_shape(T, B)
    return A @ C


def adjoint(T):
    return np.swapaxes(as_matrix(T), -1, -2).copy()


def operator_norm(T):
    """Largest singular value ``s_1(T)``."""
    return singular_values(T)[..., 0]


def trace_norm(T):
    return np.sum(singular_values(T), axis=-1)


# ---------------------------------------------------------------------------
# matrix files
# ---------------------------------------------------------------------------

def matrix_from_json(obj):
    """Accept ``{"dim": n, "entries": [[...]]}`` or a bare nested list."""
    if isinstance(obj, dict):
        if "entries" not in obj:
            raise InvalidInputError("matrix object needs an 'entries' field")
        entries = obj["entries"]
        dim = obj.get("dim")
    else:
        entries, dim = obj, None
    try:
        A = np.array(entries, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError("matrix entries must be numeric") from exc
    A = as_matrix(A)
    if A.ndim != 2 or (dim is not None and A.shape[0] != int(dim)):
        raise InvalidInputError("matrix 'dim' does not match its entries")
    return A


def matrix_to_json(T):
    A = as_matrix(T)
    return {"dim": int(A.shape[0]), "entries": A.tolist()}


def read_matrix(path):
    """Load a matrix from a ``.json`` file or a headerless CSV of reals."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidInputError(f"cannot read matrix file {path}: {exc}") from exc
    if path.suffix.lower() == ".json":
        try:
            return matrix_from_json(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"{path}: invalid JSON") from exc
    rows = [r for r in csv.reader(text.splitlines()) if r and any(c.strip() for c in r)]
    if not rows or len({len(r) for r in rows}) != 1:
        raise InvalidInputError(f"{path}: rows must be nonempty and of equal length")
    try:
        A = np.array([[float(c) for c in r] for r in rows], dtype=float)
    except ValueError as exc:
        raise InvalidInputError(f"{path}: non-numeric CSV entry") from exc
    return as_matrix(A)


def write_matrix_csv(T, path):
    A = as_matrix(T)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        for row in A:
            w.writerow([repr(float(x)) for x in row])
