"""Two-slot direct sums of noncommutative Orlicz sequence spaces.

An element is a pair ``(T1, T2)`` with ``T_j`` in ``S_{phi_j}``; the norm
aggregates the two slot norms with an ``l_p`` combination.  Slots may carry
leading batch axes, in which case every quantity below is computed per trial.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidInputError, InvalidParameterError
from .functions import conjugate, delta2_probe
from .norms import amemiya_from_spectrum, luxemburg_from_spectrum, schatten_from_spectrum
from .report import VerificationReport, gap_record
from .spectral import as_matrix, modular_from_spectrum, singular_values

GAP_TOL = 1e-8
STRICT_SLACK = 1e-9


@dataclass(frozen=True)
class OperatorPair:
    t1: np.ndarray
    t2: np.ndarray

    def __post_init__(self):
        a, b = as_matrix(self.t1), as_matrix(self.t2)
        if a.shape[:-2] != b.shape[:-2]:
            raise DimensionMismatchError("slots must share their batch shape")
        object.__setattr__(self, "t1", a)
        object.__setattr__(self, "t2", b)

    @property
    def batch_shape(self):
        return self.t1.shape[:-2]

    def __add__(self, other):
        return OperatorPair(self.t1 + other.t1, self.t2 + other.t2)

    def __sub__(self, other):
        return OperatorPair(self.t1 - other.t1, self.t2 - other.t2)

    def __neg__(self):
        return OperatorPair(-self.t1, -self.t2)

    def scaled(self, c):
        c = np.asarray(c, dtype=float)
        if c.ndim:
            c = c[..., None, None]
        return OperatorPair(c * self.t1, c * self.t2)

    def __getitem__(self, i):
        return OperatorPair(self.t1[i], self.t2[i])

    def spectra(self):
        return singular_values(self.t1), singular_values(self.t2)

    def to_json(self):
        return {"t1": {"dim": int(self.t1.shape[-1]), "entries": self.t1.tolist()},
                "t2": {"dim": int(self.t2.shape[-1]), "entries": self.t2.tolist()}}

    @classmethod
    def from_json(cls, obj):
        from .spectral import matrix_from_json
        try:
            return cls(matrix_from_json(obj["t1"]), matrix_from_json(obj["t2"]))
        except (KeyError, TypeError) as exc:
            raise InvalidInputError("tuple JSON needs 't1' and 't2' matrices") from exc


@dataclass(frozen=True)
class TupleSpaceSpec:
    phi1: object
    phi2: object
    p: float

    def __post_init__(self):
        p = float(self.p)
        if not p >= 1.0:
            raise InvalidParameterError(f"tuple exponent must be >= 1 or inf, got {p}")
        object.__setattr__(self, "p", p)

    @property
    def q(self):
        return conjugate_exponent(self.p)

    @property
    def phis(self):
        return self.phi1, self.phi2


def conjugate_exponent(p):
    if p == 1.0:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def conjugate_spec(spec, grid_spec=None):
    """The dual space spec ``(psi1, psi2, q)`` with ``psi_j`` complementary to ``phi_j``."""
    psi1 = conjugate(spec.phi1, grid_spec)
    psi2 = psi1 if spec.phi2 is spec.phi1 else conjugate(spec.phi2, grid_spec)
    return TupleSpaceSpec(psi1, psi2, spec.q)


def aggregate(a, b, p):
    """``(a^p + b^p)^(1/p)``, or ``max(a, b)`` for ``p = inf``."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if math.isinf(p):
        return np.maximum(a, b)
    top = np.maximum(a, b)
    safe = np.where(top > 0, top, 1.0)
    return top * ((a / safe) ** p + (b / safe) ** p) ** (1.0 / p)


def _scalar(x):
    x = np.asarray(x)
    return float(x) if x.ndim == 0 else x


def slot_luxemburg(spec, T):
    s1, s2 = T.spectra()
    return luxemburg_from_spectrum(spec.phi1, s1), luxemburg_from_spectrum(spec.phi2, s2)


def slot_orlicz(spec, T):
    s1, s2 = T.spectra()
    return amemiya_from_spectrum(spec.phi1, s1), amemiya_from_spectrum(spec.phi2, s2)


def tuple_luxemburg_norm(spec, T):
    """``||T||_(phi),p`` built from the slot Luxemburg norms."""
    return _scalar(aggregate(*slot_luxemburg(spec, T), spec.p))


def tuple_orlicz_norm(spec, T):
    """``||T||_phi,p`` built from the slot Orlicz norms."""
    return _scalar(aggregate(*slot_orlicz(spec, T), spec.p))


def _is_psd(A, tol=1e-10):
    if not np.allclose(A, np.swapaxes(A, -1, -2), atol=tol):
        return False
    ev = np.linalg.eigvalsh(A)
    return bool(np.all(ev >= -tol * np.maximum(1.0, np.max(np.abs(ev)))))


def upsilon(T, phi=None):
    """Slot-summed trace.

    With ``phi=(phi1, phi2)`` this is ``tr phi1(|T1|) + tr phi2(|T2|)``;
    without it the slots must be positive semidefinite and the raw traces
    are summed.
    """
    if phi is not None:
        s1, s2 = T.spectra()
        return _scalar(modular_from_spectrum(phi[0], s1) + modular_from_spectrum(phi[1], s2))
    if not (_is_psd(T.t1) and _is_psd(T.t2)):
        raise InvalidInputError("raw trace is defined on positive slots only")
    tr = np.trace(T.t1, axis1=-2, axis2=-1) + np.trace(T.t2, axis1=-2, axis2=-1)
    return _scalar(tr)


def upsilon_abs_product(T, B):
    """``tr|T1 B1| + tr|T2 B2|``."""
    for a, b in ((T.t1, B.t1), (T.t2, B.t2)):
        if a.shape[-1] != b.shape[-1]:
            raise DimensionMismatchError("slot dimensions of T and B differ")
    s1 = singular_values(T.t1 @ B.t1)
    s2 = singular_values(T.t2 @ B.t2)
    return _scalar(np.sum(s1, axis=-1) + np.sum(s2, axis=-1))


def _pair_witness(**pairs):
    def build(i):
        out = {}
        for name, pair in pairs.items():
            one = pair[i] if pair.batch_shape else pair
            out[name] = one.to_json()
        return out
    return build


def _flat(T):
    """Reshape a pair to exactly one batch axis."""
    lead = T.batch_shape
    if not lead:
        return OperatorPair(T.t1[None], T.t2[None])
    n1, n2 = T.t1.shape[-1], T.t2.shape[-1]
    return OperatorPair(T.t1.reshape(-1, n1, n1), T.t2.reshape(-1, n2, n2))


def check_thm21(spec, T, seed=None, tol=GAP_TOL):
    """Modular-versus-norm bounds for a pair (or batch of pairs).

    * ``thm2.1(1)``: both slot norms <= 1 gives ``upsilon(phi(T)) <= 2^(1/q) ||T||``.
    * ``thm2.1(2)``: both slot norms > 1 gives ``upsilon(phi(T)) > ||T||``;
      checked non-strictly with slack, the count of strict gaps is recorded.
    * ``thm2.1(5)``: ``upsilon(phi(T/||T||)) <= 2^(1 - 1/p)``.
    """
    if math.isinf(spec.p):
        raise InvalidParameterError("check_thm21 needs a finite tuple exponent")
    T = _flat(T)
    s1, s2 = T.spectra()
    n1 = luxemburg_from_spectrum(spec.phi1, s1)
    n2 = luxemburg_from_spectrum(spec.phi2, s2)
    norm = aggregate(n1, n2, spec.p)
    modular = modular_from_spectrum(spec.phi1, s1) + modular_from_spectrum(spec.phi2, s2)
    q = spec.q
    witness = _pair_witness(T=T)
    rep = VerificationReport("thm2.1")

    c1 = 1.0 if math.isinf(q) else 2.0 ** (1.0 / q)
    rep.add(gap_record("thm2.1(1)", c1 * norm - modular, tol=tol, seed=seed,
                       mask=(n1 <= 1) & (n2 <= 1), witness_fn=witness))

    big = (n1 > 1) & (n2 > 1)
    gaps2 = modular - norm
    rec = rep.add(gap_record("thm2.1(2)", gaps2, tol=STRICT_SLACK, seed=seed, mask=big,
                             witness_fn=witness))
    rec.detail["strict_gaps"] = int(np.sum(gaps2[big] > 0))

    pos = norm > 0
    inv = 1.0 / np.where(pos, norm, 1.0)
    normalized = (modular_from_spectrum(spec.phi1, s1, inv)
                  + modular_from_spectrum(spec.phi2, s2, inv))
    rep.add(gap_record("thm2.1(5)", 2.0 ** (1.0 - 1.0 / spec.p) - normalized, tol=tol,
                       seed=seed, mask=pos, witness_fn=witness))
    return rep


def check_holder(spec, T, B, seed=None, psi_spec=None, tol=GAP_TOL):
    """Hölder-type bounds pairing ``T`` in the ``phi`` space with ``B`` in the dual.

    ``thm2.1(3) orlicz x luxemburg``: ``upsilon(|TB|) <= ||T||_phi,p ||B||_(psi),q``
    ``thm2.1(3) luxemburg x orlicz``: ``upsilon(|TB|) <= ||T||_(phi),p ||B||_psi,q``
    For two power slots ``u^r`` the Schatten form with ``S_r`` and ``S_r'`` is
    checked as well.
    """
    if psi_spec is None:
        psi_spec = conjugate_spec(spec)
    T, B = _flat(T), _flat(B)
    lhs = np.atleast_1d(upsilon_abs_product(T, B))
    p, q = spec.p, psi_spec.p
    witness = _pair_witness(T=T, B=B)
    rep = VerificationReport("holder")

    t_orl = aggregate(*slot_orlicz(spec, T), p)
    t_lux = aggregate(*slot_luxemburg(spec, T), p)
    b_lux = aggregate(*slot_luxemburg(psi_spec, B), q)
    b_orl = aggregate(*slot_orlicz(psi_spec, B), q)
    rep.add(gap_record("thm2.1(3) orlicz x luxemburg", t_orl * b_lux - lhs, tol=tol, seed=seed,
                       witness_fn=witness))
    rep.add(gap_record("thm2.1(3) luxemburg x orlicz", t_lux * b_orl - lhs, tol=tol, seed=seed,
                       witness_fn=witness))

    r = spec.phi1.power
    if r is not None and r == spec.phi2.power and r > 1.0:
        rq = r / (r - 1.0)
        tn = aggregate(*(schatten_from_spectrum(r, s) for s in T.spectra()), p)
        bn = aggregate(*(schatten_from_spectrum(rq, s) for s in B.spectra()), q)
        rep.add(gap_record("cor2.1(3) schatten holder", tn * bn - lhs, tol=tol, seed=seed,
                           witness_fn=witness, detail={"r": r}))
    return rep


def delta2_constants(spec, *pairs):
    """``delta2_probe`` constant per slot over the observed singular-value range."""
    ks = []
    for j, phi in enumerate(spec.phis):
        top = 0.0
        for P in pairs:
            m = P.t1 if j == 0 else P.t2
            top = max(top, float(np.max(singular_values(m), initial=0.0)))
        ks.append(delta2_probe(phi, top if top > 0 else 1.0, 200))
    return ks


def check_delta2_triangle(spec, T, B, k1=None, k2=None, seed=None, tol=GAP_TOL):
    """``upsilon(phi(|T+B|)) <= (k/2) [upsilon(phi(|T|)) + upsilon(phi(|B|))]``, ``k = max(k1, k2)``."""
    T, B = _flat(T), _flat(B)
    if k1 is None or k2 is None:
        p1, p2 = delta2_constants(spec, T, B)
        k1 = p1 if k1 is None else k1
        k2 = p2 if k2 is None else k2
    k = max(k1, k2)
    phis = spec.phis
    S = T + B
    lhs = sum(modular_from_spectrum(phi, s) for phi, s in zip(phis, S.spectra()))
    mt = sum(modular_from_spectrum(phi, s) for phi, s in zip(phis, T.spectra()))
    mb = sum(modular_from_spectrum(phi, s) for phi, s in zip(phis, B.spectra()))
    witness = _pair_witness(T=T, B=B)
    rep = VerificationReport("delta2-triangle")
    rep.add(gap_record("thm2.1(4)", 0.5 * k * (mt + mb) - lhs, tol=tol, seed=seed,
                       witness_fn=witness, detail={"k": k, "k1": k1, "k2": k2}))
    r = spec.phi1.power
    if r is not None and r == spec.phi2.power:
        const = 2.0 ** (r - 1.0)
        rep.add(gap_record("cor2.1(2)", const * (mt + mb) - lhs, tol=tol, seed=seed,
                           witness_fn=witness, detail={"constant": const}))
        rep.add(gap_record("cor2.1(2) constant", [-abs(0.5 * k - const)], tol=1e-9,
                           seed=seed, detail={"k_over_2": 0.5 * k, "expected": const}))
    return rep


def _max_slot(X):
    """Per trial, the slot of largest operator norm, as a ``(..., n, n)`` stack."""
    if X.t1.shape[-1] != X.t2.shape[-1]:
        raise DimensionMismatchError("ideal check needs equal slot dimensions")
    o1 = singular_values(X.t1)[..., 0]
    o2 = singular_values(X.t2)[..., 0]
    pick = (o1 >= o2)[..., None, None]
    return np.where(pick, X.t1, X.t2), np.maximum(o1, o2)


def check_ideal(spec, T, B, C, seed=None, tol=GAP_TOL):
    """Two-sided ideal bound ``||B~ T C~|| <= ||B~||_inf ||T|| ||C~||_inf``.

    ``B~`` repeats the slot of ``B`` with the larger operator norm in both
    slots, likewise ``C~``.  The single-slot bound
    ``||T_j B_j||_(phi_j) <= ||T_j||_(phi_j) ||B_j||_inf`` is checked too.
    """
    T, B, C = _flat(T), _flat(B), _flat(C)
    for X in (B, C):
        if X.t1.shape[-1] != T.t1.shape[-1] or X.t2.shape[-1] != T.t2.shape[-1]:
            raise DimensionMismatchError("B, C slots must match the slots of T")
    Bt, nb = _max_slot(B)
    Ct, nc = _max_slot(C)
    if T.t1.shape[-1] != T.t2.shape[-1]:
        raise DimensionMismatchError("ideal check needs equal slot dimensions")
    n1, n2 = slot_luxemburg(spec, T)
    norm = aggregate(n1, n2, spec.p)
    witness = _pair_witness(T=T, B=B, C=C)
    rep = VerificationReport("ideal")
    left = OperatorPair(Bt @ T.t1 @ Ct, Bt @ T.t2 @ Ct)
    rep.add(gap_record("thm2.2 B~TC~", nb * norm * nc - tuple_luxemburg_norm(spec, left),
                       tol=tol, seed=seed, witness_fn=witness))
    right = OperatorPair(Ct @ T.t1 @ Bt, Ct @ T.t2 @ Bt)
    rep.add(gap_record("thm2.2 C~TB~", nb * norm * nc - tuple_luxemburg_norm(spec, right),
                       tol=tol, seed=seed, witness_fn=witness))
    ob1 = singular_values(B.t1)[..., 0]
    ob2 = singular_values(B.t2)[..., 0]
    p1 = luxemburg_from_spectrum(spec.phi1, singular_values(T.t1 @ B.t1))
    p2 = luxemburg_from_spectrum(spec.phi2, singular_values(T.t2 @ B.t2))
    gaps = np.minimum(n1 * ob1 - p1, n2 * ob2 - p2)
    rep.add(gap_record("thm2.2 slot bound", gaps, tol=tol, seed=seed, witness_fn=witness))
    return rep


# ---------------------------------------------------------------------------
# dual formula
# ---------------------------------------------------------------------------

def _align(M, weights):
    """Operator ``B`` with ``tr|M B| = sum s_k(M) weights_k`` (weights sorted like s)."""
    U, _, Vt = np.linalg.svd(M)
    return Vt.T @ np.diag(weights) @ U.T


def _witness_spectra(spec, psi_spec, spectra, norms, total, variants):
    """Unnormalized witness spectra, one row per ``(eps, literal)`` variant."""
    q = psi_spec.p
    rows = ([], [])
    for eps, literal in variants:
        for j, (phi, psi, s, nj) in enumerate(zip(spec.phis, psi_spec.phis, spectra, norms)):
            if nj == 0.0:
                rows[j].append(np.zeros_like(s))
                continue
            y = np.asarray(phi.deriv((1.0 - eps) * s / nj), dtype=float)
            w = y / (1.0 + float(modular_from_spectrum(psi, y)))
            if literal:
                weight = 1.0 if math.isinf(q) else 2.0 ** (-1.0 / q)
            else:
                weight = (nj / total) ** (spec.p - 1.0)
            rows[j].append(weight * w)
    b1, b2 = np.array(rows[0]), np.array(rows[1])
    bnorm = aggregate(amemiya_from_spectrum(psi_spec.phi1, b1),
                      amemiya_from_spectrum(psi_spec.phi2, b2), q)
    safe = np.where(bnorm > 0, bnorm, 1.0)[:, None]
    return b1 / safe, b2 / safe


def _slot_data(spec, T):
    spectra = [singular_values(T.t1), singular_values(T.t2)]
    norms = [float(luxemburg_from_spectrum(phi, s[None])[0]) for phi, s in zip(spec.phis, spectra)]
    return spectra, norms, float(aggregate(norms[0], norms[1], spec.p))


def young_witness(spec, T, eps=0.0, psi_spec=None, literal=False):
    """Dual element built from left derivatives, normalized to ``||B||_psi,q = 1``.

    Slot ``j`` uses ``y_j = p_j((1-eps) T_j/||T_j||)`` divided by
    ``1 + tr psi_j(y_j)``; slots are then weighted by ``(||T_j||/||T||)^(p-1)``
    so the pairing attains the aggregated norm.  ``literal=True`` uses the
    equal weight ``2^(-1/q)`` of the normalized-slot construction instead.
    Returns ``(B, value)`` with ``value = upsilon(|TB|)``.
    """
    if math.isinf(spec.p):
        raise InvalidParameterError("dual witness needs a finite tuple exponent")
    if psi_spec is None:
        psi_spec = conjugate_spec(spec)
    spectra, norms, total = _slot_data(spec, T)
    if total == 0.0:
        return OperatorPair(np.zeros_like(T.t1), np.zeros_like(T.t2)), 0.0
    b1, b2 = _witness_spectra(spec, psi_spec, spectra, norms, total, [(eps, literal)])
    B = OperatorPair(_align(T.t1, b1[0]), _align(T.t2, b2[0]))
    value = float(np.dot(spectra[0], b1[0]) + np.dot(spectra[1], b2[0]))
    return B, value


def _amemiya_upper(psi, R):
    """Upper bound on the Amemiya norm per row from two grid passes over ``log k``.

    Any ``k`` gives ``(1 + sum psi(k b)) / k >= ||b||_psi``, so normalizing by
    this value keeps a candidate feasible.  Rows must be nonzero.
    """
    top = np.max(R, axis=1)
    t0 = -np.log(top)

    def objective(t):
        k = np.exp(t)
        with np.errstate(over="ignore", invalid="ignore"):
            v = (1.0 + np.sum(psi.eval(k[:, :, None] * R[:, None, :]), axis=-1)) / k
        return np.where(np.isnan(v), np.inf, v)

    rows = np.arange(R.shape[0])
    best = np.full(R.shape[0], np.inf)
    centre = t0
    # three passes: step 4, then 0.5, then 0.05 in log k
    for half, count in ((24.0, 13), (4.0, 17), (0.5, 21)):
        grid = centre[:, None] + np.linspace(-half, half, count)[None, :]
        vals = objective(grid)
        j = np.argmin(vals, axis=1)
        best = np.minimum(best, vals[rows, j])
        centre = grid[rows, j]
    return best


def dual_norm_estimate(spec, T, budget=10_000, seed=0, psi_spec=None,
                       eps=(0.1, 0.01, 0.001)):
    """Lower estimate of ``sup{upsilon(|TB|) : ||B||_psi,q <= 1}``.

    Candidates are diagonal in each slot's singular basis: ``budget`` random
    positive spectra projected onto the unit sphere of ``||.||_psi,q``, plus
    the derivative-based witnesses for each ``eps``.
    """
    if math.isinf(spec.p):
        raise InvalidParameterError("dual_norm_estimate needs a finite tuple exponent")
    if T.batch_shape:
        raise InvalidInputError("dual_norm_estimate takes a single pair")
    if psi_spec is None:
        psi_spec = conjugate_spec(spec)
    s1, s2 = T.spectra()
    if not (np.any(s1) or np.any(s2)):
        return 0.0
    q = psi_spec.p
    rng = np.random.default_rng(seed)
    best = 0.0
    chunk = 2048
    done = 0
    while done < budget:
        m = min(chunk, budget - done)
        b1 = -np.sort(-rng.exponential(size=(m, s1.size)) ** rng.uniform(0.2, 3.0, (m, 1)), axis=1)
        b2 = -np.sort(-rng.exponential(size=(m, s2.size)) ** rng.uniform(0.2, 3.0, (m, 1)), axis=1)
        b2 *= np.exp(rng.normal(0.0, 1.5, (m, 1)))
        nb = aggregate(_amemiya_upper(psi_spec.phi1, b1), _amemiya_upper(psi_spec.phi2, b2), q)
        vals = (b1 @ s1 + b2 @ s2) / nb
        best = max(best, float(np.max(vals)))
        done += m
    spectra, norms, total = _slot_data(spec, T)
    variants = [(e, lit) for e in tuple(eps) + (0.0,) for lit in (False, True)]
    w1, w2 = _witness_spectra(spec, psi_spec, spectra, norms, total, variants)
    return max(best, float(np.max(w1 @ s1 + w2 @ s2)))
