"""Seeded random-trial drivers behind ``ncorlicz verify``."""

import math
from dataclasses import asdict, dataclass, field
from typing import Optional

import numpy as np

from .errors import InvalidParameterError
from .functions import parse_phi, power_function
from .interpolation import (CLARKSON_K1, CLARKSON_K2, ExponentPath, TupleLinearMap,
                            check_clarkson_orlicz, check_clarkson_sp, check_riesz_thorin,
                            sample_pairs)
from .norms import luxemburg_from_spectrum
from .report import VerificationReport, gap_record
from .tuples import (OperatorPair, TupleSpaceSpec, _pair_witness, check_delta2_triangle,
                     check_holder, check_ideal, check_thm21, conjugate_spec,
                     dual_norm_estimate, tuple_luxemburg_norm, young_witness)
from .spectral import singular_values

SUITES = ("thm2.1", "holder", "ideal", "dual", "riesz-thorin", "clarkson-orlicz",
          "clarkson-sp", "all")
RT_S = (0.25, 0.5, 0.75)
CLARKSON_S = (0.25, 0.5, 0.75, 1.0)
SP_P = (1.5, 2.0, 3.0, 4.0)
TIGHTNESS = 1e-3


@dataclass
class SuiteConfig:
    phi1: str = "power:2"
    phi2: str = "power:3"
    p: float = 2.0
    phi: str = "power:1.5"
    sp_p: Optional[float] = None
    s: Optional[float] = None
    dim: int = 4
    trials: int = 500
    seed: int = 42
    budget: int = 10_000
    dual_tuples: int = 20

    def to_dict(self):
        return asdict(self)


def _rng(cfg, tag):
    return np.random.default_rng(np.random.SeedSequence([int(cfg.seed), *map(ord, tag)]))


def _spec(cfg):
    phi1 = parse_phi(cfg.phi1)
    phi2 = phi1 if cfg.phi2 == cfg.phi1 else parse_phi(cfg.phi2)
    return TupleSpaceSpec(phi1, phi2, cfg.p)


def _dense(rng, n, dim):
    return rng.normal(size=(n, dim, dim))


def _diag_psd(rng, n, dim):
    v = np.abs(rng.normal(size=(n, dim))) * np.exp(rng.uniform(-1.5, 1.5, (n, 1)))
    return np.einsum("...i,ij->...ij", v, np.eye(dim))


def _with_slot_norms(spec, T, n1, n2):
    """Rescale each slot so its Luxemburg norm equals the requested value."""
    c1 = luxemburg_from_spectrum(spec.phi1, singular_values(T.t1))
    c2 = luxemburg_from_spectrum(spec.phi2, singular_values(T.t2))
    return OperatorPair(T.t1 * (n1 / c1)[:, None, None], T.t2 * (n2 / c2)[:, None, None])


def thm21_samples(spec, rng, n, dim):
    """Three families: both slot norms below 1, both above 1, and unconstrained."""
    small = _with_slot_norms(spec, OperatorPair(_dense(rng, n, dim), _dense(rng, n, dim)),
                             rng.uniform(0.02, 0.999, n), rng.uniform(0.02, 0.999, n))
    large = _with_slot_norms(spec, OperatorPair(_dense(rng, n, dim), _dense(rng, n, dim)),
                             np.exp(rng.uniform(0.001, 3.0, n)), np.exp(rng.uniform(0.001, 3.0, n)))
    scale = np.exp(rng.uniform(-2.0, 2.0, (n, 1, 1)))
    mixed = OperatorPair(scale * _dense(rng, n, dim), _dense(rng, n, dim))
    return OperatorPair(np.concatenate([small.t1, large.t1, mixed.t1]),
                        np.concatenate([small.t2, large.t2, mixed.t2]))


def run_thm21(cfg):
    spec = _spec(cfg)
    rng = _rng(cfg, "thm2.1")
    n, d = cfg.trials, cfg.dim
    T = thm21_samples(spec, rng, n, d)
    B = thm21_samples(spec, rng, n, d)
    rep = VerificationReport("thm2.1")
    rep.extend(check_thm21(spec, T, seed=cfg.seed))
    rep.extend(check_holder(spec, T, B, seed=cfg.seed))
    rep.extend(check_delta2_triangle(spec, T, B, seed=cfg.seed))
    r = spec.phi1.power
    if r is not None and r == spec.phi2.power:
        # diagonal positive pairs for the power-function corollary
        P = OperatorPair(_diag_psd(rng, n, d), _diag_psd(rng, n, d))
        Q = OperatorPair(_diag_psd(rng, n, d), _diag_psd(rng, n, d))
        k = 2.0 ** r
        sub = check_delta2_triangle(spec, P, Q, k, k, seed=cfg.seed)
        for rec in sub.records:
            rec.name = rec.name + " diagonal"
        rep.extend(sub)
        if r == spec.p:
            norm = tuple_luxemburg_norm(spec, P)
            s1, s2 = P.spectra()
            ups = (np.sum(s1 ** r, axis=1) + np.sum(s2 ** r, axis=1)) / norm ** r
            rep.add(gap_record("cor2.1(1)", -np.abs(ups - 1.0), tol=1e-9, seed=cfg.seed,
                               witness_fn=_pair_witness(T=P)))
    return rep


def run_holder(cfg):
    spec = _spec(cfg)
    rng = _rng(cfg, "holder")
    n, d = cfg.trials, cfg.dim
    psi_spec = conjugate_spec(spec)
    T = OperatorPair(_dense(rng, n, d), _dense(rng, n, d))
    B = OperatorPair(_dense(rng, n, d), _dense(rng, n, d))
    rep = check_holder(spec, T, B, seed=cfg.seed, psi_spec=psi_spec)
    rep.suite = "holder"
    # Young-equality witnesses: B_j built from the left derivative of phi_j
    m = min(n, 50)
    D = OperatorPair(_diag_psd(rng, m, d), _diag_psd(rng, m, d))
    ratios = np.empty(m)
    for i in range(m):
        Ti = D[i]
        Bi, value = young_witness(spec, Ti, 0.0, psi_spec)
        ratios[i] = value / tuple_luxemburg_norm(spec, Ti)
    rep.add(gap_record("holder tightness", ratios - (1.0 - TIGHTNESS), tol=0.0, seed=cfg.seed,
                       witness_fn=_pair_witness(T=D), detail={"relative_gap_limit": TIGHTNESS}))
    return rep


def run_ideal(cfg):
    spec = _spec(cfg)
    rng = _rng(cfg, "ideal")
    n, d = cfg.trials, cfg.dim
    T = OperatorPair(_dense(rng, n, d), _dense(rng, n, d))
    B = OperatorPair(_dense(rng, n, d), _dense(rng, n, d))
    C = OperatorPair(_dense(rng, n, d), _dense(rng, n, d))
    return check_ideal(spec, T, B, C, seed=cfg.seed)


def run_dual(cfg):
    spec = _spec(cfg)
    if math.isinf(spec.p):
        raise InvalidParameterError("the dual suite needs a finite p")
    rng = _rng(cfg, "dual")
    psi_spec = conjugate_spec(spec)
    m, d = cfg.dual_tuples, cfg.dim
    D = OperatorPair(_diag_psd(rng, m, d), _diag_psd(rng, m, d))
    est = np.empty(m)
    for i in range(m):
        est[i] = dual_norm_estimate(spec, D[i], budget=cfg.budget, seed=cfg.seed + i,
                                    psi_spec=psi_spec)
    norm = tuple_luxemburg_norm(spec, D)
    witness = _pair_witness(T=D)
    rep = VerificationReport("dual")
    rep.add(gap_record("thm2.3 upper", norm - est, tol=1e-9, seed=cfg.seed, witness_fn=witness,
                       detail={"budget": cfg.budget}))
    rep.add(gap_record("thm2.3 attainment", est / norm - 0.9, tol=0.0, seed=cfg.seed,
                       witness_fn=witness, detail={"budget": cfg.budget,
                                                   "min_ratio": float(np.min(est / norm))}))
    return rep


def run_riesz_thorin(cfg):
    phi = parse_phi(cfg.phi)
    sq = power_function(2.0)
    F = TupleLinearMap.clarkson()
    rep = VerificationReport("riesz-thorin")
    for s in ((cfg.s,) if cfg.s is not None else RT_S):
        T = sample_pairs(_rng(cfg, f"rt{s!r}"), cfg.trials, cfg.dim)
        rep.extend(check_riesz_thorin(F, (phi, phi), (sq, sq), ExponentPath.clarkson(s),
                                      CLARKSON_K1, CLARKSON_K2, T, seed=cfg.seed))
    return rep


def run_clarkson_orlicz(cfg):
    phi = parse_phi(cfg.phi)
    rep = VerificationReport("clarkson-orlicz")
    for s in ((cfg.s,) if cfg.s is not None else CLARKSON_S):
        T = sample_pairs(_rng(cfg, f"co{s!r}"), cfg.trials, cfg.dim)
        rep.extend(check_clarkson_orlicz(phi, s, T.t1, T.t2, seed=cfg.seed))
    return rep


def run_clarkson_sp(cfg):
    rep = VerificationReport("clarkson-sp")
    for p in ((cfg.sp_p,) if cfg.sp_p is not None else SP_P):
        T = sample_pairs(_rng(cfg, f"sp{p!r}"), cfg.trials, cfg.dim)
        rep.extend(check_clarkson_sp(p, T.t1, T.t2, seed=cfg.seed))
    return rep


RUNNERS = {
    "thm2.1": run_thm21,
    "holder": run_holder,
    "ideal": run_ideal,
    "dual": run_dual,
    "riesz-thorin": run_riesz_thorin,
    "clarkson-orlicz": run_clarkson_orlicz,
    "clarkson-sp": run_clarkson_sp,
}


def run_suite(name, cfg=None):
    """Run one named suite (or ``all``) and return its report with the config echoed."""
    cfg = cfg or SuiteConfig()
    if name not in SUITES:
        raise InvalidParameterError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if name == "all":
        rep = VerificationReport("all")
        for sub in RUNNERS:
            part = RUNNERS[sub](cfg)
            for rec in part.records:
                rec.name = f"{sub}: {rec.name}"
            rep.extend(part)
    else:
        rep = RUNNERS[name](cfg)
        rep.suite = name
    rep.config = dict(cfg.to_dict(), suite=name)
    return rep
