"""
Cadeia de minorantes da média integral e a média curta de |N_h|.

Elos da cadeia, todos sobre |g|:
    denom:     M_{|g|}(t) log t / t  ≫  δ(φ(P)/P) ∫_1^t M_{|g|}(u)/u² du
    cheap:     ∫_1^t M_{|g|}(u)/u² du  ≫  L_{|g|}(t)
    logsum:    L_{|g|}(t)  ≍  P_g(t)   (constantes explícitas)
    denompars: L_{|g|}(t)  ≫  𝒢(1 + 1/log t)
"""
from __future__ import annotations

import math
import time
from pathlib import Path

import numpy as np
from pydantic import BaseModel
from scipy import integrate

from arith.compensated import fsum_real
from arith.dirichlet import euler_product
from arith.mult_fn import MultFnSpec
from arith.primes import primes_up_to
from arith.sieve import quadrature_checkpoints, step_integral
from config.logger import setup_logger
from memory.table_cache import load_or_sieve

from .reports import TheoremReport, build_report, exceptional_p_over_phi

logger = setup_logger(__name__)

# pontos da janela (t-y, t] para a média curta
WINDOW_SAMPLES = 2000


class ChainReport(BaseModel):
    label: str
    spec_hash: str
    links: list[TheoremReport]
    verdict: bool

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2), encoding="utf-8")
        return path


def logsum_band(spec: MultFnSpec, u: int) -> tuple[float, float]:
    """[(1-2/e)e^{-(B+1)log(4max{B,1/2})}, e^S] com S = Σ_{p≤u}Σ_{k≥2}|g(p^k)|/p^k."""
    B = max(spec.B, 1.0)
    lower = (1 - 2 / math.e) * math.exp(-(B + 1) * math.log(4 * max(B, 0.5)))
    ps = primes_up_to(u).astype(np.float64)
    r = np.abs(spec.prime_values(primes_up_to(u))) / ps
    if spec.is_complete:
        tail = r * r / (1 - r)
    else:
        tail = r / (ps - 1)
    return lower, math.exp(fsum_real(tail))


def log_product(spec: MultFnSpec, u: int) -> float:
    """P_g(u) = Π_{p≤u}(1 + |g(p)|/p)."""
    ps = primes_up_to(u)
    return math.exp(fsum_real(np.log1p(np.abs(spec.prime_values(ps)) / ps.astype(np.float64))))


def verify_integral_average_chain(spec: MultFnSpec, t_grid) -> ChainReport:
    """Calcula os quatro elos em cada t e decide cada um pelo seu modo."""
    start = time.perf_counter()
    ts = sorted(int(t) for t in t_grid)
    cps = np.union1d(quadrature_checkpoints(ts[-1]), ts)
    table = load_or_sieve(spec, cps)
    denom_l, denom_r, cheap_l, cheap_r = [], [], [], []
    log_l, log_r, pars_l, pars_r = [], [], [], []
    lo_band, hi_band = math.inf, 0.0
    for t in ts:
        i = table.index(t)
        M_abs = float(table.M_abs[i])
        L_abs = float(table.L_abs[i])
        integral = step_integral(table.checkpoints[: i + 1], table.M_abs[: i + 1], "u2").real
        phi_ratio = 1 / exceptional_p_over_phi(spec, t)
        denom_l.append(M_abs * math.log(t) / t)
        denom_r.append(spec.delta * phi_ratio * integral)
        cheap_l.append(integral)
        cheap_r.append(L_abs)
        log_l.append(L_abs)
        log_r.append(log_product(spec, t))
        lo, hi = logsum_band(spec, t)
        lo_band, hi_band = min(lo_band, lo), max(hi_band, hi)
        sigma = 1 + 1 / math.log(t)
        pars_l.append(L_abs)
        pars_r.append(euler_product(spec, sigma, absolute=True).value.real)

    links = [
        build_report("chain-denom", spec, ts, denom_l, denom_r, mode="lower"),
        build_report("chain-cheap", spec, ts, cheap_l, cheap_r, mode="lower"),
        build_report("chain-logsum", spec, ts, log_l, log_r, mode="band", band=(lo_band, hi_band)),
        build_report("chain-denompars", spec, ts, pars_l, pars_r, mode="lower"),
    ]
    elapsed = time.perf_counter() - start
    for link in links:
        link.wall_time = elapsed / len(links)
        status = "✅" if link.verdict else "❌"
        logger.info(f"{status} {link.theorem} {spec.label}: razões {link.min_ratio:.4g}..{link.max_ratio:.4g}")
    return ChainReport(label=spec.label, spec_hash=spec.spec_hash, links=links,
                       verdict=all(link.verdict for link in links))


def compavg_window(t: int, c: float) -> float:
    """y = t·exp(-log^c t)."""
    return t * math.exp(-math.log(t) ** c)


def verify_compavg(spec: MultFnSpec, t_grid, A: complex = 0j, c: float = 0.4) -> TheoremReport:
    """
    ||N_h(t)| - y⁻¹∫_{t-y}^t |N_h(u)| du| com h = g - A|g|, relativo a M_{|g|}(t)/log² t.

    A integral usa trapézio sobre no máximo WINDOW_SAMPLES inteiros da janela.
    """
    if not 0 < c < 0.5:
        raise ValueError(f"c deve estar em (0, 1/2), recebeu {c}")
    start = time.perf_counter()
    ts = sorted(int(t) for t in t_grid)
    windows = {}
    for t in ts:
        y = compavg_window(t, c)
        lo = max(1, int(math.ceil(t - y)))
        windows[t] = np.unique(np.linspace(lo, t, min(WINDOW_SAMPLES, t - lo + 1)).round().astype(np.int64))
    table = load_or_sieve(spec, np.unique(np.concatenate([*windows.values(), ts])))
    A = complex(A)
    N_h = np.abs(table.N_g - A * table.N_abs)
    lhs, rhs = [], []
    for t in ts:
        pts = windows[t]
        idx = np.searchsorted(table.checkpoints, pts)
        y = float(pts[-1] - pts[0]) or 1.0
        average = integrate.trapezoid(N_h[idx], pts.astype(np.float64)) / y
        i = table.index(t)
        lhs.append(abs(N_h[i] - average))
        rhs.append(float(table.M_abs[i]) / math.log(t) ** 2)
    report = build_report("compavg", spec, ts, lhs, rhs, mode="upper",
                          notes={"A": str(A), "c": c, "samples": WINDOW_SAMPLES})
    report.wall_time = time.perf_counter() - start
    logger.info(f"📏 compavg {spec.label}: razão máx {report.max_ratio:.4g} (c = {c})")
    return report
