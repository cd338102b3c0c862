"""
Produtos de Euler, fator G₀, ζ(s), cotas pontuais de decaimento e integrais J.

Todos os logaritmos são acumulados fator a fator no ramo principal e somados
com fsum; G(s) = exp(Σ log fator).
"""
from __future__ import annotations

import csv
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, computed_field
from scipy import integrate, special

from config.logger import setup_logger
from config.settings import settings

from .compensated import fsum_complex, fsum_real
from .errors import GridError, RefusalError, SieveConfigError, ZeroDivisorError, ZetaPrecisionWarning
from .mult_fn import FunctionClass, MultFnSpec, principal_arg, validate_class_membership
from .prime_analysis import HALASZ_CONSTANT, gamma0_values, grid_from_runs, rho_min, runs_for_sigma, sigma_of
from .primes import primes_up_to
from .sieve import mangoldt_step_function

logger = setup_logger(__name__)

MIN_CUTOFF = 10**3
ZERO_TOLERANCE = 1e-9
G0_FD_STEP = 1e-6
# Memória por bloco de avaliação vetorizada (pontos × primos)
_BLOCK_ENTRIES = 2**19

Integrand = Literal["G", "calG", "H", "lambda"]


def _clog1p(w: np.ndarray) -> np.ndarray:
    """log(1 + w) no ramo principal, preciso para |w| pequeno."""
    x, y = w.real, w.imag
    return 0.5 * np.log1p(2 * x + x * x + y * y) + 1j * np.arctan2(y, 1 + x)


def _log_terms(values: np.ndarray, logp: np.ndarray, s: np.ndarray, complete: bool) -> tuple[np.ndarray, np.ndarray]:
    """
    (log do fator local, g(p)p^{-s}) para cada s (linhas) e primo (colunas).

    Forte: log(1 + g(p)/(p^s - 1)); completa: -log(1 - g(p)p^{-s}).
    """
    z = np.exp(-np.outer(s, logp))
    w = values * z
    if complete:
        return -_clog1p(-w), w
    return _clog1p(w / (1 - z)), w


def _check_factors(ps: np.ndarray, values: np.ndarray, logp: np.ndarray, s: complex, complete: bool) -> None:
    z = np.exp(-s * logp)
    w = values * z
    mod = np.abs(1 - w) if complete else np.abs(1 + w / (1 - z))
    bad = mod < settings.modulus_tolerance
    if bad.any():
        raise ZeroDivisorError(int(ps[np.argmax(bad)]), s)


def _blocks(count: int, width: int):
    size = max(1, _BLOCK_ENTRIES // max(width, 1))
    for k0 in range(0, count, size):
        yield slice(k0, min(count, k0 + size))


def _prime_arrays(spec: MultFnSpec, cutoff: int, absolute: bool) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    ps = primes_up_to(cutoff)
    values, classes = spec.prime_data(ps)
    if absolute:
        values = np.abs(values).astype(np.complex128)
    return ps, values, classes, np.log(ps.astype(np.float64))


# ---------------------------------------------------------------------------
# Produtos de Euler
# ---------------------------------------------------------------------------

class EulerProductResult(BaseModel):
    s: complex
    value: complex
    log_value: complex
    prime_cutoff: int
    tail_bound: float
    absolute: bool = False


def euler_tail_bound(B: float, sigma: float, cutoff: int) -> float:
    """Cota de |Σ_{p>c} log fator|: B·E1((σ-1) log c) + B(B+1)c^{1-2σ}/(2σ-1)."""
    c = float(cutoff)
    first = B * float(special.exp1((sigma - 1) * math.log(c)))
    return first + B * (B + 1) * c ** (1 - 2 * sigma) / (2 * sigma - 1)


def _require_half_plane(s: complex, cutoff: int) -> None:
    if s.real <= 1:
        raise ValueError(f"exige Re(s) > 1, recebeu s = {s}")
    if cutoff < MIN_CUTOFF:
        raise SieveConfigError(f"corte de primos deve ser ≥ {MIN_CUTOFF}, recebeu {cutoff}")


def euler_product(spec: MultFnSpec, s: complex, cutoff: int | None = None, absolute: bool = False) -> EulerProductResult:
    """
    G(s) = Π_{p≤cutoff} fator local, com |g| no lugar de g se absolute.

    Raises:
        ZeroDivisorError: fator local nulo (1 - g(p) = p^s) ou divisor nulo
    """
    s = complex(s)
    cutoff = cutoff or settings.euler_prime_cutoff
    _require_half_plane(s, cutoff)
    ps, values, _, logp = _prime_arrays(spec, cutoff, absolute)
    _check_factors(ps, values, logp, s, spec.is_complete)
    terms, _ = _log_terms(values, logp, np.array([s]), spec.is_complete)
    log_value = fsum_complex(terms[0])
    return EulerProductResult(
        s=s, value=complex(np.exp(log_value)), log_value=log_value, prime_cutoff=cutoff,
        tail_bound=euler_tail_bound(spec.B, s.real, cutoff), absolute=absolute,
    )


def class_euler_product(spec: MultFnSpec, s: complex, cutoff: int | None = None, absolute: bool = False) -> np.ndarray:
    """G_j(s) (ou 𝒢_j(s) com absolute) para cada classe E_j; S fica de fora."""
    s = complex(s)
    cutoff = cutoff or settings.euler_prime_cutoff
    _require_half_plane(s, cutoff)
    ps, values, classes, logp = _prime_arrays(spec, cutoff, absolute)
    _check_factors(ps, values, logp, s, spec.is_complete)
    terms, _ = _log_terms(values, logp, np.array([s]), spec.is_complete)
    logs = [fsum_complex(terms[0][classes == j]) for j in range(1, spec.m + 1)]
    return np.exp(np.array(logs, dtype=np.complex128))


class G0Result(BaseModel):
    s: complex
    value: complex
    prime_sum: complex
    bound: float
    ratio: float

    @computed_field
    @property
    def within_bound(self) -> bool:
        return self.ratio <= 1.0


def g0_bound(B: float) -> float:
    """2e^{B(B+1)} log(1+B)^{4B}."""
    return 2 * math.exp(B * (B + 1)) * math.log(1 + B) ** (4 * B)


def g0_factor(spec: MultFnSpec, s: complex, cutoff: int | None = None) -> G0Result:
    """
    G₀(s) = G(s)·exp(-Σ_{p≤cutoff} g(p)p^{-s}) com os mesmos primos nos dois fatores.

    A cota é avaliada em max(B, 1): |g| ≤ B < 1 também satisfaz |g| ≤ 1.
    """
    s = complex(s)
    cutoff = cutoff or settings.euler_prime_cutoff
    _require_half_plane(s, cutoff)
    ps, values, _, logp = _prime_arrays(spec, cutoff, False)
    _check_factors(ps, values, logp, s, spec.is_complete)
    terms, w = _log_terms(values, logp, np.array([s]), spec.is_complete)
    value = complex(np.exp(fsum_complex(terms[0] - w[0])))
    bound = g0_bound(max(spec.B, 1.0))
    return G0Result(s=s, value=value, prime_sum=fsum_complex(w[0]), bound=bound, ratio=abs(value) / bound)


# ---------------------------------------------------------------------------
# ζ(s) por Euler–Maclaurin
# ---------------------------------------------------------------------------

def zeta(s: complex, terms: int | None = None, corrections: int | None = None) -> complex:
    """
    ζ(s) para Re(s) > 1: Σ_{n<N} n^{-s} + N^{1-s}/(s-1) + N^{-s}/2 + Σ_k B_{2k}/(2k)! (s)_{2k-1} N^{-s-2k+1}.

    N = max(terms, 2|Im s|). Para Re(s) < 1 + 10⁻³ emite ZetaPrecisionWarning.
    """
    s = complex(s)
    if s.real <= 1:
        raise ValueError(f"ζ só é avaliada em Re(s) > 1, recebeu {s}")
    if s.real < 1 + 1e-3 - 1e-12:
        logger.warning(f"⚠️ ζ({s}) perto de Re(s) = 1: precisão anunciada não garantida")
        warnings.warn(f"Re(s) = {s.real} < 1 + 1e-3", ZetaPrecisionWarning, stacklevel=2)
    K = corrections or settings.zeta_corrections
    N = max(terms or settings.zeta_terms, int(math.ceil(2 * abs(s.imag))))
    n = np.arange(1, N, dtype=np.float64)
    head = fsum_complex(np.exp(-s * np.log(n)))
    logN = math.log(N)
    Ns = complex(np.exp(-s * logN))
    total = head + N * Ns / (s - 1) + Ns / 2
    bern = special.bernoulli(2 * K)
    rising = s
    power = Ns / N
    for k in range(1, K + 1):
        total += bern[2 * k] / math.factorial(2 * k) * rising * power
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        power /= N * N
    return total


# ---------------------------------------------------------------------------
# Cotas pontuais de decaimento na reta Re(s) = σ
# ---------------------------------------------------------------------------

def intbound_exponent(u):
    """u ↦ u/(2(1+u)), crescente em u ≥ 0."""
    return u / (2 * (1 + u))


class HalaszContext(BaseModel):
    """Quantidades independentes de τ, calculadas uma vez por (spec, x)."""
    label: str
    x: int
    sigma: float
    cutoff: int
    rho_j: list[float]
    mass_j: list[float]
    bounds_j: list[float]
    haldecay_exponents: list[float]
    calG_sigma: float
    calG_j_sigma: list[float]
    G_j_sigma: list[complex]
    cb_valid: bool
    zero_free_radius: float


class HalaszPoint(BaseModel):
    tau: float
    G_abs: float | None = None
    lhs: float | None = None
    bounds: dict[str, float | None] = Field(default_factory=dict)
    ratios: dict[str, float | None] = Field(default_factory=dict)
    skipped: bool = False
    zero_prime: int | None = None
    inside_zero_free_region: bool = True


def halasz_context(spec: MultFnSpec, x: int, cutoff: int | None = None) -> HalaszContext:
    """
    Pré-computa σ, ρ_{E_j}, 𝒢_j(σ), G_j(σ) e a validação em 𝒞/𝒞_b.

    Raises:
        RefusalError: spec fora de 𝒞 até x
    """
    cutoff = cutoff or settings.euler_prime_cutoff
    report = validate_class_membership(spec, x, FunctionClass.C)
    if not report.passed:
        failed = report.failed()[0]
        raise RefusalError(f"𝒞 {failed.condition})", failed.detail)
    cb_valid = FunctionClass.CB in spec.classes and validate_class_membership(spec, x, FunctionClass.CB).passed

    sigma = sigma_of(x)
    distances = rho_min(spec, x)
    ps = primes_up_to(x)
    values, classes = spec.prime_data(ps)
    g_tilde = np.abs(spec.normalized(values, classes))
    inv = 1.0 / ps.astype(np.float64)
    mass = [fsum_real((1 - g_tilde[classes == j]) * inv[classes == j]) for j in range(1, spec.m + 1)]

    betas = np.array([c.beta for c in spec.partition.classes])
    calG_j = class_euler_product(spec, sigma, cutoff, absolute=True)
    G_j = class_euler_product(spec, sigma, cutoff)
    B = spec.B
    return HalaszContext(
        label=spec.label, x=x, sigma=sigma, cutoff=cutoff,
        rho_j=distances.minima.tolist(), mass_j=mass, bounds_j=spec.bounds.tolist(),
        haldecay_exponents=(spec.deltas * betas**3 / spec.bounds).tolist(),
        calG_sigma=abs(euler_product(spec, sigma, cutoff, absolute=True).value),
        calG_j_sigma=np.abs(calG_j).tolist(), G_j_sigma=G_j.tolist(), cb_valid=cb_valid,
        zero_free_radius=sigma / math.log(B) if B > 1 else math.inf,
    )


def halasz_pointwise(spec: MultFnSpec, x: int, tau: float, context: HalaszContext | None = None) -> HalaszPoint:
    """
    lhs = |G(s)|/𝒢(σ) em s = σ + iτ e as quatro cotas de decaimento.

    Cotas: "easy" exp(-Σ_j B_j(ρ_j - Σ_{E_j}(1-|g̃(p)|)/p)); "haldecay"
    (Π_j |𝒢_j(s)/𝒢_j(σ)|^{δ_jβ_j³/B_j})^K; "remdecay" exp(-K log(1+|τ|/(σ-1)))
    para |τ| ≤ 2 e exp(-(K/2) log(1+1/(σ-1))) além; "intbound"
    Π_j |G_j(σ)/𝒢_j(σ)|^{γ_{0,j}/(2(1+γ_{0,j}))}. As duas últimas dependentes
    de 𝒞_b ficam None quando a spec não está em 𝒞_b.
    """
    ctx = context or halasz_context(spec, x)
    sigma = ctx.sigma
    s = complex(sigma, tau)
    inside = abs(tau) < ctx.zero_free_radius
    try:
        G = euler_product(spec, s, ctx.cutoff)
        calG_j = class_euler_product(spec, s, ctx.cutoff, absolute=True)
    except ZeroDivisorError as exc:
        logger.warning(f"⚠️ G de {spec.label} se anula em τ = {tau:.5g} (p = {exc.p}); ponto pulado")
        return HalaszPoint(tau=tau, skipped=True, zero_prime=exc.p, inside_zero_free_region=inside)

    K = HALASZ_CONSTANT
    lhs = abs(G.value) / ctx.calG_sigma
    Bj = np.array(ctx.bounds_j)
    bounds: dict[str, float | None] = {
        "easy": math.exp(-float(np.sum(Bj * (np.array(ctx.rho_j) - np.array(ctx.mass_j))))),
        "haldecay": None,
        "remdecay": (math.exp(-K * math.log1p(abs(tau) / (sigma - 1))) if abs(tau) <= 2
                     else math.exp(-0.5 * K * math.log1p(1 / (sigma - 1)))),
        "intbound": None,
    }
    if ctx.cb_valid:
        ratio_j = np.abs(calG_j) / np.array(ctx.calG_j_sigma)
        bounds["haldecay"] = float(np.prod(ratio_j ** np.array(ctx.haldecay_exponents))) ** K
        gamma0 = gamma0_values(spec)
        interior = np.abs(np.array(ctx.G_j_sigma)) / np.array(ctx.calG_j_sigma)
        bounds["intbound"] = float(np.prod(interior ** intbound_exponent(gamma0)))
    ratios = {k: (lhs / b if b else None) for k, b in bounds.items()}
    return HalaszPoint(tau=tau, G_abs=abs(G.value), lhs=lhs, bounds=bounds, ratios=ratios,
                       inside_zero_free_region=inside)


class HalaszSweep(BaseModel):
    label: str
    x: int
    sigma: float
    calG_sigma: float
    points: list[HalaszPoint]

    @property
    def skipped(self) -> list[HalaszPoint]:
        return [p for p in self.points if p.skipped]

    def max_ratios(self) -> dict[str, float]:
        out: dict[str, float] = {}
        for point in self.points:
            for key, r in point.ratios.items():
                if r is not None:
                    out[key] = max(out.get(key, 0.0), r)
        return out

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        keys = ["easy", "haldecay", "remdecay", "intbound"]
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["tau", "G_abs", "calG_sigma", *keys, *[f"ratio_{k}" for k in keys], "skipped"])
            for p in self.points:
                cells = [p.G_abs, self.calG_sigma, *(p.bounds.get(k) for k in keys),
                         *(p.ratios.get(k) for k in keys)]
                writer.writerow([repr(p.tau), *("" if c is None else repr(float(c)) for c in cells), int(p.skipped)])
        return path


def halasz_sweep(spec: MultFnSpec, x: int, taus=None, cutoff: int | None = None,
                 workers: int | None = None) -> HalaszSweep:
    """halasz_pointwise ao longo de uma grade (padrão: |τ| ≤ 2 com passo (σ-1)/4 perto de 0)."""
    ctx = halasz_context(spec, x, cutoff)
    if taus is None:
        s1 = ctx.sigma - 1
        taus = grid_from_runs(runs_for_sigma(s1, 2.0, s1 / 4, settings.tau_outer_step))
    taus = [float(t) for t in taus]
    with ThreadPoolExecutor(max_workers=workers or settings.worker_count) as pool:
        points = list(pool.map(lambda t: halasz_pointwise(spec, x, t, ctx), taus))
    sweep = HalaszSweep(label=spec.label, x=x, sigma=ctx.sigma, calG_sigma=ctx.calG_sigma, points=points)
    logger.info(f"📈 Varredura de {spec.label} em x={x}: {len(points)} pontos, "
                f"{len(sweep.skipped)} pulados, razões máximas {sweep.max_ratios()}")
    return sweep


# ---------------------------------------------------------------------------
# Integrais J na reta Re(s) = σ e o oráculo de Parseval
# ---------------------------------------------------------------------------

class LineIntegralResult(BaseModel):
    """∫_{-T}^{T} |F(σ+iτ)|²/|s|² dτ por trapézio, com orçamento de erro."""
    integrand: Integrand
    sigma: float
    T_max: float
    A: complex | None = None
    value: float
    tail_estimate: float
    tail_correction: float = 0.0
    step_profile: dict[str, float]

    @computed_field
    @property
    def total(self) -> float:
        return self.value + self.tail_correction

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2), encoding="utf-8")
        return path


def _tail_measure(sigma: float, T: float) -> float:
    """∫_{|τ|>T} dτ/(σ²+τ²)."""
    return 2 * (math.pi / 2 - math.atan(T / sigma)) / sigma


def _derivative_profile(values, logp, sigma: float, taus: np.ndarray, complete: bool) -> tuple[np.ndarray, np.ndarray]:
    """
    (log G(s), G'/G(s)) em s = σ + iτ.

    G'/G = G₀'/G₀ - Σ g(p) log p p^{-s}, com G₀'/G₀ por diferença central em σ.
    """
    log_g = np.empty(len(taus), dtype=np.complex128)
    dlog = np.empty(len(taus), dtype=np.complex128)
    h = G0_FD_STEP
    for blk in _blocks(len(taus), len(logp)):
        s = sigma + 1j * taus[blk]
        terms, w = _log_terms(values, logp, s, complete)
        log_g[blk] = terms.sum(axis=1)
        linear = (w * logp).sum(axis=1)
        tp, wp = _log_terms(values, logp, s + h, complete)
        tm, wm = _log_terms(values, logp, s - h, complete)
        dlog_g0 = ((tp - wp).sum(axis=1) - (tm - wm).sum(axis=1)) / (2 * h)
        dlog[blk] = dlog_g0 - linear
    return log_g, dlog


def _line_grid(s1: float, T_max: float, grid_step: float, outer: float) -> tuple[np.ndarray, dict[str, float]]:
    mid = min(s1, outer)
    taus = grid_from_runs(runs_for_sigma(s1, T_max, min(grid_step, outer), outer, mid_step=mid))
    return taus, {"fine": min(grid_step, outer), "middle": mid, "outer": outer, "points": float(len(taus))}


def j_integral(
    spec: MultFnSpec,
    sigma: float,
    T_max: float,
    integrand: Integrand = "lambda",
    A: complex | None = None,
    cutoff: int | None = None,
    poly_length: int | None = None,
    grid_step: float | None = None,
) -> LineIntegralResult:
    """
    ∫_{-T}^{T} |F(σ+iτ)|² dτ/|s|² na forma quadrática.

    integrand "G": F = G'; "calG": F = 𝒢'; "H": F = G' - A𝒢'; "lambda":
    F = Σ_{n≤N} g(n)Λ(n)n^{-s}. O resto além de T é estimado pela cota do
    supremo (tail_estimate); para "lambda" a média diagonal
    Σ|a_n|²n^{-2σ}·∫_{|τ|>T}dτ/|s|² entra como tail_correction.

    Raises:
        GridError: passo perto de τ = 0 maior que σ-1, ou T_max > (σ-1)^{-3}
    """
    if sigma <= 1:
        raise ValueError(f"exige σ > 1, recebeu {sigma}")
    s1 = sigma - 1
    if T_max > s1**-3 * (1 + 1e-12):
        raise GridError(f"T_max = {T_max:g} acima de (σ-1)^-3 = {s1**-3:.4g}")
    grid_step = s1 / 4 if grid_step is None else grid_step
    if grid_step > s1:
        raise GridError(f"passo {grid_step:.4g} maior que a largura σ-1 = {s1:.4g} do pico central")
    if integrand == "H" and A is None:
        raise ValueError("integrando H exige A")
    tail_measure = _tail_measure(sigma, T_max)

    if integrand == "lambda":
        N = poly_length or settings.dirichlet_poly_length
        powers, coeffs, _ = mangoldt_step_function(spec, N)
        logn = np.log(powers.astype(np.float64))
        a = coeffs * np.exp(-sigma * logn)
        outer = min(settings.tau_outer_step, math.pi / (8 * math.log(N)))
        taus, profile = _line_grid(s1, T_max, grid_step, outer)
        F = np.empty(len(taus), dtype=np.complex128)
        for blk in _blocks(len(taus), len(logn)):
            F[blk] = np.exp(-1j * np.outer(taus[blk], logn)) @ a
        sup = float(np.sum(np.abs(a)))
        correction = float(np.sum(np.abs(a) ** 2)) * tail_measure
        profile["N"] = float(N)
    else:
        cutoff = cutoff or settings.euler_prime_cutoff
        ps = primes_up_to(cutoff)
        values = spec.prime_values(ps)
        logp = np.log(ps.astype(np.float64))
        outer = min(settings.tau_outer_step, math.pi / (8 * math.log(cutoff)))
        taus, profile = _line_grid(s1, T_max, grid_step, outer)
        abs_values = np.abs(values).astype(np.complex128)
        complete = spec.is_complete
        log_abs0, dlog_abs0 = _derivative_profile(abs_values, logp, sigma, np.zeros(1), complete)
        sup = float(abs(np.exp(log_abs0[0]) * dlog_abs0[0]))
        if integrand in ("G", "H"):
            log_g, dlog_g = _derivative_profile(values, logp, sigma, taus, complete)
            F = np.exp(log_g) * dlog_g
        if integrand in ("calG", "H"):
            log_a, dlog_a = _derivative_profile(abs_values, logp, sigma, taus, complete)
            F_abs = np.exp(log_a) * dlog_a
            F = F_abs if integrand == "calG" else F - complex(A) * F_abs
        if integrand == "H":
            sup *= 1 + abs(complex(A))
        correction = 0.0
        profile["cutoff"] = float(cutoff)

    values_on_grid = np.abs(F) ** 2 / (sigma**2 + taus**2)
    value = float(integrate.trapezoid(values_on_grid, taus))
    result = LineIntegralResult(
        integrand=integrand, sigma=sigma, T_max=T_max, A=A, value=value,
        tail_estimate=sup**2 * tail_measure, tail_correction=correction, step_profile=profile,
    )
    logger.info(f"∫ J_{integrand} de {spec.label} em σ={sigma:.5f}, T={T_max:g}: {value:.6g} "
                f"(resto ≤ {result.tail_estimate:.3g}, {len(taus)} pontos)")
    return result


class ParsevalResult(BaseModel):
    sigma: float
    v_max: float
    N: int
    value: float
    truncation_bound: float


# ψ(u) ≤ 1.04u para todo u ≥ 1
_PSI_RATIO = 1.04


def parseval_oracle(spec: MultFnSpec, sigma: float, v_max: float) -> ParsevalResult:
    """
    2π ∫_0^∞ e^{-2vσ} |A_N(e^v)|² dv com A_N(u) = Σ_{n≤min(u,N)} g(n)Λ(n), N = ⌊e^{v_max}⌋.

    A_N é degrau com saltos nas potências de primo n_k, então a integral é
    (π/σ) Σ_k |A(n_k)|² (n_k^{-2σ} - n_{k+1}^{-2σ}), com n_{K+1} = ∞.
    truncation_bound majora a contribuição de v > v_max na série completa.
    """
    if sigma <= 1:
        raise ValueError(f"exige σ > 1, recebeu {sigma}")
    N = int(math.floor(math.exp(v_max) * (1 + 1e-12)))
    powers, _, partials = mangoldt_step_function(spec, N)
    if not len(powers):
        return ParsevalResult(sigma=sigma, v_max=v_max, N=N, value=0.0, truncation_bound=0.0)
    weights = np.exp(-2 * sigma * np.log(powers.astype(np.float64)))
    drops = weights - np.append(weights[1:], 0.0)
    value = math.pi / sigma * fsum_real(np.abs(partials) ** 2 * drops)
    growth = max(_PSI_RATIO * spec.B, float(np.max(np.abs(partials) / powers)))
    bound = 2 * math.pi * growth**2 * math.exp(-2 * (sigma - 1) * v_max) / (2 * (sigma - 1))
    return ParsevalResult(sigma=sigma, v_max=v_max, N=N, value=value, truncation_bound=bound)


# ---------------------------------------------------------------------------
# Majorante de Montgomery
# ---------------------------------------------------------------------------

def dirichlet_mean_square(coeffs: np.ndarray, ns: np.ndarray, sigma: float, T: float, step: float | None = None) -> float:
    """∫_{-T}^{T} |Σ a_n n^{-σ-iτ}|² dτ por trapézio denso."""
    logn = np.log(np.asarray(ns, dtype=np.float64))
    top = float(logn.max()) if len(logn) else 1.0
    step = step or math.pi / (16 * max(top, 1.0))
    taus = np.linspace(-T, T, int(math.ceil(2 * T / step)) + 1)
    a = np.asarray(coeffs, dtype=np.complex128) * np.exp(-sigma * logn)
    F = np.exp(-1j * np.outer(taus, logn)) @ a
    return float(integrate.trapezoid(np.abs(F) ** 2, taus))


class MontgomeryCheck(BaseModel):
    trials: int
    passed: int
    max_ratio: float
    failures: list[int] = Field(default_factory=list)
    families: dict[str, int] = Field(default_factory=dict)


MONTGOMERY_FAMILIES = ("phase", "real", "dominated")


def montgomery_trial(a: np.ndarray, b: np.ndarray, ns: np.ndarray, sigma: float, T: float,
                     tolerance: float = 1e-2) -> tuple[bool, float | None]:
    """
    Um ensaio da majorante: (aprovado, ∫|A|²/∫|B|²).

    Com b ≡ 0 as duas integrais são nulas e o ensaio passa sem razão definida.
    """
    if not np.any(np.abs(b) > 0):
        return True, None
    lhs = dirichlet_mean_square(a, ns, sigma, T)
    rhs = dirichlet_mean_square(b, ns, sigma, T)
    ratio = lhs / rhs if rhs > 0 else None
    return lhs <= 3 * (1 + tolerance) * rhs, ratio


def _montgomery_coefficients(family: str, b: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    phases = np.exp(2j * math.pi * rng.uniform(size=len(b)))
    if family == "real":
        return b.astype(np.complex128)
    if family == "phase":
        return b * phases
    return b * rng.uniform(0.0, 1.0, size=len(b)) * phases


def montgomery_majorant_check(trials: int, seed: int | None = None, tolerance: float = 1e-2) -> MontgomeryCheck:
    """
    ∫|A|² ≤ 3∫|B|² em polinômios aleatórios com |a_n| ≤ b_n.

    Os ensaios alternam três famílias: |a_n| = b_n com fases aleatórias (a que
    empurra a razão para 3), a_n = b_n real (razão 1) e |a_n| sorteado abaixo de b_n.
    """
    if trials < 1:
        raise ValueError(f"trials deve ser ≥ 1, recebeu {trials}")
    rng = np.random.default_rng(settings.default_seed if seed is None else seed)
    passed = 0
    max_ratio = 0.0
    failures: list[int] = []
    families = dict.fromkeys(MONTGOMERY_FAMILIES, 0)
    for trial in range(trials):
        family = MONTGOMERY_FAMILIES[trial % len(MONTGOMERY_FAMILIES)]
        families[family] += 1
        size = int(rng.integers(1, 41))
        ns = np.sort(rng.choice(np.arange(1, 201), size=size, replace=False))
        b = rng.uniform(0.0, 1.0, size=size)
        a = _montgomery_coefficients(family, b, rng)
        sigma = float(rng.uniform(1.05, 2.0))
        T = float(rng.uniform(1.0, 100.0))
        ok, ratio = montgomery_trial(a, b, ns, sigma, T, tolerance)
        if ratio is not None:
            max_ratio = max(max_ratio, ratio)
        if ok:
            passed += 1
        else:
            failures.append(trial)
            logger.warning(f"❌ Montgomery: ensaio {trial} ({family}) com razão {ratio or math.inf:.4f}")
    logger.info(f"Majorante de Montgomery: {passed}/{trials} (razão máxima {max_ratio:.4f})")
    return MontgomeryCheck(trials=trials, passed=passed, max_ratio=max_ratio, failures=failures, families=families)


# ---------------------------------------------------------------------------
# Região livre de zeros
# ---------------------------------------------------------------------------

class ZeroFreeVerdict(BaseModel):
    label: str
    sigma: float
    B: float
    excluded_radius: float
    primes_scanned: list[int]
    min_modulus: float
    violations: list[tuple[int, float]] = Field(default_factory=list)
    zeros_outside: list[tuple[int, float]] = Field(default_factory=list)

    @computed_field
    @property
    def no_zeros_possible(self) -> bool:
        return self.B <= 1

    @computed_field
    @property
    def passed(self) -> bool:
        return not self.violations


def zero_free_check(spec: MultFnSpec, sigma: float, tau_range: float, step: float | None = None,
                    arg_check_limit: int | None = None) -> ZeroFreeVerdict:
    """
    Varre os fatores 1 + g(p)/(p^s - 1), p ≤ B^{1/σ} + 1, em |τ| ≤ tau_range.

    Nenhum fator pode se anular em |τ| < σ/log B (B > 1) nem em parte alguma (B ≤ 1).

    Raises:
        RefusalError: extensão completa ou |arg g(p)| ≥ 1 para algum p
    """
    if spec.is_complete:
        raise RefusalError("extensão forte", "a região livre de zeros vale para g fortemente multiplicativa")
    if sigma <= 1:
        raise ValueError(f"exige σ > 1, recebeu {sigma}")
    limit = arg_check_limit or settings.euler_prime_cutoff
    ps_all = primes_up_to(limit)
    args = np.abs(principal_arg(spec.prime_values(ps_all)))
    if np.any(args >= 1):
        bad = int(ps_all[np.argmax(args >= 1)])
        raise RefusalError("|arg g(p)| < 1", f"falha em p = {bad}")

    B = spec.B
    radius = sigma / math.log(B) if B > 1 else math.inf
    ps = primes_up_to(int(math.floor(B ** (1 / sigma) + 1)))
    step = step or min(0.01, (sigma - 1) / 4)
    taus = np.linspace(-tau_range, tau_range, int(math.ceil(2 * tau_range / step)) + 1)
    violations: list[tuple[int, float]] = []
    outside: list[tuple[int, float]] = []
    min_mod = math.inf
    if len(ps):
        values = spec.prime_values(ps)
        logp = np.log(ps.astype(np.float64))
        z = np.exp(-np.outer(sigma + 1j * taus, logp))
        mod = np.abs(1 + values * z / (1 - z))
        min_mod = float(mod.min())
        for k, i in zip(*np.nonzero(mod < ZERO_TOLERANCE)):
            hit = (int(ps[i]), float(taus[k]))
            (violations if abs(taus[k]) < radius else outside).append(hit)
    verdict = ZeroFreeVerdict(label=spec.label, sigma=sigma, B=B, excluded_radius=radius,
                              primes_scanned=ps.tolist(), min_modulus=min_mod,
                              violations=violations, zeros_outside=outside)
    if verdict.no_zeros_possible:
        logger.info(f"{spec.label}: B = {B:g} ≤ 1, nenhum zero possível")
    elif verdict.passed:
        logger.info(f"✅ {spec.label}: sem zeros em |τ| < {radius:.4g} (mín |fator| = {min_mod:.3g})")
    else:
        logger.warning(f"❌ {spec.label}: {len(violations)} zeros dentro de |τ| < {radius:.4g}")
    return verdict

