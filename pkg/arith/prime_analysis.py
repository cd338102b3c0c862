"""
Somas sobre primos: Mertens, von Mangoldt, distâncias pretensiosas e expoentes.
"""
from __future__ import annotations

import csv
import math
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from pydantic import BaseModel
from scipy import integrate

from config.logger import setup_logger
from config.settings import settings

from .compensated import fsum_real
from .errors import GridError
from .mult_fn import EXCEPTIONAL, MultFnSpec, is_non_decreasing
from .primes import factorize, prime_powers_up_to, primes_up_to

logger = setup_logger(__name__)

ClassFilter = Callable[[np.ndarray], np.ndarray]

# Passos da recorrência de fase antes de recalcular e^{-iτ log p} exato
_PHASE_BLOCK = 128
HALASZ_CONSTANT = 27 / (1024 * math.pi)


def residue_filter(q: int, r: int) -> ClassFilter:
    return lambda ps: ps % q == r % q


def class_filter(spec: MultFnSpec, j: int) -> ClassFilter:
    """Máscara dos primos de E_j (j = EXCEPTIONAL seleciona S)."""
    return lambda ps: spec.prime_data(ps)[1] == j


def mertens_sum(x: int, class_filter: ClassFilter | None = None) -> float:
    """Σ_{p ≤ x, p ∈ E} 1/p."""
    if x < 2:
        return 0.0
    ps = primes_up_to(x)
    if class_filter is not None:
        ps = ps[class_filter(ps)]
    return fsum_real(1.0 / ps.astype(np.float64))


def sigma_of(x: float) -> float:
    return 1.0 + 1.0 / math.log(x)


def _prime_table(spec: MultFnSpec, x: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(primos ≤ x, g̃(p), classe) com g̃ normalizado por B_j."""
    ps = primes_up_to(x)
    values, classes = spec.prime_data(ps)
    return ps, spec.normalized(values, classes), classes


def pretentious_distance(spec: MultFnSpec, tau: float, x: int, class_index: int | None = None) -> float:
    """
    D_E(g̃, n^{iτ}; x) = Σ_{p∈E, p≤x} (1 - Re(g̃(p) p^{-iτ}))/p.

    class_index None soma todas as classes E_1..E_m (S fica de fora).
    """
    ps, g_tilde, classes = _prime_table(spec, x)
    keep = classes != EXCEPTIONAL if class_index is None else classes == class_index
    ps, g_tilde = ps[keep], g_tilde[keep]
    logp = np.log(ps.astype(np.float64))
    terms = (1.0 - (g_tilde * np.exp(-1j * tau * logp)).real) / ps
    return fsum_real(terms)


# ---------------------------------------------------------------------------
# Grade em τ e perfil de distâncias
# ---------------------------------------------------------------------------

def tau_runs(x: int, T: float, grid_step: float) -> list[tuple[float, float, int]]:
    return runs_for_sigma(sigma_of(x) - 1, T, grid_step, settings.tau_outer_step)


def runs_for_sigma(s1: float, T: float, grid_step: float, outer_step: float,
                   mid_step: float | None = None) -> list[tuple[float, float, int]]:
    """
    Trechos uniformes (início, passo, pontos) da grade em [-T, T].

    Passo grid_step em |τ| ≤ 10(σ-1), mid_step (padrão σ-1) em |τ| ≤ 2 e outer_step além.
    """
    regions = [(min(10 * s1, T), grid_step), (min(2.0, T), mid_step or s1), (T, outer_step)]
    positive: list[tuple[float, float, int]] = []
    last = 0.0
    first = True
    for end, step in regions:
        start = last if first else last + step
        if start > end + 1e-12:
            continue
        count = int(math.floor((end - start) / step + 1e-9)) + 1
        positive.append((start, step, count))
        last = start + (count - 1) * step
        first = False
    if T - last > 1e-9:
        positive.append((T, 1.0, 1))
    runs = list(positive)
    for start, step, count in positive:
        if start == 0.0:
            if count > 1:
                runs.append((-step, -step, count - 1))
        else:
            runs.append((-start, -step, count))
    return runs


def grid_from_runs(runs: list[tuple[float, float, int]]) -> np.ndarray:
    return np.sort(np.concatenate([start + step * np.arange(count) for start, step, count in runs]))


def tau_grid(x: int, T: float, grid_step: float) -> np.ndarray:
    return grid_from_runs(tau_runs(x, T, grid_step))


def _run_block(a: np.ndarray, logp: np.ndarray, classes: np.ndarray, m: int,
               start: float, step: float, count: int) -> np.ndarray:
    """Σ_{p∈E_j} Re(a_p p^{-iτ}) para τ = start + k·step, k < count."""
    out = np.empty((count, m))
    z = np.exp(-1j * start * logp)
    rot = np.exp(-1j * step * logp)
    for k in range(count):
        w = (a * z).real
        out[k] = np.bincount(classes, weights=w, minlength=m + 1)[1:]
        z *= rot
    return out


def distance_profile(spec: MultFnSpec, x: int, taus_runs: list[tuple[float, float, int]],
                     workers: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """
    D_{E_j}(g̃, n^{iτ}; x) ao longo dos trechos da grade.

    Returns:
        (τ ordenados, matriz m × len(τ))
    """
    ps, g_tilde, classes = _prime_table(spec, x)
    keep = classes != EXCEPTIONAL
    ps, g_tilde, classes = ps[keep], g_tilde[keep], classes[keep]
    inv = 1.0 / ps.astype(np.float64)
    logp = np.log(ps.astype(np.float64))
    a = g_tilde * inv
    m = spec.m
    base = np.bincount(classes, weights=inv, minlength=m + 1)[1:]

    blocks = []
    for start, step, count in taus_runs:
        for k0 in range(0, count, _PHASE_BLOCK):
            blocks.append((start + k0 * step, step, min(_PHASE_BLOCK, count - k0)))

    def work(block):
        return _run_block(a, logp, classes, m, *block)

    with ThreadPoolExecutor(max_workers=workers or settings.worker_count) as pool:
        parts = list(pool.map(work, blocks))

    taus = np.concatenate([s + h * np.arange(c) for s, h, c in blocks])
    sums = np.concatenate(parts, axis=0)
    order = np.argsort(taus, kind="stable")
    return taus[order], (base[None, :] - sums[order]).T


@dataclass(frozen=True)
class DistanceReport:
    """Perfil D_{E_j}(g̃, n^{iτ}; x) na grade e seus mínimos ρ_{E_j}(x; g̃, T)."""
    label: str
    x: int
    T: float
    tau_grid_step: float
    taus: np.ndarray
    distances: np.ndarray
    minimizers: np.ndarray
    minima: np.ndarray
    boundary: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.distances.sum(axis=0)

    @property
    def rho(self) -> float:
        """Σ_j ρ_{E_j}."""
        return float(self.minima.sum())

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        m = self.distances.shape[0]
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["tau", *[f"D_{j}" for j in range(1, m + 1)], "D_total"])
            for k, tau in enumerate(self.taus):
                writer.writerow([repr(float(tau)), *(repr(float(d)) for d in self.distances[:, k]),
                                 repr(float(self.total[k]))])
        return path


def _report(spec: MultFnSpec, x: int, T: float, grid_step: float) -> DistanceReport:
    taus, dist = distance_profile(spec, x, tau_runs(x, T, grid_step))
    idx = np.argmin(dist, axis=1)
    minimizers = taus[idx]
    boundary = np.isclose(np.abs(minimizers), T)
    for j in np.flatnonzero(boundary):
        logger.warning(f"⚠️ ρ_E_{j + 1} de {spec.label} atingido na borda τ = ±{T:.3g}")
    return DistanceReport(
        label=spec.label, x=x, T=T, tau_grid_step=grid_step, taus=taus, distances=dist,
        minimizers=minimizers, minima=dist[np.arange(dist.shape[0]), idx], boundary=boundary,
    )


def rho_min(spec: MultFnSpec, x: int, D_exp: float | None = None, grid_step: float | None = None) -> DistanceReport:
    """ρ_{E_j}(x; g̃, T) = min_{|τ|≤T} D_{E_j}, T = log^D x, por busca em grade."""
    D_exp = settings.tau_D if D_exp is None else D_exp
    s1 = sigma_of(x) - 1
    grid_step = s1 / 4 if grid_step is None else grid_step
    if D_exp <= 2:
        raise GridError(f"expoente D deve ser > 2, recebeu {D_exp}")
    if grid_step > s1:
        raise GridError(f"passo {grid_step:.4g} maior que σ-1 = {s1:.4g}")
    if grid_step > s1 / 4:
        logger.warning(f"passo {grid_step:.4g} acima de (σ-1)/4; o pico central pode ser subamostrado")
    T = math.log(x) ** D_exp
    report = _report(spec, x, T, grid_step)
    logger.info(f"📐 ρ de {spec.label} em x={x}: {report.rho:.5f} (τ* = {report.minimizers.tolist()})")
    return report


def class_distance_minima(spec: MultFnSpec, x: int, T: float) -> np.ndarray:
    """min_{|τ|≤T} D_{E_j}(g̃, n^{iτ}; x) para cada classe."""
    return _report(spec, x, T, (sigma_of(x) - 1) / 4).minima


# ---------------------------------------------------------------------------
# Somas de von Mangoldt
# ---------------------------------------------------------------------------

class MangoldtSum(BaseModel):
    value: float
    predicted: float

    @property
    def residual(self) -> float:
        return self.value - self.predicted


def lambda_mangoldt_sum(z: int) -> MangoldtSum:
    """Σ_{n≤z} Λ(n)/n contra log z - γ (a constante c do termo principal é -γ)."""
    if z < 2:
        raise ValueError(f"z deve ser ≥ 2, recebeu {z}")
    powers, bases, _ = prime_powers_up_to(z)
    value = fsum_real(np.log(bases.astype(np.float64)) / powers)
    return MangoldtSum(value=value, predicted=math.log(z) - np.euler_gamma)


def lambda_mangoldt_coprime(x: int, y: float, P: int) -> MangoldtSum:
    """Σ_{x-y<n≤x, (n,P)=1} Λ(n)/n contra (φ(P)/P)·y/x."""
    if not 0 < y < x:
        raise ValueError(f"exige 0 < y < x (x={x}, y={y})")
    powers, bases, _ = prime_powers_up_to(x)
    keep = (powers > x - y) & (P % bases != 0)
    value = fsum_real(np.log(bases[keep].astype(np.float64)) / powers[keep])
    phi_ratio = math.prod(1 - 1 / p for p, _ in factorize(P)) if P > 1 else 1.0
    return MangoldtSum(value=value, predicted=phi_ratio * y / x)


class SigmaDiffResult(BaseModel):
    x: int
    tau: float
    truncated: float
    tail: float
    lhs: float
    rhs_bound_shape: float
    degenerate: bool = False

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs_bound_shape


def sigma_diff_sum(x: int, tau: float, prime_cutoff: int | None = None) -> SigmaDiffResult:
    """
    Σ_p |p^{-σ} - p^{-s}|, s = σ + iτ, σ = 1 + 1/log x.

    Os termos valem 2p^{-σ}|sen(τ log p / 2)|; o resto além do corte é a
    integral ∫_{log c}^∞ 2e^{-(σ-1)v}|sen(τv/2)| dv/v.
    """
    prime_cutoff = prime_cutoff or settings.euler_prime_cutoff
    s1 = sigma_of(x) - 1
    ps = primes_up_to(prime_cutoff).astype(np.float64)
    logp = np.log(ps)
    truncated = fsum_real(2 * ps ** -(1 + s1) * np.abs(np.sin(tau * logp / 2)))
    tail = 0.0
    if tau != 0:
        v0 = math.log(prime_cutoff)
        v1 = v0 + 40 / s1
        tail, _ = integrate.quad(lambda v: 2 * math.exp(-s1 * v) * abs(math.sin(tau * v / 2)) / v,
                                 v0, v1, limit=max(200, int(abs(tau) * (v1 - v0))))
    degenerate = tau == 0
    shape = 1 + abs(math.log(max(abs(tau), 1e-12) / s1))
    if degenerate:
        logger.warning("sigma_diff_sum com τ = 0: forma do majorante degenera")
    return SigmaDiffResult(x=x, tau=tau, truncated=truncated, tail=tail, lhs=truncated + tail,
                           rhs_bound_shape=shape, degenerate=degenerate)


# ---------------------------------------------------------------------------
# Expoentes: γ_{0,j}, c_j, λ(t), κ(C), S_κ(t)
# ---------------------------------------------------------------------------

def gamma0_values(spec: MultFnSpec) -> np.ndarray:
    betas = np.array([c.beta for c in spec.partition.classes])
    return HALASZ_CONSTANT * spec.deltas / spec.bounds * betas**3


def c_coefficients(spec: MultFnSpec, non_decreasing: bool) -> np.ndarray:
    """c_j = ½ min{1/(4m²), γ_{0,j}/(1+γ_{0,j})}, vezes min_j δ_j/B_j se não for não-decrescente."""
    g0 = gamma0_values(spec)
    c = 0.5 * np.minimum(1 / (4 * spec.m**2), g0 / (1 + g0))
    if not non_decreasing:
        c = c * float(np.min(spec.deltas / spec.bounds))
    return c


def class_sums(spec: MultFnSpec, t: int, lower: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """(Σ_{p∈E_j, lower<p≤t} |g(p)|/p, Σ_{p∈E_j, lower<p≤t} 1/p) por classe."""
    ps = primes_up_to(t)
    ps = ps[ps > lower]
    values, classes = spec.prime_data(ps)
    inv = 1.0 / ps.astype(np.float64)
    m = spec.m
    weighted = np.array([fsum_real(np.abs(values[classes == j]) * inv[classes == j]) for j in range(1, m + 1)])
    plain = np.array([fsum_real(inv[classes == j]) for j in range(1, m + 1)])
    return weighted, plain


def s_kappa(spec: MultFnSpec, t: int, kappa: float) -> float:
    """S_κ(t) = Σ_{t^κ < p ≤ t} |g(p)|/p."""
    ps = primes_up_to(t)
    ps = ps[ps > t**kappa]
    return fsum_real(np.abs(spec.prime_values(ps)) / ps)


def reasonable_index(spec: MultFnSpec, t: int, kappa: float) -> int | None:
    """Índice j_0 que satisfaz as duas condições de par razoável em (t, κ), se houver."""
    m = spec.m
    _, window = class_sums(spec, t, lower=t**kappa)
    weighted, _ = class_sums(spec, t)
    ps = primes_up_to(t)
    window_total = mertens_sum(t) - mertens_sum(int(t**kappa))
    weighted_total = fsum_real(np.abs(spec.prime_values(ps)) / ps)
    for j in range(m):
        if window[j] >= window_total / m and weighted[j] >= weighted_total / m:
            return j + 1
    return None


def lambda_exponent_cases(spec: MultFnSpec, t: int, reasonable: bool, non_decreasing: bool) -> float:
    """λ(t) nas quatro formas do expoente (razoável / não-decrescente)."""
    g0 = gamma0_values(spec)
    m = spec.m
    weighted, plain = class_sums(spec, t)
    loglog = math.log(math.log(t))
    if reasonable:
        core = float(np.sum(np.minimum(1 / (4 * m**2), g0 / (1 + g0)) * weighted)) / loglog
        return core if non_decreasing else core * float(np.min(spec.deltas / spec.bounds))
    if non_decreasing:
        return spec.delta / spec.B * float(np.sum(g0 / (1 + g0) * weighted)) / loglog
    return spec.delta * float(np.sum(g0 / (1 + g0) * plain)) / loglog


class ExponentBundle(BaseModel):
    """Constantes nomeadas de um ponto t."""
    label: str
    t: int
    C: float
    gamma0_j: list[float]
    gamma0: float
    gamma: float
    c_j: list[float]
    d_j: list[float]
    non_decreasing: bool
    reasonable: bool
    lambda_t: float
    lambda_case: float
    C_prime: float
    kappa: float
    kappa_floored: bool
    S_kappa: float
    exponents_lhs: float
    exponents_slack: float

    @property
    def exponents_hold(self) -> bool:
        return self.exponents_slack >= 0


KAPPA_FLOOR = 1e-6


def exponent_bundle(spec: MultFnSpec, t: int, C: float = 1.0) -> ExponentBundle:
    """γ_{0,j}, c_j, λ(t), κ(C), S_κ(t) e a desigualdade C(B/δ)κ^{-λ}e^{-S_κ/2} ≤ 1/2."""
    if t < 10**3:
        raise ValueError(f"t deve ser ≥ 1000, recebeu {t}")
    g0 = gamma0_values(spec)
    betas = np.array([c.beta for c in spec.partition.classes])
    nd = is_non_decreasing(spec, t)
    c = c_coefficients(spec, nd)
    d = np.ones(spec.m) if nd else spec.deltas / spec.bounds
    weighted, _ = class_sums(spec, t)
    lam = float(np.sum(c * d * g0 / (1 + g0) * weighted)) / math.log(math.log(t))

    B, delta = spec.B, spec.delta
    C_prime = max(C, math.exp(B))
    kappa = (delta / (2 * C_prime * B)) ** (4 / delta)
    floored = kappa < KAPPA_FLOOR
    if floored:
        logger.warning(f"⚠️ κ = {kappa:.3e} abaixo do piso para {spec.label}; usando {KAPPA_FLOOR}")
        kappa = KAPPA_FLOOR
    S = s_kappa(spec, t, kappa)
    reasonable = reasonable_index(spec, t, kappa) is not None
    lhs = C * (B / delta) * kappa ** (-lam) * math.exp(-S / 2)
    return ExponentBundle(
        label=spec.label, t=t, C=C,
        gamma0_j=g0.tolist(), gamma0=float(g0.min()), gamma=float(np.min(spec.deltas * betas**3)),
        c_j=c.tolist(), d_j=d.tolist(), non_decreasing=nd, reasonable=reasonable,
        lambda_t=lam, lambda_case=lambda_exponent_cases(spec, t, reasonable, nd),
        C_prime=C_prime, kappa=kappa, kappa_floored=floored, S_kappa=S,
        exponents_lhs=lhs, exponents_slack=0.5 - lhs,
    )


# ---------------------------------------------------------------------------
# Partições boas e a desigualdade de sen²
# ---------------------------------------------------------------------------

def good_partition_density(tau: float, interval: tuple[float, float], x: int) -> tuple[float, float]:
    """(Σ_{p≤x, {τ log p/2π} ∈ (α,β]} 1/p, (β-α) log log x)."""
    alpha, beta = interval
    if not 0 <= alpha < beta <= 1:
        raise ValueError(f"intervalo inválido: {interval}")
    ps = primes_up_to(x)
    frac = np.mod(tau * np.log(ps.astype(np.float64)) / (2 * math.pi), 1.0)
    frac = np.where(frac == 0.0, 1.0, frac)
    keep = (frac > alpha) & (frac <= beta)
    measured = fsum_real(1.0 / ps[keep].astype(np.float64))
    return measured, (beta - alpha) * math.log(math.log(x))


class TrigCheck(BaseModel):
    trials: int
    violations: int
    max_ratio: float


def trig_inequality_check(trials: int, m_max: int = 8, seed: int | None = None) -> TrigCheck:
    """sen²(Σ a_j) ≤ m Σ sen² a_j em vetores aleatórios de tamanho m ≤ m_max."""
    rng = np.random.default_rng(settings.default_seed if seed is None else seed)
    violations = 0
    max_ratio = 0.0
    for _ in range(trials):
        m = int(rng.integers(1, m_max + 1))
        a = rng.uniform(-2 * math.pi, 2 * math.pi, size=m)
        lhs = math.sin(a.sum()) ** 2
        rhs = m * float(np.sum(np.sin(a) ** 2))
        if lhs > rhs + 1e-12:
            violations += 1
        if rhs > 0:
            max_ratio = max(max_ratio, lhs / rhs)
    return TrigCheck(trials=trials, violations=violations, max_ratio=max_ratio)
