"""
Crivo segmentado de funções multiplicativas e tabelas de somatórias.

Cada segmento [lo, hi) parte de valor 1 e cofator n; para cada primo p ≤ √hi
as fatias com passo p, p², ... retiram a potência de p e multiplicam g(p^k).
O cofator restante > 1 é um primo. As somas dos segmentos são reduzidas em
ordem num acumulador compensado, então o resultado não depende do número de
workers.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.special import gammaln

from config.logger import setup_logger
from config.settings import settings

from .catalog import constant_spec
from .compensated import ComplexCompensatedSum, cumulative_fsum, fsum_complex, fsum_real
from .errors import DegenerateInputError, SieveConfigError
from .mult_fn import MultFnSpec
from .primes import prime_powers_up_to, primes_up_to

logger = setup_logger(__name__)

SIEVE_LIMIT = 10**9
CSV_COLUMNS = ["x", "Re M_g", "Im M_g", "M_abs", "Re N_g", "Im N_g", "Re L_g", "Im L_g", "L_abs"]

# Ordem das colunas acumuladas por segmento
_M, _MABS, _N, _NABS, _L, _LABS = range(6)


class SieveConfig(BaseModel):
    """Parâmetros do crivo segmentado."""
    model_config = ConfigDict(frozen=True)

    segment_length: int = Field(default_factory=lambda: settings.segment_length, ge=2)
    x_max: int = Field(default_factory=lambda: settings.x_max, le=SIEVE_LIMIT)
    worker_count: int = Field(default_factory=lambda: settings.worker_count, ge=1)

    @model_validator(mode="after")
    def _check_lengths(self) -> SieveConfig:
        if self.x_max < self.segment_length:
            raise ValueError(f"x_max={self.x_max} menor que segment_length={self.segment_length}")
        return self

    @classmethod
    def for_range(cls, x_max: int, **overrides) -> SieveConfig:
        """Configuração padrão encolhendo o segmento quando x_max é pequeno."""
        seg = overrides.pop("segment_length", settings.segment_length)
        return cls(x_max=x_max, segment_length=max(2, min(seg, x_max)), **overrides)


@dataclass(frozen=True)
class SummatoryTable:
    """M_g, M_{|g|}, N_g, N_{|g|}, L_g, L_{|g|} nos checkpoints e somas Λ-ponderadas numa grade em v."""
    spec_hash: str
    checkpoints: np.ndarray
    M_g: np.ndarray
    M_abs: np.ndarray
    N_g: np.ndarray
    N_abs: np.ndarray
    L_g: np.ndarray
    L_abs: np.ndarray
    lambda_v: np.ndarray = field(default_factory=lambda: np.zeros(0))
    lambda_g: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=np.complex128))

    def index(self, x: int) -> int:
        i = int(np.searchsorted(self.checkpoints, x))
        if i >= len(self.checkpoints) or self.checkpoints[i] != x:
            raise SieveConfigError(f"x={x} não é checkpoint da tabela")
        return i

    def at(self, x: int) -> dict[str, complex | float]:
        i = self.index(x)
        return {
            "M_g": complex(self.M_g[i]), "M_abs": float(self.M_abs[i]),
            "N_g": complex(self.N_g[i]), "N_abs": float(self.N_abs[i]),
            "L_g": complex(self.L_g[i]), "L_abs": float(self.L_abs[i]),
        }

    def subset(self, xs) -> SummatoryTable:
        idx = np.array([self.index(int(x)) for x in xs], dtype=np.int64)
        return SummatoryTable(
            spec_hash=self.spec_hash, checkpoints=self.checkpoints[idx],
            M_g=self.M_g[idx], M_abs=self.M_abs[idx], N_g=self.N_g[idx], N_abs=self.N_abs[idx],
            L_g=self.L_g[idx], L_abs=self.L_abs[idx], lambda_v=self.lambda_v, lambda_g=self.lambda_g,
        )

    def rows(self) -> list[list[float]]:
        return [
            [int(x), m.real, m.imag, ma, n.real, n.imag, l.real, l.imag, la]
            for x, m, ma, n, l, la in zip(self.checkpoints, self.M_g, self.M_abs, self.N_g, self.L_g, self.L_abs)
        ]

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_COLUMNS)
            for row in self.rows():
                writer.writerow([row[0], *(repr(float(v)) for v in row[1:])])
        return path


def _segment_values(spec: MultFnSpec, lo: int, hi: int, base: np.ndarray, base_vals: np.ndarray) -> np.ndarray:
    """g(n) para n em [lo, hi)."""
    cof = np.arange(lo, hi, dtype=np.int64)
    vals = np.ones(hi - lo, dtype=np.complex128)
    complete = spec.is_complete
    for p, gp in zip(base.tolist(), base_vals.tolist()):
        if p * p >= hi:
            break
        sl = slice((-lo) % p, None, p)
        cof[sl] //= p
        vals[sl] *= gp
        pk = p * p
        while pk < hi:
            slk = slice((-lo) % pk, None, pk)
            cof[slk] //= p
            if complete:
                vals[slk] *= gp
            pk *= p
    rest = cof > 1
    if rest.any():
        vals[rest] *= spec.prime_values(cof[rest])
    return vals


def sieve_values(spec: MultFnSpec, x: int) -> np.ndarray:
    """Array g(1..x) (índice 0 é n = 1); uso em faixas pequenas."""
    base = primes_up_to(math.isqrt(x) + 1)
    return _segment_values(spec, 1, x + 1, base, spec.prime_values(base))


def _segment_pieces(spec, lo, hi, base, base_vals, cuts) -> np.ndarray:
    """Somas compensadas das 6 colunas em cada pedaço [lo, c_1], (c_1, c_2], ..., (c_k, hi)."""
    vals = _segment_values(spec, lo, hi, base, base_vals)
    n = np.arange(lo, hi, dtype=np.float64)
    mod = np.abs(vals)
    logn = np.log(n)
    columns = (vals, mod, vals * logn, mod * logn, vals / n, mod / n)
    bounds = [0, *[c - lo + 1 for c in cuts], hi - lo]
    out = np.zeros((len(bounds) - 1, 6), dtype=np.complex128)
    for k, (a, b) in enumerate(zip(bounds, bounds[1:])):
        for col, arr in enumerate(columns):
            chunk = arr[a:b]
            out[k, col] = fsum_complex(chunk) if np.iscomplexobj(chunk) else fsum_real(chunk)
    return out


def _lambda_reach(v_grid: np.ndarray) -> int:
    return int(math.floor(math.exp(float(v_grid.max())) * (1 + 1e-12))) if len(v_grid) else 1


def _lambda_partials(spec: MultFnSpec, v_grid: np.ndarray, x: int) -> np.ndarray:
    """Σ_{n ≤ e^v} g(n)Λ(n) sobre as potências de primo p^k ≤ x."""
    if not len(v_grid):
        return np.zeros(0, dtype=np.complex128)
    powers, bases, exps = prime_powers_up_to(x)
    weights = np.log(bases.astype(np.float64)) * spec.power_values(spec.prime_values(bases), exps)
    limits = np.floor(np.exp(v_grid) * (1 + 1e-12))
    ends = np.searchsorted(powers, limits, side="right")
    return cumulative_fsum(weights, ends)


def summatory(
    spec: MultFnSpec,
    config: SieveConfig,
    checkpoints,
    lambda_v=None,
) -> SummatoryTable:
    """
    Crivo até o maior checkpoint acumulando M_g, M_{|g|}, N_g, N_{|g|}, L_g, L_{|g|}.

    Args:
        spec: função multiplicativa
        config: segmento, x_max e workers
        checkpoints: inteiros em [1, x_max]
        lambda_v: grade em v para Σ_{n≤e^v} g(n)Λ(n) (opcional)

    Returns:
        SummatoryTable imutável
    """
    cps = np.unique(np.asarray(checkpoints, dtype=np.int64))
    if not len(cps) or cps[0] < 1 or cps[-1] > config.x_max:
        raise SieveConfigError(f"checkpoints fora de [1, {config.x_max}]: {cps[:1]}..{cps[-1:]}")
    lambda_v = np.asarray([] if lambda_v is None else lambda_v, dtype=np.float64)
    if len(lambda_v) and math.exp(lambda_v.max()) > config.x_max * (1 + 1e-12):
        raise SieveConfigError(f"e^v_max além de x_max={config.x_max}")

    x = int(cps[-1])
    base = primes_up_to(math.isqrt(x) + 1)
    base_vals = spec.prime_values(base)
    L = config.segment_length
    segments = [(lo, min(lo + L, x + 1)) for lo in range(1, x + 1, L)]
    seg_cuts = [cps[(cps >= lo) & (cps < hi - 1)].tolist() for lo, hi in segments]
    logger.info(f"🔢 Crivo de {spec.label} até {x}: {len(segments)} segmentos, {config.worker_count} workers")

    def work(k: int) -> np.ndarray:
        lo, hi = segments[k]
        return _segment_pieces(spec, lo, hi, base, base_vals, seg_cuts[k])

    with ThreadPoolExecutor(max_workers=config.worker_count) as pool:
        pieces = list(pool.map(work, range(len(segments))))

    accs = [ComplexCompensatedSum() for _ in range(6)]
    cp_set = set(cps.tolist())
    rows = []
    for k, seg in enumerate(pieces):
        for j, piece in enumerate(seg):
            for col in range(6):
                accs[col].add(complex(piece[col]))
            # último pedaço do segmento termina em hi-1; os anteriores em cada corte
            ends_at = seg_cuts[k][j] if j < len(seg_cuts[k]) else segments[k][1] - 1
            if ends_at in cp_set:
                rows.append([a.value for a in accs])
    table = np.array(rows, dtype=np.complex128).reshape(len(cps), 6)

    lam = _lambda_partials(spec, lambda_v, _lambda_reach(lambda_v))
    logger.debug(f"Crivo de {spec.label} concluído ({len(cps)} checkpoints)")
    return SummatoryTable(
        spec_hash=spec.spec_hash, checkpoints=cps,
        M_g=table[:, _M], M_abs=table[:, _MABS].real.copy(),
        N_g=table[:, _N], N_abs=table[:, _NABS].real.copy(),
        L_g=table[:, _L], L_abs=table[:, _LABS].real.copy(),
        lambda_v=lambda_v, lambda_g=lam,
    )


def sieve_table(spec: MultFnSpec, checkpoints, lambda_v=None, **config_overrides) -> SummatoryTable:
    """summatory com configuração padrão dimensionada ao maior checkpoint."""
    top = int(np.max(checkpoints))
    if lambda_v is not None and len(lambda_v):
        top = max(top, _lambda_reach(np.asarray(lambda_v, dtype=np.float64)))
    return summatory(spec, SieveConfig.for_range(top, **config_overrides), checkpoints, lambda_v)


# ---------------------------------------------------------------------------
# Somas de Selberg–Delange
# ---------------------------------------------------------------------------

def selberg_sum(rho: float, x: int) -> float:
    """Σ_{n≤x} ρ^{ω(n)}."""
    if rho <= 0 or x < 2:
        raise SieveConfigError(f"selberg_sum exige ρ > 0 e x ≥ 2 (ρ={rho}, x={x})")
    spec = constant_spec(rho, f"rho^omega-{rho:g}")
    return float(sieve_table(spec, [x]).M_g[-1].real)


def selberg_constant(rho: float, prime_cutoff: int) -> tuple[float, float]:
    """
    F(ρ) = Γ(ρ)^{-1} Π_p (1 + ρ/(p-1))(1 - 1/p)^ρ truncado em prime_cutoff.

    Returns:
        (valor, cota do resto do log-produto além do corte)
    """
    if prime_cutoff < 10**3:
        raise SieveConfigError(f"prime_cutoff deve ser ≥ 1000, recebeu {prime_cutoff}")
    ps = primes_up_to(prime_cutoff).astype(np.float64)
    log_terms = np.log1p(rho / (ps - 1)) + rho * np.log1p(-1.0 / ps)
    log_value = fsum_real(log_terms) - float(gammaln(rho))
    c = float(prime_cutoff)
    tail = (2 * rho + rho * rho) * 1.5 / ((c - 1) * math.log(c))
    return math.exp(log_value), tail


# ---------------------------------------------------------------------------
# Identidades de convolução e somação parcial
# ---------------------------------------------------------------------------

def lambda_convolution_identity(spec: MultFnSpec, x: int) -> float:
    """|N_g(x) - Σ_{p^l≤x} Λ(p^l) g_d M_g(x/p^l)|, g_d = g(p) (forte) ou g(p^l) (completa)."""
    if x > 10**6:
        raise SieveConfigError(f"identidade de convolução limitada a x ≤ 10^6, recebeu {x}")
    powers, bases, exps = prime_powers_up_to(x)
    g_d = spec.power_values(spec.prime_values(bases), exps)
    quotients = x // powers
    table = sieve_table(spec, np.append(quotients, x))
    M = table.M_g[np.searchsorted(table.checkpoints, quotients)]
    rhs = fsum_complex(np.log(bases.astype(np.float64)) * g_d * M)
    residual = abs(complex(table.N_g[-1]) - rhs)
    logger.debug(f"Identidade N_g = Λg*M_g para {spec.label} em x={x}: resíduo {residual:.3e}")
    return residual


def short_interval_ratio(spec: MultFnSpec, a: int, c: float) -> float:
    """(M_{|g|}(ca) - M_{|g|}(a)) / M_{|g|}(a)."""
    return float(short_interval_profile(spec, [a], c)[0])


def short_interval_profile(spec: MultFnSpec, a_grid, c: float) -> np.ndarray:
    """short_interval_ratio ao longo de uma grade de a, num único crivo."""
    a_grid = np.asarray(a_grid, dtype=np.int64)
    if np.any(a_grid < 10**3) or not 1 < c <= 2:
        raise SieveConfigError(f"exige a ≥ 1000 e c em (1, 2] (c={c})")
    upper = np.floor(c * a_grid).astype(np.int64)
    table = sieve_table(spec, np.concatenate([a_grid, upper]))
    lo = table.M_abs[np.searchsorted(table.checkpoints, a_grid)]
    hi = table.M_abs[np.searchsorted(table.checkpoints, upper)]
    if np.any(lo == 0):
        raise DegenerateInputError(f"M_|g|(a) = 0 para {spec.label}")
    return (hi - lo) / lo


def mangoldt_weighted_partials(spec: MultFnSpec, v_max: float, v_step: float,
                               x_max: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """
    Σ_{n≤e^v} g(n)Λ(n) para v = 0, v_step, ..., v_max.

    Returns:
        (grade v, somas complexas)
    """
    x_max = x_max or settings.x_max
    if math.exp(v_max) > x_max * (1 + 1e-12):
        raise SieveConfigError(f"e^v_max = {math.exp(v_max):.4g} além de x_max = {x_max}")
    v_grid = np.arange(0.0, v_max + 0.5 * v_step, v_step)
    v_grid[-1] = min(v_grid[-1], v_max)
    return v_grid, _lambda_partials(spec, v_grid, _lambda_reach(v_grid))


def mangoldt_step_function(spec: MultFnSpec, N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Saltos de A(u) = Σ_{n≤u} g(n)Λ(n) até N.

    Returns:
        (potências de primo n_k ≤ N, coeficientes g(n_k)Λ(n_k), A(n_k))
    """
    if N > settings.x_max:
        raise SieveConfigError(f"N = {N} além de x_max = {settings.x_max}")
    powers, bases, exps = prime_powers_up_to(N)
    coeffs = np.log(bases.astype(np.float64)) * spec.power_values(spec.prime_values(bases), exps)
    partials = cumulative_fsum(coeffs, np.arange(1, len(powers) + 1))
    return powers, coeffs, partials


class IdentityCheck(BaseModel):
    """Comparação entre os dois lados de uma identidade exata."""
    name: str
    x: int
    lhs: complex
    rhs: complex
    scale: float
    relative_residual: float


def quadrature_checkpoints(x: int, dense_until: int = 2000, points: int = 400) -> np.ndarray:
    """Todos os inteiros até dense_until e uma grade geométrica até x."""
    dense = np.arange(1, min(x, dense_until) + 1, dtype=np.int64)
    if x <= dense_until:
        return dense
    geo = np.unique(np.round(np.geomspace(dense_until, x, points)).astype(np.int64))
    return np.unique(np.concatenate([dense, geo, [x]]))


def step_integral(cps: np.ndarray, values: np.ndarray, kernel: str) -> complex:
    """
    ∫_1^x F(u) w(u) du para F degrau conhecido nos checkpoints.

    kernel "u2": w = 1/u²; "u1": w = 1/u. Intervalos unitários são exatos,
    os demais usam a média dos extremos.
    """
    a, b = cps[:-1].astype(np.float64), cps[1:].astype(np.float64)
    weights = (1 / a - 1 / b) if kernel == "u2" else np.log(b / a)
    unit = (b - a) == 1
    level = np.where(unit, values[:-1], 0.5 * (values[:-1] + values[1:]))
    return fsum_complex(level * weights)


def partial_summation_residual(spec: MultFnSpec, x: int, table: SummatoryTable | None = None) -> IdentityCheck:
    """L_g(x) contra M_g(x)/x + ∫_1^x M_g(u)/u² du, relativo a L_{|g|}(x)."""
    table = table or sieve_table(spec, quadrature_checkpoints(x))
    i = table.index(x)
    cps = table.checkpoints[: i + 1]
    rhs = complex(table.M_g[i]) / x + step_integral(cps, table.M_g[: i + 1], "u2")
    lhs = complex(table.L_g[i])
    scale = float(table.L_abs[i])
    return IdentityCheck(name="partial-summation", x=x, lhs=lhs, rhs=rhs, scale=scale,
                         relative_residual=abs(lhs - rhs) / scale)


def delta_identity_residual(spec: MultFnSpec, t: int, table: SummatoryTable | None = None) -> IdentityCheck:
    """M_g(t) log t - N_g(t) = Δ_g(t) contra ∫_1^t M_g(v)/v dv."""
    table = table or sieve_table(spec, quadrature_checkpoints(t))
    i = table.index(t)
    cps = table.checkpoints[: i + 1]
    log_t = math.log(t)
    lhs = complex(table.M_g[i]) * log_t - complex(table.N_g[i])
    rhs = step_integral(cps, table.M_g[: i + 1], "u1")
    scale = float(table.M_abs[i]) * log_t - float(table.N_abs[i])
    return IdentityCheck(name="delta-identity", x=t, lhs=lhs, rhs=rhs, scale=scale,
                         relative_residual=abs(lhs - rhs) / scale)
