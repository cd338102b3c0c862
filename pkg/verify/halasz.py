"""
Verificadores das cotas superiores e da fórmula assintótica para M_g/M_{|g|}.
"""
from __future__ import annotations

import math
import time

import numpy as np
from pydantic import BaseModel

from arith.compensated import fsum_complex, fsum_real
from arith.errors import RefusalError
from arith.mult_fn import FunctionClass, MultFnSpec, is_non_decreasing, validate_class_membership
from arith.prime_analysis import c_coefficients, gamma0_values, rho_min
from arith.primes import primes_up_to
from config.logger import setup_logger
from memory.table_cache import load_or_sieve

from .reports import AsymptoticReport, TheoremReport, asymptotic_verdict, build_report, exceptional_p_over_phi

logger = setup_logger(__name__)


def require_class(spec: MultFnSpec, x: int, klass: FunctionClass) -> None:
    """Recusa com a primeira condição violada de klass até x."""
    report = validate_class_membership(spec, x, klass)
    if not report.passed:
        failed = report.failed()[0]
        raise RefusalError(f"{klass.value} {failed.condition})", failed.detail)


def class_prime_sums(spec: MultFnSpec, x: int) -> dict[str, np.ndarray | complex]:
    """
    Somas sobre p ≤ x usadas pelos verificadores.

    Por classe: Σ (1-|g̃|)/p e Σ (|g|-Re g)/p; globais: Σ (g-|g|)/p.
    """
    ps = primes_up_to(x)
    values, classes = spec.prime_data(ps)
    inv = 1.0 / ps.astype(np.float64)
    mod = np.abs(values)
    g_tilde = np.abs(spec.normalized(values, classes))
    m = spec.m
    mass = np.array([fsum_real(((1 - g_tilde) * inv)[classes == j]) for j in range(1, m + 1)])
    angular = np.array([fsum_real(((mod - values.real) * inv)[classes == j]) for j in range(1, m + 1)])
    return {"mass": mass, "angular": angular, "A_log": fsum_complex((values - mod) * inv)}


def _table(spec: MultFnSpec, xs: list[int]):
    return load_or_sieve(spec, xs)


def verify_upper_general(spec: MultFnSpec, x_grid, D_exp: float | None = None) -> TheoremReport:
    """
    |M_g(x)| contra (B²/δ)(P/φ(P)) M_{|g|}(x) exp(-Σ_j B_j(ρ_{E_j} - Σ_{E_j}(1-|g̃(p)|)/p)).

    Raises:
        RefusalError: spec fora de 𝒞
    """
    start = time.perf_counter()
    xs = sorted(int(x) for x in x_grid)
    require_class(spec, xs[-1], FunctionClass.C)
    table = _table(spec, xs)
    Bj = spec.bounds
    lhs, rhs, exponents = [], [], []
    for i, x in enumerate(xs):
        rho = rho_min(spec, x, D_exp).minima
        mass = class_prime_sums(spec, x)["mass"]
        exponent = float(np.sum(Bj * (rho - mass)))
        scale = spec.B**2 / spec.delta * exceptional_p_over_phi(spec, x)
        lhs.append(abs(complex(table.M_g[i])))
        rhs.append(scale * float(table.M_abs[i]) * math.exp(-exponent))
        exponents.append(exponent)
    report = build_report("upper-general", spec, xs, lhs, rhs, notes={"exponent": exponents})
    report.wall_time = time.perf_counter() - start
    _log(report)
    return report


def verify_upper_explicit(spec: MultFnSpec, x_grid) -> TheoremReport:
    """
    |M_g(x)| contra (B²/δ)(P/φ(P)) M_{|g|}(x) exp(-Σ_j c_j Σ_{E_j}(|g(p)|-Re g(p))/p).

    Raises:
        RefusalError: spec fora de 𝒞_b
    """
    start = time.perf_counter()
    xs = sorted(int(x) for x in x_grid)
    require_class(spec, xs[-1], FunctionClass.CB)
    table = _table(spec, xs)
    lhs, rhs, exponents = [], [], []
    for i, x in enumerate(xs):
        c = c_coefficients(spec, is_non_decreasing(spec, x))
        exponent = float(np.sum(c * class_prime_sums(spec, x)["angular"]))
        scale = spec.B**2 / spec.delta * exceptional_p_over_phi(spec, x)
        lhs.append(abs(complex(table.M_g[i])))
        rhs.append(scale * float(table.M_abs[i]) * math.exp(-exponent))
        exponents.append(exponent)
    report = build_report("upper-explicit", spec, xs, lhs, rhs, notes={"exponent": exponents})
    report.wall_time = time.perf_counter() - start
    _log(report)
    return report


def d1_parameter(B: float, delta: float, eta: float) -> float:
    """d_1 = √η/δ se Bη ≤ δ ≤ √η, senão 1."""
    root = math.sqrt(eta)
    return root / delta if B * eta <= delta <= root else 1.0


def _decay(d1: float, eta: float, k: float = 1.0) -> float:
    """e^{-k d_1/√η}, nulo para η = 0."""
    return math.exp(-k * d1 / math.sqrt(eta)) if eta > 0 else 0.0


def asymptotic_budget(spec: MultFnSpec, x: int, A_abs: float) -> tuple[float, dict[str, float]]:
    """ℛ(x) e seus componentes."""
    eta = max(c.eta for c in spec.partition.classes)
    delta, B = spec.delta, spec.B
    beta = min(c.beta for c in spec.partition.classes)
    gamma0 = float(gamma0_values(spec).min())
    d1 = d1_parameter(B, delta, eta)
    L = math.log(x)
    E = _decay(d1, eta)
    ppp = exceptional_p_over_phi(spec, x)
    first = math.sqrt(eta) * A_abs * (d1 + L ** (-delta / 3) + delta**-0.5 * E)
    second = A_abs ** (gamma0 / (4 * (1 + gamma0))) * (L ** (-delta * beta**3 / 2) + E / delta)
    budget = B**2 / delta * ppp * (first + second)
    return budget, {"eta": eta, "d1": d1, "gamma0": gamma0, "delta": delta, "B": B,
                    "beta": beta, "p_over_phi": ppp, "first": first, "second": second}


def termwise_nonincreasing(components: list[dict[str, float]], keys=("first", "second")) -> bool:
    return all(
        all(b[k] <= a[k] * (1 + 1e-12) for k in keys)
        for a, b in zip(components, components[1:])
    )


def verify_asymptotic(spec: MultFnSpec, x_grid) -> AsymptoticReport:
    """
    M_g/M_{|g|} contra A = exp(Σ_{p≤x}(g(p)-|g(p)|)/p) com orçamento ℛ.

    Raises:
        RefusalError: spec fora de 𝒞_a ou η ≥ 1
    """
    xs = sorted(int(x) for x in x_grid)
    eta = max(c.eta for c in spec.partition.classes)
    if eta >= 1:
        raise RefusalError("η < 1", f"η = {eta}")
    require_class(spec, xs[-1], FunctionClass.CA)
    table = _table(spec, xs)
    A_vals, measured, residual, budget, components = [], [], [], [], []
    for i, x in enumerate(xs):
        A = complex(np.exp(class_prime_sums(spec, x)["A_log"]))
        ratio = complex(table.M_g[i]) / float(table.M_abs[i])
        r, parts = asymptotic_budget(spec, x, abs(A))
        A_vals.append(A)
        measured.append(ratio)
        residual.append(abs(ratio - A))
        budget.append(r)
        components.append(parts)
    fit, excess, verdict = asymptotic_verdict(residual, budget)
    report = AsymptoticReport(
        theorem="asymptotic", label=spec.label, spec_hash=spec.spec_hash, grid=xs,
        A=A_vals, measured=measured, residual=residual, budget=budget, components=components,
        fit_constant=fit, max_excess=excess, budget_monotone=termwise_nonincreasing(components),
        verdict=verdict,
    )
    status = "✅" if verdict else "❌"
    logger.info(f"{status} asymptotic {spec.label}: excesso máximo {excess:.3f} (ajuste {fit:.3g})")
    return report


class RhProfile(BaseModel):
    A: complex
    lam: float
    grid: list[int]
    values: list[float]
    maximum: float


def r_h_lambda(spec: MultFnSpec, A: complex, lam: float, x_grid) -> RhProfile:
    """R_h(λ) = max_t |M_h(t)|/M_{|g|}(t)·log^λ t com h = g - A|g|."""
    xs = sorted(int(x) for x in x_grid)
    table = _table(spec, xs)
    M_h = table.M_g - complex(A) * table.M_abs
    values = (np.abs(M_h) / table.M_abs * np.log(np.asarray(xs, dtype=np.float64)) ** lam).tolist()
    return RhProfile(A=A, lam=lam, grid=xs, values=values, maximum=max(values))


def _log(report: TheoremReport) -> None:
    status = "✅" if report.verdict else "❌"
    logger.info(f"{status} {report.theorem} {report.label}: razão máx {report.max_ratio}, "
                f"ajuste {report.fit_constant}, inclinação {report.trend_slope:.4f}")
