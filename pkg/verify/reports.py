"""
Relatórios de verificação e a política de constantes implícitas.

Constantes "≪" não são recuperáveis: a razão é ajustada no menor x da grade e
o veredito exige que ela nunca passe de fit_factor vezes o ajuste.
"""
from __future__ import annotations

import csv
import json
import math
from pathlib import Path
from typing import Any, Literal

import numpy as np
from pydantic import BaseModel, Field

from arith.mult_fn import MultFnSpec
from arith.primes import p_over_phi
from config.settings import settings

SCHEMA_VERSION = 1
# |M_g/M_f - limite| aceito no maior x
LIMIT_TOLERANCE = 0.05

Mode = Literal["upper", "lower", "band", "limit"]


class SeriesPoint(BaseModel):
    x: int
    lhs: float
    rhs: float
    ratio: float | None


class TheoremReport(BaseModel):
    schema_version: int = SCHEMA_VERSION
    theorem: str
    label: str
    spec_hash: str
    mode: Mode
    grid: list[int]
    series: list[SeriesPoint]
    max_ratio: float | None
    min_ratio: float | None
    trend_slope: float
    fit_constant: float | None
    tolerance: float
    band: tuple[float, float] | None = None
    verdict: bool
    notes: dict[str, Any] = Field(default_factory=dict)
    wall_time: float = Field(0.0, exclude=True)

    def ratios(self) -> np.ndarray:
        return np.array([p.ratio for p in self.series if p.ratio is not None], dtype=np.float64)

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2), encoding="utf-8")
        return path

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["schema_version", "x", "lhs", "rhs", "ratio"])
            for p in self.series:
                writer.writerow([SCHEMA_VERSION, p.x, repr(p.lhs), repr(p.rhs),
                                 "" if p.ratio is None else repr(p.ratio)])
        return path


class AsymptoticReport(BaseModel):
    """Resíduo medido contra o orçamento de resto em cada x."""
    schema_version: int = SCHEMA_VERSION
    theorem: str
    label: str
    spec_hash: str
    grid: list[int]
    A: list[complex]
    measured: list[complex]
    residual: list[float]
    budget: list[float]
    components: list[dict[str, float]]
    X: list[float] | None = None
    F: list[float] | None = None
    R1: list[float] | None = None
    R2: list[float] | None = None
    fit_constant: float
    max_excess: float
    budget_monotone: bool
    verdict: bool

    def to_json(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.model_dump_json(indent=2), encoding="utf-8")
        return path

    def to_csv(self, path: str | Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["schema_version", "x", "Re A", "Im A", "residual", "budget"])
            for x, a, r, b in zip(self.grid, self.A, self.residual, self.budget):
                writer.writerow([SCHEMA_VERSION, x, repr(a.real), repr(a.imag), repr(r), repr(b)])
        return path


def default_grid(extended: bool = False) -> list[int]:
    """{10⁴, 10^{4.5}, ..., 10⁷} (até 10⁸ no modo estendido)."""
    top = 8.0 if extended else 7.0
    return [int(round(10**e)) for e in np.arange(4.0, top + 0.25, 0.5)]


def exceptional_p_over_phi(spec: MultFnSpec, x: int) -> float:
    """P/φ(P) com P o produto dos primos de S em [2, x]."""
    return p_over_phi([p for p in spec.partition.exceptional if p <= x])


def trend_slope(xs, ratios) -> float:
    """Inclinação de mínimos quadrados da razão contra log x."""
    xs = np.asarray(xs, dtype=np.float64)
    ratios = np.asarray(ratios, dtype=np.float64)
    keep = np.isfinite(ratios)
    if keep.sum() < 2:
        return 0.0
    return float(np.polyfit(np.log(xs[keep]), ratios[keep], 1)[0])


def _series(xs, lhs, rhs) -> list[SeriesPoint]:
    out = []
    for x, l, r in zip(xs, lhs, rhs):
        ratio = float(l) / float(r) if r > 0 and math.isfinite(float(r)) else None
        out.append(SeriesPoint(x=int(x), lhs=float(l), rhs=float(r), ratio=ratio))
    return out


def build_report(
    theorem: str,
    spec: MultFnSpec,
    xs,
    lhs,
    rhs,
    mode: Mode = "upper",
    band: tuple[float, float] | None = None,
    tolerance: float | None = None,
    notes: dict[str, Any] | None = None,
) -> TheoremReport:
    """
    Monta o relatório e decide o veredito a partir da série.

    upper: razão ≤ fator·ajuste; lower: razão ≥ ajuste/fator e positiva;
    band: razão dentro de band; limit: última razão ≤ tolerance.
    """
    factor = settings.fit_factor if tolerance is None else tolerance
    series = _series(xs, lhs, rhs)
    ratios = np.array([np.nan if p.ratio is None else p.ratio for p in series], dtype=np.float64)
    defined = ratios[np.isfinite(ratios)]
    fit = None
    if mode == "upper":
        fit = max(float(ratios[0]) if np.isfinite(ratios[0]) else 0.0, settings.fit_floor)
        verdict = bool(len(defined)) and bool(np.all(defined <= factor * fit))
    elif mode == "lower":
        fit = float(ratios[0]) if np.isfinite(ratios[0]) else 0.0
        verdict = fit > 0 and bool(np.all(defined >= fit / factor)) and len(defined) == len(ratios)
    elif mode == "band":
        lo, hi = band
        verdict = len(defined) == len(ratios) and bool(np.all((defined >= lo) & (defined <= hi)))
    else:
        factor = LIMIT_TOLERANCE if tolerance is None else tolerance
        verdict = bool(len(defined)) and float(defined[-1]) <= factor
    return TheoremReport(
        theorem=theorem, label=spec.label, spec_hash=spec.spec_hash, mode=mode,
        grid=[int(x) for x in xs], series=series,
        max_ratio=float(defined.max()) if len(defined) else None,
        min_ratio=float(defined.min()) if len(defined) else None,
        trend_slope=trend_slope(xs, ratios), fit_constant=fit, tolerance=factor,
        band=band, verdict=verdict, notes=notes or {},
    )


def asymptotic_verdict(residual, budget) -> tuple[float, float, bool]:
    """(constante ajustada no menor x, excesso máximo, veredito) para resíduo ≤ C·ℛ."""
    residual = np.asarray(residual, dtype=np.float64)
    budget = np.asarray(budget, dtype=np.float64)
    if np.all(residual == 0):
        return 0.0, 0.0, True
    scaled = residual / budget
    fit = max(float(scaled[0]), settings.fit_floor)
    excess = float(np.max(scaled) / fit)
    return fit, excess, excess <= settings.fit_factor


def write_series_json(path: str | Path, payload: dict[str, Any]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, sort_keys=True, default=str), encoding="utf-8")
    return path
