"""
Modelo declarativo de funções multiplicativas e partições de primos.

Uma MultFnSpec descreve g pelos seus valores nos primos (PrimeRule), pela regra
de extensão às potências (forte ou completa) e por uma partição E_1..E_m ∪ S
com os parâmetros (δ_j, B_j, φ_j, β_j, η_j) de cada classe.
"""
from __future__ import annotations

import hashlib
import math
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from enum import Enum
from pathlib import Path
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, computed_field, model_validator

from config.logger import setup_logger
from config.settings import settings

from .errors import ClassificationError, SpecError
from .primes import factorize, primes_up_to

logger = setup_logger(__name__)

# Marcador de classe para primos de S
EXCEPTIONAL = 0

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


class RuleKind(str, Enum):
    CONSTANT = "constant-per-class"
    ARCHIMEDEAN = "archimedean"
    CHARACTER = "character"
    LIOUVILLE = "liouville"
    RANDOM = "random"


class Extension(str, Enum):
    STRONG = "strong"
    COMPLETE = "complete"


class PartitionKind(str, Enum):
    TRIVIAL = "trivial"
    SECTOR = "sector"
    RESIDUE = "residue"
    FRACTIONAL = "fractional"


class FunctionClass(str, Enum):
    C = "C"
    CA = "C_a"
    CB = "C_b"


def _splitmix64(z: np.ndarray) -> np.ndarray:
    z = z + _GOLDEN
    z = (z ^ (z >> np.uint64(30))) * _MIX1
    z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def _uniform(h: np.ndarray) -> np.ndarray:
    return (h >> np.uint64(11)).astype(np.float64) * 2.0**-53


def principal_arg(values: np.ndarray) -> np.ndarray:
    """Argumento em (-π, π] (corte no semieixo real negativo)."""
    ang = np.angle(values)
    return np.where(ang <= -math.pi, math.pi, ang)


def circular_distance(a: np.ndarray, b: float) -> np.ndarray:
    d = np.abs(np.mod(a - b + math.pi, 2 * math.pi) - math.pi)
    return d


class PrimeRule(BaseModel):
    """Valores de g nos primos."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: RuleKind
    # constant-per-class: um valor por classe
    values: list[complex] = Field(default_factory=lambda: [1 + 0j])
    # archimedean: p^{iα}
    alpha: float = 0.0
    # character: tabela de valores em ℤ/qℤ
    modulus: int = Field(1, ge=1)
    table: list[complex] = Field(default_factory=list)
    # liouville: valor ±1 em todo primo
    sign: Literal[-1, 1] = -1
    # random: módulo em [δ, B], argumento em arg_center ± arg_spread
    radius: tuple[float, float] = (1.0, 1.0)
    arg_center: float = 0.0
    arg_spread: float = Field(0.0, ge=0.0)
    seed: int = Field(0, ge=0, lt=2**64)
    # valores explícitos por primo (prevalecem sobre a regra e sobre S)
    overrides: dict[int, complex] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_parameters(self) -> PrimeRule:
        if self.kind is RuleKind.CHARACTER:
            q = self.modulus
            if len(self.table) != q:
                raise ValueError(f"tabela do caractere precisa de {q} valores, recebeu {len(self.table)}")
            order = sum(1 for r in range(1, q + 1) if math.gcd(r, q) == 1)
            for r, z in enumerate(self.table):
                if math.gcd(r, q) != 1:
                    if abs(z) > 1e-12:
                        raise ValueError(f"caractere deve anular-se em r={r} (mdc com {q} > 1)")
                elif abs(z**order - 1) > 1e-9:
                    raise ValueError(f"valor em r={r} não é raiz da unidade de ordem {order}")
        if self.kind is RuleKind.RANDOM:
            lo, hi = self.radius
            if not 0 < lo <= hi:
                raise ValueError(f"intervalo de módulo inválido: {self.radius}")
        return self

    def evaluate(self, primes: np.ndarray, classes: np.ndarray | None = None) -> np.ndarray:
        """Valores da regra nos primos dados (sem S nem overrides)."""
        primes = np.asarray(primes, dtype=np.int64)
        match self.kind:
            case RuleKind.CONSTANT:
                if classes is None:
                    raise ValueError("regra constante por classe exige a classificação")
                table = np.concatenate([[0j], np.asarray(self.values, dtype=np.complex128)])
                return table[classes]
            case RuleKind.ARCHIMEDEAN:
                return np.exp(1j * self.alpha * np.log(primes.astype(np.float64)))
            case RuleKind.CHARACTER:
                return np.asarray(self.table, dtype=np.complex128)[primes % self.modulus]
            case RuleKind.LIOUVILLE:
                return np.full(len(primes), complex(self.sign), dtype=np.complex128)
            case RuleKind.RANDOM:
                key = primes.astype(np.uint64) ^ np.uint64(self.seed)
                h1 = _splitmix64(key)
                h2 = _splitmix64(h1)
                lo, hi = self.radius
                r = lo + (hi - lo) * _uniform(h1)
                theta = self.arg_center - self.arg_spread + 2 * self.arg_spread * _uniform(h2)
                return r * np.exp(1j * theta)
        raise ValueError(f"regra desconhecida: {self.kind}")


class ClassParams(BaseModel):
    """Parâmetros (δ_j, B_j, φ_j, β_j, η_j) de uma classe E_j."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    delta: float = Field(gt=0)
    B: float = Field(gt=0)
    phi: float = 0.0
    beta: float = math.pi / 2
    eta: float = Field(0.0, ge=0.0)

    @model_validator(mode="after")
    def _check_bounds(self) -> ClassParams:
        if self.delta > self.B:
            raise ValueError(f"δ={self.delta} maior que B={self.B}")
        if not -math.pi <= self.phi < math.pi:
            raise ValueError(f"φ={self.phi} fora de [-π, π)")
        if not 0 < self.beta < math.pi:
            raise ValueError(f"β={self.beta} fora de (0, π)")
        return self


class PrimePartition(BaseModel):
    """Classificador total dos primos em E_1..E_m ∪ S."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    kind: PartitionKind = PartitionKind.TRIVIAL
    classes: list[ClassParams] = Field(min_length=1)
    # sector: intervalos (a, b] de arg g(p), em ordem, cobrindo (-π, π]
    sectors: list[tuple[float, float]] = Field(default_factory=list)
    # residue: resíduos mod q de cada classe
    modulus: int = Field(1, ge=1)
    residues: list[list[int]] = Field(default_factory=list)
    # fractional: {τ log p / 2π} cortado em (0, c_1], (c_1, c_2], ..., (c_{m-1}, 1]
    tau: float = 2 * math.pi
    cuts: list[float] = Field(default_factory=list)
    exceptional: list[int] = Field(default_factory=list)

    @property
    def m(self) -> int:
        return len(self.classes)

    @model_validator(mode="after")
    def _check_totality(self) -> PrimePartition:
        m = self.m
        for p in self.exceptional:
            if factorize(p) != [(p, 1)]:
                raise ValueError(f"S contém não-primo: {p}")
        match self.kind:
            case PartitionKind.TRIVIAL:
                if m != 1:
                    raise ValueError("partição trivial tem exatamente uma classe")
            case PartitionKind.SECTOR:
                if len(self.sectors) != m:
                    raise ValueError(f"{m} classes exigem {m} setores")
                edge = -math.pi
                for a, b in self.sectors:
                    if not math.isclose(a, edge, abs_tol=1e-12) or b <= a:
                        raise ValueError(f"setores não cobrem (-π, π] de forma contígua em {a}")
                    edge = b
                if not math.isclose(edge, math.pi, abs_tol=1e-12):
                    raise ValueError("setores não terminam em π")
            case PartitionKind.RESIDUE:
                q = self.modulus
                if len(self.residues) != m:
                    raise ValueError(f"{m} classes exigem {m} listas de resíduos")
                seen: set[int] = set()
                for rs in self.residues:
                    for r in rs:
                        if r % q in seen:
                            raise ValueError(f"resíduo {r} mod {q} repetido")
                        seen.add(r % q)
                missing = [r for r in range(q) if math.gcd(r, q) == 1 and r not in seen]
                if missing:
                    raise ValueError(f"resíduos coprimos sem classe: {missing}")
                for p, _ in factorize(q) if q > 1 else []:
                    if p not in self.exceptional and p % q not in seen:
                        raise ValueError(f"primo {p} divide {q} e não está em S nem em classe")
            case PartitionKind.FRACTIONAL:
                if len(self.cuts) != m - 1:
                    raise ValueError(f"{m} classes exigem {m - 1} cortes")
                edges = [0.0, *self.cuts, 1.0]
                if any(b <= a for a, b in zip(edges, edges[1:])):
                    raise ValueError("cortes devem ser estritamente crescentes em (0, 1)")
        return self

    def classify_many(self, primes: np.ndarray, values: np.ndarray | None = None) -> np.ndarray:
        """Índice de classe 1..m de cada primo, EXCEPTIONAL para S."""
        primes = np.asarray(primes, dtype=np.int64)
        match self.kind:
            case PartitionKind.TRIVIAL:
                out = np.ones(len(primes), dtype=np.int64)
            case PartitionKind.RESIDUE:
                lut = np.full(self.modulus, -1, dtype=np.int64)
                for j, rs in enumerate(self.residues, start=1):
                    lut[np.asarray(rs, dtype=np.int64) % self.modulus] = j
                out = lut[primes % self.modulus]
            case PartitionKind.FRACTIONAL:
                frac = np.mod(self.tau * np.log(primes.astype(np.float64)) / (2 * math.pi), 1.0)
                frac = np.where(frac == 0.0, 1.0, frac)
                out = np.searchsorted(np.asarray(self.cuts), frac, side="left").astype(np.int64) + 1
            case PartitionKind.SECTOR:
                if values is None:
                    raise ValueError("partição por setor exige os valores g(p)")
                upper = np.asarray([b for _, b in self.sectors])
                ang = principal_arg(values)
                out = np.minimum(np.searchsorted(upper, ang, side="left"), self.m - 1).astype(np.int64) + 1
        if self.exceptional:
            out[np.isin(primes, self.exceptional)] = EXCEPTIONAL
        if np.any(out < 0):
            bad = int(primes[np.argmax(out < 0)])
            raise ClassificationError(f"primo {bad} não pertence a nenhuma classe")
        return out


class MultFnSpec(BaseModel):
    """Função forte ou completamente multiplicativa dada pelos valores nos primos."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    label: str
    rule: PrimeRule
    extension: Extension = Extension.STRONG
    partition: PrimePartition
    # classes cuja pertinência a CLI valida
    classes: list[FunctionClass] = Field(default_factory=lambda: [FunctionClass.C])

    @model_validator(mode="after")
    def _check_rule_partition(self) -> MultFnSpec:
        if self.rule.kind is RuleKind.CONSTANT:
            if self.partition.kind is PartitionKind.SECTOR:
                raise ValueError("regra constante por classe não combina com partição por setor")
            if len(self.rule.values) != self.partition.m:
                raise ValueError(f"regra constante precisa de {self.partition.m} valores")
        return self

    @property
    def m(self) -> int:
        return self.partition.m

    @property
    def deltas(self) -> np.ndarray:
        return np.array([c.delta for c in self.partition.classes])

    @property
    def bounds(self) -> np.ndarray:
        return np.array([c.B for c in self.partition.classes])

    @property
    def B(self) -> float:
        return float(self.bounds.max())

    @property
    def delta(self) -> float:
        return float(self.deltas.min())

    @property
    def is_complete(self) -> bool:
        return self.extension is Extension.COMPLETE

    @property
    def spec_hash(self) -> str:
        return hashlib.sha256(self.model_dump_json().encode()).hexdigest()[:16]

    def prime_data(self, primes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(g(p), classe de p) para um array de primos."""
        primes = np.asarray(primes, dtype=np.int64)
        if self.partition.kind is PartitionKind.SECTOR:
            values = self.rule.evaluate(primes)
            classes = self.partition.classify_many(primes, values)
        else:
            classes = self.partition.classify_many(primes)
            values = self.rule.evaluate(primes, classes)
        values = np.array(values, dtype=np.complex128)
        values[classes == EXCEPTIONAL] = 0.0
        for p, v in self.rule.overrides.items():
            values[primes == p] = v
        return values, classes

    def prime_values(self, primes: np.ndarray) -> np.ndarray:
        return self.prime_data(primes)[0]

    def normalized(self, values: np.ndarray, classes: np.ndarray) -> np.ndarray:
        """g̃(p) = g(p)/B_j; primos de S divididos por B."""
        scale = np.concatenate([[self.B], self.bounds])[classes]
        return values / scale

    def power_values(self, prime_values: np.ndarray, exponents: np.ndarray) -> np.ndarray:
        """g(p^k) a partir de g(p) conforme a extensão."""
        if self.is_complete:
            return prime_values ** exponents
        return np.asarray(prime_values, dtype=np.complex128).copy()


def value_at(spec: MultFnSpec, n: int, factorization: list[tuple[int, int]]) -> complex:
    """Avalia a extensão multiplicativa em n = Π p^k."""
    if not factorization:
        return 1 + 0j
    ps = np.array([p for p, _ in factorization], dtype=np.int64)
    vals = spec.prime_values(ps)
    result = 1 + 0j
    for (_, k), v in zip(factorization, vals):
        v = complex(v)
        result *= v**k if spec.is_complete else v
    return result


def classify(partition: PrimePartition, p: int, value: complex | None = None) -> int:
    """Classe de p (1..m) ou EXCEPTIONAL."""
    vals = None if value is None else np.array([value], dtype=np.complex128)
    return int(partition.classify_many(np.array([p], dtype=np.int64), vals)[0])


# ---------------------------------------------------------------------------
# Validação de pertinência às classes 𝒞, 𝒞_a, 𝒞_b
# ---------------------------------------------------------------------------

class ConditionResult(BaseModel):
    condition: str
    passed: bool
    first_violation: int | None = None
    detail: str = ""


class ValidationReport(BaseModel):
    label: str
    function_class: FunctionClass
    x_max: int
    conditions: list[ConditionResult]

    @computed_field
    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    def failed(self) -> list[ConditionResult]:
        return [c for c in self.conditions if not c.passed]


def _first(primes: np.ndarray, mask: np.ndarray) -> int | None:
    return int(primes[np.argmax(mask)]) if mask.any() else None


def _check_modulus(spec: MultFnSpec, primes, values, classes, tol) -> ConditionResult:
    mod = np.abs(values)
    lo = np.concatenate([[0.0], spec.deltas])[classes]
    hi = np.concatenate([[math.inf], spec.bounds])[classes]
    in_class = classes != EXCEPTIONAL
    bad = in_class & ((mod < lo - tol) | (mod > hi + tol))
    bad |= ~in_class & (mod >= spec.delta)
    first = _first(primes, bad)
    detail = "" if first is None else f"|g({first})|={abs(values[primes == first][0]):.6g}"
    return ConditionResult(condition="i", passed=first is None, first_violation=first, detail=detail)


S_GROWTH_GRID_POINTS = 64


def _check_exceptional_growth(spec: MultFnSpec, x_max: int) -> ConditionResult:
    """
    log P_x ≤ r·log x, P_x = ∏_{p ∈ S, p ≤ x} p, numa grade de x em [100, x_max].

    A grade é geométrica e inclui cada p ∈ S acima de 100: entre dois primos de S
    o quociente só decresce, então o máximo cai em x = 100 ou num desses saltos.
    """
    r = settings.s_growth_exponent
    s_primes = np.array(sorted(q for q in spec.partition.exceptional if q <= x_max), dtype=np.int64)
    xs = np.geomspace(100, x_max, S_GROWTH_GRID_POINTS).astype(np.int64)
    xs = np.unique(np.concatenate([[100, x_max], xs, s_primes[s_primes >= 100]]))
    log_prefix = np.concatenate([[0.0], np.cumsum(np.log(s_primes.astype(np.float64)))])
    log_P = log_prefix[np.searchsorted(s_primes, xs, side="right")]
    ratios = log_P / np.log(xs.astype(np.float64))
    worst = int(np.argmax(ratios))
    detail = f"máx log P_x/log x = {ratios[worst]:.4f} em x={xs[worst]} ({len(xs)} pontos)"
    bad = ratios >= r
    if np.any(bad):
        x = int(xs[np.argmax(bad)])
        return ConditionResult(condition="ii", passed=False, first_violation=x,
                               detail=f"log P_x/log x ≥ {r} em x={x}; {detail}")
    return ConditionResult(condition="ii", passed=True, detail=detail)


def _check_small_argument(spec, primes, values, classes, tol) -> ConditionResult:
    etas = np.concatenate([[math.inf], [c.eta for c in spec.partition.classes]])[classes]
    bad = (classes != EXCEPTIONAL) & (np.abs(principal_arg(values)) > etas + tol)
    first = _first(primes, bad)
    return ConditionResult(condition="iii", passed=first is None, first_violation=first)


def _check_sector_avoidance(spec, primes, values, classes, tol) -> ConditionResult:
    ang = principal_arg(values)
    bad = np.zeros(len(primes), dtype=bool)
    for j, c in enumerate(spec.partition.classes, start=1):
        sel = classes == j
        bad[sel] = circular_distance(ang[sel], c.phi) < c.beta - tol
    first = _first(primes, bad)
    return ConditionResult(condition="v", passed=first is None, first_violation=first)


def _check_good_partition(spec: MultFnSpec, primes, values, classes, x_max) -> ConditionResult:
    if spec.partition.kind is not PartitionKind.SECTOR:
        return ConditionResult(condition="iv", passed=True, detail="boa por construção")
    inv = 1.0 / primes.astype(np.float64)
    low = primes <= math.isqrt(x_max)
    shares_hi = np.array([inv[classes == j].sum() for j in range(1, spec.m + 1)]) / inv.sum()
    shares_lo = np.array([inv[low & (classes == j)].sum() for j in range(1, spec.m + 1)]) / inv[low].sum()
    drift = float(np.max(np.abs(shares_hi - shares_lo)))
    return ConditionResult(condition="iv", passed=drift < 0.1, detail=f"deriva de densidade {drift:.4f}")


def _check_distance_floor(spec: MultFnSpec, x_max: int) -> ConditionResult:
    from .prime_analysis import class_distance_minima

    loglog = math.log(math.log(x_max))
    floor = settings.c6_threshold * math.log(loglog) if loglog > 1 else 0.0
    T = math.log(x_max) ** settings.c6_tau_exponent
    minima = class_distance_minima(spec, x_max, T)
    worst = int(np.argmin(minima))
    passed = bool(minima[worst] >= floor)
    return ConditionResult(condition="vi", passed=passed,
                           detail=f"min_j ρ_E_j={minima[worst]:.4f} (classe {worst + 1}), piso {floor:.4f}")


def validate_class_membership(spec: MultFnSpec, x_max: int, klass: FunctionClass) -> ValidationReport:
    """Confere, primo a primo até x_max, as condições de 𝒞, 𝒞_a ou 𝒞_b."""
    if x_max < 100:
        raise SpecError(f"x_max deve ser ≥ 100, recebeu {x_max}")
    if spec.is_complete and np.any(spec.bounds >= 2):
        raise SpecError("extensão completa exige B_j < 2 em todas as classes")
    klass = FunctionClass(klass)
    tol = settings.modulus_tolerance
    primes = primes_up_to(x_max)
    values, classes = spec.prime_data(primes)

    conditions = [_check_modulus(spec, primes, values, classes, tol), _check_exceptional_growth(spec, x_max)]
    if klass is FunctionClass.CA:
        conditions.append(_check_small_argument(spec, primes, values, classes, tol))
    elif klass is FunctionClass.CB:
        conditions.append(_check_good_partition(spec, primes, values, classes, x_max))
        conditions.append(_check_sector_avoidance(spec, primes, values, classes, tol))
        conditions.append(_check_distance_floor(spec, x_max))

    report = ValidationReport(label=spec.label, function_class=klass, x_max=x_max, conditions=conditions)
    if report.passed:
        logger.info(f"✅ {spec.label} ∈ {klass.value} até {x_max}")
    else:
        names = ", ".join(f"{c.condition})" for c in report.failed())
        logger.warning(f"❌ {spec.label} ∉ {klass.value}: falhou {names}")
    return report


def is_non_decreasing(spec: MultFnSpec, x_max: int) -> bool:
    """(g, E) é não-decrescente: |g(p)| não decresce ao longo de cada E_j."""
    primes = primes_up_to(x_max)
    values, classes = spec.prime_data(primes)
    mod = np.abs(values)
    tol = settings.modulus_tolerance
    for j in range(1, spec.m + 1):
        seq = mod[classes == j]
        if len(seq) > 1 and np.any(np.diff(seq) < -tol):
            return False
    return True


# ---------------------------------------------------------------------------
# Leitura de arquivos de spec (TOML)
# ---------------------------------------------------------------------------

def _line_of_key(text: str, loc: tuple) -> int | None:
    keys = [str(k) for k in loc if isinstance(k, str)]
    for key in reversed(keys):
        pattern = re.compile(rf"^\s*(\[+\s*)?([\w.]*\.)?{re.escape(key)}\s*(=|\]|\.)")
        for number, line in enumerate(text.splitlines(), start=1):
            if pattern.match(line):
                return number
    return None


def parse_spec_text(text: str) -> MultFnSpec:
    """Converte o texto TOML de uma spec; erros carregam o número da linha."""
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        match = re.search(r"line (\d+)", str(exc))
        raise SpecError(f"TOML malformado: {exc}", line=int(match.group(1)) if match else None) from exc
    try:
        return MultFnSpec.model_validate(data)
    except ValidationError as exc:
        err = exc.errors()[0]
        where = ".".join(str(k) for k in err["loc"])
        raise SpecError(f"{where}: {err['msg']}", line=_line_of_key(text, err["loc"])) from exc


def load_spec(path: str | Path) -> MultFnSpec:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise SpecError(f"não foi possível ler {path}: {exc}") from exc
    spec = parse_spec_text(text)
    logger.debug(f"Spec carregada de {path}: {spec.label} ({spec.spec_hash})")
    return spec
