"""
Catálogo de specs nomeadas usadas pela CLI e pela bateria de aceitação
"""
import cmath
import math

from .errors import SpecError
from .mult_fn import (
    ClassParams,
    Extension,
    FunctionClass,
    MultFnSpec,
    PartitionKind,
    PrimePartition,
    PrimeRule,
    RuleKind,
)

HALF_PI = math.pi / 2


def constant_spec(
    value: complex,
    label: str,
    extension: Extension = Extension.STRONG,
    eta: float = 0.0,
    phi: float = 0.0,
    beta: float = HALF_PI,
    exceptional: tuple[int, ...] = (),
    overrides: dict[int, complex] | None = None,
    classes: tuple[FunctionClass, ...] = (FunctionClass.C,),
) -> MultFnSpec:
    """g(p) = value em todo primo fora de S."""
    r = abs(value)
    return MultFnSpec(
        label=label,
        rule=PrimeRule(kind=RuleKind.CONSTANT, values=[value], overrides=overrides or {}),
        extension=extension,
        partition=PrimePartition(
            classes=[ClassParams(delta=r, B=r, phi=phi, beta=beta, eta=eta)],
            exceptional=list(exceptional),
        ),
        classes=list(classes),
    )


def random_spec(
    seed: int,
    radius: tuple[float, float],
    label: str | None = None,
    arg_center: float = 0.0,
    arg_spread: float = 0.0,
    extension: Extension = Extension.STRONG,
    phi: float = 0.0,
    beta: float = HALF_PI,
    classes: tuple[FunctionClass, ...] = (FunctionClass.C,),
) -> MultFnSpec:
    """g(p) = r_p e^{iθ_p} pseudoaleatório e reprodutível pela semente."""
    lo, hi = radius
    return MultFnSpec(
        label=label or f"random-{seed}",
        rule=PrimeRule(kind=RuleKind.RANDOM, radius=radius, arg_center=arg_center,
                       arg_spread=arg_spread, seed=seed),
        extension=extension,
        partition=PrimePartition(classes=[ClassParams(delta=lo, B=hi, phi=phi, beta=beta, eta=arg_spread)]),
        classes=list(classes),
    )


def liouville_spec(extension: Extension = Extension.STRONG) -> MultFnSpec:
    suffix = "" if extension is Extension.STRONG else "-complete"
    return MultFnSpec(
        label=f"liouville{suffix}",
        rule=PrimeRule(kind=RuleKind.LIOUVILLE, sign=-1),
        extension=extension,
        partition=PrimePartition(classes=[ClassParams(delta=1.0, B=1.0, phi=0.0, beta=HALF_PI)]),
        classes=[FunctionClass.C, FunctionClass.CB],
    )


def archimedean_spec(alpha: float = 1.0, eta: float = 0.01) -> MultFnSpec:
    return MultFnSpec(
        label=f"archimedean-{alpha:g}",
        rule=PrimeRule(kind=RuleKind.ARCHIMEDEAN, alpha=alpha),
        partition=PrimePartition(classes=[ClassParams(delta=1.0, B=1.0, eta=eta)]),
        classes=[FunctionClass.C],
    )


def dirichlet_mod4_spec() -> MultFnSpec:
    """χ_4 com E_1 = {1 mod 4}, E_2 = {3 mod 4}, S = {2}."""
    return MultFnSpec(
        label="dirichlet-mod4",
        rule=PrimeRule(kind=RuleKind.CHARACTER, modulus=4, table=[0, 1, 0, -1]),
        extension=Extension.COMPLETE,
        partition=PrimePartition(
            kind=PartitionKind.RESIDUE,
            modulus=4,
            residues=[[1], [3]],
            exceptional=[2],
            classes=[
                ClassParams(delta=1.0, B=1.0, phi=-math.pi, beta=HALF_PI),
                ClassParams(delta=1.0, B=1.0, phi=0.0, beta=HALF_PI),
            ],
        ),
        classes=[FunctionClass.C, FunctionClass.CB],
    )


def cb_random_spec(k: int) -> MultFnSpec:
    """Semente k, argumentos perto de π: evita o setor |arg - 0| < π/2."""
    return random_spec(
        seed=1000 + k, radius=(0.8, 1.0), label=f"random-cb-{k}",
        arg_center=math.pi, arg_spread=0.5, phi=0.0, beta=HALF_PI,
        classes=(FunctionClass.C, FunctionClass.CB),
    )


def lowermv_random_spec(k: int) -> MultFnSpec:
    return random_spec(seed=2000 + k, radius=(0.5, 1.5), label=f"random-lowermv-{k}")


def builtin_spec(name: str) -> MultFnSpec:
    """Spec do catálogo pelo nome."""
    fixed = {
        "unit": lambda: constant_spec(1.0, "unit", classes=(FunctionClass.C, FunctionClass.CA)),
        "liouville": lambda: liouville_spec(Extension.STRONG),
        "liouville-complete": lambda: liouville_spec(Extension.COMPLETE),
        "archimedean": lambda: archimedean_spec(1.0),
        "rho2": lambda: constant_spec(2.0, "rho2"),
        "half": lambda: constant_spec(0.5, "half"),
        "rotated-005": lambda: constant_spec(cmath.exp(0.05j), "rotated-005", eta=0.05,
                                             classes=(FunctionClass.C, FunctionClass.CA)),
        "rotated-003": lambda: constant_spec(cmath.exp(0.03j), "rotated-003", eta=0.03,
                                             classes=(FunctionClass.C, FunctionClass.CA)),
        "twist-i": lambda: constant_spec(1j, "twist-i", beta=math.pi / 4,
                                         classes=(FunctionClass.C, FunctionClass.CB)),
        "random-ca": lambda: random_spec(seed=77, radius=(0.8, 1.2), label="random-ca", arg_spread=0.02,
                                         classes=(FunctionClass.C, FunctionClass.CA)),
        "wirsing-g2-complete": lambda: constant_spec(1.0, "wirsing-g2-complete", Extension.COMPLETE,
                                                     overrides={2: -1.0}),
        "wirsing-g2-strong": lambda: constant_spec(1.0, "wirsing-g2-strong", overrides={2: -1.0}),
        "lowermv-s23": lambda: constant_spec(0.5, "lowermv-s23", exceptional=(2, 3)),
        "dirichlet-mod4": dirichlet_mod4_spec,
    }
    if name in fixed:
        return fixed[name]()
    for prefix, factory in (("random-cb-", cb_random_spec), ("random-lowermv-", lowermv_random_spec)):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            return factory(int(name[len(prefix):]))
    raise SpecError(f"spec embutida desconhecida: {name}")


BUILTIN_NAMES = (
    "unit", "liouville", "liouville-complete", "archimedean", "rho2", "half",
    "rotated-005", "rotated-003", "twist-i", "random-ca", "wirsing-g2-complete",
    "wirsing-g2-strong", "lowermv-s23", "dirichlet-mod4", "random-cb-{k}", "random-lowermv-{k}",
)
