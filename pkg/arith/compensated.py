"""
Somas compensadas (transformação livre de erro).

CompensatedSum mantém a soma corrente como par (s, t) não sobreposto, no
estilo do acumulador de Shewchuk; blocos de array entram via math.fsum.
"""
import math

import numpy as np


def two_sum(u: float, v: float) -> tuple[float, float]:
    """Devolve (s, t) com s = round(u + v) e u + v = s + t exatamente."""
    s = u + v
    up = s - v
    vpp = s - up
    up -= u
    vpp -= v
    t = -(up + vpp)
    return s, t


class CompensatedSum:
    """Como math.fsum, mas permite uma soma corrente."""

    __slots__ = ("_s", "_t")

    def __init__(self, y: float = 0.0):
        self._s, self._t = float(y), 0.0

    def add(self, y: float) -> None:
        y, u = two_sum(float(y), self._t)
        self._s, self._t = two_sum(y, self._s)
        if self._s == 0:
            self._s = u
        else:
            self._t += u

    def add_array(self, values: np.ndarray) -> None:
        if len(values):
            self.add(math.fsum(values))

    @property
    def value(self) -> float:
        return self._s + self._t


class ComplexCompensatedSum:
    __slots__ = ("re", "im")

    def __init__(self, z: complex = 0j):
        self.re = CompensatedSum(z.real)
        self.im = CompensatedSum(z.imag)

    def add(self, z: complex) -> None:
        self.re.add(z.real)
        self.im.add(z.imag)

    def add_array(self, values: np.ndarray) -> None:
        if len(values):
            self.re.add(math.fsum(values.real))
            self.im.add(math.fsum(values.imag))

    @property
    def value(self) -> complex:
        return complex(self.re.value, self.im.value)


def fsum_complex(values: np.ndarray) -> complex:
    values = np.asarray(values, dtype=np.complex128)
    return complex(math.fsum(values.real), math.fsum(values.imag))


def fsum_real(values: np.ndarray) -> float:
    return math.fsum(np.asarray(values, dtype=np.float64))


def cumulative_fsum(values: np.ndarray, ends: np.ndarray) -> np.ndarray:
    """
    Somas compensadas dos prefixos values[:e] para cada e em ends (crescente).

    Cada bloco entre cortes consecutivos é somado com fsum e os blocos são
    encadeados num único acumulador, em ordem.
    """
    values = np.asarray(values)
    is_complex = np.iscomplexobj(values)
    acc = ComplexCompensatedSum() if is_complex else CompensatedSum()
    out = np.empty(len(ends), dtype=np.complex128 if is_complex else np.float64)
    start = 0
    for i, end in enumerate(ends):
        acc.add_array(values[start:end])
        out[i] = acc.value
        start = end
    return out
