"""
Tabelas de primos compartilhadas (crivo de Eratóstenes em numpy)
"""
import math
import threading

import numpy as np

from config.logger import setup_logger

logger = setup_logger(__name__)

_lock = threading.Lock()
_table = np.array([2, 3, 5, 7], dtype=np.int64)
_table_limit = 10


def simple_sieve(limit: int) -> np.ndarray:
    """Primos ≤ limit, por fatias com passo."""
    if limit < 2:
        return np.array([], dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p::p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def primes_up_to(limit: int) -> np.ndarray:
    """
    Primos ≤ limit como array somente-leitura.

    A tabela do processo cresce sob demanda e é fatiada para limites menores.
    """
    global _table, _table_limit
    with _lock:
        if limit > _table_limit:
            logger.debug(f"Estendendo tabela de primos até {limit}")
            table = simple_sieve(limit)
            table.flags.writeable = False
            _table, _table_limit = table, limit
        table = _table
    return table[: np.searchsorted(table, limit, side="right")]


def prime_powers_up_to(x: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Potências de primos p^k ≤ x, ordenadas.

    Returns:
        (valores p^k, primos p, expoentes k)
    """
    ps = primes_up_to(x)
    values, bases, exps = [ps], [ps], [np.ones(len(ps), dtype=np.int64)]
    small = ps[ps <= math.isqrt(x)]
    k = 2
    power = small * small
    while len(small):
        keep = power <= x
        small, power = small[keep], power[keep]
        if not len(small):
            break
        values.append(power)
        bases.append(small)
        exps.append(np.full(len(small), k, dtype=np.int64))
        power = power * small
        k += 1
    values = np.concatenate(values)
    order = np.argsort(values, kind="stable")
    return values[order], np.concatenate(bases)[order], np.concatenate(exps)[order]


def factorize(n: int) -> list[tuple[int, int]]:
    """Fatoração completa de n ≥ 1 por divisão por primos."""
    if n < 1:
        raise ValueError(f"n deve ser positivo: {n}")
    out = []
    for p in primes_up_to(max(math.isqrt(n), 2)):
        p = int(p)
        if p * p > n:
            break
        if n % p == 0:
            k = 0
            while n % p == 0:
                n //= p
                k += 1
            out.append((p, k))
    if n > 1:
        out.append((n, 1))
    return out


def is_prime(n: int) -> bool:
    return n >= 2 and factorize(n) == [(n, 1)]


def p_over_phi(primes) -> float:
    """P/φ(P) para P o produto dos primos dados (livre de quadrados)."""
    return math.prod(p / (p - 1) for p in primes) if len(primes) else 1.0


def mertens_third_oracle(x: float) -> float:
    """e^{γ} log x · Π_{p≤x}(1 - 1/p), que tende a 1."""
    ps = primes_up_to(int(x)).astype(np.float64)
    return math.exp(np.euler_gamma + math.log(math.log(x)) + float(np.sum(np.log1p(-1.0 / ps))))
