"""
Cache em disco das tabelas de somatórias.

Cada SummatoryTable é gravada como .npz com chave (hash da spec, x_max) no
diretório settings.cache_dir (variável de ambiente CACHE_DIR). Gravar de novo a
mesma chave une os checkpoints das duas tabelas.
"""
from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from arith.errors import CacheMissError
from arith.mult_fn import MultFnSpec
from arith.sieve import SummatoryTable, sieve_table
from config.logger import setup_logger
from config.settings import settings

logger = setup_logger(__name__)

_FIELDS = ("checkpoints", "M_g", "M_abs", "N_g", "N_abs", "L_g", "L_abs", "lambda_v", "lambda_g")


class TableCache:
    """Tabelas de somatórias persistidas entre execuções."""

    def __init__(self, cache_dir: str | Path | None = None):
        self.cache_dir = Path(cache_dir or settings.cache_dir)

    def path_for(self, spec_hash: str, x_max: int) -> Path:
        return self.cache_dir / f"{spec_hash}_{x_max}.npz"

    def entries(self, spec_hash: str) -> list[tuple[int, Path]]:
        """(x_max, caminho) das tabelas guardadas para a spec, em ordem crescente."""
        if not self.cache_dir.exists():
            return []
        found = []
        for path in self.cache_dir.glob(f"{spec_hash}_*.npz"):
            suffix = path.stem.rsplit("_", 1)[-1]
            if suffix.isdigit():
                found.append((int(suffix), path))
        return sorted(found)

    def _load(self, path: Path, spec_hash: str) -> SummatoryTable:
        with np.load(path) as data:
            return SummatoryTable(spec_hash=spec_hash, **{name: data[name] for name in _FIELDS})

    def put(self, table: SummatoryTable) -> Path:
        """
        Grava a tabela de forma atômica (arquivo temporário + rename).

        Se já existe tabela com a mesma chave, os checkpoints das duas são unidos.
        """
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        x_max = int(table.checkpoints[-1])
        path = self.path_for(table.spec_hash, x_max)
        if path.exists():
            try:
                table = merge_tables(self._load(path, table.spec_hash), table)
            except (OSError, ValueError, KeyError) as exc:
                logger.warning(f"Cache ilegível em {path}, sobrescrevendo: {exc}")
        tmp = path.with_suffix(".tmp.npz")
        np.savez_compressed(tmp, **{name: getattr(table, name) for name in _FIELDS})
        os.replace(tmp, path)
        logger.info(f"💾 Tabela {table.spec_hash} até {x_max} gravada em {path}")
        return path

    def get(self, spec: MultFnSpec, checkpoints) -> SummatoryTable:
        """
        Tabela em cache que contém todos os checkpoints pedidos.

        Raises:
            CacheMissError: nenhuma tabela alcança o maior checkpoint ou cobre a grade
        """
        cps = np.unique(np.asarray(checkpoints, dtype=np.int64))
        top = int(cps[-1])
        entries = self.entries(spec.spec_hash)
        reach = max((x for x, _ in entries), default=0)
        if top > reach:
            raise CacheMissError(
                f"tabela de {spec.label} em cache vai até {reach}, pedido {top}: "
                f"re-crive até {top} (ex.: --extended-x)"
            )
        for x_max, path in entries:
            if x_max < top:
                continue
            try:
                table = self._load(path, spec.spec_hash)
            except (OSError, ValueError, KeyError) as exc:
                logger.warning(f"Cache ilegível em {path}: {exc}")
                continue
            if np.all(np.isin(cps, table.checkpoints)):
                logger.debug(f"Cache hit {path.name} para {len(cps)} checkpoints")
                return table.subset(cps)
        raise CacheMissError(f"grade pedida para {spec.label} não está em cache")


def merge_tables(old: SummatoryTable, new: SummatoryTable) -> SummatoryTable:
    """União dos checkpoints de duas tabelas da mesma spec; em x repetido vale a nova."""
    if old.spec_hash != new.spec_hash:
        raise ValueError(f"hashes diferentes: {old.spec_hash} e {new.spec_hash}")
    keep = ~np.isin(old.checkpoints, new.checkpoints)
    checkpoints = np.concatenate([old.checkpoints[keep], new.checkpoints])
    order = np.argsort(checkpoints, kind="stable")
    columns = {
        name: np.concatenate([getattr(old, name)[keep], getattr(new, name)])[order]
        for name in _FIELDS[1:7]
    }
    lam = new if len(new.lambda_v) >= len(old.lambda_v) else old
    return SummatoryTable(spec_hash=new.spec_hash, checkpoints=checkpoints[order], **columns,
                          lambda_v=lam.lambda_v, lambda_g=lam.lambda_g)


def load_or_sieve(spec: MultFnSpec, checkpoints, cache: TableCache | None = None, **config_overrides) -> SummatoryTable:
    """Tabela do cache ou, na falta, do crivo (gravada para a próxima execução)."""
    cache = cache or TableCache()
    try:
        return cache.get(spec, checkpoints)
    except CacheMissError as exc:
        logger.debug(f"Cache miss: {exc}")
    table = sieve_table(spec, checkpoints, **config_overrides)
    try:
        cache.put(table)
    except OSError as exc:
        logger.warning(f"⚠️ Não foi possível gravar o cache: {exc}")
    return table
