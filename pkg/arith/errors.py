"""
Exceções do laboratório
"""


class LaboratorioError(Exception):
    """Raiz de todas as falhas do laboratório."""


class SpecError(LaboratorioError):
    """Spec de função inválida ou arquivo malformado."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"linha {line}: {message}"
        super().__init__(message)


class ClassificationError(LaboratorioError):
    """Classificador de primos não é total."""


class SieveConfigError(LaboratorioError):
    """Configuração de crivo ou checkpoint fora de faixa."""


class DegenerateInputError(LaboratorioError):
    """Entrada degenerada (ex.: M_{|g|}(a) = 0)."""


class GridError(LaboratorioError):
    """Grade em τ grosseira demais para o pico de largura σ-1."""


class ZeroDivisorError(LaboratorioError):
    """Fator de Euler nulo."""

    def __init__(self, p: int, s: complex):
        self.p = p
        self.s = s
        super().__init__(f"fator de Euler nulo em p={p}, s={s}")


class RefusalError(LaboratorioError):
    """Hipótese de teorema não satisfeita; nomeia a cláusula."""

    def __init__(self, clause: str, detail: str = ""):
        self.clause = clause
        super().__init__(f"recusado ({clause}){': ' + detail if detail else ''}")


class CacheMissError(LaboratorioError):
    """Tabela pedida além do x_max disponível."""


class ZetaPrecisionWarning(UserWarning):
    """Re(s) perto demais de 1 para a precisão anunciada de ζ."""
