"""
Configurações do Laboratório de Valores Médios
Carrega variáveis de ambiente usando Pydantic Settings
"""
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Configurações da aplicação carregadas do .env"""
    model_config = SettingsConfigDict(
        env_file=".env",  # lido pelo pydantic-settings via python-dotenv
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = "INFO"
    log_file: str = "logs/laboratorio.log"

    # Diretórios (CACHE_DIR no ambiente aponta o cache de tabelas)
    cache_dir: str = "cache"
    output_dir: str = "out"

    # Crivo segmentado
    segment_length: int = 2**20
    x_max: int = 10**7
    x_max_extended: int = 10**8
    worker_count: int = 4
    default_seed: int = 20240601

    # Grade em τ: T = log^D x
    tau_D: float = 2.1
    tau_outer_step: float = 0.05

    # Séries de Dirichlet / produtos de Euler
    euler_prime_cutoff: int = 10**5
    dirichlet_poly_length: int = 10**4
    zeta_terms: int = 200
    zeta_corrections: int = 6

    # Validação das classes 𝒞, 𝒞_a, 𝒞_b
    c6_threshold: float = 1.0
    c6_tau_exponent: float = 1.0
    s_growth_exponent: float = 0.5
    modulus_tolerance: float = 1e-12

    # Política de constantes implícitas (ajuste no menor x da grade)
    fit_factor: float = 10.0
    fit_floor: float = 1e-2


# Instância global de configurações
settings = Settings()
