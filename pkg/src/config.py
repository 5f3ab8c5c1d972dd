from typing import Dict, Optional, Tuple

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """
    Настройки анализатора.

    Значения читаются из переменных окружения с префиксом ``JANUS_``
    и из файла ``.env`` в корне проекта.
    """

    model_config = SettingsConfigDict(
        env_prefix="JANUS_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # ======= Логирование =======
    log_level: str = "WARNING"

    # ======= Бюджет итеративного анализа =======
    max_rounds: int = 16
    max_paths: int = 64
    budget_secs: float = 10.0

    # ======= Распознавание финансовых переменных =======
    financial_threshold: float = 0.5
    name_similarity_cutoff: float = 0.8
    lexicon_path: Optional[str] = None
    rule_weights: Dict[str, float] = Field(
        default_factory=lambda: {
            "transfer_shape": 0.6,
            "value_flow": 0.5,
            "supply_shape": 0.5,
            "fee_shape": 0.5,
            "name_similarity": 0.5,
        }
    )

    # ======= Оракул =======
    oracle_numeric_domain: Tuple[int, ...] = (0, 1, 2)
    oracle_seed_value: int = 2
    oracle_block_number: int = 1
    oracle_max_depth: int = 4
    oracle_max_sequences: int = 200_000

    # ======= Celery =======
    celery_broker_url: str = "memory://"
    celery_backend_url: str = "cache+memory://"
    celery_always_eager: bool = True

    # ======= Прогон корпуса =======
    corpus_workers: int = 4


settings = Settings()
