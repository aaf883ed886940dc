from pathlib import Path
from typing import Optional

from pydantic_settings import BaseSettings

BASE_DIR = Path(__file__).parent
DATA_DIR = BASE_DIR / "data"
DATA_DIR.mkdir(exist_ok=True)


class Settings(BaseSettings):
    experiments_file: Path = BASE_DIR / "experiments.yaml"
    report_file: Path = DATA_DIR / "validation_report.json"
    log_file: Path = BASE_DIR / "logs" / "qes.log"

    newton_tol: float = 1e-12
    cert_tol: float = 1e-9
    sep_tol: float = 1e-8
    pole_tol: float = 1e-10
    max_iters: int = 200
    restarts: int = 500
    damping: float = 0.5
    default_seed: int = 20240601

    schema_version: str = "1.0"
    json_significant_digits: int = 17
    pretty_significant_digits: int = 12
    real_tolerance: float = 1e-9

    show_progress: bool = False

    QES_THREADS: Optional[int] = None

    class Config:
        env_file = ".env"
        env_file_encoding = "utf-8"
        extra = "ignore"


settings = Settings()
