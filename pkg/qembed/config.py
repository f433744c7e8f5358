from pydantic_settings import BaseSettings, SettingsConfigDict
from pydantic import Field, field_validator
from typing import Optional
import os

class Settings(BaseSettings):
    data_dir: str = Field(default="Datos")
    log_level: str = Field(default="INFO")

    # Registro de auditoría (Datos/logs/audit_YYYYMMDD.jsonl)
    audit_enabled: bool = Field(default=True)

    # Ejecución
    default_shots: int = Field(default=8192, ge=1)
    n_jobs: int = Field(default=1)
    # Si es False, el train_record.json no lleva tiempo de pared (salida byte a byte reproducible)
    record_wall_time: bool = Field(default=False)

    # Datos
    iris_csv: Optional[str] = Field(default=None)
    csv_digits: int = Field(default=9, ge=1, le=17)

    @field_validator("log_level", mode="before")
    @classmethod
    def upper_level(cls, v):
        return str(v or "INFO").strip().upper()

    @field_validator("n_jobs")
    @classmethod
    def non_zero_jobs(cls, v):
        if int(v) == 0:
            raise ValueError("n_jobs no puede ser 0 (usa 1 para secuencial, -1 para todos los núcleos)")
        return int(v)

    model_config = SettingsConfigDict(
        env_prefix="QEMBED_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

settings = Settings()
settings.data_dir = os.path.abspath(settings.data_dir)
