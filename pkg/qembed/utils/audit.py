from __future__ import annotations

import logging
from pathlib import Path
from datetime import datetime, timezone
from typing import Any, Dict, Optional

from ..config import settings
from ..repo.base import append_jsonl

logger = logging.getLogger(__name__)


def _today_path() -> Path:
    # se resuelve en cada llamada: los tests redirigen settings.data_dir
    return Path(settings.data_dir) / "logs" / f"audit_{datetime.now(tz=timezone.utc).strftime('%Y%m%d')}.jsonl"


def audit_event(
    event: str,
    *,
    out_dir: Optional[str] = None,
    wall_time_s: Optional[float] = None,
    details: Optional[Dict[str, Any]] = None,
) -> None:
    if not settings.audit_enabled:
        return
    rec: Dict[str, Any] = {
        "ts_utc": datetime.now(tz=timezone.utc).isoformat(),
        "event": event,
        "out_dir": out_dir,
        "wall_time_s": wall_time_s,
        "details": details or {},
    }
    try:
        append_jsonl(_today_path(), rec)
    except OSError as e:
        # un fallo al auditar solo se registra; el experimento ya ha terminado
        logger.warning("No se pudo escribir el evento de auditoría %s: %s", event, e)
