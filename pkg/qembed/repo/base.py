from __future__ import annotations

from pathlib import Path
from typing import Any, Iterator

import orjson
from filelock import FileLock

JSON_OPTIONS = orjson.OPT_INDENT_2 | orjson.OPT_SERIALIZE_NUMPY | orjson.OPT_SORT_KEYS


def ensure_dir(path: Path | str) -> None:
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)


def _lock_for(p: Path) -> FileLock:
    # lock por fichero dentro de <carpeta>/.locks
    lock_file = p.parent / ".locks" / (p.name + ".lock")
    ensure_dir(lock_file.parent)
    return FileLock(str(lock_file))


# ---------- escritura atómica ----------
def _write_atomic(dst: Path, content: bytes) -> None:
    ensure_dir(dst.parent)
    tmp = dst.with_suffix(dst.suffix + ".tmp")
    tmp.write_bytes(content)
    tmp.replace(dst)


def write_bytes(path: Path | str, content: bytes) -> Path:
    p = Path(path)
    ensure_dir(p.parent)
    with _lock_for(p):
        _write_atomic(p, content)
    return p


def write_text(path: Path | str, text: str) -> Path:
    return write_bytes(path, text.encode("utf-8"))


# ---------- JSON ----------
def dumps(data: Any) -> bytes:
    return orjson.dumps(data, option=JSON_OPTIONS) + b"\n"


def read_json(path: Path | str, default: Any = None) -> Any:
    p = Path(path)
    try:
        data = p.read_bytes()
    except FileNotFoundError:
        return default
    return orjson.loads(data)


def write_json(path: Path | str, data: Any) -> Path:
    return write_bytes(path, dumps(data))


# ---------- JSONL ----------
def append_jsonl(path: Path | str, record: Any) -> None:
    p = Path(path)
    line = orjson.dumps(record, option=orjson.OPT_SERIALIZE_NUMPY) + b"\n"
    ensure_dir(p.parent)
    with _lock_for(p):
        with p.open("ab") as fh:
            fh.write(line)


def read_jsonl(path: Path | str) -> Iterator[Any]:
    p = Path(path)
    if not p.exists():
        return
    with p.open("rb") as fh:
        for line in fh:
            if line.strip():
                yield orjson.loads(line)
