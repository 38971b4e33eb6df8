# src/utils/file_io.py

import json
import logging
import shutil
from pathlib import Path
from typing import Any, Dict, Iterable

# Safe import for filelock - raise error if missing
try:
    from filelock import FileLock
except ModuleNotFoundError as e:
    raise ImportError(
        "'filelock' is missing. Activate your venv and run "
        "'pip install -r requirements-lock.txt'"
    ) from e


def load_json(path: Path, req_keys: list[str] | None = None) -> Dict[str, Any]:
    """Loads a JSON object from disk and checks required top-level keys."""
    if not path.exists():
        logging.error(f"JSON file not found: {path}")
        raise FileNotFoundError(path)
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
        if not isinstance(data, dict):
            raise ValueError(f"{path.name} must contain a JSON object, got {type(data).__name__}")
        if req_keys:
            missing = [k for k in req_keys if k not in data]
            if missing:
                raise ValueError(f"{path.name} missing required keys: {missing}")
        return data
    except Exception as e:
        logging.error(f"Failed to load JSON file {path}: {e}", exc_info=True)
        raise


def write_text(path: Path, text: str) -> Path:
    """Writes text atomically: lock, write a sibling .tmp file, then move it into place."""
    path.parent.mkdir(parents=True, exist_ok=True)
    lock_path = path.with_suffix(path.suffix + ".lock")
    tmp_path = path.with_suffix(path.suffix + ".tmp")
    with FileLock(str(lock_path)):
        try:
            tmp_path.write_text(text, encoding="utf-8")
            shutil.move(str(tmp_path), str(path))
        except Exception as e:
            logging.error(f"Failed to write {path}: {e}")
            if tmp_path.exists():
                try:
                    tmp_path.unlink()
                except OSError as unlink_e:
                    logging.error(f"Failed to remove temporary file {tmp_path}: {unlink_e}")
            raise
    logging.info(f"Wrote {path}")
    return path


def write_json(path: Path, payload: Any, encoder: type[json.JSONEncoder] | None = None) -> Path:
    """Serializes payload with sorted keys and indent=2 and writes it atomically."""
    return write_text(path, json.dumps(payload, cls=encoder, indent=2, sort_keys=True) + "\n")


def append_jsonl(path: Path, records: Iterable[Dict[str, Any]], encoder: type[json.JSONEncoder] | None = None) -> int:
    """Appends one JSON line per record under the file lock; returns the number written."""
    path.parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with FileLock(str(path.with_suffix(path.suffix + ".lock"))):
        with open(path, "a", encoding="utf-8") as f:
            for record in records:
                f.write(json.dumps(record, cls=encoder, sort_keys=True) + "\n")
                count += 1
    logging.debug(f"Appended {count} records to {path}")
    return count
