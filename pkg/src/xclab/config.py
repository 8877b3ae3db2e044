from __future__ import annotations

import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, TypeVar

from dotenv import dotenv_values

T = TypeVar("T")


def _looks_like_repo_root(path: Path) -> bool:
    return (path / "configs" / "examples").exists()


def _discover_repo_root() -> Path:
    env_root = os.environ.get("XCLAB_ROOT", "").strip()
    if env_root:
        candidate = Path(env_root).expanduser().resolve()
        if candidate.exists():
            return candidate

    source_root = Path(__file__).resolve().parents[2]
    for candidate in (Path.cwd(), source_root):
        if _looks_like_repo_root(candidate):
            return candidate
    return source_root


REPO_ROOT = _discover_repo_root()
ENV_FILE = REPO_ROOT / ".env"


def load_env_file(path: Path) -> None:
    if not path.exists():
        return

    for key, value in dotenv_values(path).items():
        key = str(key or "").strip()
        if not key or value is None:
            continue
        os.environ.setdefault(key, str(value))


load_env_file(ENV_FILE)


def to_bool(value: object) -> bool:
    if isinstance(value, bool):
        return value
    if isinstance(value, (int, float)):
        return value != 0
    if isinstance(value, str):
        normalized = value.strip().lower()
        if normalized in {"1", "true", "yes", "y", "on"}:
            return True
        if normalized in {"0", "false", "no", "n", "off", ""}:
            return False
    raise ValueError(f"Invalid boolean value: {value}")


def to_fraction(value: object) -> Fraction:
    """Parse ``"p/q"``, ``"p"``, an int or a Fraction into an exact Fraction."""
    if isinstance(value, bool):
        raise ValueError(f"Invalid rational value: {value}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        if text and "." not in text and "e" not in text.lower():
            try:
                return Fraction(text)
            except (ValueError, ZeroDivisionError) as exc:
                raise ValueError(f"Invalid rational value: {value}") from exc
    raise ValueError(f"Invalid rational value: {value}")


def env_or_config(env_key: str, default: Any = None, cast: Callable[[Any], T] | None = None) -> Any:
    """Resolve a setting from env var, falling back to *default*."""
    raw_env = os.environ.get(env_key)
    if raw_env is not None and raw_env != "":
        raw = raw_env
        source = f"env '{env_key}'"
    else:
        raw = default
        source = "default"

    if raw is None:
        return None

    if cast is None:
        return raw

    try:
        return cast(raw)
    except Exception as exc:
        raise ValueError(f"Invalid value from {source}: {raw}") from exc


def resolve_repo_path(path_value: str | Path) -> Path:
    path = Path(path_value)
    if path.is_absolute():
        return path
    return REPO_ROOT / path


def default_jobs() -> int:
    return max(1, env_or_config("XCLAB_JOBS", 1, int))


def default_seed() -> int:
    return env_or_config("XCLAB_SEED", 0, int)


def default_log_level() -> str:
    return str(env_or_config("XCLAB_LOG_LEVEL", "WARNING")).strip().upper()


def reports_dir() -> Path:
    return resolve_repo_path(env_or_config("XCLAB_REPORTS_DIR", "reports"))


def save_reports() -> bool:
    return bool(env_or_config("XCLAB_SAVE_REPORTS", False, to_bool))


def nmf_iterations() -> int:
    return max(1, env_or_config("XCLAB_NMF_ITERATIONS", 2000, int))


def nmf_restarts() -> int:
    return max(1, env_or_config("XCLAB_NMF_RESTARTS", 8, int))
