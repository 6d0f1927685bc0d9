from __future__ import annotations

import os
import pathlib
import threading
import warnings
from typing import Callable, Hashable, TypeVar

import pydantic

CACHE_DIR_ENV = "BARNES_ZETA_CACHE_DIR"
CACHE_HEADER = "BZCACHE v1"
STIELTJES_CACHE_FILE = "stieltjes.bzcache"

Value = TypeVar("Value")


class InsertOnceCache:
    """
    Thread-safe memo table. A key is computed at most once per process; later
    writes of the same key are ignored, so concurrent writers cannot disagree.
    Once `max_entries` keys are stored, new values are still returned but no longer kept.

    >>> cache = InsertOnceCache()
    >>> cache.get_or_compute(("a", 1), lambda: 2.5)
    2.5
    >>> cache.get_or_compute(("a", 1), lambda: 99.0)
    2.5
    >>> len(cache)
    1
    >>> small = InsertOnceCache(max_entries=1)
    >>> small.get_or_compute("a", lambda: 1), small.get_or_compute("b", lambda: 2), len(small)
    (1, 2, 1)
    """

    def __init__(self, max_entries: int | None = None) -> None:
        self._values: dict[Hashable, object] = {}
        self.max_entries = max_entries
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._values)

    def __contains__(self, key: Hashable) -> bool:
        return key in self._values

    def get(self, key: Hashable) -> object | None:
        return self._values.get(key)

    def insert(self, key: Hashable, value: object) -> object:
        with self._lock:
            if self.max_entries is not None and len(self._values) >= self.max_entries:
                return self._values.get(key, value)
            return self._values.setdefault(key, value)

    def get_or_compute(self, key: Hashable, compute: Callable[[], Value]) -> Value:
        if key in self._values:
            return self._values[key]  # type: ignore[return-value]
        # computed outside the lock; the first finished insert wins
        value = compute()
        return self.insert(key, value)  # type: ignore[return-value]

    def items(self) -> list[tuple[Hashable, object]]:
        with self._lock:
            return sorted(self._values.items(), key=lambda item: repr(item[0]))


class EvalContext(pydantic.BaseModel):
    """
    Truncation orders, tolerances and shared caches used by every numerical routine.

    >>> ctx = EvalContext()
    >>> ctx.em_terms, ctx.em_order, ctx.target_tol
    (40, 15, 1e-10)
    >>> EvalContext(em_terms=0)  # doctest: +IGNORE_EXCEPTION_DETAIL
    Traceback (most recent call last):
    ...
    pydantic_core.ValidationError: 1 validation error for EvalContext
    """

    model_config = pydantic.ConfigDict(frozen=True)

    em_terms: int = pydantic.Field(default=40, ge=1)
    em_order: int = pydantic.Field(default=15, ge=1, le=60)
    stieltjes_terms: int = pydantic.Field(default=20, ge=1)
    stieltjes_order: int = pydantic.Field(default=12, ge=1, le=60)
    fourier_terms: int = pydantic.Field(default=1_000_000, ge=1)
    fourier_chunk: int = pydantic.Field(default=1_000_000, ge=1)
    target_tol: float = pydantic.Field(default=1e-10, gt=0)
    max_den: int = pydantic.Field(default=10**6, ge=1)
    n_jobs: int = 1
    value_cache_size: int = pydantic.Field(default=200_000, ge=0)

    _stieltjes_cache: InsertOnceCache = pydantic.PrivateAttr(default_factory=InsertOnceCache)
    _value_cache: InsertOnceCache = pydantic.PrivateAttr(default_factory=InsertOnceCache)

    def model_post_init(self, __context) -> None:
        self._value_cache.max_entries = self.value_cache_size

    @property
    def stieltjes_cache(self) -> InsertOnceCache:
        return self._stieltjes_cache

    @property
    def value_cache(self) -> InsertOnceCache:
        """(function name, arguments) -> float, for the heavily re-requested inner values."""
        return self._value_cache

    def load_stieltjes_cache(self, cache_dir: str | os.PathLike | None = None) -> int:
        path = _cache_path(cache_dir)
        if path is None or not path.exists():
            return 0
        lines = path.read_text().splitlines()
        if len(lines) == 0 or lines[0].strip() != CACHE_HEADER:
            warnings.warn(f"Ignoring cache file {path}: expected header {CACHE_HEADER!r}")
            return 0
        loaded = 0
        for line_no, line in enumerate(lines[1:], start=2):
            if line.strip() == "":
                continue
            try:
                n, num, den, terms, order, value = line.split()
                key = (int(n), int(num), int(den), int(terms), int(order))
                self._stieltjes_cache.insert(key, float.fromhex(value))
                loaded += 1
            except ValueError:
                warnings.warn(f"Skipping malformed line {line_no} of cache file {path}")
        return loaded

    def save_stieltjes_cache(self, cache_dir: str | os.PathLike | None = None) -> pathlib.Path | None:
        path = _cache_path(cache_dir)
        if path is None:
            return None
        path.parent.mkdir(parents=True, exist_ok=True)
        lines = [CACHE_HEADER]
        for key, value in self._stieltjes_cache.items():
            lines.append(" ".join(str(part) for part in key) + " " + float(value).hex())
        path.write_text("\n".join(lines) + "\n")
        return path


def _cache_path(cache_dir: str | os.PathLike | None) -> pathlib.Path | None:
    if cache_dir is None:
        cache_dir = os.environ.get(CACHE_DIR_ENV)
    if cache_dir is None or str(cache_dir) == "":
        return None
    return pathlib.Path(cache_dir) / STIELTJES_CACHE_FILE


DEFAULT_CONTEXT = EvalContext()
