import os
import tempfile
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from pathlib import Path
from typing import TypeVar

import numpy as np

from blowuplab.settings import settings

TEMP_FILE_PREFIX = ".~bl_"

T = TypeVar("T")
R = TypeVar("R")


def get_version() -> str:
    from importlib.metadata import PackageNotFoundError, version

    try:
        return version("blowuplab")
    except PackageNotFoundError:
        return "unknown"


def relative_error(value: float, reference: float) -> float:
    """``|value - reference| / |reference|``, or the absolute error if the reference is 0."""
    if reference == 0:
        return abs(value)
    return abs(value - reference) / abs(reference)


def map_parallel(func: Callable[[T], R], items: Iterable[T]) -> list[R]:
    """Apply ``func`` to every item on at most ``settings.threads`` threads.

    Results come back in input order.
    """
    items = list(items)
    if settings.threads == 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(settings.threads, len(items))) as pool:
        return list(pool.map(func, items))


@contextmanager
def atomic_write(filepath: str | os.PathLike[str]):
    """
    Context manager for atomic writing:
    1. Creates a hidden temporary file next to the target with the same suffix
    2. Yields its path for writing
    3. Replaces the target file on success and removes the temporary file otherwise
    """
    filepath = Path(filepath)

    fd, temp_path = tempfile.mkstemp(
        prefix=TEMP_FILE_PREFIX,
        suffix=filepath.suffix,
        dir=filepath.parent,
    )
    os.close(fd)

    temp_path = Path(temp_path)

    try:
        yield temp_path
    except Exception:
        temp_path.unlink(missing_ok=True)
        raise
    else:
        temp_path.replace(filepath)


def write_csv(
    filepath: str | os.PathLike[str],
    columns: Sequence[str],
    rows: Sequence[Sequence[float]],
):
    """Write numeric rows as CSV with 17 significant digits and a header row."""
    data = np.asarray(rows, dtype=float).reshape(len(rows), len(columns))
    with atomic_write(filepath) as temp_path:
        np.savetxt(
            temp_path,
            data,
            fmt="%.17g",
            delimiter=",",
            header=",".join(columns),
            comments="",
        )
