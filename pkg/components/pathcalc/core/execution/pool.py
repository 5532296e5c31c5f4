"""Worker pool for embarrassingly parallel per-path work.

Results always come back in input order, so reductions downstream see the same array
whatever backend or worker count is used.
"""

from collections.abc import Callable, Iterable
from dataclasses import dataclass
from typing import TypeVar

from joblib import Parallel, delayed

from pathcalc.core.common.validation import ValidationError, validate_one_of, validate_positive

ItemT = TypeVar("ItemT")
ResultT = TypeVar("ResultT")

_BACKENDS = ("loky", "threading", "multiprocessing", "sequential")


@dataclass(frozen=True)
class PoolSettings:
    """Configuration for the per-path worker pool.

    Attributes:
        n_jobs: Number of workers; 1 runs inline, -1 uses every core
        backend: joblib backend name
        batch_size: joblib batch size ("auto" or a positive integer)
    """

    n_jobs: int = 1
    backend: str = "loky"
    batch_size: int | str = "auto"

    def __post_init__(self) -> None:
        """Validate configuration."""
        validate_one_of(self.backend, _BACKENDS, "backend")
        if self.n_jobs == 0:
            raise ValidationError("n_jobs must be nonzero", field="n_jobs", value=self.n_jobs)
        if isinstance(self.batch_size, str):
            validate_one_of(self.batch_size, ("auto",), "batch_size")
        else:
            validate_positive(self.batch_size, "batch_size")


def map_paths(
    fn: Callable[[ItemT], ResultT],
    items: Iterable[ItemT],
    settings: PoolSettings | None = None,
) -> list[ResultT]:
    """Apply ``fn`` to every item, in parallel when configured.

    Args:
        fn: Pure function of one item
        items: Work items, typically paths or (path, qv) pairs
        settings: Pool configuration (defaults to inline execution)

    Returns:
        Results in the order of ``items``
    """
    settings = settings or PoolSettings()
    work = list(items)
    if settings.n_jobs == 1 or settings.backend == "sequential" or len(work) <= 1:
        return [fn(item) for item in work]
    runner = Parallel(
        n_jobs=settings.n_jobs,
        backend=settings.backend,
        batch_size=settings.batch_size,
    )
    return list(runner(delayed(fn)(item) for item in work))
