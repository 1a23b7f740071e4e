"""Performance matrix model: datasets x algorithms with first-class gaps.

Every score is an nDCG-style value in [0, 1] or ``None`` for a result that
was never produced (run killed, algorithm inapplicable, ...).  Gaps are kept
explicit instead of being imputed or clamped so downstream consumers can
decide how to treat them.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

Score = float | None


class ApsError(Exception):
    """Base class for every domain error raised by this package."""


class InvalidLabelError(ApsError):
    """A dataset or algorithm name is empty or has surrounding whitespace."""


class DuplicateCellError(ApsError):
    """The same (dataset, algorithm) pair was supplied more than once."""


class ScoreOutOfRangeError(ApsError):
    """A score is not a finite number in [0, 1]."""


class EmptyRowError(ApsError):
    """A dataset row has no present scores at all."""


class UnknownDatasetError(ApsError):
    """Lookup of a dataset name that is not in the matrix."""


class UnknownAlgorithmError(ApsError):
    """Lookup of an algorithm name that is not in the matrix."""


class ZeroColumnError(ApsError):
    """An algorithm column cannot be normalized (no positive present value)."""


class LengthMismatchError(ApsError):
    """Two sequences that must be index-aligned have different lengths."""


@dataclass(frozen=True)
class ScoreMeta:
    """What the cell values mean, e.g. nDCG@10."""

    metric_name: str = "nDCG"
    k: int = 10

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"cutoff k must be >= 1, got {self.k}")


@dataclass(frozen=True)
class PerformanceMatrix:
    """Immutable datasets-by-algorithms score grid.

    ``cells[i][j]`` is the score of ``algorithms[j]`` on ``datasets[i]``,
    or ``None`` where no result exists.  Rows and columns keep the order
    they were first seen in; use :func:`build_matrix` to construct one
    with full validation.
    """

    algorithms: tuple[str, ...]
    datasets: tuple[str, ...]
    cells: tuple[tuple[Score, ...], ...]
    meta: ScoreMeta = field(default_factory=ScoreMeta)

    @property
    def n_algorithms(self) -> int:
        return len(self.algorithms)

    @property
    def n_datasets(self) -> int:
        return len(self.datasets)

    @cached_property
    def _dataset_pos(self) -> dict[str, int]:
        return {name: i for i, name in enumerate(self.datasets)}

    @cached_property
    def _algorithm_pos(self) -> dict[str, int]:
        return {name: j for j, name in enumerate(self.algorithms)}

    def dataset_index(self, name: str) -> int:
        try:
            return self._dataset_pos[name]
        except KeyError:
            raise UnknownDatasetError(f"unknown dataset {name!r}") from None

    def algorithm_index(self, name: str) -> int:
        try:
            return self._algorithm_pos[name]
        except KeyError:
            raise UnknownAlgorithmError(f"unknown algorithm {name!r}") from None

    def row(self, dataset: str) -> tuple[Score, ...]:
        """All scores for one dataset, in algorithm order."""
        return self.cells[self.dataset_index(dataset)]

    def column(self, algorithm: str) -> tuple[Score, ...]:
        """All scores for one algorithm, in dataset order."""
        j = self.algorithm_index(algorithm)
        return tuple(r[j] for r in self.cells)

    def is_complete(self, dataset: str) -> bool:
        return None not in self.row(dataset)


def _check_label(label: str, kind: str) -> str:
    if not isinstance(label, str) or not label or label != label.strip():
        raise InvalidLabelError(f"bad {kind} name {label!r}: must be non-empty "
                                "with no surrounding whitespace")
    return label


def build_matrix(records: Iterable[tuple[str, str, Score]],
                 meta: ScoreMeta | None = None) -> PerformanceMatrix:
    """Assemble a matrix from (dataset, algorithm, score) triples.

    Row/column order is first-seen.  A ``None`` score registers the pair
    as an explicit gap.  Raises :class:`DuplicateCellError` on a repeated
    pair, :class:`ScoreOutOfRangeError` for values outside [0, 1] (they
    are rejected, never clamped), and :class:`EmptyRowError` if a dataset
    ends up with no present score.
    """
    datasets: dict[str, None] = {}   # insertion-ordered sets
    algorithms: dict[str, None] = {}
    grid: dict[tuple[str, str], Score] = {}
    for dataset, algorithm, score in records:
        _check_label(dataset, "dataset")
        _check_label(algorithm, "algorithm")
        key = (dataset, algorithm)
        if key in grid:
            raise DuplicateCellError(
                f"duplicate cell for dataset {dataset!r}, algorithm {algorithm!r}")
        if score is not None:
            score = float(score)
            if not (0.0 <= score <= 1.0):  # also rejects NaN
                raise ScoreOutOfRangeError(
                    f"score {score!r} for ({dataset!r}, {algorithm!r}) "
                    "is outside [0, 1]")
        grid[key] = score
        datasets[dataset] = None
        algorithms[algorithm] = None

    cells = []
    for d in datasets:
        row = tuple(grid.get((d, a)) for a in algorithms)
        if all(v is None for v in row):
            raise EmptyRowError(f"dataset {d!r} has no present scores")
        cells.append(row)
    return PerformanceMatrix(tuple(algorithms), tuple(datasets), tuple(cells),
                             meta if meta is not None else ScoreMeta())


def complete_rows(matrix: PerformanceMatrix) -> PerformanceMatrix:
    """Sub-matrix keeping only datasets with a score under every algorithm.

    Column set and both orders are preserved; idempotent.
    """
    keep = [i for i, row in enumerate(matrix.cells) if None not in row]
    return PerformanceMatrix(
        matrix.algorithms,
        tuple(matrix.datasets[i] for i in keep),
        tuple(matrix.cells[i] for i in keep),
        matrix.meta,
    )


def normalize_per_axis(matrix: PerformanceMatrix) -> PerformanceMatrix:
    """Divide each algorithm column by its max present score.

    After this the best dataset on every axis sits at 1.0, which puts all
    axes on a comparable footing for plots.  Gaps stay gaps.  Raises
    :class:`ZeroColumnError` for a column with no positive present value
    (all-missing or all-zero), since it cannot be scaled.
    """
    maxima: list[float] = []
    for j, name in enumerate(matrix.algorithms):
        present = [r[j] for r in matrix.cells if r[j] is not None]
        top = max(present) if present else 0.0
        if top <= 0.0:
            raise ZeroColumnError(
                f"algorithm column {name!r} has no positive present score")
        maxima.append(top)
    cells = tuple(
        tuple(None if v is None else v / maxima[j] for j, v in enumerate(row))
        for row in matrix.cells
    )
    return PerformanceMatrix(matrix.algorithms, matrix.datasets, cells, matrix.meta)


def row_vector(matrix: PerformanceMatrix, dataset: str) -> list[Score]:
    """One dataset's coordinates in the performance space (algorithm order)."""
    return list(matrix.row(dataset))
