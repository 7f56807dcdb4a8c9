"""
Experiment Base Classes

A run samples work items, evaluates each into check records and hands the
records to a report writer. Evaluation is dispatched to a joblib pool; the
records always come back in item order.
"""
from abc import ABC, abstractmethod
from typing import Any, Dict, Generic, Iterable, List, Optional, TypeVar
from datetime import datetime
import logging
from dataclasses import dataclass, field
from enum import Enum, auto

from joblib import Parallel, delayed

from src.config.settings import settings
from src.utils.io import chunk_list

logger = logging.getLogger(__name__)

T = TypeVar('T')


class RunStatus(Enum):
    """Status of an experiment run."""
    PENDING = auto()
    RUNNING = auto()
    PASSED = auto()
    VIOLATED = auto()
    FAILED = auto()


@dataclass
class CheckRecord:
    """One evaluated check.

    ``passed`` is None for recorded-only values (regression numbers, flagged
    findings); those never count as violations.
    """
    check: str
    passed: Optional[bool]
    params: Dict[str, Any] = field(default_factory=dict)
    values: Dict[str, Any] = field(default_factory=dict)
    witness: Optional[Any] = None

    @property
    def violated(self) -> bool:
        return self.passed is False

    def to_dict(self) -> Dict[str, Any]:
        data = {'check': self.check, 'passed': self.passed, **self.params, **self.values}
        if self.witness is not None:
            data['witness'] = self.witness
        return data


@dataclass
class RunStats:
    """Statistics for an experiment run."""
    start_time: Optional[datetime] = None
    end_time: Optional[datetime] = None
    status: RunStatus = RunStatus.PENDING
    items_sampled: int = 0
    checks_run: int = 0
    checks_passed: int = 0
    checks_violated: int = 0
    checks_recorded: int = 0
    errors: List[Dict[str, Any]] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def duration(self) -> Optional[float]:
        """Duration of the run in seconds."""
        if self.start_time and self.end_time:
            return (self.end_time - self.start_time).total_seconds()
        return None

    def tally(self, records: Iterable[CheckRecord]) -> None:
        for record in records:
            self.checks_run += 1
            if record.passed is None:
                self.checks_recorded += 1
            elif record.passed:
                self.checks_passed += 1
            else:
                self.checks_violated += 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            'status': self.status.name,
            'duration_seconds': self.duration,
            'items_sampled': self.items_sampled,
            'checks_run': self.checks_run,
            'checks_passed': self.checks_passed,
            'checks_violated': self.checks_violated,
            'checks_recorded': self.checks_recorded,
            'error_count': len(self.errors),
            'metadata': self.metadata,
        }


class BaseSampler(ABC, Generic[T]):
    """Produces the work items of a run."""

    def __init__(self, name: Optional[str] = None):
        self.name = name or self.__class__.__name__

    @abstractmethod
    def sample(self) -> Iterable[T]:
        """Yield work items in a deterministic order."""


class BaseEvaluator(ABC, Generic[T]):
    """Turns one work item into check records."""

    def __init__(self, name: Optional[str] = None):
        self.name = name or self.__class__.__name__

    @abstractmethod
    def evaluate(self, item: T) -> List[CheckRecord]:
        """Evaluate one item.

        Args:
            item: Work item produced by the sampler

        Returns:
            Check records for the item
        """

    def finalize(self, records: List[CheckRecord]) -> List[CheckRecord]:
        """Hook for checks spanning all items; appends nothing by default."""
        return []


class BaseReportWriter(ABC):
    """Persists check records."""

    def __init__(self, name: Optional[str] = None):
        self.name = name or self.__class__.__name__

    @abstractmethod
    def write(self, records: List[CheckRecord]) -> bool:
        """Write the records.

        Returns:
            True if the write succeeded
        """


class ExperimentPipeline(Generic[T]):
    """Orchestrates sampling, evaluation and reporting."""

    def __init__(
        self,
        sampler: BaseSampler[T],
        evaluator: BaseEvaluator[T],
        writer: BaseReportWriter,
        name: Optional[str] = None,
        n_jobs: Optional[int] = None,
        batch_size: int = 64,
    ):
        self.sampler = sampler
        self.evaluator = evaluator
        self.writer = writer
        self.name = name or f"{sampler.name}_{evaluator.name}_{writer.name}"
        self.n_jobs = n_jobs or settings.N_JOBS
        self.batch_size = batch_size
        self.stats = RunStats()
        self.records: List[CheckRecord] = []

    def _evaluate_all(self, items: List[T]) -> List[CheckRecord]:
        records: List[CheckRecord] = []
        batches = chunk_list(items, self.batch_size)
        with Parallel(n_jobs=self.n_jobs) as parallel:
            for i, batch in enumerate(batches, start=1):
                results = parallel(delayed(self.evaluator.evaluate)(item) for item in batch)
                for item_records in results:
                    records.extend(item_records)
                logger.debug(f"[{self.name}] Evaluated batch {i}/{len(batches)}")
        records.extend(self.evaluator.finalize(records))
        return records

    def run(self) -> RunStatus:
        """Run the pipeline and return PASSED or VIOLATED."""
        self.stats.status = RunStatus.RUNNING
        self.stats.start_time = datetime.utcnow()

        try:
            logger.info(f"[{self.name}] Starting sampling...")
            items = list(self.sampler.sample())
            self.stats.items_sampled = len(items)

            logger.info(f"[{self.name}] Evaluating {len(items)} items...")
            self.records = self._evaluate_all(items)
            self.stats.tally(self.records)

            for record in self.records:
                if record.violated:
                    logger.warning(f"[{self.name}] Violation in {record.check}: {record.to_dict()}")

            logger.info(f"[{self.name}] Writing report...")
            if not self.writer.write(self.records):
                raise IOError(f"report writer {self.writer.name} failed")

            self.stats.status = RunStatus.VIOLATED if self.stats.checks_violated else RunStatus.PASSED
            self.stats.end_time = datetime.utcnow()
            logger.info(
                f"[{self.name}] Run finished with {self.stats.status.name} in "
                f"{self.stats.duration:.2f} seconds ({self.stats.checks_run} checks)"
            )
            return self.stats.status

        except Exception as e:
            self.stats.status = RunStatus.FAILED
            self.stats.end_time = datetime.utcnow()
            self.stats.errors.append({
                'error': str(e),
                'type': type(e).__name__,
            })
            logger.exception(f"[{self.name}] Run failed after {self.stats.duration:.2f} seconds")
            raise

    def get_stats(self) -> Dict[str, Any]:
        stats = self.stats.to_dict()
        stats['name'] = self.name
        return stats


class ExperimentPipelineBuilder(Generic[T]):
    """Builder for creating ExperimentPipeline instances."""

    def __init__(self):
        self._sampler = None
        self._evaluator = None
        self._writer = None
        self._name = None
        self._n_jobs = None

    def with_sampler(self, sampler: BaseSampler[T]) -> 'ExperimentPipelineBuilder[T]':
        self._sampler = sampler
        return self

    def with_evaluator(self, evaluator: BaseEvaluator[T]) -> 'ExperimentPipelineBuilder[T]':
        self._evaluator = evaluator
        return self

    def with_writer(self, writer: BaseReportWriter) -> 'ExperimentPipelineBuilder[T]':
        self._writer = writer
        return self

    def with_name(self, name: str) -> 'ExperimentPipelineBuilder[T]':
        self._name = name
        return self

    def with_jobs(self, n_jobs: Optional[int]) -> 'ExperimentPipelineBuilder[T]':
        self._n_jobs = n_jobs
        return self

    def build(self) -> ExperimentPipeline[T]:
        """Build the pipeline."""
        if not all([self._sampler, self._evaluator, self._writer]):
            raise ValueError("Sampler, evaluator, and writer must be set")

        return ExperimentPipeline(
            sampler=self._sampler,
            evaluator=self._evaluator,
            writer=self._writer,
            name=self._name,
            n_jobs=self._n_jobs,
        )
