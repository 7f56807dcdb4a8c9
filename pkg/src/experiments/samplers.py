"""
Samplers

Deterministic sources of work items. Seeded samplers give item i the i-th
child of SeedSequence(seed), so items do not depend on the worker count.
"""
import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, Iterator, List, Optional, Sequence, TypeVar

import numpy as np

from src.algebra.group import GroupCtx
from src.analysis.sets import SAMPLER_REGIMES, SetCorpus, sharp_example
from src.experiments.base import BaseSampler
from src.models.subset import HSubset

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass
class LabeledSet:
    """A set K tagged with where it came from (``random``, ``flat``, ``box`` ...)."""
    label: str
    index: int
    K: HSubset

    @property
    def params(self) -> Dict[str, Any]:
        return {"set": self.label, "index": self.index, "q": self.K.ctx.q, "n": self.K.ctx.n}


class ListSampler(BaseSampler[T]):
    """Yields a fixed list of items."""

    def __init__(self, items: Iterable[T], name: Optional[str] = None):
        super().__init__(name)
        self.items = list(items)

    def sample(self) -> Iterator[T]:
        yield from self.items


class SeededSampler(BaseSampler[T]):
    """Builds ``count`` items with ``factory(index, rng)``."""

    def __init__(
        self,
        count: int,
        factory: Callable[[int, np.random.Generator], T],
        seed: int = 0,
        name: Optional[str] = None,
    ):
        super().__init__(name)
        self.count = count
        self.factory = factory
        self.seed = seed

    def sample(self) -> Iterator[T]:
        children = np.random.SeedSequence(self.seed).spawn(self.count)
        for i, child in enumerate(children):
            yield self.factory(i, np.random.default_rng(child))


class SetCorpusSampler(BaseSampler[LabeledSet]):
    """Random sets over several groups, followed by the sharpness examples."""

    def __init__(
        self,
        groups: Sequence[GroupCtx],
        count: int,
        seed: int = 0,
        regimes: Sequence[str] = SAMPLER_REGIMES,
        examples: Sequence[str] = ("flat",),
        box_sizes: Sequence[int] = (),
        name: Optional[str] = None,
    ):
        super().__init__(name)
        self.groups = list(groups)
        self.count = count
        self.seed = seed
        self.regimes = regimes
        self.examples = examples
        self.box_sizes = box_sizes

    def _examples(self, ctx: GroupCtx) -> List[LabeledSet]:
        found = []
        for kind in self.examples:
            if kind == "line_t0" and ctx.n != 1:
                continue
            found.append(LabeledSet(kind, 0, sharp_example(ctx, kind, t0=0)))
        if ctx.n == 1:
            for m in self.box_sizes:
                if m <= ctx.q:
                    elements = [int(e) for e in ctx.field.elements()[:m]]
                    found.append(LabeledSet("box", m, sharp_example(ctx, "box", A=elements, B=elements)))
        return found

    def sample(self) -> Iterator[LabeledSet]:
        for g, ctx in enumerate(self.groups):
            corpus = SetCorpus(ctx, self.count, seed=self.seed + g, regimes=self.regimes)
            for i, K in corpus:
                if K.size:
                    yield LabeledSet("random", i, K)
            yield from self._examples(ctx)


class ChainSampler(BaseSampler[Any]):
    """Items of several samplers, one sampler after another."""

    def __init__(self, samplers: Sequence[BaseSampler[Any]], name: Optional[str] = None):
        super().__init__(name)
        self.samplers = list(samplers)

    def sample(self) -> Iterator[Any]:
        for sampler in self.samplers:
            yield from sampler.sample()
