#!/usr/bin/env python3
"""GridSweep class evaluating parameter-grid chunks on a thread pool."""

from concurrent.futures import Future, ThreadPoolExecutor, as_completed
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from loguru import logger

from framebound.config import DEFAULT_SWEEP_CHUNK, DEFAULT_THREADS, ROOT_RTOL
from framebound.models import SweepCandidate

GridPoint = Tuple[float, ...]
ChunkEvaluator = Callable[[List[GridPoint]], List[SweepCandidate]]


def near_minimum(candidates: Sequence[SweepCandidate], rtol: float = ROOT_RTOL) -> List[SweepCandidate]:
    """Candidates whose root lies within rtol of the smallest root."""
    if not candidates:
        return []
    t_min = min(c.t_star for c in candidates)
    limit = t_min + rtol * abs(t_min)
    return [c for c in candidates if c.t_star <= limit]


def reduce_candidates(candidates: Sequence[SweepCandidate], rtol: float = ROOT_RTOL) -> SweepCandidate:
    """
    Deterministic min-reduction: smallest root, ties broken by the smallest parameter tuple.

    Raises:
        ValueError: If there are no candidates
    """
    tied = near_minimum(candidates, rtol)
    if not tied:
        raise ValueError("no sweep candidates to reduce")
    return min(tied, key=lambda c: c.parameters)


class GridSweep:
    """Evaluates a parameter grid in fixed-size chunks with multi-threading."""

    def __init__(
        self,
        evaluate_chunk: ChunkEvaluator,
        threads: int = DEFAULT_THREADS,
        chunk_size: int = DEFAULT_SWEEP_CHUNK,
    ) -> None:
        """
        Initialize GridSweep.

        Args:
            evaluate_chunk: Function returning the best candidates of a chunk of grid points
            threads: Maximum number of parallel threads
            chunk_size: Grid points per work item (independent of threads)
        """
        if threads < 1:
            raise ValueError(f"threads must be >= 1, got {threads}")
        if chunk_size < 1:
            raise ValueError(f"chunk_size must be >= 1, got {chunk_size}")

        self.evaluate_chunk: ChunkEvaluator = evaluate_chunk
        self.threads: int = threads
        self.chunk_size: int = chunk_size

    def chunks(self, points: Sequence[GridPoint]) -> List[List[GridPoint]]:
        """Split grid points into consecutive chunks of chunk_size."""
        return [list(points[i : i + self.chunk_size]) for i in range(0, len(points), self.chunk_size)]

    def run(self, points: Sequence[GridPoint]) -> List[SweepCandidate]:
        """
        Evaluate every chunk and gather the per-chunk candidates in chunk order.

        Args:
            points: Grid points in lexicographic order

        Returns:
            Concatenated candidates of all chunks
        """
        chunks = self.chunks(points)
        results: List[Optional[List[SweepCandidate]]] = [None] * len(chunks)

        if self.threads == 1 or len(chunks) <= 1:
            for index, chunk in enumerate(chunks):
                results[index] = self.evaluate_chunk(chunk)
        else:
            with ThreadPoolExecutor(max_workers=self.threads) as executor:
                futures: Dict[Future[List[SweepCandidate]], int] = {
                    executor.submit(self.evaluate_chunk, chunk): index for index, chunk in enumerate(chunks)
                }
                for future in as_completed(futures):
                    results[futures[future]] = future.result()

        logger.debug("Swept {} grid points in {} chunks on {} threads", len(points), len(chunks), self.threads)
        return [candidate for result in results for candidate in (result or [])]
