"""The q2cert batch coordinator."""

from __future__ import annotations

import asyncio
from collections import Counter
from collections.abc import Iterable
from concurrent.futures import Executor, ProcessPoolExecutor, ThreadPoolExecutor
from dataclasses import dataclass, field
import json
import logging
from pathlib import Path
import time
from typing import Any

from .certificate import certificate_to_dict
from .config import Q2CertConfig
from .const import Verdict
from .errors import Q2CertError
from .graph import parse_graph6
from .pipeline import classify

_LOGGER = logging.getLogger(__name__)


@dataclass(slots=True)
class BatchSummary:
    """Verdict counts for one batch run."""

    total: int = 0
    verdicts: Counter[str] = field(default_factory=Counter)
    errors: int = 0
    elapsed: float = 0.0

    def as_dict(self) -> dict[str, Any]:
        return {
            "elapsed": self.elapsed,
            "errors": self.errors,
            "total": self.total,
            "verdicts": {str(v): self.verdicts.get(str(v), 0) for v in Verdict},
        }


def classify_line(index: int, line: str, config: Q2CertConfig) -> dict[str, Any]:
    """Classify one graph6 line into a JSON-ready record; never raises on bad input."""
    record: dict[str, Any] = {"index": index, "graph6": line}
    try:
        cert = classify(parse_graph6(line), config)
    except Q2CertError as err:
        _LOGGER.warning("Line %d (%s) rejected: %s", index + 1, line, err)
        record["error"] = {"type": type(err).__name__, "message": str(err)}
        return record
    record["verdict"] = str(cert.verdict)
    record["certificate"] = certificate_to_dict(cert)
    return record


class BatchCoordinator:
    """Classify many graphs on a bounded worker pool, writing records in input order."""

    def __init__(self, config: Q2CertConfig | None = None, jobs: int | None = None) -> None:
        self.config = config or Q2CertConfig()
        self.jobs = max(1, jobs if jobs is not None else self.config.jobs)
        self.summary = BatchSummary()

    def _executor(self) -> Executor:
        if self.jobs == 1:
            return ThreadPoolExecutor(max_workers=1)
        return ProcessPoolExecutor(max_workers=self.jobs)

    async def async_classify_lines(self, lines: Iterable[str]) -> list[dict[str, Any]]:
        """Classify graph6 lines concurrently; blank lines are skipped."""
        words = [w for w in (raw.strip() for raw in lines) if w]
        loop = asyncio.get_running_loop()
        slots = asyncio.Semaphore(self.jobs)
        started = time.monotonic()

        with self._executor() as pool:

            async def run(index: int, word: str) -> dict[str, Any]:
                async with slots:
                    return await loop.run_in_executor(pool, classify_line, index, word, self.config)

            records = await asyncio.gather(*(run(i, w) for i, w in enumerate(words)))

        records.sort(key=lambda r: r["index"])
        self.summary = BatchSummary(
            total=len(records),
            verdicts=Counter(r["verdict"] for r in records if "verdict" in r),
            errors=sum(1 for r in records if "error" in r),
            elapsed=time.monotonic() - started,
        )
        _LOGGER.info(
            "Batch of %d graphs: %s, %d errors in %.1fs",
            self.summary.total,
            dict(self.summary.verdicts),
            self.summary.errors,
            self.summary.elapsed,
        )
        return records

    async def async_run(self, source: Path, destination: Path) -> BatchSummary:
        """Read ``source`` (one graph6 per line) and write one JSON record per line to ``destination``."""
        lines = source.read_text(encoding="ascii").splitlines()
        records = await self.async_classify_lines(lines)
        with destination.open("w", encoding="utf-8") as out:
            for record in records:
                out.write(json.dumps(record, sort_keys=True))
                out.write("\n")
        return self.summary
