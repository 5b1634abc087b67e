"""Memory ceiling accounting for long computations."""

from __future__ import annotations

import psutil


class ResourceLimitExceeded(RuntimeError):
    def __init__(self, used: int, limit: int, progress: str):
        super().__init__(
            f"memory ceiling exceeded: {used / 2**20:.0f} MiB used, "
            f"limit {limit / 2**20:.0f} MiB; progress: {progress}"
        )
        self.used = used
        self.limit = limit
        self.progress = progress


class Budget:
    """Resident-memory ceiling checked at stage and block boundaries."""

    def __init__(self, limit_bytes: int):
        if limit_bytes <= 0:
            raise ValueError("memory ceiling must be positive")
        self.limit = limit_bytes
        self.peak = 0
        self.last_progress = "not started"
        self._proc = psutil.Process()

    def used(self) -> int:
        return self._proc.memory_info().rss

    def check(self, progress: str) -> None:
        used = self.used()
        self.peak = max(self.peak, used)
        if used > self.limit:
            raise ResourceLimitExceeded(used, self.limit, self.last_progress)
        self.last_progress = progress
