from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import logging
import time
import uuid

from pydantic import BaseModel, Field


logger = logging.getLogger(__name__)


def tool_version() -> str:
    try:
        return version("orlicz-lab")
    except PackageNotFoundError:
        return "0.0.0+unknown"


class RunManifest(BaseModel):
    run_id: str = Field(..., description="The run ID")
    command: str = Field(..., description="Subcommand that produced the run")
    config_path: str | None = Field(None, description="Experiment config the run read")
    seed: int = Field(..., description="RNG seed of the random test-function families")
    version: str = Field(..., description="orlicz-lab version")
    wall_clock_seconds: float = Field(0.0, description="Elapsed wall-clock time")
    result_files: list[str] = Field(default_factory=list, description="Files written by the run")
    exit_code: int | None = Field(None, description="Process exit code")


class RunRecorder:
    """Gives every run a unique ID, logs its start and completion and collects its result files."""

    def __init__(self, command: str, config_path: str | Path | None, seed: int):
        self.run_id = str(uuid.uuid4())
        self.command = command
        self.config_path = None if config_path is None else str(config_path)
        self.seed = seed
        self.result_files: list[str] = []
        self._started: float | None = None
        self._elapsed = 0.0

    def __enter__(self) -> "RunRecorder":
        self._started = time.perf_counter()
        logger.info(f"Run started: {self.command} {self.config_path or '-'} (run_id: {self.run_id})")
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        self._elapsed = time.perf_counter() - self._started
        outcome = "completed" if exc_type is None else f"aborted by {exc_type.__name__}"
        logger.info(f"Run {outcome}: {self.command} {self.config_path or '-'} (run_id: {self.run_id})")

    def add(self, path: Path) -> Path:
        self.result_files.append(Path(path).name)
        return path

    def manifest(self, exit_code: int | None = None) -> RunManifest:
        elapsed = self._elapsed if self._elapsed else time.perf_counter() - (self._started or time.perf_counter())
        return RunManifest(
            run_id=self.run_id,
            command=self.command,
            config_path=self.config_path,
            seed=self.seed,
            version=tool_version(),
            wall_clock_seconds=round(elapsed, 3),
            result_files=list(self.result_files),
            exit_code=exit_code,
        )
