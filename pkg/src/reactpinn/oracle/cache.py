# this_file: src/reactpinn/oracle/cache.py
"""
On-disk cache of finite-difference reference grids.

Each grid is stored as a flat little-endian float64 ``.bin`` file next to a
JSON header with its shape, ranges and SHA-256 digest.
"""

import hashlib
import json
import logging
import os
from pathlib import Path
from typing import Optional

import numpy as np

from ..problems import ProblemSpec
from .solvers import FDGrid, fd_solve, time_horizon

logger = logging.getLogger(__name__)

CACHE_ENV = "REACTPINN_CACHE_DIR"


def default_cache_dir() -> Path:
    """``$REACTPINN_CACHE_DIR`` if set, else ``~/.cache/reactpinn``."""
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "reactpinn"


class ReferenceCache:
    """Stores and retrieves reference grids keyed by problem and resolution."""

    def __init__(self, directory: Optional[Path] = None):
        """
        Args:
            directory: Cache location (defaults to ``default_cache_dir()``)
        """
        self.directory = Path(directory) if directory is not None else default_cache_dir()

    def key(self, name: str, nx: int, nt: int) -> str:
        return f"{name}_nx{nx}_nt{nt}"

    def paths(self, name: str, nx: int, nt: int):
        stem = self.directory / self.key(name, nx, nt)
        return stem.with_suffix(".bin"), stem.with_suffix(".json")

    def load(self, spec: ProblemSpec, nx: int, nt: int) -> Optional[FDGrid]:
        """
        Cached grid for ``spec`` at ``nx`` by ``nt``, or ``None`` on a miss.

        Entries whose header or digest does not match are treated as misses.
        """
        data_path, header_path = self.paths(spec.name, nx, nt)
        if not (data_path.exists() and header_path.exists()):
            return None
        try:
            header = json.loads(header_path.read_text())
            raw = data_path.read_bytes()
        except (OSError, ValueError) as e:
            logger.warning("Ignoring unreadable cache entry %s: %s", header_path, e)
            return None

        x_range = tuple(spec.train_domain.x_range)
        t_range = time_horizon(spec)
        expected = {"name": spec.name, "nx": nx, "nt": nt}
        if any(header.get(k) != v for k, v in expected.items()) or (
            tuple(header.get("x_range", ())) != x_range
            or tuple(header.get("t_range", ())) != t_range
        ):
            logger.warning("Cache header %s does not match %s; recomputing", header_path, spec.name)
            return None
        if hashlib.sha256(raw).hexdigest() != header.get("sha256"):
            logger.warning("Checksum mismatch for %s; recomputing", data_path)
            return None

        values = np.frombuffer(raw, dtype="<f8").reshape(nx, nt).astype(np.float64)
        logger.debug("Loaded %s reference from %s", spec.name, data_path)
        return FDGrid(
            name=spec.name,
            x=np.linspace(*x_range, nx),
            t=np.linspace(*t_range, nt),
            values=values,
        )

    def store(self, grid: FDGrid) -> Path:
        """Write ``grid`` and its header; returns the data file path."""
        self.directory.mkdir(parents=True, exist_ok=True)
        data_path, header_path = self.paths(grid.name, grid.nx, grid.nt)
        raw = np.ascontiguousarray(grid.values, dtype="<f8").tobytes()
        data_path.write_bytes(raw)
        header = {
            "name": grid.name,
            "nx": grid.nx,
            "nt": grid.nt,
            "x_range": list(grid.x_range),
            "t_range": list(grid.t_range),
            "sha256": hashlib.sha256(raw).hexdigest(),
        }
        header_path.write_text(json.dumps(header, indent=2))
        logger.info("Cached %s reference (%d x %d) at %s", grid.name, grid.nx, grid.nt, data_path)
        return data_path


def cached_fd_solve(
    spec: ProblemSpec, nx: int, nt: int, cache: Optional[ReferenceCache] = None
) -> FDGrid:
    """``fd_solve`` with a read-through cache; ``cache=None`` disables caching."""
    if cache is not None:
        grid = cache.load(spec, nx, nt)
        if grid is not None:
            return grid
    logger.info("Computing %s reference on a %d x %d grid", spec.name, nx, nt)
    grid = fd_solve(spec, nx, nt)
    if cache is not None:
        try:
            cache.store(grid)
        except OSError as e:
            logger.warning("Could not write reference cache: %s", e)
    return grid
