"""Two-iteration grid scan for simultaneous zero localization.

Every grid vertex X0 goes through three filters: the Jacobian at X0 must be
nonsingular, at least one of the two iterates X1, X2 must stay in the search
box, and finally X2 is kept iff ||f(X2)|| <= tolerance.  Captured points
cluster near the fixed points of the map; a greedy pass groups them.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .maps1d import IterativeMap
from .mapsnd import Box, StepStatus, VectorProblem, try_evaluate, jacobian_is_singular, vector_map_step

DEFAULT_CLUSTER_RADIUS = 1e-3


@dataclass(frozen=True)
class GridSpec:
    """nx by ny vertices spanning the box, endpoints inclusive."""

    domain: Box
    nx: int
    ny: int

    def __post_init__(self):
        if self.domain.dim != 2:
            raise ValueError("grid scans are 2-D")
        if self.nx < 2 or self.ny < 2:
            raise ValueError(f"need at least 2 vertices per axis, got {self.nx}x{self.ny}")

    @property
    def dx(self) -> float:
        return (self.domain.hi[0] - self.domain.lo[0]) / (self.nx - 1)

    @property
    def dy(self) -> float:
        return (self.domain.hi[1] - self.domain.lo[1]) / (self.ny - 1)

    @property
    def size(self) -> int:
        return self.nx * self.ny


@dataclass(frozen=True)
class CaptureConfig:
    grid: GridSpec
    tolerance: float
    map: IterativeMap
    cluster_radius: float = DEFAULT_CLUSTER_RADIUS
    norm: str = "max"

    def __post_init__(self):
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if self.cluster_radius <= 0:
            raise ValueError(f"cluster_radius must be positive, got {self.cluster_radius}")
        if self.norm not in ("max", "euclidean"):
            raise ValueError(f"norm must be 'max' or 'euclidean', got {self.norm!r}")


@dataclass(frozen=True)
class CapturedPoint:
    grid_i: int
    grid_j: int
    seed: np.ndarray
    point: np.ndarray
    fnorm: float
    objective: float | None


@dataclass(frozen=True)
class Cluster:
    representative: np.ndarray
    count: int
    members: tuple[int, ...] = ()


@dataclass(frozen=True)
class CaptureCounts:
    seeded: int = 0
    skipped_singular: int = 0
    step_failures: int = 0
    skipped_outside: int = 0
    rejected_tolerance: int = 0
    captured: int = 0


@dataclass(frozen=True)
class CaptureResult:
    captured: list[CapturedPoint]
    clusters: list[Cluster]
    counts: CaptureCounts


def _axis_vertices(lo: float, hi: float, count: int) -> np.ndarray:
    vertices = np.linspace(lo, hi, count)
    if lo == -hi:
        # Make the vertices bitwise antisymmetric so problems with mirror
        # symmetry produce mirror-identical scans.
        vertices = (vertices - vertices[::-1]) / 2.0
    return vertices


def make_grid(spec: GridSpec) -> list[np.ndarray]:
    """Vertices in row-major order: index i scans x, j scans y, j fastest."""
    xs = _axis_vertices(spec.domain.lo[0], spec.domain.hi[0], spec.nx)
    ys = _axis_vertices(spec.domain.lo[1], spec.domain.hi[1], spec.ny)
    return [np.array([xs[i], ys[j]]) for i in range(spec.nx) for j in range(spec.ny)]


def cluster_points(points: list[np.ndarray], radius: float) -> list[Cluster]:
    """Greedy clustering in input order.

    A point joins the first cluster whose representative lies within radius
    (Euclidean); the representative is the member mean, recomputed on join.
    """
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    sums: list[np.ndarray] = []
    members: list[list[int]] = []
    for position, point in enumerate(points):
        point = np.asarray(point, dtype=float)
        for idx in range(len(sums)):
            rep = sums[idx] / len(members[idx])
            if float(np.linalg.norm(point - rep)) <= radius:
                sums[idx] = sums[idx] + point
                members[idx].append(position)
                break
        else:
            sums.append(point.copy())
            members.append([position])
    return [
        Cluster(representative=s / len(m), count=len(m), members=tuple(m))
        for s, m in zip(sums, members)
    ]


def _residual_norm(vec: np.ndarray, norm: str) -> float:
    if norm == "euclidean":
        return float(np.linalg.norm(vec))
    return float(np.max(np.abs(vec)))


def _classify_seed(problem, config, index_and_seed):
    (grid_i, grid_j), seed = index_and_seed
    if try_evaluate(problem.f, seed) is None or jacobian_is_singular(problem, seed):
        return ("singular", None)
    first = vector_map_step(problem, config.map, seed)
    if first.status is not StepStatus.OK:
        return ("step_failure", None)
    second = vector_map_step(problem, config.map, first.next)
    if second.status is not StepStatus.OK:
        return ("step_failure", None)
    domain = config.grid.domain
    if not domain.contains(first.next) and not domain.contains(second.next):
        return ("outside", None)
    residual = try_evaluate(problem.f, second.next)
    fnorm = math.inf if residual is None else _residual_norm(residual, config.norm)
    if not fnorm <= config.tolerance:
        return ("rejected", None)
    objective = float(problem.objective(second.next)) if problem.objective else None
    return (
        "captured",
        CapturedPoint(
            grid_i=grid_i,
            grid_j=grid_j,
            seed=seed,
            point=second.next,
            fnorm=fnorm,
            objective=objective,
        ),
    )


def run_capture(problem: VectorProblem, config: CaptureConfig, threads: int = 1) -> CaptureResult:
    """Scan the grid with two iterations of the configured map.

    Per-seed outcomes are independent, so the work may fan out across
    threads; results are merged in grid-index order and the clustering pass
    runs after the merge, so the output is identical for any thread count.
    """
    seeds = make_grid(config.grid)
    indices = [(i, j) for i in range(config.grid.nx) for j in range(config.grid.ny)]
    work = list(zip(indices, seeds))
    if threads == 0:
        threads = os.cpu_count() or 1
    if threads == 1:
        outcomes = [_classify_seed(problem, config, item) for item in work]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(lambda item: _classify_seed(problem, config, item), work))
    tally = {"singular": 0, "step_failure": 0, "outside": 0, "rejected": 0, "captured": 0}
    captured = []
    for kind, payload in outcomes:
        tally[kind] += 1
        if payload is not None:
            captured.append(payload)
    counts = CaptureCounts(
        seeded=len(seeds),
        skipped_singular=tally["singular"],
        step_failures=tally["step_failure"],
        skipped_outside=tally["outside"],
        rejected_tolerance=tally["rejected"],
        captured=tally["captured"],
    )
    clusters = cluster_points([c.point for c in captured], config.cluster_radius)
    return CaptureResult(captured=captured, clusters=clusters, counts=counts)
