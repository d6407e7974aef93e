"""Numeric layout refinement over a fixed scene graph.

Three modes share one objective (the sum of relation scores):

* hill_climb: perturb every free asset, keep the candidate only on strict
  improvement, otherwise fall back to the best layout seen.
* anneal: accept worse candidates with probability exp(delta/T) under a
  geometric cooling schedule; the best-ever layout is reported.
* grid_oracle: exhaustive search of a bounded lattice, used as the
  ground-truth reference for small instances.

Randomness is fully pinned: SeedSequence(cfg.seed) spawns one child per
restart, and each restart spawns one PCG64 stream per free asset (sorted
by asset id) plus one acceptance stream for annealing. Per iteration each
free asset draws dx, dy, then dz when perturb_z, then dyaw when
perturb_yaw, from its own stream.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from .geometry import Aabb, Euler, Layout, Vec3, add, clamp, sub, translate
from .scenegraph import SceneDocument, objective
from .skills.library import SkillLibrary


class NoFreeAssets(ValueError):
    """Every asset is frozen but there are relations to optimize."""


class GridTooLarge(ValueError):
    """The lattice exceeds the exhaustive-search budget."""


class MissingBounds(ValueError):
    """grid_oracle needs cfg.bounds to define its lattice."""


MODES = ("hill_climb", "anneal", "grid_oracle")


@dataclass(frozen=True)
class SolverConfig:
    max_iterations: int = 100
    adjustment_step: float = 0.1
    seed: int = 0
    mode: str = "hill_climb"
    perturb_z: bool = False
    perturb_yaw: bool = False
    anneal_t0: float = 1.0
    anneal_cooling: float = 0.95
    bounds: Aabb | None = None
    restarts: int = 1

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, "
                             f"got {self.mode!r}")
        if self.adjustment_step <= 0.0:
            raise ValueError("adjustment_step must be positive")
        if self.restarts < 1:
            raise ValueError("restarts must be at least 1")


@dataclass(frozen=True)
class SolveResult:
    layouts: dict  # asset id -> Layout
    score: float
    trace: tuple[float, ...]
    iterations_used: int


def perturb(layouts: Mapping[str, Layout], step: float,
            rng: np.random.Generator,
            perturb_z: bool = False) -> dict[str, Layout]:
    """Uniform jitter of every layout, +-step per axis, z held unless
    perturb_z. Assets draw in sorted-id order from the one generator."""
    out: dict[str, Layout] = dict(layouts)
    for aid in sorted(layouts):
        dx = rng.uniform(-step, step)
        dy = rng.uniform(-step, step)
        dz = rng.uniform(-step, step) if perturb_z else 0.0
        out[aid] = translate(layouts[aid], Vec3(dx, dy, dz))
    return out


def _clamp_into(location: Vec3, bounds: Aabb) -> Vec3:
    return Vec3(clamp(location.x, bounds.min.x, bounds.max.x),
                clamp(location.y, bounds.min.y, bounds.max.y),
                clamp(location.z, bounds.min.z, bounds.max.z))


def _perturb_one(layout: Layout, cfg: SolverConfig,
                 rng: np.random.Generator) -> Layout:
    dx = rng.uniform(-cfg.adjustment_step, cfg.adjustment_step)
    dy = rng.uniform(-cfg.adjustment_step, cfg.adjustment_step)
    dz = (rng.uniform(-cfg.adjustment_step, cfg.adjustment_step)
          if cfg.perturb_z else 0.0)
    target = add(layout.location, Vec3(dx, dy, dz))
    if cfg.bounds is not None:
        target = _clamp_into(target, cfg.bounds)
    moved = translate(layout, sub(target, layout.location))
    if cfg.perturb_yaw:
        dyaw = rng.uniform(-cfg.adjustment_step * math.pi,
                           cfg.adjustment_step * math.pi)
        o = moved.orientation
        moved = Layout(moved.location, moved.bbox,
                       Euler(o.pitch, o.yaw + dyaw, o.roll))
    return moved


def _asset_streams(seq: np.random.SeedSequence,
                   free: list[str]) -> tuple[dict, np.random.Generator]:
    children = seq.spawn(len(free) + 1)
    streams = {aid: np.random.Generator(np.random.PCG64(children[i]))
               for i, aid in enumerate(free)}
    accept = np.random.Generator(np.random.PCG64(children[-1]))
    return streams, accept


def _run_hill(relations, layouts0, free, cfg, library,
              seq) -> tuple[dict, float, list[float], int]:
    streams, _ = _asset_streams(seq, free)
    best = dict(layouts0)
    best_score = objective(relations, best, library)
    trace = [best_score]
    current = dict(best)
    for _ in range(cfg.max_iterations):
        candidate = dict(current)
        for aid in free:
            candidate[aid] = _perturb_one(candidate[aid], cfg, streams[aid])
        score = objective(relations, candidate, library)
        if score > best_score:
            best, best_score = candidate, score
            current = candidate
        else:
            current = dict(best)
        trace.append(best_score)
    return best, best_score, trace, cfg.max_iterations


def _run_anneal(relations, layouts0, free, cfg, library,
                seq) -> tuple[dict, float, list[float], int]:
    streams, accept_rng = _asset_streams(seq, free)
    current = dict(layouts0)
    current_score = objective(relations, current, library)
    best, best_score = dict(current), current_score
    trace = [best_score]
    temperature = cfg.anneal_t0
    for _ in range(cfg.max_iterations):
        candidate = dict(current)
        for aid in free:
            candidate[aid] = _perturb_one(candidate[aid], cfg, streams[aid])
        score = objective(relations, candidate, library)
        delta = score - current_score
        if delta > 0.0 or (temperature > 0.0
                           and accept_rng.random()
                           < math.exp(delta / temperature)):
            current, current_score = candidate, score
        if current_score > best_score:
            best, best_score = dict(current), current_score
        trace.append(best_score)
        temperature *= cfg.anneal_cooling
    return best, best_score, trace, cfg.max_iterations


def _axis_points(lo: float, hi: float, step: float) -> list[float]:
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [lo + i * step for i in range(n)]


def _run_grid(relations, layouts0, free, cfg,
              library) -> tuple[dict, float, list[float], int]:
    if cfg.bounds is None:
        raise MissingBounds("grid_oracle requires cfg.bounds")
    if len(free) > 3:
        raise GridTooLarge(f"{len(free)} free assets exceed the limit of 3")
    b = cfg.bounds
    xs = _axis_points(b.min.x, b.max.x, cfg.adjustment_step)
    ys = _axis_points(b.min.y, b.max.y, cfg.adjustment_step)
    per_asset: list[list[Vec3]] = []
    for aid in free:
        zs = (_axis_points(b.min.z, b.max.z, cfg.adjustment_step)
              if cfg.perturb_z else [layouts0[aid].location.z])
        points = [Vec3(x, y, z) for x in xs for y in ys for z in zs]
        if len(points) > 1000:
            raise GridTooLarge(
                f"asset '{aid}' has {len(points)} lattice points "
                f"(limit 1000)")
        per_asset.append(points)

    best = {aid: layouts0[aid] for aid in sorted(layouts0)}
    best_score = objective(relations, best, library)
    trace = [best_score]
    evaluated = 0
    candidate = dict(layouts0)
    for combo in itertools.product(*per_asset):
        for aid, point in zip(free, combo):
            base = layouts0[aid]
            candidate[aid] = translate(base, sub(point, base.location))
        score = objective(relations, candidate, library)
        evaluated += 1
        if score > best_score:
            best = dict(candidate)
            best_score = score
            trace.append(best_score)
    return best, best_score, trace, evaluated


def solve(doc: SceneDocument, cfg: SolverConfig, library: SkillLibrary,
          frozen: Iterable[str] = ()) -> SolveResult:
    """Optimize the free layouts of doc under its relation set.

    Frozen assets pass through bit-identical. A graph with no relations
    returns the input unchanged at score 0.0. grid_oracle ignores
    restarts (the search is deterministic); the other modes run
    cfg.restarts independent seeds and keep the best score, ties going to
    the earliest restart.
    """
    frozen = set(frozen)
    layouts0 = dict(doc.layouts)
    if not doc.relations:
        ordered = {aid: layouts0[aid] for aid in sorted(layouts0)}
        return SolveResult(ordered, 0.0, (0.0,), 0)
    free = sorted(aid for aid in layouts0 if aid not in frozen)
    if not free:
        raise NoFreeAssets("all assets are frozen")

    if cfg.mode == "grid_oracle":
        best, score, trace, used = _run_grid(
            doc.relations, layouts0, free, cfg, library)
        ordered = {aid: best[aid] for aid in sorted(best)}
        return SolveResult(ordered, score, tuple(trace), used)

    runner = _run_hill if cfg.mode == "hill_climb" else _run_anneal
    master = np.random.SeedSequence(cfg.seed)
    children = master.spawn(cfg.restarts)
    winner = None
    for r in range(cfg.restarts):
        best, score, trace, used = runner(
            doc.relations, layouts0, free, cfg, library, children[r])
        if winner is None or score > winner[0]:
            winner = (score, best, trace, used)
    score, best, trace, used = winner
    ordered = {aid: best[aid] for aid in sorted(best)}
    return SolveResult(ordered, score, tuple(trace), used)
