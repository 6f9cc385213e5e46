"""Time-dependent concession and iso-utility offer sampling.

A time tactic maps normalised time t in [0, 1] to the utility an agent
demands. Offers at a demanded utility level are drawn by sampling random
points in the issue box and projecting them onto the target iso-utility
hyperplane; among the on-target candidates the agent keeps the one nearest
its reference offers.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _kernels
from .domain import PreferenceProfile, ideal_offer

logger = logging.getLogger(__name__)

PROJECTION_ITERATIONS = 10


@dataclass(frozen=True)
class TimeTactic:
    """Concession curve parameters.

    beta < 1 concedes late (boulware), beta == 1 linearly, beta > 1 early
    (conceder). The deadline is normalised time, fixed at 1.0.
    """

    beta: float
    reservation_utility: float = 0.0
    deadline: float = 1.0

    def __post_init__(self) -> None:
        if self.beta <= 0.0:
            raise ValueError("beta must be positive")
        if not 0.0 <= self.reservation_utility <= 1.0:
            raise ValueError("reservation utility must lie in [0, 1]")
        if self.deadline != 1.0:
            raise ValueError("the deadline is normalised and fixed at 1.0")


def demand(tactic: TimeTactic, t: float) -> float:
    """Utility demanded at normalised time t.

    demand(0) == 1 and demand(1) == the reservation utility, exactly.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"normalised time {t!r} outside [0, 1]")
    if t == tactic.deadline:
        # the closed form lands here up to round-off; pin the endpoint
        return tactic.reservation_utility
    ratio = t / tactic.deadline
    return 1.0 - (1.0 - tactic.reservation_utility) * ratio ** (1.0 / tactic.beta)


@dataclass(frozen=True)
class IsoSamplerConfig:
    candidate_count: int = 500
    utility_tolerance: float = 1e-6

    def __post_init__(self) -> None:
        if self.candidate_count < 1:
            raise ValueError("candidate_count must be positive")
        if self.utility_tolerance <= 0.0:
            raise ValueError("utility_tolerance must be positive")


DEFAULT_SAMPLER = IsoSamplerConfig()


def select_candidate(
    points: np.ndarray,
    utilities: np.ndarray,
    valid: np.ndarray,
    references: np.ndarray | None,
) -> np.ndarray | None:
    """Pick the winning candidate among projected points.

    With references: the valid point minimising the summed Euclidean distance
    to all references. Without: the valid point with the highest utility.
    Ties go to the lowest candidate index. Returns None when nothing is valid.
    """
    idx = np.flatnonzero(valid)
    if idx.size == 0:
        return None
    if references is not None and len(references) > 0:
        dists = _kernels.ref_distance_sums(points[idx], references)
        return points[idx[int(np.argmin(dists))]].copy()
    return points[idx[int(np.argmax(utilities[idx]))]].copy()


def sample_iso_offer(
    profile: PreferenceProfile,
    target_u: float,
    references: Sequence[np.ndarray] | None,
    rng: np.random.Generator,
    config: IsoSamplerConfig = DEFAULT_SAMPLER,
) -> np.ndarray:
    """Draw an offer whose utility to ``profile`` is ``target_u`` within tolerance.

    references steer the choice among on-target candidates toward familiar
    ground; an empty reference list keeps the candidate with the largest
    utility margin instead. target_u == 1 pins the ideal offer (the iso
    surface degenerates to a single point there).
    """
    if not 0.0 <= target_u <= 1.0:
        raise ValueError("target utility must lie in [0, 1]")
    if target_u >= 1.0:
        return ideal_offer(profile)
    cands = rng.random((config.candidate_count, profile.n_issues))
    if references:
        refs = np.ascontiguousarray(np.vstack([np.asarray(r, dtype=np.float64) for r in references]))
    else:
        refs = np.empty((0, profile.n_issues))
    point, _, found = _kernels.choose_iso(
        cands,
        profile.gradient,
        profile.offset,
        target_u,
        config.utility_tolerance,
        PROJECTION_ITERATIONS,
        refs,
    )
    if not found:
        # target effectively unreachable from the sampled cloud; concede nothing
        logger.debug("no on-target candidate at u=%.6f for %s", target_u, profile.name)
        return ideal_offer(profile)
    return point
