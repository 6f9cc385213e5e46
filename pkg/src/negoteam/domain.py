"""Negotiation domains: issues, offers, and additive preference profiles.

An offer assigns every issue a value in [0, 1]. Agents score offers with
weighted additive utilities built from per-issue linear valuations, so the
whole utility surface is affine and spans exactly [0, 1].
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

logger = logging.getLogger(__name__)

WEIGHT_SUM_TOL = 1e-9


class Direction(str, Enum):
    """Per-issue monotonicity of an agent's valuation."""

    INCREASING = "increasing"
    DECREASING = "decreasing"


def valuation(direction: Direction | str, value: float) -> float:
    """Linear per-issue valuation: identity when increasing, 1 - x when decreasing."""
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"issue value {value!r} outside [0, 1]")
    if Direction(direction) is Direction.INCREASING:
        return float(value)
    return 1.0 - float(value)


@dataclass
class PreferenceProfile:
    """Additive utility over the domain issues.

    weights must be non-negative and sum to one (tolerance WEIGHT_SUM_TOL),
    one weight and one direction per issue.
    """

    name: str
    weights: np.ndarray
    directions: tuple[Direction, ...]
    reservation_utility: float = 0.0

    # derived, set in __post_init__
    signs: np.ndarray = field(init=False, repr=False)
    gradient: np.ndarray = field(init=False, repr=False)
    offset: float = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.directions = tuple(Direction(d) for d in self.directions)
        if self.weights.ndim != 1 or self.weights.size == 0:
            raise ValueError("weights must be a non-empty 1-D vector")
        if len(self.directions) != self.weights.size:
            raise ValueError("one direction required per weight")
        if np.any(self.weights < 0.0):
            raise ValueError("weights must be non-negative")
        if abs(float(self.weights.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError(f"weights of {self.name!r} must sum to 1")
        if not 0.0 <= self.reservation_utility <= 1.0:
            raise ValueError("reservation utility must lie in [0, 1]")
        self.signs = np.array(
            [1.0 if d is Direction.INCREASING else -1.0 for d in self.directions]
        )
        # utility(x) = offset + gradient . x, an affine map onto [0, 1]
        self.gradient = self.weights * self.signs
        self.offset = float(self.weights[self.signs < 0.0].sum())

    @property
    def n_issues(self) -> int:
        return int(self.weights.size)


def as_offer(values: Iterable[float], n_issues: int | None = None) -> np.ndarray:
    """Validate and normalise an offer vector: one float in [0, 1] per issue."""
    offer = np.asarray(list(values) if not isinstance(values, np.ndarray) else values,
                       dtype=np.float64)
    if offer.ndim != 1:
        raise ValueError("an offer must be a 1-D vector")
    if n_issues is not None and offer.size != n_issues:
        raise ValueError(f"offer has {offer.size} values, domain has {n_issues} issues")
    if np.any(offer < 0.0) or np.any(offer > 1.0):
        raise ValueError("offer values must lie in [0, 1]")
    return offer


def utility(profile: PreferenceProfile, offer: np.ndarray) -> float:
    """Weighted additive utility of a complete offer, always in [0, 1]."""
    offer = as_offer(offer, profile.n_issues)
    return float(profile.offset + profile.gradient @ offer)


def utility_unchecked(profile: PreferenceProfile, offer: np.ndarray) -> float:
    """``utility`` minus input validation, for hot loops on trusted vectors."""
    return float(profile.offset + profile.gradient @ offer)


@dataclass
class PartialOffer:
    """Offer under construction: values for a subset of issues.

    Unset issues carry no utility contribution. ``set`` is idempotent per
    issue; completing the offer requires every issue to be set.
    """

    values: np.ndarray
    mask: np.ndarray

    @classmethod
    def empty(cls, n_issues: int) -> "PartialOffer":
        return cls(values=np.zeros(n_issues), mask=np.zeros(n_issues, dtype=bool))

    def set(self, issue: int, value: float) -> None:
        if not 0.0 <= value <= 1.0:
            raise ValueError("issue value outside [0, 1]")
        self.values[issue] = value
        self.mask[issue] = True

    @property
    def is_complete(self) -> bool:
        return bool(self.mask.all())

    def to_offer(self) -> np.ndarray:
        if not self.is_complete:
            raise ValueError("partial offer still has unset issues")
        return self.values.copy()


def partial_utility(profile: PreferenceProfile, partial: PartialOffer) -> float:
    """Utility contribution of the issues set so far."""
    if partial.values.size != profile.n_issues:
        raise ValueError("partial offer does not match the profile's issue count")
    m = partial.mask
    vals = np.where(profile.signs[m] > 0.0, partial.values[m], 1.0 - partial.values[m])
    return float(profile.weights[m] @ vals)


def ideal_offer(profile: PreferenceProfile) -> np.ndarray:
    """The unique offer with utility exactly 1 for this profile."""
    return np.where(profile.signs > 0.0, 1.0, 0.0)


def worst_value(profile: PreferenceProfile, issue: int) -> float:
    """Value of one issue at this profile's least favourable extreme."""
    return 0.0 if profile.signs[issue] > 0.0 else 1.0


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

@dataclass
class Scenario:
    """A named domain plus the team-side and opponent-side profiles."""

    name: str
    issues: tuple[str, ...]
    team_profiles: tuple[PreferenceProfile, ...]
    opponent_profile: PreferenceProfile

    def __post_init__(self) -> None:
        n = len(self.issues)
        for p in (*self.team_profiles, self.opponent_profile):
            if p.n_issues != n:
                raise ValueError(f"profile {p.name!r} does not cover all {n} issues")
        if not self.team_profiles:
            raise ValueError("a scenario needs at least one team profile")

    @property
    def n_issues(self) -> int:
        return len(self.issues)

    def profile_by_name(self, name: str) -> PreferenceProfile:
        for p in (*self.team_profiles, self.opponent_profile):
            if p.name == name:
                return p
        raise KeyError(name)


def hotel_booking() -> Scenario:
    """Built-in four-issue booking domain with three team members and one opponent.

    The team wants low prices, low cancellation fees, late payment and a high
    discount; the opponent wants the exact opposite on every issue.
    """
    team_dirs = (
        Direction.DECREASING,  # price_per_person
        Direction.DECREASING,  # cancellation_fee
        Direction.INCREASING,  # payment_deadline
        Direction.INCREASING,  # bar_discount
    )
    opp_dirs = (
        Direction.INCREASING,
        Direction.INCREASING,
        Direction.DECREASING,
        Direction.DECREASING,
    )
    return Scenario(
        name="hotel-booking",
        issues=("price_per_person", "cancellation_fee", "payment_deadline", "bar_discount"),
        team_profiles=(
            PreferenceProfile("a1", np.array([0.50, 0.10, 0.05, 0.35]), team_dirs),
            PreferenceProfile("a2", np.array([0.25, 0.25, 0.25, 0.25]), team_dirs),
            PreferenceProfile("a3", np.array([0.30, 0.50, 0.05, 0.15]), team_dirs),
        ),
        opponent_profile=PreferenceProfile("op", np.array([0.10, 0.50, 0.25, 0.15]), opp_dirs),
    )


BUILTIN_SCENARIOS = {
    "hotel-booking": hotel_booking,
}


def _profile_to_dict(profile: PreferenceProfile, role: str) -> dict:
    return {
        "name": profile.name,
        "role": role,
        "weights": [float(w) for w in profile.weights],
        "directions": [d.value for d in profile.directions],
        "reservation_utility": float(profile.reservation_utility),
    }


def _profile_from_dict(doc: dict) -> PreferenceProfile:
    return PreferenceProfile(
        name=str(doc["name"]),
        weights=np.asarray(doc["weights"], dtype=np.float64),
        directions=tuple(doc["directions"]),
        reservation_utility=float(doc.get("reservation_utility", 0.0)),
    )


def scenario_to_dict(scenario: Scenario) -> dict:
    profiles = [_profile_to_dict(p, "team") for p in scenario.team_profiles]
    profiles.append(_profile_to_dict(scenario.opponent_profile, "opponent"))
    return {"name": scenario.name, "issues": list(scenario.issues), "profiles": profiles}


def scenario_from_dict(doc: dict) -> Scenario:
    team: list[PreferenceProfile] = []
    opponent: PreferenceProfile | None = None
    for pdoc in doc["profiles"]:
        profile = _profile_from_dict(pdoc)
        if pdoc.get("role", "team") == "opponent":
            if opponent is not None:
                raise ValueError("scenario declares more than one opponent profile")
            opponent = profile
        else:
            team.append(profile)
    if opponent is None:
        raise ValueError("scenario declares no opponent profile")
    return Scenario(
        name=str(doc.get("name", "scenario")),
        issues=tuple(doc["issues"]),
        team_profiles=tuple(team),
        opponent_profile=opponent,
    )


def load_scenario(source: str | Path) -> Scenario:
    """Load a scenario by built-in name or from a JSON file."""
    key = str(source)
    if key in BUILTIN_SCENARIOS:
        return BUILTIN_SCENARIOS[key]()
    path = Path(source)
    if not path.exists():
        raise FileNotFoundError(f"no built-in scenario or file named {key!r}")
    with path.open("r", encoding="utf-8") as fh:
        return scenario_from_dict(json.load(fh))


def save_scenario(scenario: Scenario, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(scenario_to_dict(scenario), fh, indent=2)
        fh.write("\n")
