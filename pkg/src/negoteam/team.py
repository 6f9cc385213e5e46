"""Negotiation teams: a mediator fronting several members with private tactics.

The opponent only ever sees the mediator, which turns member opinions into a
single accept/propose decision per round. Four intra-team decision rules are
provided:

* ``RE``  - a representative member, drawn once per session, decides alone.
* ``SSV`` - similarity voting: majority acceptance, plurality over the
  members' candidate proposals.
* ``SBV`` - unanimous acceptance, Borda scoring over candidate proposals.
* ``FUM`` - unanimous acceptance, proposals built attribute by attribute
  along an agenda inferred from the opponent's concessions.

Voting primitives are exposed as standalone functions so they can be checked
against brute-force oracles; every tie breaks toward the lowest index.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .domain import Direction, PreferenceProfile, Scenario, utility_unchecked
from .opponents import ARCHETYPES, TimeTacticNegotiator, build_opponent
from .protocol import Action, ActionKind, Party
from .tactics import DEFAULT_SAMPLER, IsoSamplerConfig, TimeTactic, demand, sample_iso_offer

logger = logging.getLogger(__name__)

STRATEGY_NAMES = ("RE", "SSV", "SBV", "FUM")


# ---------------------------------------------------------------------------
# voting primitives
# ---------------------------------------------------------------------------

def majority_accepts(votes: Sequence[bool]) -> bool:
    """True iff strictly more than half the votes are in favour."""
    votes = list(votes)
    if not votes:
        raise ValueError("no votes cast")
    return 2 * sum(bool(v) for v in votes) > len(votes)


def unanimity_accepts(votes: Sequence[bool]) -> bool:
    """True iff every vote is in favour."""
    votes = list(votes)
    if not votes:
        raise ValueError("no votes cast")
    return all(bool(v) for v in votes)


def plurality_winner(marks: np.ndarray) -> int:
    """Index of the proposal with the most approval marks.

    ``marks[v, p]`` says voter v finds proposal p acceptable. Ties go to the
    lowest proposal index.
    """
    marks = np.asarray(marks, dtype=bool)
    if marks.ndim != 2 or marks.size == 0:
        raise ValueError("marks must be a non-empty voters x proposals matrix")
    return int(np.argmax(marks.sum(axis=0)))


def borda_scores(utilities: np.ndarray) -> np.ndarray:
    """Total Borda score per proposal.

    Each voter ranks the proposals by utility, best first; rank position r
    is worth (P - 1 - r) points. Equal utilities rank the lower proposal
    index first, so it collects the larger score of the tied block.
    """
    utilities = np.asarray(utilities, dtype=np.float64)
    if utilities.ndim != 2 or utilities.size == 0:
        raise ValueError("utilities must be a non-empty voters x proposals matrix")
    n_proposals = utilities.shape[1]
    scores = np.zeros(n_proposals)
    indices = np.arange(n_proposals)
    for row in utilities:
        order = np.lexsort((indices, -row))
        for position, proposal in enumerate(order):
            scores[proposal] += n_proposals - 1 - position
    return scores


def borda_winner(utilities: np.ndarray) -> int:
    """Proposal with the highest total Borda score; ties to the lowest index."""
    return int(np.argmax(borda_scores(utilities)))


# ---------------------------------------------------------------------------
# agenda inference and unanimity offer building
# ---------------------------------------------------------------------------

def infer_agenda(
    opponent_offers: Sequence[np.ndarray],
    signs: np.ndarray,
    window: int,
) -> np.ndarray:
    """Order attributes by how much the opponent has conceded on each.

    Concession on an attribute between consecutive opponent offers is the
    positive part of the value change in the team-favourable direction,
    totalled over the first ``window`` offers. Most-conceded attributes come
    first; ties and a too-short history fall back to declaration order.
    """
    n = int(np.asarray(signs).size)
    if len(opponent_offers) < 2 or window < 2:
        return np.arange(n)
    observed = np.asarray(opponent_offers[:window], dtype=np.float64)
    deltas = np.diff(observed, axis=0)
    concession = np.maximum(np.asarray(signs) * deltas, 0.0).sum(axis=0)
    return np.argsort(-concession, kind="stable")


def build_unanimity_offer(
    weights: np.ndarray,
    signs: np.ndarray,
    demands: np.ndarray,
    agenda: Sequence[int],
) -> np.ndarray:
    """Construct an offer attribute by attribute so every member reaches its demand.

    At each agenda attribute every still-active member requests the value
    that would close its remaining utility gap; the mediator keeps the most
    demanding request (max under increasing valuations, min under
    decreasing). Members whose accumulated partial utility reaches their
    demand drop out. Attributes the loop never reaches are set to the
    team-worst extreme, leaving them to the opponent.
    """
    weights = np.asarray(weights, dtype=np.float64)
    signs = np.asarray(signs, dtype=np.float64)
    demands = np.asarray(demands, dtype=np.float64)
    n_members, n_issues = weights.shape
    values = np.empty(n_issues)
    assigned = np.zeros(n_issues, dtype=bool)
    partial = np.zeros(n_members)
    active = np.ones(n_members, dtype=bool)

    for j in agenda:
        if not active.any():
            break
        increasing = signs[j] > 0.0
        chosen: float | None = None
        for i in np.flatnonzero(active):
            w = weights[i, j]
            if w > 0.0:
                gap = demands[i] - partial[i]
                v_target = min(max(gap / w, 0.0), 1.0)
            else:
                v_target = 0.0  # indifferent: request nothing
            value = v_target if increasing else 1.0 - v_target
            if chosen is None:
                chosen = value
            else:
                chosen = max(chosen, value) if increasing else min(chosen, value)
        values[j] = chosen
        assigned[j] = True
        valuation_at_j = chosen if increasing else 1.0 - chosen
        for i in np.flatnonzero(active):
            partial[i] += weights[i, j] * valuation_at_j
            if partial[i] >= demands[i]:
                active[i] = False

    for j in np.flatnonzero(~assigned):
        values[j] = 0.0 if signs[j] > 0.0 else 1.0
    return values


# ---------------------------------------------------------------------------
# members and mediators
# ---------------------------------------------------------------------------

@dataclass
class TeamMember:
    profile: PreferenceProfile
    tactic: TimeTactic
    sampler: IsoSamplerConfig = DEFAULT_SAMPLER

    def demand(self, t: float) -> float:
        return demand(self.tactic, t)

    def utility(self, offer: np.ndarray) -> float:
        # offers here come from the protocol loop or the sampler, both clean
        return utility_unchecked(self.profile, offer)


def derive_team_streams(seed: int, n_members: int) -> tuple[np.random.Generator, list[np.random.Generator]]:
    """Mediator RNG plus one private RNG per member, all from one seed."""
    children = np.random.SeedSequence(seed).spawn(n_members + 1)
    return np.random.default_rng(children[0]), [np.random.default_rng(c) for c in children[1:]]


class TeamParty(Party):
    """Base mediator: tracks dialogue state, defers decisions to a strategy."""

    strategy = "?"

    def __init__(self, members: Sequence[TeamMember], seed: int, name: str = "team") -> None:
        if not members:
            raise ValueError("a team needs at least one member")
        self.members = list(members)
        self.seed = int(seed)
        self.name = name
        self.mediator_rng, self.member_rngs = derive_team_streams(self.seed, len(self.members))
        self.opponent_offers: list[np.ndarray] = []
        self.last_team_offer: np.ndarray | None = None

    @property
    def utility_profiles(self) -> Mapping[str, PreferenceProfile]:
        return {m.profile.name: m.profile for m in self.members}

    @property
    def last_opponent_offer(self) -> np.ndarray | None:
        return self.opponent_offers[-1] if self.opponent_offers else None

    def receive_offer(self, offer: np.ndarray, t: float) -> None:
        self.opponent_offers.append(offer)

    def member_references(self) -> list[np.ndarray]:
        refs = []
        if self.last_opponent_offer is not None:
            refs.append(self.last_opponent_offer)
        if self.last_team_offer is not None:
            refs.append(self.last_team_offer)
        return refs

    def member_proposals(self, t: float) -> list[np.ndarray]:
        refs = self.member_references()
        return [
            sample_iso_offer(m.profile, m.demand(t), refs, rng, m.sampler)
            for m, rng in zip(self.members, self.member_rngs)
        ]

    def accept_votes(self, offer: np.ndarray, t: float) -> list[bool]:
        return [m.utility(offer) >= m.demand(t) for m in self.members]

    def choose_action(self, t: float) -> Action:
        standing = self.last_opponent_offer
        if standing is not None and self._accepts(standing, t):
            return Action.accept()
        offer = self._propose(t)
        self.last_team_offer = offer
        return Action.propose(offer)

    def _accepts(self, offer: np.ndarray, t: float) -> bool:
        raise NotImplementedError

    def _propose(self, t: float) -> np.ndarray:
        raise NotImplementedError


class SimilarityVotingTeam(TeamParty):
    """Majority acceptance; plurality over member proposals.

    A member marks a candidate proposal acceptable when it is worth at least
    as much to it as its own candidate from the same round.
    """

    strategy = "SSV"

    def _accepts(self, offer: np.ndarray, t: float) -> bool:
        return majority_accepts(self.accept_votes(offer, t))

    def _propose(self, t: float) -> np.ndarray:
        proposals = self.member_proposals(t)
        n = len(proposals)
        marks = np.empty((n, n), dtype=bool)
        for v, member in enumerate(self.members):
            own = member.utility(proposals[v])
            for p in range(n):
                marks[v, p] = member.utility(proposals[p]) >= own
        return proposals[plurality_winner(marks)]


class BordaVotingTeam(TeamParty):
    """Unanimous acceptance; Borda count over member proposals."""

    strategy = "SBV"

    def _accepts(self, offer: np.ndarray, t: float) -> bool:
        return unanimity_accepts(self.accept_votes(offer, t))

    def _propose(self, t: float) -> np.ndarray:
        proposals = self.member_proposals(t)
        utilities = np.array([[m.utility(p) for p in proposals] for m in self.members])
        return proposals[borda_winner(utilities)]


class UnanimityBuildTeam(TeamParty):
    """Unanimous acceptance; offers built jointly along the inferred agenda.

    Requires all members to pull in the same direction on every issue,
    otherwise max/min aggregation of their requests is meaningless.
    """

    strategy = "FUM"

    def __init__(
        self,
        members: Sequence[TeamMember],
        seed: int,
        name: str = "team",
        agenda_observation_rounds: int = 5,
    ) -> None:
        super().__init__(members, seed, name)
        if agenda_observation_rounds < 1:
            raise ValueError("agenda_observation_rounds must be positive")
        self.agenda_observation_rounds = agenda_observation_rounds
        first = self.members[0].profile
        for m in self.members[1:]:
            if m.profile.directions != first.directions:
                raise ValueError("unanimity building requires identical issue directions")
        self._signs = first.signs
        self._weights = np.vstack([m.profile.weights for m in self.members])

    def _accepts(self, offer: np.ndarray, t: float) -> bool:
        return unanimity_accepts(self.accept_votes(offer, t))

    def _propose(self, t: float) -> np.ndarray:
        agenda = infer_agenda(self.opponent_offers, self._signs, self.agenda_observation_rounds)
        demands = np.array([m.demand(t) for m in self.members])
        return build_unanimity_offer(self._weights, self._signs, demands, agenda)


class RepresentativeTeam(TeamParty):
    """One member, drawn once per session, negotiates on the team's behalf.

    The representative may run its regular member behaviour or any bilateral
    archetype; the mediator forwards everything verbatim, so the session is
    indistinguishable from the representative negotiating alone.
    """

    strategy = "RE"

    def __init__(
        self,
        members: Sequence[TeamMember],
        seed: int,
        name: str = "team",
        behavior: str = "time_tactic",
        behavior_params: dict | None = None,
    ) -> None:
        super().__init__(members, seed, name)
        self.behavior = behavior
        self.behavior_params = dict(behavior_params or {})
        self.representative_index = int(self.mediator_rng.integers(len(self.members)))
        self._inner = self._build_inner(
            self.members[self.representative_index],
            self.member_rngs[self.representative_index],
        )

    def _build_inner(self, member: TeamMember, rng: np.random.Generator) -> Party:
        if self.behavior == "time_tactic":
            return TimeTacticNegotiator(
                member.profile,
                member.tactic,
                rng,
                sampler=member.sampler,
                name=self.name,
                use_own_reference=True,
            )
        return build_opponent(
            self.behavior,
            member.profile,
            rng,
            params=self.behavior_params,
            sampler=member.sampler,
            name=self.name,
        )

    def lone_twin(self) -> Party:
        """A fresh standalone copy of the representative, identically seeded.

        Running it against an identically seeded opponent reproduces the
        team's transcript action for action.
        """
        mediator_rng, member_rngs = derive_team_streams(self.seed, len(self.members))
        rep = int(mediator_rng.integers(len(self.members)))
        return self._build_inner(self.members[rep], member_rngs[rep])

    def receive_offer(self, offer: np.ndarray, t: float) -> None:
        super().receive_offer(offer, t)
        self._inner.receive_offer(offer, t)

    def choose_action(self, t: float) -> Action:
        action = self._inner.choose_action(t)
        if action.kind is ActionKind.PROPOSE:
            self.last_team_offer = action.offer
        return action


STRATEGIES: dict[str, type[TeamParty]] = {
    "RE": RepresentativeTeam,
    "SSV": SimilarityVotingTeam,
    "SBV": BordaVotingTeam,
    "FUM": UnanimityBuildTeam,
}


# ---------------------------------------------------------------------------
# declarative team configuration
# ---------------------------------------------------------------------------

@dataclass
class MemberSpec:
    """How one member's tactic is parameterised.

    Either a fixed ``beta`` or a ``beta_range`` to draw from per session; a
    missing range falls back to the team-level one.
    """

    beta: float | None = None
    beta_range: tuple[float, float] | None = None
    reservation_utility: float = 0.0


@dataclass
class TeamConfig:
    name: str
    strategy: str
    beta_range: tuple[float, float] | None = None
    members: list[MemberSpec] | None = None
    agenda_observation_rounds: int = 5
    representative_behavior: str = "time_tactic"
    representative_params: dict = field(default_factory=dict)
    sampler: IsoSamplerConfig = DEFAULT_SAMPLER

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; known: {sorted(STRATEGIES)}")
        if self.representative_behavior != "time_tactic" and self.representative_behavior not in ARCHETYPES:
            raise ValueError(f"unknown representative behavior {self.representative_behavior!r}")


def resolve_members(
    config: TeamConfig,
    scenario: Scenario,
    rng: np.random.Generator,
) -> list[TeamMember]:
    """Fix each member's tactic for one session, drawing betas where ranged."""
    specs = config.members
    if specs is None:
        specs = [MemberSpec() for _ in scenario.team_profiles]
    if len(specs) != len(scenario.team_profiles):
        raise ValueError(
            f"{config.name!r} declares {len(specs)} members for "
            f"{len(scenario.team_profiles)} team profiles"
        )
    members = []
    for profile, spec in zip(scenario.team_profiles, specs):
        if spec.beta is not None:
            beta = float(spec.beta)
        else:
            beta_range = spec.beta_range or config.beta_range
            if beta_range is None:
                raise ValueError(f"{config.name!r}: member needs a beta or a beta_range")
            beta = float(rng.uniform(beta_range[0], beta_range[1]))
        tactic = TimeTactic(beta=beta, reservation_utility=spec.reservation_utility)
        members.append(TeamMember(profile=profile, tactic=tactic, sampler=config.sampler))
    return members


def make_team_party(
    config: TeamConfig,
    members: Sequence[TeamMember],
    seed: int,
    name: str = "team",
) -> TeamParty:
    cls = STRATEGIES[config.strategy]
    if cls is UnanimityBuildTeam:
        return UnanimityBuildTeam(
            members, seed, name, agenda_observation_rounds=config.agenda_observation_rounds
        )
    if cls is RepresentativeTeam:
        return RepresentativeTeam(
            members,
            seed,
            name,
            behavior=config.representative_behavior,
            behavior_params=config.representative_params,
        )
    return cls(members, seed, name)


def team_config_to_dict(config: TeamConfig) -> dict:
    doc: dict = {"name": config.name, "strategy": config.strategy}
    if config.beta_range is not None:
        doc["beta_range"] = [float(config.beta_range[0]), float(config.beta_range[1])]
    if config.members is not None:
        doc["members"] = [
            {
                k: v
                for k, v in (
                    ("beta", spec.beta),
                    ("beta_range", list(spec.beta_range) if spec.beta_range else None),
                    ("reservation_utility", spec.reservation_utility),
                )
                if v is not None
            }
            for spec in config.members
        ]
    if config.strategy == "FUM":
        doc["agenda_observation_rounds"] = config.agenda_observation_rounds
    if config.strategy == "RE":
        doc["representative_behavior"] = config.representative_behavior
        if config.representative_params:
            doc["representative_params"] = config.representative_params
    if config.sampler != DEFAULT_SAMPLER:
        doc["sampler"] = {
            "candidate_count": config.sampler.candidate_count,
            "utility_tolerance": config.sampler.utility_tolerance,
        }
    return doc


def team_config_from_dict(doc: dict) -> TeamConfig:
    members = None
    if "members" in doc:
        members = [
            MemberSpec(
                beta=spec.get("beta"),
                beta_range=tuple(spec["beta_range"]) if spec.get("beta_range") else None,
                reservation_utility=float(spec.get("reservation_utility", 0.0)),
            )
            for spec in doc["members"]
        ]
    sampler = DEFAULT_SAMPLER
    if "sampler" in doc:
        sampler = IsoSamplerConfig(
            candidate_count=int(doc["sampler"].get("candidate_count", DEFAULT_SAMPLER.candidate_count)),
            utility_tolerance=float(
                doc["sampler"].get("utility_tolerance", DEFAULT_SAMPLER.utility_tolerance)
            ),
        )
    return TeamConfig(
        name=str(doc["name"]),
        strategy=str(doc["strategy"]),
        beta_range=tuple(doc["beta_range"]) if doc.get("beta_range") else None,
        members=members,
        agenda_observation_rounds=int(doc.get("agenda_observation_rounds", 5)),
        representative_behavior=str(doc.get("representative_behavior", "time_tactic")),
        representative_params=dict(doc.get("representative_params", {})),
        sampler=sampler,
    )
