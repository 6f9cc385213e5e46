"""Tournament harness: teams x opponents x repetitions, fully reproducible.

Every session derives its own seed by stable hashing of the master seed with
the pairing names and the repetition index, so runs are independent of
execution order and identical across processes. Repetition parity decides
who opens (even: the team). Failed sessions score zero for everyone and stay
in the averages.
"""
from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _kernels
from .domain import Scenario, load_scenario, scenario_from_dict, scenario_to_dict
from .opponents import build_opponent
from .protocol import Outcome, SessionConfig, Transcript, run_session
from .tactics import DEFAULT_SAMPLER, IsoSamplerConfig, TimeTactic
from .team import (
    TeamConfig,
    TeamMember,
    make_team_party,
    resolve_members,
    team_config_from_dict,
    team_config_to_dict,
)

logger = logging.getLogger(__name__)

DEFAULT_MASTER_SEED = 12345


def derive_seed(*parts: object) -> int:
    """Stable 64-bit seed from arbitrary labelled parts (not order-free)."""
    text = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(text.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass
class OpponentConfig:
    name: str
    archetype: str
    params: dict = field(default_factory=dict)


@dataclass
class TournamentConfig:
    scenario: Scenario
    teams: list[TeamConfig]
    opponents: list[OpponentConfig]
    repetitions: int = 10
    max_rounds: int = 1000
    master_seed: int = DEFAULT_MASTER_SEED

    def __post_init__(self) -> None:
        if self.repetitions < 1:
            raise ValueError("repetitions must be positive")
        names = [t.name for t in self.teams] + [o.name for o in self.opponents]
        if len(set(names)) != len(names):
            raise ValueError("team and opponent names must be unique")


@dataclass
class SessionRecord:
    team: str
    opponent: str
    repetition: int
    seed: int
    initiator: str
    agreement: bool
    reason: str
    rounds_used: int
    member_utilities: dict[str, float]
    opponent_utility: float
    team_average: float
    team_min: float
    team_max: float
    joint_utility: float


def _session_meta(
    scenario: Scenario,
    team_cfg: TeamConfig,
    members: Sequence[TeamMember],
    opp_cfg: OpponentConfig,
    session_seed: int,
    repetition: int,
    max_rounds: int,
    initiator: str,
    master_seed: int,
) -> dict:
    team_doc = team_config_to_dict(team_cfg)
    team_doc["resolved_members"] = [
        {
            "profile": m.profile.name,
            "beta": m.tactic.beta,
            "reservation_utility": m.tactic.reservation_utility,
        }
        for m in members
    ]
    return {
        "scenario": scenario_to_dict(scenario),
        "team": team_doc,
        "opponent": {"name": opp_cfg.name, "archetype": opp_cfg.archetype, "params": opp_cfg.params},
        "session": {
            "seed": session_seed,
            "repetition": repetition,
            "max_rounds": max_rounds,
            "initiator": initiator,
            "master_seed": master_seed,
        },
    }


def run_pairing_session(
    scenario: Scenario,
    team_cfg: TeamConfig,
    opp_cfg: OpponentConfig,
    repetition: int,
    master_seed: int,
    max_rounds: int,
) -> tuple[SessionRecord, Transcript]:
    """Play one (team, opponent, repetition) cell of the tournament."""
    session_seed = derive_seed(master_seed, team_cfg.name, opp_cfg.name, repetition)
    beta_rng = np.random.default_rng(derive_seed(session_seed, "betas"))
    members = resolve_members(team_cfg, scenario, beta_rng)
    initiator = "team" if repetition % 2 == 0 else "opponent"

    team_party = make_team_party(team_cfg, members, seed=derive_seed(session_seed, "team"))
    opponent_party = build_opponent(
        opp_cfg.archetype,
        scenario.opponent_profile,
        np.random.default_rng(derive_seed(session_seed, "opponent")),
        params=opp_cfg.params,
    )
    config = SessionConfig(max_rounds=max_rounds, initiator=initiator)
    meta = _session_meta(
        scenario, team_cfg, members, opp_cfg, session_seed, repetition, max_rounds, initiator, master_seed
    )
    transcript, outcome = run_session(team_party, opponent_party, config, meta)
    record = _record_from_outcome(scenario, team_cfg, opp_cfg, repetition, session_seed, initiator, outcome)
    return record, transcript


def rebuild_session(meta: dict):
    """Reconstruct the two parties and config a transcript was produced with.

    Member tactics come from the resolved values stored in the metadata, so
    nothing is redrawn; replaying yields the identical transcript.
    """
    scenario = scenario_from_dict(meta["scenario"])
    team_cfg = team_config_from_dict(meta["team"])
    session = meta["session"]
    session_seed = int(session["seed"])

    members = [
        TeamMember(
            profile=scenario.profile_by_name(m["profile"]),
            tactic=TimeTactic(beta=float(m["beta"]), reservation_utility=float(m["reservation_utility"])),
            sampler=team_cfg.sampler,
        )
        for m in meta["team"]["resolved_members"]
    ]
    team_party = make_team_party(team_cfg, members, seed=derive_seed(session_seed, "team"))
    opp_doc = meta["opponent"]
    opponent_party = build_opponent(
        opp_doc["archetype"],
        scenario.opponent_profile,
        np.random.default_rng(derive_seed(session_seed, "opponent")),
        params=opp_doc.get("params", {}),
    )
    config = SessionConfig(max_rounds=int(session["max_rounds"]), initiator=str(session["initiator"]))
    return team_party, opponent_party, config


def _record_from_outcome(
    scenario: Scenario,
    team_cfg: TeamConfig,
    opp_cfg: OpponentConfig,
    repetition: int,
    session_seed: int,
    initiator: str,
    outcome: Outcome,
) -> SessionRecord:
    member_names = [p.name for p in scenario.team_profiles]
    member_utilities = {name: outcome.utilities[name] for name in member_names}
    values = list(member_utilities.values())
    return SessionRecord(
        team=team_cfg.name,
        opponent=opp_cfg.name,
        repetition=repetition,
        seed=session_seed,
        initiator=initiator,
        agreement=outcome.agreement,
        reason=outcome.reason,
        rounds_used=outcome.rounds_used,
        member_utilities=member_utilities,
        opponent_utility=outcome.utilities[scenario.opponent_profile.name],
        team_average=sum(values) / len(values),
        team_min=min(values),
        team_max=max(values),
        joint_utility=outcome.joint_utility,
    )


def run_tournament(
    config: TournamentConfig,
    transcript_handler: Callable[[SessionRecord, Transcript], None] | None = None,
) -> list[SessionRecord]:
    """Run every (team, opponent, repetition) session, in canonical order."""
    _kernels.warm_up()
    records = []
    for team_cfg in config.teams:
        for opp_cfg in config.opponents:
            for repetition in range(config.repetitions):
                record, transcript = run_pairing_session(
                    config.scenario,
                    team_cfg,
                    opp_cfg,
                    repetition,
                    config.master_seed,
                    config.max_rounds,
                )
                records.append(record)
                if transcript_handler is not None:
                    transcript_handler(record, transcript)
            logger.debug("finished %s vs %s", team_cfg.name, opp_cfg.name)
    return records


@dataclass
class PairingAggregate:
    team: str
    opponent: str
    n_sessions: int
    agreement_rate: float
    mean_team_average: float
    mean_team_min: float
    mean_team_max: float
    mean_opponent: float
    mean_joint: float


def aggregate(records: Sequence[SessionRecord]) -> list[PairingAggregate]:
    """Per-pairing means over repetitions, failures included as zeros."""
    buckets: dict[tuple[str, str], list[SessionRecord]] = {}
    for rec in records:
        buckets.setdefault((rec.team, rec.opponent), []).append(rec)
    out = []
    for (team, opponent), recs in buckets.items():
        n = len(recs)
        out.append(
            PairingAggregate(
                team=team,
                opponent=opponent,
                n_sessions=n,
                agreement_rate=sum(r.agreement for r in recs) / n,
                mean_team_average=sum(r.team_average for r in recs) / n,
                mean_team_min=sum(r.team_min for r in recs) / n,
                mean_team_max=sum(r.team_max for r in recs) / n,
                mean_opponent=sum(r.opponent_utility for r in recs) / n,
                mean_joint=sum(r.joint_utility for r in recs) / n,
            )
        )
    return out


# ---------------------------------------------------------------------------
# the default desk experiment
# ---------------------------------------------------------------------------

BOULWARE_RANGE = (0.5, 0.99)
VERY_BOULWARE_RANGE = (0.01, 0.4)


def desk_config(
    master_seed: int = DEFAULT_MASTER_SEED,
    repetitions: int = 10,
    max_rounds: int = 1000,
    very_boulware_high: float = VERY_BOULWARE_RANGE[1],
) -> TournamentConfig:
    """The default experiment: seven team setups against five archetypes.

    B teams draw member betas from U(0.5, 0.99), VB teams from
    U(0.01, very_boulware_high). The representative setup fields a
    statistics-driven mirror negotiator instead of a time tactic.
    """
    b = BOULWARE_RANGE
    vb = (VERY_BOULWARE_RANGE[0], very_boulware_high)
    teams = [
        TeamConfig(name="FUM B", strategy="FUM", beta_range=b),
        TeamConfig(name="FUM VB", strategy="FUM", beta_range=vb),
        TeamConfig(name="RE K", strategy="RE", beta_range=b, representative_behavior="agent_k_like"),
        TeamConfig(name="SSV B", strategy="SSV", beta_range=b),
        TeamConfig(name="SSV VB", strategy="SSV", beta_range=vb),
        TeamConfig(name="SBV B", strategy="SBV", beta_range=b),
        TeamConfig(name="SBV VB", strategy="SBV", beta_range=vb),
    ]
    opponents = [
        OpponentConfig(name="Crazy", archetype="crazy_haggler", params={"threshold": 0.9}),
        OpponentConfig(name="Haggler", archetype="haggler_adaptive"),
        OpponentConfig(name="K", archetype="agent_k_like"),
        OpponentConfig(name="TFT", archetype="nice_tft_like"),
        OpponentConfig(name="Smith", archetype="smith_like"),
    ]
    return TournamentConfig(
        scenario=load_scenario("hotel-booking"),
        teams=teams,
        opponents=opponents,
        repetitions=repetitions,
        max_rounds=max_rounds,
        master_seed=master_seed,
    )


def tournament_config_to_dict(config: TournamentConfig) -> dict:
    return {
        "scenario": scenario_to_dict(config.scenario),
        "teams": [team_config_to_dict(t) for t in config.teams],
        "opponents": [
            {"name": o.name, "archetype": o.archetype, "params": o.params} for o in config.opponents
        ],
        "tournament": {
            "repetitions": config.repetitions,
            "max_rounds": config.max_rounds,
            "seed": config.master_seed,
        },
    }


def tournament_config_from_dict(doc: dict) -> TournamentConfig:
    scenario_doc = doc["scenario"]
    if isinstance(scenario_doc, str):
        scenario = load_scenario(scenario_doc)
    else:
        scenario = scenario_from_dict(scenario_doc)
    meta = doc.get("tournament", {})
    return TournamentConfig(
        scenario=scenario,
        teams=[team_config_from_dict(t) for t in doc["teams"]],
        opponents=[
            OpponentConfig(
                name=str(o["name"]),
                archetype=str(o["archetype"]),
                params=dict(o.get("params", {})),
            )
            for o in doc["opponents"]
        ],
        repetitions=int(meta.get("repetitions", 10)),
        max_rounds=int(meta.get("max_rounds", 1000)),
        master_seed=int(meta.get("seed", DEFAULT_MASTER_SEED)),
    )
