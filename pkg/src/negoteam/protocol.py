"""Alternating-offers protocol between two parties.

One side is a negotiation team fronted by its mediator, the other a single
opponent; the protocol itself is symmetric and only sees two parties. Each
round both parties act once, in initiator order, at normalised time
t = round / max_rounds. A proposal becomes the standing offer; accepting the
standing offer ends the session in agreement; the deadline or an explicit
end action terminates it in failure, scoring zero for everyone.
"""
from __future__ import annotations

import json
import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Mapping

import numpy as np

from .domain import PreferenceProfile, utility

logger = logging.getLogger(__name__)


class ProtocolViolation(Exception):
    """A party acted illegally (e.g. accepted when no offer was standing)."""


class ActionKind(str, Enum):
    PROPOSE = "propose"
    ACCEPT = "accept"
    END = "end"


@dataclass(frozen=True)
class Action:
    kind: ActionKind
    offer: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind is ActionKind.PROPOSE and self.offer is None:
            raise ValueError("a proposal carries an offer")
        if self.kind is not ActionKind.PROPOSE and self.offer is not None:
            raise ValueError("only proposals carry offers")

    @classmethod
    def propose(cls, offer: np.ndarray) -> "Action":
        return cls(ActionKind.PROPOSE, np.asarray(offer, dtype=np.float64))

    @classmethod
    def accept(cls) -> "Action":
        return cls(ActionKind.ACCEPT)

    @classmethod
    def end(cls) -> "Action":
        return cls(ActionKind.END)


class Party(ABC):
    """A negotiating party: deterministic given its seed and what it has seen."""

    name: str

    @property
    @abstractmethod
    def utility_profiles(self) -> Mapping[str, PreferenceProfile]:
        """Profiles of every agent this party answers for, keyed by agent name."""

    @abstractmethod
    def receive_offer(self, offer: np.ndarray, t: float) -> None:
        """Observe the other party's proposal at normalised time t."""

    @abstractmethod
    def choose_action(self, t: float) -> Action:
        """Act at normalised time t."""


@dataclass(frozen=True)
class SessionConfig:
    max_rounds: int = 1000
    initiator: str = "team"  # which party proposes first: "team" or "opponent"

    def __post_init__(self) -> None:
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be positive")
        if self.initiator not in ("team", "opponent"):
            raise ValueError("initiator must be 'team' or 'opponent'")


@dataclass(frozen=True)
class TranscriptEntry:
    round: int
    t: float
    party: str
    action: Action


@dataclass
class Outcome:
    agreement: bool
    reason: str  # "accepted", "deadline" or "ended"
    offer: np.ndarray | None
    utilities: dict[str, float]
    joint_utility: float
    rounds_used: int
    accepted_by: str | None = None
    accepted_at: float | None = None


@dataclass
class Transcript:
    config: dict
    entries: list[TranscriptEntry] = field(default_factory=list)
    outcome: Outcome | None = None


def score(offer: np.ndarray | None, profiles: Mapping[str, PreferenceProfile]) -> tuple[dict[str, float], float]:
    """Per-agent utilities and their product; a failed session scores all zeros."""
    if offer is None:
        utilities = {name: 0.0 for name in profiles}
        return utilities, 0.0
    utilities = {name: utility(profile, offer) for name, profile in profiles.items()}
    joint = 1.0
    for u in utilities.values():
        joint *= u
    return utilities, joint


def _all_profiles(team: Party, opponent: Party) -> dict[str, PreferenceProfile]:
    profiles: dict[str, PreferenceProfile] = {}
    for party in (team, opponent):
        for name, profile in party.utility_profiles.items():
            if name in profiles:
                raise ValueError(f"duplicate agent name {name!r} across parties")
            profiles[name] = profile
    return profiles


def run_session(
    team_party: Party,
    opponent_party: Party,
    config: SessionConfig,
    meta: dict | None = None,
) -> tuple[Transcript, Outcome]:
    """Play one alternating-offers session to termination.

    Deterministic: the same parties (same seeds) and config reproduce the
    transcript action for action.
    """
    profiles = _all_profiles(team_party, opponent_party)
    transcript = Transcript(config=dict(meta or {}))
    if config.initiator == "team":
        order = ((team_party, opponent_party), (opponent_party, team_party))
    else:
        order = ((opponent_party, team_party), (team_party, opponent_party))

    standing: np.ndarray | None = None
    for rnd in range(config.max_rounds):
        t = rnd / config.max_rounds
        for actor, other in order:
            action = actor.choose_action(t)
            transcript.entries.append(TranscriptEntry(rnd, t, actor.name, action))
            if action.kind is ActionKind.ACCEPT:
                if standing is None:
                    raise ProtocolViolation(
                        f"{actor.name} accepted with no standing offer"
                    )
                utilities, joint = score(standing, profiles)
                outcome = Outcome(
                    agreement=True,
                    reason="accepted",
                    offer=standing.copy(),
                    utilities=utilities,
                    joint_utility=joint,
                    rounds_used=rnd + 1,
                    accepted_by=actor.name,
                    accepted_at=t,
                )
                transcript.outcome = outcome
                return transcript, outcome
            if action.kind is ActionKind.END:
                utilities, joint = score(None, profiles)
                outcome = Outcome(
                    agreement=False,
                    reason="ended",
                    offer=None,
                    utilities=utilities,
                    joint_utility=joint,
                    rounds_used=rnd + 1,
                )
                transcript.outcome = outcome
                return transcript, outcome
            standing = action.offer
            other.receive_offer(standing.copy(), t)

    utilities, joint = score(None, profiles)
    outcome = Outcome(
        agreement=False,
        reason="deadline",
        offer=None,
        utilities=utilities,
        joint_utility=joint,
        rounds_used=config.max_rounds,
    )
    transcript.outcome = outcome
    return transcript, outcome


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _action_to_dict(entry: TranscriptEntry) -> dict:
    doc: dict = {
        "round": entry.round,
        "t": entry.t,
        "party": entry.party,
        "kind": entry.action.kind.value,
    }
    if entry.action.offer is not None:
        doc["offer"] = [float(v) for v in entry.action.offer]
    return doc


def transcript_to_dict(transcript: Transcript) -> dict:
    if transcript.outcome is None:
        raise ValueError("transcript has no outcome; session did not finish")
    out = transcript.outcome
    return {
        "config": transcript.config,
        "actions": [_action_to_dict(e) for e in transcript.entries],
        "outcome": {
            "agreement": out.agreement,
            "reason": out.reason,
            "offer": None if out.offer is None else [float(v) for v in out.offer],
            "rounds_used": out.rounds_used,
            "accepted_by": out.accepted_by,
            "accepted_at": out.accepted_at,
        },
        "utilities": {k: float(v) for k, v in out.utilities.items()},
        "joint_utility": float(out.joint_utility),
    }


def transcript_from_dict(doc: dict) -> Transcript:
    entries = []
    for adoc in doc["actions"]:
        kind = ActionKind(adoc["kind"])
        offer = np.asarray(adoc["offer"], dtype=np.float64) if "offer" in adoc else None
        entries.append(
            TranscriptEntry(
                round=int(adoc["round"]),
                t=float(adoc["t"]),
                party=str(adoc["party"]),
                action=Action(kind, offer),
            )
        )
    odoc = doc["outcome"]
    outcome = Outcome(
        agreement=bool(odoc["agreement"]),
        reason=str(odoc["reason"]),
        offer=None if odoc["offer"] is None else np.asarray(odoc["offer"], dtype=np.float64),
        utilities={k: float(v) for k, v in doc["utilities"].items()},
        joint_utility=float(doc["joint_utility"]),
        rounds_used=int(odoc["rounds_used"]),
        accepted_by=odoc.get("accepted_by"),
        accepted_at=odoc.get("accepted_at"),
    )
    return Transcript(config=dict(doc["config"]), entries=entries, outcome=outcome)


def save_transcript(transcript: Transcript, path: str | Path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(transcript_to_dict(transcript), fh, indent=2)
        fh.write("\n")


def load_transcript(path: str | Path) -> Transcript:
    with Path(path).open("r", encoding="utf-8") as fh:
        return transcript_from_dict(json.load(fh))


def transcripts_equal(a: Transcript, b: Transcript) -> bool:
    """Action-for-action equality, ignoring the metadata block."""
    if len(a.entries) != len(b.entries):
        return False
    for ea, eb in zip(a.entries, b.entries):
        if (ea.round, ea.t, ea.action.kind) != (eb.round, eb.t, eb.action.kind):
            return False
        if (ea.action.offer is None) != (eb.action.offer is None):
            return False
        if ea.action.offer is not None and not np.array_equal(ea.action.offer, eb.action.offer):
            return False
    oa, ob = a.outcome, b.outcome
    if (oa is None) != (ob is None):
        return False
    if oa is not None and ob is not None:
        if (oa.agreement, oa.reason, oa.rounds_used) != (ob.agreement, ob.reason, ob.rounds_used):
            return False
        if (oa.offer is None) != (ob.offer is None):
            return False
        if oa.offer is not None and ob.offer is not None and not np.array_equal(oa.offer, ob.offer):
            return False
    return True
