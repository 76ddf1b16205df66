"""Encounter counting for the "Connect beyond Nooks" panel.

The history is the append-only list of (nook_id, member set) for every nook
ever activated in the workspace; two members' encounter count is the number
of entries containing both.
"""

from __future__ import annotations

from collections import Counter
from typing import Iterable

from nooks.core.model import UserId

EncounterHistory = list[tuple[str, frozenset[UserId]]]


def encounter_counts(history: Iterable[tuple[str, frozenset[UserId]]], user: UserId) -> dict[UserId, int]:
    """How many activated nooks the user shared with each other member.

    Users never encountered are omitted; counts are symmetric by
    construction.
    """
    counts: Counter[UserId] = Counter()
    for _nook_id, members in history:
        if user in members:
            for other in members:
                if other != user:
                    counts[other] += 1
    return dict(counts)


def top_encounters(
    history: Iterable[tuple[str, frozenset[UserId]]], user: UserId, k: int
) -> list[tuple[UserId, int]]:
    """The k most-encountered members, ties broken by ascending user id."""
    counts = encounter_counts(history, user)
    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    return ranked[:k]
