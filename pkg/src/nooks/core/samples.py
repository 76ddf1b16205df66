"""Sample nooks shown on the create panel, two at a time.

Admins can replace the list; "Get more samples" walks pages round-robin.
"""

from __future__ import annotations

PAGE_SIZE = 2

# (topic, initial thoughts) pairs. Editable per workspace.
DEFAULT_SAMPLES: list[tuple[str, str]] = [
    ("Is anyone else also watching the match tonight", "Let's meet"),
    ("Let's plan an activity for the weekend", "Museums, parks, food?"),
    ("Share an embarrassing moment in your life", "I (unfortunately) have too many to share :)"),
    ("Cafes", "reviewing places, meet up, etc"),
]


def sample_page(page: int, samples: list[tuple[str, str]]) -> list[tuple[str, str]]:
    """Page of samples, wrapping around the configured list.

    Page p holds items (2p, 2p+1) modulo the list length, so every page is
    full and repeated clicking cycles through everything. A single-sample
    list yields one-item pages instead of duplicating it.
    """
    if not samples:
        return []
    n = len(samples)
    first = (PAGE_SIZE * page) % n
    picked = [samples[(first + j) % n] for j in range(PAGE_SIZE)]
    if n == 1:
        return picked[:1]
    return picked
