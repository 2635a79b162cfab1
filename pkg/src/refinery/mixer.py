"""Final corpus composition by weighted instance sampling.

With equal weights every instance across every source is equally likely,
i.e. a large source contributes proportionally more draws; weights scale a
source's per-instance probability. Sampling is with replacement, so a small
curated set can be over-represented simply by raising its weight.
"""

from __future__ import annotations

import numpy as np

from .corpus import Manifest, Utterance

__all__ = ["compose_mix"]


def compose_mix(
    sources: list[tuple[Manifest, float]],
    total: int,
    seed: int,
    *,
    replace: bool = True,
    name: str = "mix",
) -> Manifest:
    """Draw `total` records across sources, weighting per instance.

    A source's expected share is weight * size / sum(weight * size). Output
    ids get a source ordinal and draw index suffix so repeats stay unique
    and every draw traces back to its origin record. With replace=False the
    draw is a weighted subsample and total cannot exceed the instance count.
    """
    if total < 1:
        raise ValueError("total must be >= 1")
    for m, weight in sources:
        if weight < 0:
            raise ValueError(f"negative weight {weight} for source {m.name!r}")
    live = [(k, m, w) for k, (m, w) in enumerate(sources) if w > 0 and len(m) > 0]
    if not live:
        raise ValueError("all sources are empty or zero-weighted")

    flat: list[tuple[int, Utterance]] = []
    weights: list[float] = []
    for k, m, w in live:
        for record in m:
            flat.append((k, record))
            weights.append(w)
    if not replace and total > len(flat):
        raise ValueError(
            f"cannot draw {total} without replacement from {len(flat)} instances"
        )
    probabilities = np.asarray(weights, dtype=np.float64)
    probabilities /= probabilities.sum()

    rng = np.random.default_rng(seed)
    picks = rng.choice(len(flat), size=total, replace=replace, p=probabilities)
    records = []
    for draw, pick in enumerate(picks):
        k, origin = flat[int(pick)]
        records.append(origin.evolved(id=f"{origin.id}#{k}.{draw:06d}"))
    return Manifest(records, name=name)
