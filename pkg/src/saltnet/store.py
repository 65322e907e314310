from __future__ import annotations

from dataclasses import dataclass, field

from .core import BeliefStatement


def retention_score(belief: BeliefStatement, now: int, half_life: int) -> float:
    """Confidence discounted by age: c * 0.5 ** ((now - t) / half_life)."""
    return belief.confidence * 0.5 ** ((now - belief.timestamp) / half_life)


def eviction_key(belief: BeliefStatement, now: int, half_life: int):
    # ascending = evicted first
    return (retention_score(belief, now, half_life), belief.timestamp, belief.statement)


def _merge(old: BeliefStatement, new: BeliefStatement) -> BeliefStatement:
    refs = tuple(dict.fromkeys(old.references + new.references))
    return BeliefStatement(
        old.statement, max(old.confidence, new.confidence), old.timestamp, refs,
        old.origin_agent, min(old.hop_count, new.hop_count),
    )


@dataclass
class BeliefStore:
    """Bounded per-agent belief memory keyed by (statement, timestamp)."""

    capacity: int
    beliefs: list[BeliefStatement] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.capacity < 1:
            raise ValueError("capacity must be positive")

    def __len__(self) -> int:
        return len(self.beliefs)

    def __iter__(self):
        return iter(self.beliefs)

    def __contains__(self, belief: BeliefStatement) -> bool:
        return any(b.statement == belief.statement and b.timestamp == belief.timestamp for b in self.beliefs)

    def add(self, new: list[BeliefStatement], now: int, half_life: int) -> list[BeliefStatement]:
        """Insert beliefs, prune back to capacity, return the ones that stayed.

        A belief whose (statement, timestamp) is already held is folded into
        the held one: references are unioned, the higher confidence and the
        lower hop count win. The folded belief counts as added only when
        that changed something.
        """
        index = {(b.statement, b.timestamp): i for i, b in enumerate(self.beliefs)}
        added = []
        for b in new:
            k = (b.statement, b.timestamp)
            if k not in index:
                index[k] = len(self.beliefs)
                self.beliefs.append(b)
                added.append(b)
                continue
            old = self.beliefs[index[k]]
            merged = _merge(old, b)
            if merged != old:
                self.beliefs[index[k]] = merged
                added = [x for x in added if x is not old] + [merged]
        if len(self.beliefs) > self.capacity:
            self.prune(now, half_life)
        kept = {id(b) for b in self.beliefs}
        return [b for b in added if id(b) in kept]

    def prune(self, now: int, half_life: int) -> list[BeliefStatement]:
        """Evict lowest-retention beliefs until within capacity; return the evicted ones."""
        excess = len(self.beliefs) - self.capacity
        if excess <= 0:
            return []
        ranked = sorted(self.beliefs, key=lambda b: eviction_key(b, now, half_life))
        evicted = ranked[:excess]
        gone = {id(b) for b in evicted}
        self.beliefs = [b for b in self.beliefs if id(b) not in gone]
        return evicted
