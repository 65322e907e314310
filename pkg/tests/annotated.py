"""A 20-article corpus with hand-counted scores.

Counts, done by reading the data below rather than by running code:

coffee (10 relevant: c01..c10; hypotheses cite c01 c02 c03 c05 c07 plus
noise n01 n04) -> RP = 5/10 = 50.0. Sub-events matched by at least 60% of
their content words in one hypothesis: the drought one (4 of 5 words in
h1) and the harvest one (3 of 4 in h3). The shipping hypothesis holds 2 of
4, the futures one 2 of 5. HQ = 2/4 = 50.0.

ports (4 relevant: p01..p04; cites p01 only) -> RP = 1/4 = 25.0. The strike
sub-event matches (4 of 4), the freight one does not. HQ = 1/2 = 50.0.

Aggregate: RP = (50 + 25) / 2 = 37.5, HQ = 50.0.
"""

from saltnet.core import Article, ComplexityMetrics, Hypothesis, Scenario
from saltnet.records import BatchRecord, RunRecord

CORPUS = (
    [Article(f"c{i:02d}", "", f"coffee story {i}", i) for i in range(1, 11)]
    + [Article(f"p{i:02d}", "", f"port story {i}", 10 + i) for i in range(1, 5)]
    + [Article(f"n{i:02d}", "", f"unrelated story {i}", 14 + i) for i in range(1, 7)]
)

SCENARIOS = [
    Scenario(
        "coffee-s1", "coffee", "drought to coffee prices",
        ("drought hits brazil coffee farms", "coffee harvest falls sharply",
         "exporters delay coffee shipments", "coffee futures reach record highs"),
        frozenset(f"c{i:02d}" for i in range(1, 11)), ComplexityMetrics(3, 9, 0.5),
    ),
    Scenario(
        "ports-s1", "ports", "strike to freight",
        ("port strike halts cargo", "freight rates spike"),
        frozenset(f"p{i:02d}" for i in range(1, 5)), ComplexityMetrics(1, 3, 0.2),
    ),
]

HYPOTHESES = [
    Hypothesis("coffee", "Drought in Brazil is damaging coffee farms", ("c01", "c02"), 0),
    Hypothesis("coffee", "The coffee harvest is expected to fall", ("c03",), 0),
    Hypothesis("coffee", "Analysts warn the harvest falls sharply short", ("c05", "n01"), 1),
    Hypothesis("coffee", "Exporters see shipments of grain slowing", ("c07",), 1),
    Hypothesis("coffee", "Coffee futures move higher", ("n04",), 2),
    Hypothesis("coffee", "Port congestion persists", (), 2),
    Hypothesis("ports", "Port strike halts most cargo movement", ("p01",), 1),
]

EXPECTED = {
    "coffee": {"rp": 50.0, "hq": 50.0},
    "ports": {"rp": 25.0, "hq": 50.0},
    "aggregate": {"rp": 37.5, "hq": 50.0},
}


def run_record(system="salt") -> RunRecord:
    by_batch = {}
    for h in HYPOTHESES:
        by_batch.setdefault(h.timestamp, []).append(h)
    return RunRecord(system, [BatchRecord(i, hs) for i, hs in sorted(by_batch.items())], {"seed": 0})
