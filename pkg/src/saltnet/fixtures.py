"""Bundled cross-domain workload: three queries, one scenario each, 20 articles per scenario.

The scenarios deliberately borrow each other's vocabulary (a weather
shock that travels through shipping, a shipping shock that moves
commodity supply, a geopolitical shock that hits shipping lanes and
chips), so evidence for one query often first lands with agents that
serve another. Articles are written by :func:`datagen.generate_articles`
so the corpus is a pure function of the seed.
"""

from __future__ import annotations

from dataclasses import replace

from .backends import Backend, MockBackend
from .config import EngineConfig
from .core import Article, ComplexityMetrics, Query, Scenario
from .datagen import GenerationSpec, TemporalDistribution, attach_articles, generate_articles
from .network import AgentGraph, build_graph, make_agent

FIXTURE_SEEDS = (7, 11, 23)
ARTICLES_PER_SCENARIO = 20
# the baseline cites every article that shares a word with its query, so
# the engine's per-batch pool must be wide enough not to be the bottleneck
FIXTURE_CONFIG = EngineConfig(hypothesis_top_k=100)

QUERIES = (
    Query("weather", "Monitor extreme weather impacts on agricultural commodity prices", domain="climate change"),
    Query("shipping", "Track shipping disruptions affecting commodity supply", domain="trade"),
    Query("chips", "Watch semiconductor supply chain risks from geopolitical tension", domain="technology"),
)

SCENARIOS = (
    Scenario(
        "weather-s1", "weather",
        "A Brazilian drought lifts coffee prices after shipping delays",
        (
            "extreme weather strikes brazil coffee regions",
            "coffee supply runs short",
            "shipping delays slow coffee exports",
            "agricultural commodity prices surge",
        ),
        frozenset(), ComplexityMetrics(3, 0, 0.6),
    ),
    Scenario(
        "shipping-s1", "shipping",
        "A port strike cascades into tighter commodity supply",
        (
            "port strike halts shipping traffic",
            "container backlog grows at ports",
            "commodity supply tightens worldwide",
            "freight prices climb steeply",
        ),
        frozenset(), ComplexityMetrics(3, 0, 0.4),
    ),
    Scenario(
        "chips-s1", "chips",
        "Regional tension halts rare earth exports and chip output",
        (
            "geopolitical tension rises around taiwan",
            "rare earth commodity exports halt",
            "semiconductor supply chain falters",
            "electronics prices climb",
        ),
        frozenset(), ComplexityMetrics(3, 0, 0.9),
    ),
)


def fixture_spec(query: Query, seed: int) -> GenerationSpec:
    return GenerationSpec(
        query=query.text,
        seed=seed,
        query_id=query.id,
        domain=query.domain,
        article_range=(ARTICLES_PER_SCENARIO, ARTICLES_PER_SCENARIO),
        length_range=(200, 300),
        temporal=TemporalDistribution("uniform", span=180),
    )


def load_fixture(seed: int = FIXTURE_SEEDS[0], backend: Backend | None = None):
    """Return ``(corpus, queries, scenarios)`` for the bundled workload."""
    backend = backend or MockBackend(seed)
    by_id = {q.id: q for q in QUERIES}
    corpus, scenarios = [], []
    for template in SCENARIOS:
        query = by_id[template.query_id]
        articles = generate_articles(template, fixture_spec(query, seed), backend)
        scenarios.append(attach_articles(query, replace(template), articles))
        corpus.extend(articles)
    return corpus, list(QUERIES), scenarios


# -- three-agent chain: evidence lands at one end, the question is asked at the other

CHAIN_TOPICS = {"a": "drought rainfall", "b": "rainfall crops", "c": "crops futures"}
CHAIN_ARTICLE = Article("art-1", "", "severe drought grips the region as the drought deepens further", 0)
CHAIN_QUERY = Query("futures", "futures trading outlook")


def chain_graph(backend: Backend, config: EngineConfig | None = None) -> AgentGraph:
    """A-B-C where only A matches :data:`CHAIN_ARTICLE` and only C matches :data:`CHAIN_QUERY`."""
    config = config or EngineConfig()
    agents = [make_agent(aid, [topic], backend, config.capacity) for aid, topic in CHAIN_TOPICS.items()]
    return build_graph(agents, config.alpha, config.alpha_overrides, config.active_threshold, config.activity_beta)


# -- two linked desks: weather-only news should stay with the weather agent

PAIR_TOPICS = {"weather": "weather crop impacts", "commodities": "crop commodities market"}
WEATHER_ARTICLES = tuple(
    Article(f"wx-{i}", "", body, i)
    for i, body in enumerate([
        "severe weather lashes the coast as weather warnings spread",
        "weather forecasters expect more weather disruption along the coast",
        "storm weather returns and coastal weather alerts stay in force",
    ])
)


def pair_graph(backend: Backend, config: EngineConfig | None = None) -> AgentGraph:
    config = config or EngineConfig()
    agents = [make_agent(aid, [topic], backend, config.capacity) for aid, topic in PAIR_TOPICS.items()]
    return build_graph(agents, config.alpha, config.alpha_overrides, config.active_threshold, config.activity_beta)
