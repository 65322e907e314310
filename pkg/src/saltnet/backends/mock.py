"""Deterministic offline backend.

Each call site's reply is filled from keyword extraction over the prompt
sections, so outputs are a pure function of (request, seed). Confidences
come from a seeded hash of the statement text.
"""

from __future__ import annotations

import hashlib
import random

from .. import prompts
from .base import GenerationRequest
from .embedding import DEFAULT_DIM, EmbeddingVector, HashingEmbedder
from .text import STOPWORDS, content_words, keyword_phrases, keywords

BELIEF_KEYWORDS = 4
MATCH_FRACTION = 0.6

EVENTS = ["drought", "frost", "heatwave", "flooding", "wildfire", "storm", "strike", "blockade",
          "sanctions", "cyberattack", "earthquake", "embargo"]
REGIONS = ["brazil", "florida", "europe", "india", "australia", "canada", "taiwan", "egypt",
           "chile", "kenya", "indonesia", "ukraine"]
MECHANISMS = ["local production", "export volumes", "shipping routes", "insurance costs",
              "labor availability", "energy costs", "inventory levels", "port operations",
              "credit conditions"]
MOVES = ["fall", "tighten", "stall", "rise", "shift", "collapse", "recover"]
OUTCOMES = ["surge", "drop", "swing sharply", "face disruption", "reprice"]
# filler is drawn from stopwords only so it never adds embedding signal
FILLER = sorted(w for w in STOPWORDS if len(w) > 1 and w.isalpha())


def unit_hash(*parts: object) -> float:
    """Deterministic value in [0, 1)."""
    digest = hashlib.sha256("|".join(map(str, parts)).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / 2**64


def lexical_match(sub_event: str, text: str, fraction: float = MATCH_FRACTION) -> bool:
    wanted = set(content_words(sub_event))
    if not wanted:
        return False
    have = set(content_words(text))
    return len(wanted & have) >= fraction * len(wanted)


class MockBackend:
    def __init__(self, seed: int = 0, dim: int = DEFAULT_DIM) -> None:
        self.seed = seed
        self.embedder = HashingEmbedder(dim)

    def embed(self, text: str) -> EmbeddingVector:
        return self.embedder.embed(text)

    def confidence(self, statement: str) -> float:
        return round(0.5 + 0.5 * unit_hash(self.seed, statement), 2)

    def generate(self, request: GenerationRequest) -> str:
        handler = {
            prompts.TOPICS: self._topics,
            prompts.BELIEFS: self._belief,
            prompts.SYNTHESIS: self._synthesis,
            prompts.HYPOTHESIS: self._hypothesis,
            prompts.BASELINE: self._baseline,
            prompts.SCENARIOS: self._scenarios,
            prompts.ARTICLE: self._article,
            prompts.JUDGE: self._judge,
        }.get(request.task, self._generic)
        return handler(prompts.parse_sections(request.user_prompt), request)

    # -- helpers -----------------------------------------------------------

    @staticmethod
    def _first(sections, name):
        return next((s for s in sections if s.name == name), None)

    def _statement(self, topics: list[str], source_text: str) -> str:
        topic_words = set(content_words(" ".join(topics)))
        kws = [w for w in keywords(source_text) if w not in topic_words][:BELIEF_KEYWORDS]
        head = ", ".join(topics)
        return f"{head}: {' '.join(kws)}" if kws else head

    def _block(self, statement: str, refs: list[str]) -> str:
        return (
            f"STATEMENT: {statement}\n"
            f"CONFIDENCE: {self.confidence(statement):.2f}\n"
            f"REFERENCES: {', '.join(refs) if refs else 'none'}"
        )

    # -- call sites --------------------------------------------------------

    def _topics(self, sections, request):
        query = self._first(sections, "QUERY")
        out = self._first(sections, "OUTPUT")
        k = int(out.attrs.get("count", 4)) if out else 4
        phrases = keyword_phrases(query.body if query else "", k)
        if not phrases:
            return "No research areas could be identified."
        return "\n".join(f"{i}. {p}" for i, p in enumerate(phrases, 1))

    def _belief(self, sections, request):
        agent = self._first(sections, "AGENT")
        article = self._first(sections, "ARTICLE")
        topics = [t for t in agent.body.splitlines() if t.strip()]
        statement = self._statement(topics, article.body)
        return self._block(statement, [article.attrs["id"]])

    def _synthesis(self, sections, request):
        agent = self._first(sections, "AGENT")
        topics = [t for t in agent.body.splitlines() if t.strip()]
        shared = [s for s in sections if s.name == "BELIEF"]
        refs: list[str] = []
        for s in shared:
            for r in s.attrs.get("refs", "-").split(","):
                if r != "-" and r not in refs:
                    refs.append(r)
        statement = self._statement(topics, " ".join(s.body for s in shared))
        return self._block(statement, refs)

    def _hypothesis(self, sections, request):
        query = self._first(sections, "QUERY")
        beliefs = [s for s in sections if s.name == "BELIEF"]
        if not beliefs:
            return "HYPOTHESIS: insufficient evidence\nREFERENCES: none"
        refs: list[str] = []
        for s in beliefs:
            for r in s.attrs.get("refs", "-").split(","):
                if r != "-" and r not in refs:
                    refs.append(r)
        focus = " ".join(keywords(query.body, 3))
        text = f"Regarding {focus}, the evidence points to: " + "; ".join(s.body for s in beliefs) + "."
        return f"HYPOTHESIS: {text}\nREFERENCES: {', '.join(refs)}"

    def _baseline(self, sections, request):
        query = self._first(sections, "QUERY")
        previous = self._first(sections, "PREVIOUS")
        query_words = set(content_words(query.body))
        cited, notes = [], []
        for art in (s for s in sections if s.name == "ARTICLE"):
            if query_words & set(content_words(art.body)):
                cited.append(art.attrs["id"])
                notes.append(" ".join(keywords(art.body, BELIEF_KEYWORDS)))
        focus = " ".join(keywords(query.body, 3))
        if notes:
            text = f"Regarding {focus}, current reporting indicates: " + "; ".join(notes) + "."
        else:
            text = f"Regarding {focus}, no new relevant developments."
        if previous is not None and previous.body:
            text += " Earlier assessment: " + " ".join(keywords(previous.body, 8)) + "."
        return f"HYPOTHESIS: {text}\nREFERENCES: {', '.join(cited) if cited else 'none'}"

    def _scenarios(self, sections, request):
        query = self._first(sections, "QUERY")
        out = self._first(sections, "OUTPUT")
        n = int(out.attrs.get("count", 1)) if out else 1
        rng = random.Random(f"{self.seed}|scenarios|{query.body}")
        subjects = keyword_phrases(query.body, 4) or ["regional markets"]
        blocks = []
        for i in range(n):
            event, region = rng.choice(EVENTS), rng.choice(REGIONS)
            subject = subjects[i % len(subjects)]
            steps = rng.randint(1, 6)
            mechanisms = rng.sample(MECHANISMS, steps - 1) if steps > 1 else []
            outcome = rng.choice(OUTCOMES)
            chain = [f"severe {event} hits {region}"]
            chain += [f"{region} {m} {rng.choice(MOVES)}" for m in mechanisms]
            chain.append(f"{subject} {outcome}")
            description = f"Severe {event} in {region.title()} leads to {subject} {outcome}"
            uncertainty = round(unit_hash(self.seed, "U", query.body, i), 1)
            blocks.append(
                f"SCENARIO: {description}\nSUB_EVENTS: {' | '.join(chain)}\n"
                f"UNCERTAINTY: {uncertainty}\nTIME_LAG: {rng.randint(0, 21)}"
            )
        return "\n\n".join(blocks)

    def _article(self, sections, request):
        event = self._first(sections, "SUB_EVENT").body
        out = self._first(sections, "OUTPUT")
        words = int(out.attrs.get("words", 300))
        rng = random.Random(f"{self.seed}|article|{request.user_prompt}")
        sentence = event.strip().rstrip(".").split()
        body: list[str] = []
        repeats = 3
        gap = max(0, (words - repeats * len(sentence)) // repeats)
        for _ in range(repeats):
            body += sentence
            body += [rng.choice(FILLER) for _ in range(gap)]
        body += [rng.choice(FILLER) for _ in range(words - len(body))]
        title = " ".join(sentence).capitalize()
        return f"TITLE: {title}\nBODY: {' '.join(body[:words])}"

    def _judge(self, sections, request):
        event = self._first(sections, "SUB_EVENT").body
        text = " ".join(s.body for s in sections if s.name == "HYPOTHESIS")
        return "YES" if lexical_match(event, text) else "NO"

    def _generic(self, sections, request):
        kws = keywords(request.user_prompt, 8)
        return f"RESPONSE: {' '.join(kws) or 'no content'}"
