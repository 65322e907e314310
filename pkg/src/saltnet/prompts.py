"""Prompt templates for every generation call site, plus lenient parsers.

Prompts are assembled from ``### NAME key=value`` sections so that a live
model reads them as plain structured text and the mock backend can pick
them apart again. Replies are requested as labelled blocks
(``STATEMENT:`` / ``CONFIDENCE:`` / ``REFERENCES:``) and parsed leniently:
missing fields fall back to caller-supplied defaults instead of failing.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .backends.base import GenerationRequest

TOPICS = "extract_topics"
BELIEFS = "generate_beliefs"
SYNTHESIS = "synthesize_beliefs"
HYPOTHESIS = "generate_hypothesis"
BASELINE = "baseline_hypothesis"
SCENARIOS = "generate_scenarios"
ARTICLE = "generate_article"
JUDGE = "judge_sub_event"

_SECTION_RE = re.compile(r"^### ([A-Z_]+)((?: [a-z_]+=\S*)*)\s*$")


@dataclass
class Section:
    name: str
    attrs: dict[str, str]
    body: str


def section(name: str, body: str = "", **attrs: object) -> str:
    head = "### " + name + "".join(f" {k}={v}" for k, v in attrs.items())
    return f"{head}\n{body.strip()}" if body.strip() else head


def parse_sections(prompt: str) -> list[Section]:
    sections: list[Section] = []
    lines: list[str] = []
    for line in prompt.splitlines():
        m = _SECTION_RE.match(line)
        if m:
            if sections:
                sections[-1].body = "\n".join(lines).strip()
            attrs = dict(kv.split("=", 1) for kv in m.group(2).split())
            sections.append(Section(m.group(1), attrs, ""))
            lines = []
        else:
            lines.append(line)
    if sections:
        sections[-1].body = "\n".join(lines).strip()
    return sections


def _refs_attr(refs) -> str:
    return ",".join(refs) if refs else "-"


# -- request builders -------------------------------------------------------


def topics_request(query_text: str, k: int) -> GenerationRequest:
    system = (
        "You coordinate a team of specialist analysts. Break the user's "
        f"query into the {k} research areas the team should focus on. "
        "Answer with a numbered list; each item is a short noun phrase."
    )
    user = "\n".join([section("QUERY", query_text), section("OUTPUT", count=k)])
    return GenerationRequest(system, user, max_tokens=400, task=TOPICS)


def belief_request(agent_id: str, topics: list[str], article) -> GenerationRequest:
    system = (
        "You are an analyst responsible for these topics: "
        + "; ".join(topics)
        + ". Read the article and write the belief statements it supports "
        "about your topics. For each belief emit:\n"
        "STATEMENT: <one sentence>\nCONFIDENCE: <number between 0 and 1>\n"
        "REFERENCES: <comma separated article ids>"
    )
    user = "\n".join(
        [
            section("AGENT", "\n".join(topics), id=agent_id),
            section(
                "ARTICLE",
                f"{article.title}\n{article.body}",
                id=article.id,
                time=article.timestamp,
            ),
        ]
    )
    return GenerationRequest(system, user, max_tokens=400, task=BELIEFS)


def _belief_sections(beliefs) -> list[str]:
    return [
        section(
            "BELIEF",
            b.statement,
            id=b.id,
            refs=_refs_attr(b.references),
            confidence=f"{b.confidence:.2f}",
            hop=b.hop_count,
        )
        for b in beliefs
    ]


def synthesis_request(agent_id: str, topics: list[str], shared) -> GenerationRequest:
    system = (
        "You are an analyst responsible for these topics: "
        + "; ".join(topics)
        + ". Colleagues shared the beliefs below. Combine them into one new "
        "belief that matters for your topics. Emit:\n"
        "STATEMENT: <one sentence>\nCONFIDENCE: <number between 0 and 1>\n"
        "REFERENCES: <comma separated article ids>"
    )
    user = "\n".join([section("AGENT", "\n".join(topics), id=agent_id), *_belief_sections(shared)])
    return GenerationRequest(system, user, max_tokens=400, task=SYNTHESIS)


def hypothesis_request(query, beliefs) -> GenerationRequest:
    system = (
        "Answer the user's query using only the belief statements provided. "
        "Describe the developments they point to and what is likely to "
        "happen next. Emit:\nHYPOTHESIS: <answer>\nREFERENCES: <article ids>"
    )
    user = "\n".join([section("QUERY", query.text, id=query.id), *_belief_sections(beliefs)])
    return GenerationRequest(system, user, max_tokens=800, task=HYPOTHESIS)


def baseline_request(query, articles, previous: str | None) -> GenerationRequest:
    system = (
        "You track a user's query over a stream of news articles. Using the "
        "current articles and your previous assessment, state your updated "
        "hypothesis and cite the articles that support it. Emit:\n"
        "HYPOTHESIS: <answer>\nREFERENCES: <article ids, or none>"
    )
    parts = [section("QUERY", query.text, id=query.id)]
    if previous is not None:
        parts.append(section("PREVIOUS", previous))
    parts += [section("ARTICLE", f"{a.title}\n{a.body}", id=a.id, time=a.timestamp) for a in articles]
    return GenerationRequest(system, "\n".join(parts), max_tokens=800, task=BASELINE)


def scenarios_request(query_text: str, n: int) -> GenerationRequest:
    system = (
        f"Write {n} distinct, realistic news scenarios that would matter to "
        "the query. For each scenario give a one-line description, its causal "
        "chain of sub-events from trigger to outcome, how uncertain the "
        "trigger-to-outcome relation is (0 to 1), and the lag in days between "
        "trigger and final impact. Emit one block per scenario:\n"
        "SCENARIO: <description>\nSUB_EVENTS: <event> | <event> | ...\n"
        "UNCERTAINTY: <0-1>\nTIME_LAG: <days>"
    )
    user = "\n".join([section("QUERY", query_text), section("OUTPUT", count=n)])
    return GenerationRequest(system, user, max_tokens=1500, task=SCENARIOS)


def article_request(
    scenario_description: str, sub_event: str, perspective: str | None, words: int, variant: int
) -> GenerationRequest:
    slant = f" from a {perspective} perspective" if perspective else ""
    system = (
        f"Write a news article of about {words} words{slant} reporting a "
        "development in the scenario below, focused on the given event. "
        "Emit:\nTITLE: <headline>\nBODY: <article text>"
    )
    user = "\n".join(
        [
            section("SCENARIO", scenario_description),
            section("SUB_EVENT", sub_event),
            section("OUTPUT", words=words, perspective=perspective or "-", variant=variant),
        ]
    )
    return GenerationRequest(system, user, max_tokens=min(4 * words, 8000), temperature=0.7, task=ARTICLE)


def judge_request(sub_event: str, hypotheses: list[str]) -> GenerationRequest:
    system = (
        "Decide whether the hypotheses below identify the given event, "
        "either explicitly or by clear paraphrase. Answer YES or NO."
    )
    parts = [section("SUB_EVENT", sub_event)] + [section("HYPOTHESIS", h) for h in hypotheses]
    return GenerationRequest(system, "\n".join(parts), max_tokens=5, task=JUDGE)


# -- reply parsers ----------------------------------------------------------

_NUMBERED_RE = re.compile(r"^\s*\d+\s*[.)]\s+(.+)$")
_BULLET_RE = re.compile(r"^(\s*)[-*•]\s+(.+)$")
_FIELD_RE = re.compile(r"^\s*\**\s*([A-Za-z_ ]+?)\s*\**\s*:\s*\**\s*(.*)$")
_ID_RE = re.compile(r"[A-Za-z0-9][A-Za-z0-9_.:\-]*")
_NUMBER_RE = re.compile(r"-?\d+(?:\.\d+)?")


def _clean_item(item: str) -> str:
    item = item.replace("**", "").replace("__", "").strip()
    return item.rstrip(":").strip()


def parse_numbered_list(text: str) -> list[str]:
    """Top-level items of a numbered list, or of a bulleted list if none is numbered."""
    numbered = [_clean_item(m.group(1)) for m in map(_NUMBERED_RE.match, text.splitlines()) if m]
    if numbered:
        return [i for i in numbered if i]
    bullets = [(len(m.group(1)), _clean_item(m.group(2))) for m in map(_BULLET_RE.match, text.splitlines()) if m]
    if not bullets:
        return []
    top = min(indent for indent, _ in bullets)
    return [i for indent, i in bullets if indent == top and i]


def parse_reference_list(value: str) -> list[str]:
    value = value.strip().strip("[]()")
    if value.lower() in {"", "none", "-", "n/a"}:
        return []
    return _ID_RE.findall(value)


def parse_confidence(value: str) -> float | None:
    m = _NUMBER_RE.search(value)
    if not m:
        return None
    c = float(m.group(0))
    if c > 1.0 and "%" in value:
        c /= 100.0
    return c if 0.0 <= c <= 1.0 else None


@dataclass
class ParsedBelief:
    statement: str
    confidence: float | None = None
    references: list[str] | None = None
    timestamp: int | None = None


_STATEMENT_KEYS = {"statement", "response", "belief"}


def parse_belief_blocks(text: str) -> list[ParsedBelief]:
    """Extract STATEMENT/CONFIDENCE/REFERENCES blocks.

    Accepts ``Statement:``, ``Response:`` or ``Belief:`` as the opening
    label, optional markdown bold, and bracketed reference lists. Text with
    no recognisable label becomes a single statement with no metadata.
    """
    blocks: list[ParsedBelief] = []
    current: ParsedBelief | None = None
    for line in text.splitlines():
        m = _FIELD_RE.match(line)
        key = m.group(1).strip().lower() if m else None
        if key in _STATEMENT_KEYS:
            current = ParsedBelief(m.group(2).strip())
            blocks.append(current)
        elif current is None:
            continue
        elif key == "confidence":
            current.confidence = parse_confidence(m.group(2))
        elif key in {"references", "refs", "reference"}:
            current.references = parse_reference_list(m.group(2))
        elif key == "timestamp":
            n = _NUMBER_RE.search(m.group(2))
            current.timestamp = int(float(n.group(0))) if n else None
        elif line.strip() and current.confidence is None and current.references is None:
            current.statement = f"{current.statement} {line.strip()}".strip()
    blocks = [b for b in blocks if b.statement]
    if not blocks and text.strip():
        blocks = [ParsedBelief(" ".join(text.split()))]
    return blocks


def parse_hypothesis(text: str) -> tuple[str, list[str] | None]:
    """Return (answer text, cited ids or None when no REFERENCES line is present)."""
    answer_lines: list[str] = []
    refs: list[str] | None = None
    in_answer = False
    for line in text.splitlines():
        m = _FIELD_RE.match(line)
        key = m.group(1).strip().lower() if m else None
        if key in {"hypothesis", "answer"}:
            answer_lines = [m.group(2).strip()]
            in_answer = True
        elif key in {"references", "refs"}:
            refs = parse_reference_list(m.group(2))
            in_answer = False
        elif in_answer and line.strip():
            answer_lines.append(line.strip())
    answer = " ".join(answer_lines).strip()
    if not answer:
        kept = [ln for ln in text.splitlines() if not re.match(r"^\s*references\s*:", ln, re.I)]
        answer = " ".join(" ".join(kept).split())
    return answer, refs


@dataclass
class ParsedScenario:
    description: str
    sub_events: list[str] = field(default_factory=list)
    uncertainty: float | None = None
    time_lag: int | None = None


def parse_scenarios(text: str) -> list[ParsedScenario]:
    out: list[ParsedScenario] = []
    for line in text.splitlines():
        m = _FIELD_RE.match(line)
        if not m:
            continue
        key, value = m.group(1).strip().lower(), m.group(2).strip()
        if key == "scenario":
            out.append(ParsedScenario(value))
        elif not out:
            continue
        elif key in {"sub_events", "sub events", "chain"}:
            sep = "|" if "|" in value else "->" if "->" in value else ";"
            out[-1].sub_events = [s.strip() for s in value.split(sep) if s.strip()]
        elif key == "uncertainty":
            n = _NUMBER_RE.search(value)
            out[-1].uncertainty = float(n.group(0)) if n else None
        elif key in {"time_lag", "time lag"}:
            n = _NUMBER_RE.search(value)
            out[-1].time_lag = int(float(n.group(0))) if n else None
    return [s for s in out if s.description]


def parse_article(text: str) -> tuple[str, str]:
    title, body_lines, in_body = "", [], False
    for line in text.splitlines():
        m = _FIELD_RE.match(line)
        key = m.group(1).strip().lower() if m else None
        if key == "title" and not in_body:
            title = m.group(2).strip()
        elif key == "body" and not in_body:
            body_lines.append(m.group(2))
            in_body = True
        elif in_body:
            body_lines.append(line)
    body = " ".join(" ".join(body_lines).split())
    if not body:
        body = " ".join(text.split())
    return title, body


def parse_yes_no(text: str) -> bool:
    return bool(re.match(r"^\W*yes\b", text.strip(), re.I))
