"""SemEval-style annotated review corpora: parsing, validation, statistics.

Two on-disk schemas are supported, auto-detected from the root element.

The 2014 flat layout::

    <sentences>
      <sentence id="813">
        <text>The price was high.</text>
        <aspectTerms>
          <aspectTerm term="price" polarity="negative" from="4" to="9"/>
        </aspectTerms>
      </sentence>
    </sentences>

The 2015/16 review-nested layout uses a ``<Reviews>`` root with
``<Opinion target="..." polarity="..." from="..." to="..."/>`` elements and
is flattened to plain sentences on read; the review id is prefixed to the
sentence id unless the file already does so, and ``target="NULL"``
opinions (implicit aspects) carry no term and are dropped.

Serialization always emits the 2014 layout; corpus name and split ride on
the root element so a serialized corpus re-parses field-for-field.
Character offsets count Unicode code points, never bytes.
"""

from __future__ import annotations

import io
import xml.etree.ElementTree as ET
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterator, Mapping

from .errors import MalformedXml, OffsetMismatch, SchemaViolation


class Polarity(Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"
    CONFLICT = "conflict"


#: Labels a pipeline may emit. ``conflict`` appears only in parsed gold
#: data, before a conflict policy is applied.
PIPELINE_POLARITIES = (Polarity.POSITIVE, Polarity.NEGATIVE, Polarity.NEUTRAL)

SPLITS = ("train", "test", "other")

CONFLICT_POLICIES = ("drop", "keep", "map_to_neutral")


@dataclass(frozen=True)
class GoldAspect:
    """A gold-annotated aspect term, with optional character span."""

    term: str
    polarity: Polarity
    span: tuple[int, int] | None = None


@dataclass(frozen=True)
class Sentence:
    id: str
    text: str
    gold: tuple[GoldAspect, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gold", tuple(self.gold))


@dataclass(frozen=True)
class Corpus:
    name: str
    split: str
    sentences: tuple[Sentence, ...] = ()

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValueError(f"split must be one of {SPLITS}, got {self.split!r}")
        object.__setattr__(self, "sentences", tuple(self.sentences))

    def __len__(self) -> int:
        return len(self.sentences)

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences)


@dataclass(frozen=True)
class Violation:
    sentence_id: str
    rule: str
    detail: str


@dataclass(frozen=True)
class CorpusStats:
    sentence_count: int
    aspect_count: int
    polarity_histogram: Mapping[Polarity, int]
    no_aspect_count: int
    mean_aspects: float


def parse_semeval_xml(
    data: bytes,
    *,
    name: str = "",
    split: str = "other",
    validate_offsets: bool = True,
) -> Corpus:
    """Parse SemEval-style XML bytes into a :class:`Corpus`.

    ``name`` and ``split`` are fallbacks; attributes on the root element
    (written by :func:`serialize_semeval_xml`) take precedence. With
    ``validate_offsets=False`` a bad from/to pair is kept instead of
    raising, so :func:`validate_corpus` can report every mismatch.

    Raises :class:`MalformedXml` for non-XML input, :class:`SchemaViolation`
    for an unknown root or missing required attributes, and
    :class:`OffsetMismatch` when a span does not slice to its term.
    """
    try:
        root = ET.fromstring(data)
    except ET.ParseError as err:
        raise MalformedXml(f"not parseable as XML: {err}") from None

    name = root.get("name", name)
    split = root.get("split", split)
    if split not in SPLITS:
        raise SchemaViolation(f"split must be one of {SPLITS}, got {split!r}")

    if root.tag == "sentences":
        sentences = [
            _parse_sentence(el, "aspectTerms", "aspectTerm", "term", None, validate_offsets)
            for el in root.findall("sentence")
        ]
    elif root.tag == "Reviews":
        sentences = []
        for review in root.findall("Review"):
            rid = review.get("rid")
            for el in review.iterfind("sentences/sentence"):
                sentences.append(
                    _parse_sentence(el, "Opinions", "Opinion", "target", rid, validate_offsets)
                )
    else:
        raise SchemaViolation(f"unknown root element {root.tag!r} (expected sentences or Reviews)")

    seen: set[str] = set()
    for sentence in sentences:
        if sentence.id in seen:
            raise SchemaViolation(f"duplicate sentence id {sentence.id!r}")
        seen.add(sentence.id)

    return Corpus(name=name, split=split, sentences=tuple(sentences))


def _parse_sentence(
    el: ET.Element,
    container_tag: str,
    aspect_tag: str,
    term_attr: str,
    review_id: str | None,
    validate_offsets: bool,
) -> Sentence:
    sid = el.get("id")
    if sid is None:
        raise SchemaViolation("sentence element missing required attribute 'id'")
    if review_id and not sid.startswith(review_id):
        sid = f"{review_id}:{sid}"

    text_el = el.find("text")
    if text_el is None:
        raise SchemaViolation(f"sentence {sid!r} has no <text> element")
    text = text_el.text or ""
    if not text:
        raise SchemaViolation(f"sentence {sid!r} has empty text")

    gold = []
    container = el.find(container_tag)
    if container is not None:
        for aspect_el in container.findall(aspect_tag):
            aspect = _parse_aspect(aspect_el, term_attr, sid, text, validate_offsets)
            if aspect is not None:
                gold.append(aspect)
    return Sentence(id=sid, text=text, gold=tuple(gold))


def _parse_aspect(
    el: ET.Element,
    term_attr: str,
    sid: str,
    text: str,
    validate_offsets: bool,
) -> GoldAspect | None:
    term = el.get(term_attr)
    if term is None:
        raise SchemaViolation(f"sentence {sid!r}: aspect missing required attribute {term_attr!r}")
    if term_attr == "target" and term == "NULL":
        return None  # implicit aspect, out of scope
    if not term.strip():
        raise SchemaViolation(f"sentence {sid!r}: empty aspect term")

    raw_polarity = el.get("polarity")
    if raw_polarity is None:
        raise SchemaViolation(f"sentence {sid!r}: aspect missing required attribute 'polarity'")
    try:
        polarity = Polarity(raw_polarity)
    except ValueError:
        raise SchemaViolation(
            f"sentence {sid!r}: unknown polarity {raw_polarity!r}"
        ) from None

    raw_from, raw_to = el.get("from"), el.get("to")
    span: tuple[int, int] | None = None
    if raw_from is not None or raw_to is not None:
        if raw_from is None or raw_to is None:
            raise SchemaViolation(f"sentence {sid!r}: aspect has only one of from/to")
        try:
            span = (int(raw_from), int(raw_to))
        except ValueError:
            raise SchemaViolation(
                f"sentence {sid!r}: non-integer offsets from={raw_from!r} to={raw_to!r}"
            ) from None
        if validate_offsets:
            start, end = span
            if not (0 <= start < end <= len(text)):
                raise OffsetMismatch(
                    f"sentence {sid!r}: span {span} outside [0, {len(text)})", sentence_id=sid
                )
            if text[start:end] != term:
                raise OffsetMismatch(
                    f"sentence {sid!r}: text[{start}:{end}] == {text[start:end]!r}"
                    f" does not equal term {term!r}",
                    sentence_id=sid,
                )
    return GoldAspect(term=term, polarity=polarity, span=span)


def serialize_semeval_xml(corpus: Corpus) -> bytes:
    """Serialize ``corpus`` as 2014-schema XML.

    Round-trip contract: ``parse_semeval_xml(serialize_semeval_xml(c))``
    reproduces ``c`` field-for-field. Entity escaping is handled by the
    XML writer.
    """
    root = ET.Element("sentences", attrib={"name": corpus.name, "split": corpus.split})
    for sentence in corpus.sentences:
        s_el = ET.SubElement(root, "sentence", attrib={"id": sentence.id})
        ET.SubElement(s_el, "text").text = sentence.text
        if sentence.gold:
            terms_el = ET.SubElement(s_el, "aspectTerms")
            for aspect in sentence.gold:
                attrib = {"term": aspect.term, "polarity": aspect.polarity.value}
                if aspect.span is not None:
                    attrib["from"] = str(aspect.span[0])
                    attrib["to"] = str(aspect.span[1])
                ET.SubElement(terms_el, "aspectTerm", attrib=attrib)
    tree = ET.ElementTree(root)
    ET.indent(tree)
    buf = io.BytesIO()
    tree.write(buf, encoding="utf-8", xml_declaration=True)
    return buf.getvalue() + b"\n"


def validate_corpus(corpus: Corpus) -> list[Violation]:
    """Check every type invariant; violations are data, not errors.

    Returns an empty list iff the corpus is valid. Duplicate ids are
    reported once per duplicate beyond the first.
    """
    violations = []
    seen: set[str] = set()
    for sentence in corpus.sentences:
        if sentence.id in seen:
            violations.append(Violation(sentence.id, "duplicate-id", "sentence id already used"))
        seen.add(sentence.id)
        if not sentence.text:
            violations.append(Violation(sentence.id, "empty-text", "sentence text is empty"))
        for aspect in sentence.gold:
            if not aspect.term.strip():
                violations.append(
                    Violation(sentence.id, "empty-term", "aspect term is empty after trimming")
                )
            if aspect.span is not None:
                start, end = aspect.span
                if not (0 <= start < end <= len(sentence.text)):
                    violations.append(
                        Violation(
                            sentence.id,
                            "span-bounds",
                            f"span ({start}, {end}) outside [0, {len(sentence.text)}]",
                        )
                    )
                elif sentence.text[start:end] != aspect.term:
                    violations.append(
                        Violation(
                            sentence.id,
                            "offset-mismatch",
                            f"text[{start}:{end}] == {sentence.text[start:end]!r}"
                            f" does not equal term {aspect.term!r}",
                        )
                    )
    return violations


def corpus_stats(corpus: Corpus) -> CorpusStats:
    histogram = {polarity: 0 for polarity in Polarity}
    aspect_count = 0
    no_aspect = 0
    for sentence in corpus.sentences:
        if not sentence.gold:
            no_aspect += 1
        for aspect in sentence.gold:
            histogram[aspect.polarity] += 1
            aspect_count += 1
    n = len(corpus.sentences)
    return CorpusStats(
        sentence_count=n,
        aspect_count=aspect_count,
        polarity_histogram=histogram,
        no_aspect_count=no_aspect,
        mean_aspects=aspect_count / n if n else 0.0,
    )


def apply_conflict_policy(corpus: Corpus, policy: str = "drop") -> Corpus:
    """Resolve ``conflict`` gold labels before 3-class evaluation.

    ``drop`` removes conflict-labeled aspects, ``map_to_neutral`` relabels
    them, ``keep`` is the identity. The sentence set is never changed.
    """
    if policy not in CONFLICT_POLICIES:
        raise ValueError(f"policy must be one of {CONFLICT_POLICIES}, got {policy!r}")
    if policy == "keep":
        return corpus
    sentences = []
    for sentence in corpus.sentences:
        gold = []
        for aspect in sentence.gold:
            if aspect.polarity is Polarity.CONFLICT:
                if policy == "drop":
                    continue
                aspect = replace(aspect, polarity=Polarity.NEUTRAL)
            gold.append(aspect)
        sentences.append(replace(sentence, gold=tuple(gold)))
    return replace(corpus, sentences=tuple(sentences))
