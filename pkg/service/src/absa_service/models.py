"""Model implementations behind the service endpoints.

Two kinds ship here: the real checkpoint pair (generative extraction via
an instruction-tuned text2text model, pair-input sequence classification
for sentiment) and a deterministic rule-based stub pair used by the
contract tests and for protocol development without the checkpoints.

Both kinds satisfy the same small interface:

* extraction: ``extract_terms(text) -> list[str]``
* sentiment: ``classify(text, term) -> (label, scores)`` with scores over
  ``positive``/``negative``/``neutral`` summing to 1 and the label at the
  argmax

plus ``model_id`` and ``revision`` attributes for the health document.
"""

from __future__ import annotations

import hashlib
import re
import threading
from dataclasses import dataclass, field
from importlib import resources

POLARITIES = ("positive", "negative", "neutral")

#: Default checkpoints: instruction-tuned extraction and pair-input
#: sentiment classification, both public.
DEFAULT_ATE_MODEL = "kevinscaria/ate_tk-instruct-base-def-pos-neg-neut-combined"
DEFAULT_ASC_MODEL = "yangheng/deberta-v3-base-absa-v1.1"

#: The extraction checkpoint's conventions: terms joined by a comma
#: delimiter, with a sentinel token meaning "no aspects here".
TERM_DELIMITER = ","
NO_ASPECT_SENTINEL = "noaspectterm"


def default_prompt_template() -> str:
    return (
        resources.files("absa_service").joinpath("prompts/ate_instruction.txt").read_text("utf-8")
    )


def prompt_hash(template: str) -> str:
    return hashlib.sha256(template.encode("utf-8")).hexdigest()


def split_generated_terms(decoded: str) -> list[str]:
    """Turn a generated string into a term list.

    Splits on the checkpoint's delimiter, trims whitespace, drops empties
    and the no-aspect sentinel (case-insensitive).
    """
    terms = []
    for part in decoded.split(TERM_DELIMITER):
        term = part.strip()
        if term and term.lower() != NO_ASPECT_SENTINEL:
            terms.append(term)
    return terms


def polarity_mapping(id2label: dict) -> dict[int, str]:
    """Index-to-polarity mapping from a checkpoint's own configuration.

    Never hardcoded: the classifier head's label order is whatever the
    checkpoint says it is. Labels must cover exactly
    positive/negative/neutral (case-insensitive) or the checkpoint is not
    usable behind this protocol.
    """
    mapping = {int(index): str(label).strip().lower() for index, label in id2label.items()}
    if sorted(mapping.values()) != sorted(POLARITIES):
        raise ValueError(
            f"checkpoint labels {sorted(mapping.values())} do not cover {POLARITIES}"
        )
    return mapping


def normalized_scores(raw: dict[str, float]) -> tuple[str, dict[str, float]]:
    """Renormalize scores to sum to 1 and return (argmax label, scores)."""
    total = sum(raw.values())
    if total <= 0:
        raise ValueError("scores must have positive mass")
    scores = {label: raw.get(label, 0.0) / total for label in POLARITIES}
    label = max(POLARITIES, key=lambda name: scores[name])
    return label, scores


# ---------------------------------------------------------------------------
# deterministic stub pair


_STUB_TERMS = (
    "battery life", "price", "restaurant", "food", "service", "screen",
    "keyboard", "laptop", "staff", "menu", "waiter", "pizza",
)
_STUB_POSITIVE = ("breathtaking", "great", "good", "excellent", "amazing", "tasty", "love", "kind")
_STUB_NEGATIVE = ("high", "bad", "terrible", "awful", "slow", "poor", "rude", "cold")

_WORD_RE = re.compile(r"[\w']+")


@dataclass(frozen=True)
class StubAteModel:
    """Dictionary lookup over a tiny built-in vocabulary; deterministic."""

    model_id: str = "stub-ate"
    revision: str = "0"

    def extract_terms(self, text: str) -> list[str]:
        tokens = [t.lower() for t in _WORD_RE.findall(text)]
        found = []
        for entry in _STUB_TERMS:
            entry_tokens = entry.split()
            for i in range(len(tokens) - len(entry_tokens) + 1):
                if tokens[i : i + len(entry_tokens)] == entry_tokens:
                    found.append((i, entry))
                    break
        found.sort()
        return [entry for _, entry in found]


@dataclass(frozen=True)
class StubAscModel:
    """Nearest sentiment cue by token distance; neutral when none."""

    model_id: str = "stub-asc"
    revision: str = "0"

    def classify(self, text: str, term: str) -> tuple[str, dict[str, float]]:
        tokens = [t.lower() for t in _WORD_RE.findall(text)]
        term_tokens = term.lower().split()
        position = None
        for i in range(len(tokens) - len(term_tokens) + 1):
            if tokens[i : i + len(term_tokens)] == term_tokens:
                position = i
                break
        winner = "neutral"
        if position is not None:
            best_distance = None
            for idx, token in enumerate(tokens):
                cue = (
                    "positive" if token in _STUB_POSITIVE
                    else "negative" if token in _STUB_NEGATIVE
                    else None
                )
                if cue is None:
                    continue
                distance = min(abs(idx - position), abs(idx - (position + len(term_tokens) - 1)))
                if best_distance is None or distance < best_distance:
                    best_distance, winner = distance, cue
        raw = {label: 0.8 if label == winner else 0.1 for label in POLARITIES}
        return normalized_scores(raw)


# ---------------------------------------------------------------------------
# checkpoint-backed pair (lazy heavy imports)


class InstructAteModel:
    """Greedy generation from an instruction-tuned text2text checkpoint.

    The instruction template ships as a versioned asset; its hash appears
    in the health document so harness manifests can pin the exact prompt.
    Greedy decoding keeps identical inputs giving identical outputs.
    """

    def __init__(
        self,
        model_id: str = DEFAULT_ATE_MODEL,
        device: str = "cpu",
        max_output_length: int = 128,
        template: str | None = None,
    ):
        from transformers import AutoModelForSeq2SeqLM, AutoTokenizer

        self.model_id = model_id
        self.max_output_length = max_output_length
        self.template = template if template is not None else default_prompt_template()
        self._tokenizer = AutoTokenizer.from_pretrained(model_id)
        self._model = AutoModelForSeq2SeqLM.from_pretrained(model_id).to(device).eval()
        self._device = device
        self.revision = str(getattr(self._model.config, "_commit_hash", None) or "unpinned")

    def extract_terms(self, text: str) -> list[str]:
        import torch

        prompt = self.template.replace("{text}", text)
        inputs = self._tokenizer(prompt, return_tensors="pt", truncation=True).to(self._device)
        with torch.no_grad():
            generated = self._model.generate(
                **inputs,
                max_new_tokens=self.max_output_length,
                num_beams=1,
                do_sample=False,
            )
        decoded = self._tokenizer.decode(generated[0], skip_special_tokens=True)
        return split_generated_terms(decoded)


class PairAscModel:
    """Sentence+aspect pair classification with softmax scores.

    The label order comes from the checkpoint's own configuration via
    :func:`polarity_mapping`.
    """

    def __init__(self, model_id: str = DEFAULT_ASC_MODEL, device: str = "cpu"):
        from transformers import AutoModelForSequenceClassification, AutoTokenizer

        self.model_id = model_id
        self._tokenizer = AutoTokenizer.from_pretrained(model_id)
        self._model = AutoModelForSequenceClassification.from_pretrained(model_id).to(device).eval()
        self._device = device
        self._mapping = polarity_mapping(self._model.config.id2label)
        self.revision = str(getattr(self._model.config, "_commit_hash", None) or "unpinned")

    def classify(self, text: str, term: str) -> tuple[str, dict[str, float]]:
        import torch

        inputs = self._tokenizer(text, term, return_tensors="pt", truncation=True).to(self._device)
        with torch.no_grad():
            logits = self._model(**inputs).logits[0]
        probabilities = torch.softmax(logits, dim=-1).tolist()
        raw = {self._mapping[i]: float(p) for i, p in enumerate(probabilities)}
        return normalized_scores(raw)


# ---------------------------------------------------------------------------


@dataclass
class ModelBundle:
    """The loaded model pair plus everything the health document reports.

    Model invocations are serialized through one lock; the checkpoints are
    not guaranteed thread-safe and per-request determinism is part of the
    protocol.
    """

    ate: object
    asc: object
    max_output_length: int
    prompt_sha256: str
    lock: threading.Lock = field(default_factory=threading.Lock)

    def extract_terms(self, text: str) -> list[str]:
        with self.lock:
            return self.ate.extract_terms(text)

    def classify(self, text: str, term: str) -> tuple[str, dict[str, float]]:
        with self.lock:
            return self.asc.classify(text, term)


def load_stub_bundle(max_output_length: int = 128) -> ModelBundle:
    return ModelBundle(
        ate=StubAteModel(),
        asc=StubAscModel(),
        max_output_length=max_output_length,
        prompt_sha256=prompt_hash(default_prompt_template()),
    )


def load_checkpoint_bundle(
    ate_model: str = DEFAULT_ATE_MODEL,
    asc_model: str = DEFAULT_ASC_MODEL,
    device: str = "cpu",
    max_output_length: int = 128,
) -> ModelBundle:
    template = default_prompt_template()
    return ModelBundle(
        ate=InstructAteModel(ate_model, device, max_output_length, template),
        asc=PairAscModel(asc_model, device),
        max_output_length=max_output_length,
        prompt_sha256=prompt_hash(template),
    )
