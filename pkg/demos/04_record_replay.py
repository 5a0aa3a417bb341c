"""Record a live backend session, then replay it deterministically.

Run with: python demos/04_record_replay.py
"""

import tempfile
from pathlib import Path

from absaeval import Corpus, Sentence, run_corpus
from absaeval.backends import (
    LexiconAscBackend,
    LexiconAteBackend,
    LexiconConfig,
    ReplayAscBackend,
    ReplayAteBackend,
    record_wrap,
    replay_load,
)

lexicon = LexiconConfig(
    aspect_terms={"price", "restaurant"},
    positive_cues={"breathtaking"},
    negative_cues={"high"},
)
corpus = Corpus(
    "demo", "test",
    (
        Sentence("s1", "The price was high, but the restaurant was breathtaking."),
        Sentence("s2", "No known aspects in this one."),
    ),
)

fixture = Path(tempfile.mkdtemp()) / "session.jsonl"

# ---------------------------------------------------------------------------
# 1. Wrap the "live" backends (here: the lexicon pair) so every call is
#    appended to the fixture file.

ate = record_wrap(LexiconAteBackend(lexicon), fixture)
asc = record_wrap(LexiconAscBackend(lexicon), fixture)
live_outputs = run_corpus(ate, asc, corpus)
print("recorded", len(fixture.read_text().splitlines()), "fixture records to", fixture)

# ---------------------------------------------------------------------------
# 2. Replay from the fixture: same inputs, identical outputs, no model.
#    Keys are content hashes of the text, so the fixtures also serve any
#    other corpus containing these sentences.

store = replay_load(fixture)
replayed_outputs = run_corpus(ReplayAteBackend(store), ReplayAscBackend(store), corpus)

for live, replayed in zip(live_outputs, replayed_outputs):
    assert live.labeled == replayed.labeled
print("replayed run matches the recorded session exactly")

# 3. A replay miss is fatal, never a silent default: evaluation runs either
#    reproduce or fail loudly.

from absaeval.errors import MissingFixture  # noqa: E402

try:
    ReplayAteBackend(store).extract("a sentence that was never recorded")
except MissingFixture as err:
    print("unrecorded input ->", type(err).__name__)
