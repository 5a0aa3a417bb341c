"""Pluggable ATE/ASC backends: lexicon baseline, record/replay, remote client."""

from .base import AscBackend, AteBackend
from .lexicon import (
    LexiconAscBackend,
    LexiconAteBackend,
    LexiconConfig,
    lexicon_asc,
    lexicon_ate,
)
from .recording import RecordingAscBackend, RecordingAteBackend, record_wrap
from .remote import (
    RemoteAscBackend,
    RemoteAteBackend,
    RemoteEndpointConfig,
    fetch_health,
    remote_asc,
    remote_ate,
)
from .replay import (
    ReplayAscBackend,
    ReplayAteBackend,
    ReplayStore,
    asc_key,
    ate_key,
    replay_asc,
    replay_ate,
    replay_load,
)

__all__ = [
    "AscBackend",
    "AteBackend",
    "LexiconAscBackend",
    "LexiconAteBackend",
    "LexiconConfig",
    "RecordingAscBackend",
    "RecordingAteBackend",
    "RemoteAscBackend",
    "RemoteAteBackend",
    "RemoteEndpointConfig",
    "ReplayAscBackend",
    "ReplayAteBackend",
    "ReplayStore",
    "asc_key",
    "ate_key",
    "fetch_health",
    "lexicon_asc",
    "lexicon_ate",
    "record_wrap",
    "remote_asc",
    "remote_ate",
    "replay_asc",
    "replay_ate",
    "replay_load",
]
