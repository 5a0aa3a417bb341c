"""The remote backend against a live service over real HTTP.

Starts the inference service in-process with its deterministic stub
models (no checkpoint downloads), points the harness's batching client at
it, and runs the pipeline end to end. With the real checkpoints, start
the service instead with:

    python -m absa_service --models checkpoints --port 8000

and set ABSA_ENDPOINT=http://127.0.0.1:8000 before running the CLI.

Run with: python demos/06_remote_service.py
(requires the service package: pip install -e service/)
"""

import threading
import time

import uvicorn

from absaeval import Corpus, GoldAspect, Polarity, Sentence, run_corpus, score_joint
from absaeval.backends import (
    RemoteAscBackend,
    RemoteAteBackend,
    RemoteEndpointConfig,
    fetch_health,
)
from absa_service.app import create_app
from absa_service.models import load_stub_bundle

# ---------------------------------------------------------------------------
# 1. Bring the service up on a free loopback port.

app = create_app(load_stub_bundle, max_batch=8)
server = uvicorn.Server(uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning"))
threading.Thread(target=server.run, daemon=True).start()
while not server.started:
    time.sleep(0.02)
app.state.wait_until_loaded(10.0)
port = server.servers[0].sockets[0].getsockname()[1]
base_url = f"http://127.0.0.1:{port}"
print("service up at", base_url)

# ---------------------------------------------------------------------------
# 2. The health document pins everything a run manifest needs: model ids,
#    revisions, decoding settings, and the prompt template hash.

cfg = RemoteEndpointConfig(base_url=base_url, max_batch=8, max_in_flight=4)
health = fetch_health(cfg)
print("health:", {k: health[k] for k in ("service_version", "ate_model", "asc_model")})

# ---------------------------------------------------------------------------
# 3. Run the pipeline through the wire and score it.

text = "The price was high, but the restaurant was breathtaking."
corpus = Corpus(
    "demo-res-14", "test",
    (
        Sentence("s1", text, (
            GoldAspect("price", Polarity.NEGATIVE, (4, 9)),
            GoldAspect("restaurant", Polarity.POSITIVE, (28, 38)),
        )),
    ),
)
outputs = run_corpus(RemoteAteBackend(cfg), RemoteAscBackend(cfg), corpus, parallelism=4)
for labeled in outputs[0].labeled:
    print(f"served: ({labeled.aspect.term}, {labeled.polarity.value})"
          f" scores={ {k.value: round(v, 3) for k, v in labeled.scores.items()} }")
print("joint F1:", f"{100 * score_joint(corpus, outputs).f1:.2f}")

server.should_exit = True
