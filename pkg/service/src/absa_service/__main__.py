"""Launch the service: ``python -m absa_service --models stub --port 8000``."""

from __future__ import annotations

import argparse
import functools

import uvicorn

from .app import DEFAULT_MAX_BATCH, create_app
from .models import (
    DEFAULT_ASC_MODEL,
    DEFAULT_ATE_MODEL,
    load_checkpoint_bundle,
    load_stub_bundle,
)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="absa-service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument(
        "--models",
        choices=("checkpoints", "stub"),
        default="checkpoints",
        help="stub serves the deterministic rule-based pair (no downloads)",
    )
    parser.add_argument("--ate-model", default=DEFAULT_ATE_MODEL)
    parser.add_argument("--asc-model", default=DEFAULT_ASC_MODEL)
    parser.add_argument("--device", default="cpu")
    parser.add_argument("--max-batch", type=int, default=DEFAULT_MAX_BATCH)
    parser.add_argument("--max-output-length", type=int, default=128)
    args = parser.parse_args(argv)

    if args.models == "stub":
        factory = functools.partial(load_stub_bundle, max_output_length=args.max_output_length)
    else:
        factory = functools.partial(
            load_checkpoint_bundle,
            ate_model=args.ate_model,
            asc_model=args.asc_model,
            device=args.device,
            max_output_length=args.max_output_length,
        )
    app = create_app(factory, max_batch=args.max_batch)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
