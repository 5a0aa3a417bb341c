"""HTTP inference service for aspect term extraction and per-aspect
sentiment classification.

Wire protocol: ``POST /v1/ate``, ``POST /v1/asc``, ``GET /v1/health``;
UTF-8 JSON bodies, ``{"error": ...}`` on 400/503. Responses echo request
ids in order, sentiment scores sum to 1 with the polarity at the argmax,
and identical request bodies get identical responses within a process
lifetime.
"""

__version__ = "0.1.0"
