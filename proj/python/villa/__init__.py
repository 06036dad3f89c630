"""Python bindings for the mutation extraction core."""

import json

from ._villa import (
    Chunk,
    MannWhitneyResult,
    Metrics,
    MockEmbedder,
    Mutation,
    VectorStore,
    VillaError,
    chunk_text,
    cosine_distance,
    mann_whitney_u,
    normalize,
    parse_mutation,
    parse_response,
    run_cli,
    set_metrics,
)


def extract(method, corpus_jsonl, ground_truth_csv, protein, **config):
    """Runs one method for one protein over an in-memory corpus.

    Keyword arguments are config keys (k_a=6, query_mode="short", ...).
    Returns the extraction result as a dict.
    """
    values = {key: str(value) for key, value in config.items()}
    return json.loads(_villa._extract(method, corpus_jsonl, ground_truth_csv, protein, values))


from . import _villa  # noqa: E402

__all__ = [
    "Chunk",
    "MannWhitneyResult",
    "Metrics",
    "MockEmbedder",
    "Mutation",
    "VectorStore",
    "VillaError",
    "chunk_text",
    "cosine_distance",
    "extract",
    "mann_whitney_u",
    "normalize",
    "parse_mutation",
    "parse_response",
    "run_cli",
    "set_metrics",
]
