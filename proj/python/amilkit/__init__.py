"""Distant-supervision relation extraction with type-keyed bags."""

import json

from ._amilkit import (
    AmilkitError,
    arch_description,
    build_repr,
    corpus_eval,
    find_mentions,
    multiplier,
    segment,
    sentence_eval,
    span_pool,
)
from ._amilkit import run as _run

ARCHS = tuple("ABCDEFGHIJKLMNOPQ")


def run(command, config):
    """Runs a pipeline stage with a config dict and returns its summary dict."""
    return json.loads(_run(command, json.dumps(config)))


__all__ = [
    "ARCHS",
    "AmilkitError",
    "arch_description",
    "build_repr",
    "corpus_eval",
    "find_mentions",
    "multiplier",
    "run",
    "segment",
    "sentence_eval",
    "span_pool",
]
