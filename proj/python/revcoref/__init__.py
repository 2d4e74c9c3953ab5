"""Knowledge-aware coreference classification for product reviews."""

import json
import os

from ._revcoref import (
    DECISION_THRESHOLD,
    ConfigError,
    DivergenceError,
    IngestError,
    RevcorefError,
    ShapeError,
    StageError,
    StructuralError,
    run_cli,
    sigmoid,
)
from . import _revcoref

__all__ = [
    "DECISION_THRESHOLD",
    "ConfigError",
    "DivergenceError",
    "IngestError",
    "Model",
    "RevcorefError",
    "ShapeError",
    "StageError",
    "StructuralError",
    "mine_domain_kb",
    "run_cli",
    "run_pipeline",
    "sigmoid",
]


def mine_domain_kb(corpus, rho=5.0, domain=""):
    """Mines a domain KB from a parsed JSONL corpus; returns the KB document."""
    return json.loads(_revcoref.mine_domain_kb_json(os.fspath(corpus), rho, domain))


def run_pipeline(config, output_dir="", seed=None):
    """Runs every stage for a run config file; returns the manifest."""
    return json.loads(
        _revcoref.run_pipeline_json(os.fspath(config), os.fspath(output_dir), seed))


class Model:
    """A trained checkpoint with the knowledge files it was trained with:
    a mined domain KB, a general triple store and an affect lexicon."""

    def __init__(self, checkpoint, kb=None, triple_store=None, affect=None):
        def path(p):
            return os.fspath(p) if p else ""

        self._model = _revcoref._Model(
            path(checkpoint), path(kb), path(triple_store), path(affect))
        self.config = json.loads(self._model.config_json())

    def score(self, doc, mention, anaphor):
        """Scores one pair. `doc` is a parsed document record (dict or JSON
        text); spans are (start, end) token offsets, end exclusive."""
        text = doc if isinstance(doc, str) else json.dumps(doc)
        return json.loads(self._model.score_json(text, tuple(mention), tuple(anaphor)))
