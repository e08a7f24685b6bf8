"""Pipeline configuration: one place for every tunable and resource path."""

import hashlib
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from scistory.errors import ConfigurationError


def packaged(name: str) -> Path:
    return Path(str(resources.files("scistory.data") / name))


@dataclass
class PipelineConfig:
    lexicon_path: Path = field(default_factory=lambda: packaged("comparative_lexicon.tsv"))
    gazetteer_path: Path = field(default_factory=lambda: packaged("gazetteer.json"))
    model_path: Path = field(default_factory=lambda: packaged("model.json"))
    radius: int = 3
    min_sup: float = 0.1
    min_conf: float = 0.6
    block_max: int = 10_000
    top_k_entities: int = 30
    max_text_bytes: int = 1_000_000

    def validate(self) -> None:
        if not (0 < self.min_sup <= 1):
            raise ConfigurationError(f"min_sup must be in (0, 1], got {self.min_sup}")
        if not (0 < self.min_conf <= 1):
            raise ConfigurationError(f"min_conf must be in (0, 1], got {self.min_conf}")
        if self.radius < 0:
            raise ConfigurationError("radius must be >= 0")
        if self.block_max < 1:
            raise ConfigurationError("block_max must be positive")
        for label, path in (
            ("lexicon", self.lexicon_path),
            ("gazetteer", self.gazetteer_path),
            ("model", self.model_path),
        ):
            if not Path(path).is_file():
                raise ConfigurationError(f"{label} file not found: {path}")

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        params = {
            "radius": self.radius,
            "min_sup": self.min_sup,
            "min_conf": self.min_conf,
            "block_max": self.block_max,
            "top_k_entities": self.top_k_entities,
        }
        digest.update(json.dumps(params, sort_keys=True).encode())
        for path in (self.model_path, self.gazetteer_path, self.lexicon_path):
            try:
                digest.update(Path(path).read_bytes())
            except OSError:
                digest.update(str(path).encode())
        return digest.hexdigest()[:16]
