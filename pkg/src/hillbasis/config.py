"""Run configuration shared by the CLI commands.

Fully deterministic: there is no randomness anywhere in the pipeline, so a
config hash identifies the scientific content of every output file.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .errors import InvalidInputError
from .series import MAX_ORDER


@dataclass
class RunConfig:
    potential: str | dict | None = None  # path to a potential JSON, or inline dict
    alpha: int = 0
    trunc: int = 64
    window: tuple[int, int] = (5, 16)
    order: int | None = None  # series order m; defaults to min(s + 2, MAX_ORDER)
    smooth: int = 0  # smoothness class s
    epsilon: float | None = None
    jump: complex | None = None  # endpoint-jump metadata for the C2-style checks
    out_dir: str = "out"
    gnuplot: bool = False

    def resolved_order(self) -> int:
        if self.order is not None:
            return self.order
        return min(self.smooth + 2, MAX_ORDER)

    def validate(self):
        if self.alpha not in (0, 1):
            raise InvalidInputError(f"alpha must be 0 or 1, got {self.alpha}")
        if self.trunc < 4:
            raise InvalidInputError(f"trunc must be >= 4, got {self.trunc}")
        lo, hi = self.window
        if not (1 <= lo <= hi):
            raise InvalidInputError(f"window must satisfy 1 <= lo <= hi, got {self.window}")
        if hi > self.trunc / 4:
            raise InvalidInputError(
                f"truncation-trust violation: window top {hi} exceeds N/4 = {self.trunc / 4}")
        if self.resolved_order() > MAX_ORDER:
            raise InvalidInputError(f"series order must be <= {MAX_ORDER}")
        if self.smooth < 0:
            raise InvalidInputError(f"smooth must be >= 0, got {self.smooth}")

    def hash(self) -> str:
        """Content hash of everything that affects the numbers (not out_dir)."""
        doc = {
            "potential": self.potential if not isinstance(self.potential, dict)
            else json.dumps(self.potential, sort_keys=True),
            "alpha": self.alpha,
            "trunc": self.trunc,
            "window": list(self.window),
            "order": self.resolved_order(),
            "smooth": self.smooth,
            "epsilon": self.epsilon,
            "jump": None if self.jump is None else [self.jump.real, self.jump.imag],
            "gnuplot": self.gnuplot,
        }
        blob = json.dumps(doc, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]


def load_config(path: str | Path) -> RunConfig:
    p = Path(path)
    if not p.exists():
        raise InvalidInputError(f"config file not found: {p}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as e:
        raise InvalidInputError(
            f"malformed config JSON at byte offset {e.pos}: {e.msg}") from e
    cfg = RunConfig()
    if "potential" in doc:
        pot = doc["potential"]
        if isinstance(pot, str):
            pot_path = Path(pot)
            if not pot_path.is_absolute():
                pot_path = p.parent / pot_path
            pot = str(pot_path)
        cfg.potential = pot
    for key in ("alpha", "trunc", "smooth"):
        if key in doc:
            setattr(cfg, key, int(doc[key]))
    if "order" in doc and doc["order"] is not None:
        cfg.order = int(doc["order"])
    if "window" in doc:
        lo, hi = doc["window"]
        cfg.window = (int(lo), int(hi))
    if "epsilon" in doc and doc["epsilon"] is not None:
        cfg.epsilon = float(doc["epsilon"])
    if "jump" in doc and doc["jump"] is not None:
        j = doc["jump"]
        cfg.jump = complex(float(j.get("re", 0.0)), float(j.get("im", 0.0)))
    if "out_dir" in doc:
        cfg.out_dir = str(doc["out_dir"])
    if "gnuplot" in doc:
        cfg.gnuplot = bool(doc["gnuplot"])
    return cfg
