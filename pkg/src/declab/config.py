"""Key-value suite configuration.

Config files are flat `key = value` lines; '#' starts a comment.  Values
parse as bool/int/float/fraction when they look like one, comma lists
split into tuples.  Unknown keys are rejected up front so a typo cannot
silently change a corpus.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict

from ._accel import backend_name
from .errors import ConfigError

SUITES = ("functional-ratios", "arithmetic-identities", "congruencing-ratios",
          "recursion-pipeline", "all")

DEFAULTS: Dict[str, object] = {
    "seed": 0,
    "seeds.functional": (0, 7),
    "seeds.torus": 20,
    "seeds.suppression": (5, 11),
    "deltas.coarse": (Fraction(1, 4),),
    "deltas.fine": (Fraction(1, 16),),
    "nu": Fraction(1, 4),
    "certify": True,
    "certify.rtol": 1e-6,
    "caps.x_max": 2000,
    "caps.n_max": 128,
    "arithmetic.j_cross_max": 12,
    "arithmetic.moment_x_max": 50,
    "arithmetic.lifting_x_max": 200,
    "arithmetic.lifting_count": 200,
    "congruencing.x_values": (50, 100, 200),
    "congruencing.primes": (2, 3),
    "search.budget": 40,
    "quad.nodes_per_cycle": 4,
    "quad.spacing": 0.25,
    "quad.weight_k": 8.0,
    "quad.tail_rtol": 1e-17,
    "suppression.tail_rtol": 9e-7,
    "suppression.nodes_per_cycle": 3,
    "recursion.eps_values": (Fraction(1, 100), Fraction(1, 99), Fraction(1, 64)),
    "recursion.l_exponents": (461, 468, 475, 482, 489, 496, 503, 510, 517,
                              524, 531, 538, 545, 552, 559, 566, 573, 580,
                              590, 600),
}


def _parse_scalar(text: str):
    t = text.strip()
    if t.lower() in ("true", "false"):
        return t.lower() == "true"
    if "/" in t:
        try:
            return Fraction(t)
        except ValueError:
            pass
    for conv in (int, float):
        try:
            return conv(t)
        except ValueError:
            continue
    return t


def parse_config_text(text: str) -> Dict[str, object]:
    out: Dict[str, object] = {}
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected 'key = value', got {raw!r}")
        key, val = (part.strip() for part in line.split("=", 1))
        if key not in DEFAULTS:
            raise ConfigError(f"line {ln}: unknown key {key!r}")
        if "," in val:
            out[key] = tuple(_parse_scalar(v) for v in val.split(",") if v.strip())
        else:
            out[key] = _parse_scalar(val)
    return out


@dataclass(frozen=True)
class SuiteSpec:
    """A validated suite request: which suite, with which options."""
    suite: str
    options: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.suite not in SUITES:
            raise ConfigError(
                f"unknown suite {self.suite!r}; valid suites: {', '.join(SUITES)}")
        merged = dict(DEFAULTS)
        merged.update(self.options)
        object.__setattr__(self, "options", merged)

    def get(self, key: str):
        return self.options[key]

    def canonical_text(self) -> str:
        lines = [f"suite = {self.suite}", f"backend = {backend_name()}"]
        for k in sorted(self.options):
            v = self.options[k]
            if isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            lines.append(f"{k} = {v}")
        return "\n".join(lines) + "\n"

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()[:16]


def load_spec(suite: str, path: str | None = None,
              overrides: Dict[str, object] | None = None) -> SuiteSpec:
    opts: Dict[str, object] = {}
    if path is not None:
        with open(path, "r", encoding="utf-8") as fh:
            opts.update(parse_config_text(fh.read()))
    if overrides:
        opts.update(overrides)
    return SuiteSpec(suite, opts)
