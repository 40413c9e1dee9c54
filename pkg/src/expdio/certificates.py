"""Serializable, replayable certificates.

Every check in the package can emit a ``Certificate``.  A
certificate is plain JSON, validates against the bundled schema, and can be
replayed: the registered replay function recomputes the verdict from the
recorded inputs and parameters.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Callable

import jsonschema

from .exact import Interval

SCHEMA_VERSION = 1


@dataclass
class Certificate:
    claim: str
    module: str
    inputs: dict
    parameters: dict
    verdict: str
    assumptions: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    version: int = SCHEMA_VERSION

    def to_dict(self) -> dict:
        return to_jsonable(asdict(self))

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        validate(d)
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        return cls.from_dict(json.loads(text))


def to_jsonable(x):
    """Convert Fractions, Intervals, tuples and sets to JSON-friendly values."""
    if isinstance(x, Interval):
        return [str(x.lo), str(x.hi)]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted(to_jsonable(v) for v in x)
    return x


def load_schema() -> dict:
    text = resources.files("expdio.data").joinpath("certificate.schema.json").read_text()
    return json.loads(text)


_SCHEMA = None


def validate(d: dict) -> None:
    global _SCHEMA
    if _SCHEMA is None:
        _SCHEMA = load_schema()
    jsonschema.validate(d, _SCHEMA)


_REPLAYERS: dict = {}


def register_replay(claim: str):
    def deco(fn: Callable[[Certificate], str]):
        _REPLAYERS[claim] = fn
        return fn
    return deco


def replay(cert: Certificate) -> bool:
    """Recompute the verdict of ``cert`` and compare with the recorded one."""
    # importing the modules registers their replay functions
    from . import bounds, curves, linear_forms, lucas, sweep  # noqa: F401

    validate(cert.to_dict())
    fn = _REPLAYERS.get(cert.claim)
    if fn is None:
        raise KeyError(f"no replay registered for claim {cert.claim!r}")
    return fn(cert) == cert.verdict
