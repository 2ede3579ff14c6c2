from enum import Enum
from typing import Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

SCHEMA_VERSION = "1"


class FamilyKind(str, Enum):
    CTLS = "ctls"
    ACYCLIC_CLIQUE = "acyclic_clique"
    REGULAR_TOURNAMENT = "regular_tournament"
    CIRCULANT = "circulant"
    GRAPH = "graph"
    EXPLICIT = "explicit"


class Family(BaseModel):
    kind: FamilyKind
    p_head: Optional[str] = Field(None, description="Head probability for ctls")


class WodSetEntry(BaseModel):
    support: List[int]
    winners: List[int]

    @model_validator(mode="after")
    def winners_inside_support(self):
        if not set(self.winners) <= set(self.support):
            raise ValueError(
                f"winners {self.winners} not inside support {self.support}"
            )
        return self


class GameSpecFile(BaseModel):
    """On-disk game description (JSON)."""

    m: int = Field(..., ge=2)
    probs: Optional[List[str]] = Field(
        None, description="Rational strings; omitted means uniform"
    )
    family: Family
    edges: Optional[List[Tuple[int, int]]] = None
    wod_sets: Optional[List[WodSetEntry]] = None
    labels: List[str] = Field(default_factory=list)
    name: Optional[str] = None

    @field_validator("probs", mode="before")
    @classmethod
    def probs_as_strings(cls, value):
        if value is None:
            return value
        return [str(p) for p in value]

    @model_validator(mode="after")
    def family_payload_present(self):
        if self.probs is not None and len(self.probs) != self.m:
            raise ValueError(f"expected {self.m} probabilities, got {len(self.probs)}")
        if self.family.kind is FamilyKind.GRAPH and self.edges is None:
            raise ValueError("family 'graph' needs an 'edges' list")
        if self.family.kind is FamilyKind.EXPLICIT and self.wod_sets is None:
            raise ValueError("family 'explicit' needs a 'wod_sets' list")
        if self.family.kind in (FamilyKind.REGULAR_TOURNAMENT, FamilyKind.CIRCULANT):
            if self.m % 2 == 0:
                raise ValueError(
                    f"family '{self.family.kind.value}' needs an odd m, got {self.m}"
                )
        if self.family.kind is FamilyKind.CTLS and self.m != 2:
            raise ValueError(f"family 'ctls' has m=2, got {self.m}")
        return self


class SimMode(str, Enum):
    PER_ROUND = "per-round"
    FAST_FORWARD = "fast-forward"


class SimConfig(BaseModel):
    """Monte Carlo run parameters."""

    n: int = Field(..., ge=1)
    trials: int = Field(..., ge=1)
    seed: int = Field(0, ge=0, lt=2**64)
    mode: SimMode = SimMode.PER_ROUND
    measures: Tuple[Literal["X", "Y", "Z"], ...] = ("X", "Y", "Z")


class RunManifest(BaseModel):
    """Provenance embedded in (or written next to) every output file."""

    schema_version: str = SCHEMA_VERSION
    tool_version: str
    command: str
    argv: List[str] = Field(default_factory=list)
    spec_name: Optional[str] = None
    spec_digest: Optional[str] = None
    numeric_mode: Optional[str] = None
    horizons: Dict[str, int] = Field(default_factory=dict)
    seed: Optional[int] = None
