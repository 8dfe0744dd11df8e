"""Certificate schemas written by the command-line front end."""
from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

SCHEMA_VERSION = "1.0"


class Verdict(str, Enum):
    PASS = "PASS"
    FAIL = "FAIL"


class StageResult(BaseModel):
    """One checked quantity: what was expected, what was observed."""
    stage: str
    passed: bool
    observed: Any = None
    expected: Any = None
    detail: str = ""


class Invariants(BaseModel):
    selfint: int
    discriminant: int
    rho: str
    section_chain: Dict[str, Any] = Field(default_factory=dict)


class PrimeSection(BaseModel):
    """Everything computed over one verification prime."""
    prime: int
    singular_pairs: Dict[str, Any]
    cubics_dim: Optional[int] = None
    smooth_cubic: Optional[List[Dict[str, Any]]] = None
    singular_cubic: Optional[List[Dict[str, Any]]] = None
    singular_witness: Optional[List[int]] = None
    deformation: Optional[Dict[str, Any]] = None
    stages: List[StageResult] = Field(default_factory=list)
    verdict: Verdict = Verdict.PASS


class Certificate(BaseModel):
    """Composite verification certificate for one projection."""
    schema_version: str = SCHEMA_VERSION
    command: List[str] = Field(default_factory=list)
    config: Dict[str, Any] = Field(default_factory=dict)
    spec: Dict[str, int]
    lambda_checksum: str
    primes: Dict[str, PrimeSection] = Field(default_factory=dict)
    invariants: Optional[Invariants] = None
    stages: List[StageResult] = Field(default_factory=list)
    verdict: Verdict = Verdict.PASS

    def failed_stages(self) -> List[str]:
        return [stage.stage for stage in self.stages if not stage.passed] + [
            f"{prime}:{stage.stage}"
            for prime, section in self.primes.items()
            for stage in section.stages
            if not stage.passed
        ]


class ConstructionCertificate(BaseModel):
    """Outcome of ``construct``: the plan and one pair report per prime."""
    schema_version: str = SCHEMA_VERSION
    command: List[str] = Field(default_factory=list)
    config: Dict[str, Any] = Field(default_factory=dict)
    spec: Dict[str, int]
    plan: Dict[str, Any]
    lambda_checksum: str
    reports: Dict[str, Dict[str, Any]] = Field(default_factory=dict)
    verdict: Verdict = Verdict.PASS


class SweepCertificate(BaseModel):
    schema_version: str = SCHEMA_VERSION
    command: List[str] = Field(default_factory=list)
    config: Dict[str, Any] = Field(default_factory=dict)
    outcomes: List[Dict[str, Any]] = Field(default_factory=list)
    success_rate: float
