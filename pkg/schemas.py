from pydantic import BaseModel, Field, validator, root_validator
from typing import Any, Dict, List, Literal, Optional, Union
import re

INDEX_ENTRIES = ("eps0", "eps_plus", "eps_minus", "eps_minus_minus")
IndexEntryName = Literal["eps0", "eps_plus", "eps_minus", "eps_minus_minus"]
ExtNatLiteral = Union[int, str]

_NAME_RE = re.compile(r"^[A-Za-z_][\w.]*$")
_INF_WORDS = ("inf", "infinity", "∞")


def _check_extnat(v):
    if isinstance(v, bool):
        raise ValueError("expected a non-negative integer or 'inf'")
    if isinstance(v, int):
        if v < 0:
            raise ValueError("index entries must be non-negative")
        return v
    if isinstance(v, str) and v.strip().lower() in _INF_WORDS:
        return "inf"
    raise ValueError(f"expected a non-negative integer or 'inf', got {v!r}")


class MatrixConstructor(BaseModel):
    constructor: Literal["shift", "diag_unitary", "diag_unitary_plus_shift",
                         "block_shift", "odd_orbit", "orbit_shift"]
    k: Optional[int] = Field(None, ge=1)
    n: Optional[int] = Field(None, ge=1)
    m: Optional[int] = Field(None, ge=0)
    thetas: Optional[List[float]] = None

    class Config:
        extra = "forbid"

    @root_validator(skip_on_failure=True)
    def check_parameters(cls, values):
        needed = {
            "shift": ("k", "n"),
            "diag_unitary": ("thetas",),
            "diag_unitary_plus_shift": ("thetas", "k", "m"),
            "block_shift": ("n",),
            "odd_orbit": ("n",),
            "orbit_shift": ("m", "n"),
        }[values["constructor"]]
        missing = [name for name in needed if values.get(name) is None]
        if missing:
            raise ValueError(f"constructor '{values['constructor']}' needs {', '.join(missing)}")
        return values


MatrixLiteral = List[List[Union[str, float, int]]]


class GeneratorEntry(BaseModel):
    id: str = Field(..., description="Generator name, also used in the pi table")
    kind: Literal["unitary", "infinite_shift", "finite_shift", "mixed"]
    spectrum: Optional[str] = None
    defect: Optional[int] = Field(None, ge=1, description="Co-rank of a finite shift")
    shift: Optional[ExtNatLiteral] = Field(None, description="Co-rank of the shift part of a mixed generator")
    base: Optional[str] = Field(None, description="Shift whose power this finite shift is")
    dim: Optional[ExtNatLiteral] = Field(None, description="Dimension of a unitary's space")
    index: Optional[List[ExtNatLiteral]] = None
    matrix: Optional[Union[MatrixConstructor, MatrixLiteral]] = None

    class Config:
        extra = "forbid"

    @validator("id", "base")
    def validate_name(cls, v):
        if v is not None and not _NAME_RE.match(v):
            raise ValueError(f"'{v}' is not a valid generator name")
        return v

    @validator("index")
    def validate_index(cls, v):
        if v is None:
            return v
        if len(v) != 4:
            raise ValueError("index must have exactly four entries")
        return [_check_extnat(entry) for entry in v]

    @validator("shift", "dim")
    def validate_extnat(cls, v):
        return None if v is None else _check_extnat(v)

    @root_validator(skip_on_failure=True)
    def validate_kind(cls, values):
        kind = values["kind"]
        if kind == "finite_shift" and values.get("defect") is None:
            raise ValueError("finite_shift needs a defect")
        if kind != "finite_shift" and values.get("defect") is not None:
            raise ValueError(f"{kind} does not take a defect")
        if kind == "mixed" and values.get("shift") in (None, 0):
            raise ValueError("mixed needs a nonzero shift co-rank")
        if kind != "mixed" and values.get("shift") is not None:
            raise ValueError(f"{kind} does not take a shift co-rank")
        if values.get("dim") == 0:
            raise ValueError("dim must be positive")
        return values


class FamilyFile(BaseModel):
    depth: Optional[int] = Field(None, ge=1)
    max_len: Optional[int] = Field(None, ge=1)
    tol: Optional[float] = Field(None, gt=0)
    generators: List[GeneratorEntry] = Field(..., min_length=1)
    pi: Dict[str, List[str]] = Field(default_factory=dict)
    pi_zero: Dict[str, List[str]] = Field(default_factory=dict)
    infinity: Dict[str, List[IndexEntryName]] = Field(default_factory=dict)
    truncated: Dict[str, List[IndexEntryName]] = Field(default_factory=dict)

    class Config:
        extra = "forbid"

    @validator("generators")
    def validate_unique_ids(cls, v):
        seen = set()
        for entry in v:
            if entry.id in seen:
                raise ValueError(f"duplicate generator id '{entry.id}'")
            seen.add(entry.id)
        return v

    @root_validator(skip_on_failure=True)
    def validate_references(cls, values):
        ids = {entry.id for entry in values["generators"]}
        for table in ("infinity", "truncated"):
            for name in values.get(table, {}):
                if name not in ids:
                    raise ValueError(f"[{table}] names unknown generator '{name}'")
        return values


class Report(BaseModel):
    """Common envelope of every command's JSON output"""
    command: str
    inputs_digest: str
    results: Dict[str, Any] = Field(default_factory=dict)
    residuals: Dict[str, float] = Field(default_factory=dict)
    status: Literal["ok", "mismatch"] = "ok"


class FamilyRequest(BaseModel):
    content: str = Field(..., description="Family file in TOML")
    depth: Optional[int] = Field(None, ge=1)
    tol: Optional[float] = Field(None, gt=0)


class GroupoidRequest(FamilyRequest):
    max_len: Optional[int] = Field(None, ge=1)
    emit_dot: bool = False
