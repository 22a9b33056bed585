"""
Family files: TOML text to validated generator families
"""

import hashlib
import json
import logging
import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple

import numpy as np
from pydantic import ValidationError

from exceptions import FamilyFileError, MatrixError
from schemas import FamilyFile, GeneratorEntry, MatrixConstructor

from . import numeric
from .graph import AdmissibilityTable, GeneratorKind, GeneratorSpec
from .index import INF, ExtNat, StarIndex

logger = logging.getLogger(__name__)

_TOML_LINE_RE = re.compile(r"at line (\d+)")
_HEADER_RE = re.compile(r"^\s*\[\[\s*generators\s*\]\]")


@dataclass
class Family:
    """
    A parsed family file.

    `generators` is the Wold family used by the graph and block layers:
    mixed entries are replaced by their unitary piece `<id>.u` and shift
    piece `<id>.s`. `entries` keeps the declared generators as written.
    """
    source: str
    model: FamilyFile
    entries: List[GeneratorEntry]
    generators: List[GeneratorSpec]
    declared_index: Dict[str, StarIndex]
    matrices: Dict[str, np.ndarray]
    pi: AdmissibilityTable
    infinity: Dict[str, Set[str]] = field(default_factory=dict)
    truncated: Dict[str, Set[str]] = field(default_factory=dict)

    @property
    def depth(self) -> Optional[int]:
        return self.model.depth

    @property
    def max_len(self) -> Optional[int]:
        return self.model.max_len

    @property
    def tol(self) -> Optional[float]:
        return self.model.tol

    def entry(self, entry_id: str) -> GeneratorEntry:
        for entry in self.entries:
            if entry.id == entry_id:
                return entry
        raise KeyError(entry_id)

    def digest(self, **flags) -> str:
        """SHA-256 of the canonical family content together with the command flags"""
        payload = {
            "family": self.model.model_dump(mode="json"),
            "flags": {k: v for k, v in sorted(flags.items()) if v is not None},
        }
        canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def parse_complex(entry) -> complex:
    """'a+bi' text (or a plain number) to a complex"""
    if isinstance(entry, (int, float)):
        return complex(entry)
    text = entry.strip().replace(" ", "").replace("i", "j")
    if not text:
        raise ValueError("empty matrix entry")
    return complex(text)


def build_matrix(spec) -> np.ndarray:
    if isinstance(spec, MatrixConstructor):
        if spec.constructor == "shift":
            return numeric.make_truncated_shift(spec.k, spec.n)
        if spec.constructor == "diag_unitary":
            return numeric.make_diag_unitary(spec.thetas)
        if spec.constructor == "diag_unitary_plus_shift":
            return numeric.make_diag_unitary_plus_shift(spec.thetas, spec.k, spec.m)
        if spec.constructor == "block_shift":
            return numeric.make_block_shift(spec.n)
        if spec.constructor == "odd_orbit":
            return numeric.make_odd_orbit_operator(spec.n)
        return numeric.make_orbit_shift(spec.m, spec.n)

    rows = [[parse_complex(entry) for entry in row] for row in spec]
    if not rows or any(len(row) != len(rows[0]) for row in rows):
        raise ValueError("matrix rows must be nonempty and of equal length")
    if len(rows) != len(rows[0]):
        raise ValueError(f"matrix must be square, got {len(rows)} x {len(rows[0])}")
    return np.array(rows, dtype=complex)


def _generator_line(text: str, position: int) -> Optional[int]:
    # line of the position-th [[generators]] header
    seen = -1
    for number, line in enumerate(text.splitlines(), start=1):
        if _HEADER_RE.match(line):
            seen += 1
            if seen == position:
                return number
    return None


def _key_line(text: str, key: str) -> Optional[int]:
    pattern = re.compile(rf"^\s*(\[{re.escape(key)}\]|\"?{re.escape(key)}\"?\s*=)")
    for number, line in enumerate(text.splitlines(), start=1):
        if pattern.match(line):
            return number
    return None


def _validation_error(text: str, error: ValidationError) -> FamilyFileError:
    first = error.errors()[0]
    loc = first.get("loc", ())
    line = None
    if len(loc) >= 2 and loc[0] == "generators" and isinstance(loc[1], int):
        line = _generator_line(text, loc[1])
    elif loc:
        line = _key_line(text, str(loc[0]))
    where = ".".join(str(part) for part in loc)
    message = first.get("msg", str(error))
    return FamilyFileError(f"{where}: {message}" if where else message, line=line)


def _expand(entry: GeneratorEntry) -> Tuple[List[GeneratorSpec], StarIndex]:
    # Wold pieces of one declared generator and its declared index
    declared = StarIndex.of(*entry.index) if entry.index is not None else None
    dim = ExtNat.of(entry.dim) if entry.dim is not None else INF

    if entry.kind == "mixed":
        shift = ExtNat.of(entry.shift)
        pieces = [GeneratorSpec(f"{entry.id}.u", GeneratorKind.UNITARY,
                                spectrum=entry.spectrum, unitary_dim=dim)]
        if shift.is_inf:
            pieces.append(GeneratorSpec(f"{entry.id}.s", GeneratorKind.INFINITE_SHIFT))
        else:
            pieces.append(GeneratorSpec(f"{entry.id}.s", GeneratorKind.FINITE_SHIFT,
                                        defect=shift.value))
        if declared is None:
            declared = StarIndex(dim, ExtNat(0), shift, ExtNat(0))
        return pieces, declared

    kind = GeneratorKind(entry.kind)
    spec = GeneratorSpec(entry.id, kind, spectrum=entry.spectrum, defect=entry.defect,
                         base=entry.base, unitary_dim=dim, declared_index=declared)
    return [spec], spec.index


def family_from_model(model: FamilyFile, source: str = "<memory>", text: str = "") -> Family:
    generators: List[GeneratorSpec] = []
    declared: Dict[str, StarIndex] = {}
    matrices: Dict[str, np.ndarray] = {}

    for position, entry in enumerate(model.generators):
        try:
            pieces, index = _expand(entry)
            if entry.matrix is not None:
                matrices[entry.id] = build_matrix(entry.matrix)
        except (ValueError, ArithmeticError, MatrixError) as e:
            raise FamilyFileError(f"generator '{entry.id}': {e}",
                                  line=_generator_line(text, position)) from e
        generators.extend(pieces)
        declared[entry.id] = index

    chains = [g.id for g in generators if g.kind == GeneratorKind.FINITE_SHIFT]
    try:
        pi = AdmissibilityTable.from_mapping(model.pi, model.pi_zero, chains)
    except ValueError as e:
        raise FamilyFileError(f"pi table: {e}", line=_key_line(text, "pi")) from e

    shapes = {m.shape for m in matrices.values()}
    if len(shapes) > 1:
        raise FamilyFileError(f"generator matrices differ in shape: {sorted(shapes)}")

    logger.info(f"Loaded family from {source}: {len(model.generators)} generator(s), "
                f"{len(generators)} Wold piece(s), {len(matrices)} matrix(es)")
    return Family(
        source=source,
        model=model,
        entries=list(model.generators),
        generators=generators,
        declared_index=declared,
        matrices=matrices,
        pi=pi,
        infinity={k: set(v) for k, v in model.infinity.items()},
        truncated={k: set(v) for k, v in model.truncated.items()},
    )


def parse_family(text: str, source: str = "<memory>") -> Family:
    """
    Parse family-file text.

    Raises:
        FamilyFileError: malformed TOML or invalid content, with the
            offending line when it can be located
    """
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as e:
        match = _TOML_LINE_RE.search(str(e))
        logger.error(f"{source}: invalid TOML: {e}")
        raise FamilyFileError(f"invalid TOML: {e}", line=int(match.group(1)) if match else None) from e

    try:
        model = FamilyFile.model_validate(raw)
    except ValidationError as e:
        err = _validation_error(text, e)
        logger.error(f"{source}: {err}")
        raise err from e

    return family_from_model(model, source, text)


def load_family(path) -> Family:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise FamilyFileError(f"cannot read {path}: {e.strerror}") from e
    return parse_family(text, str(path))
