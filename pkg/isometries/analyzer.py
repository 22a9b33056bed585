"""
Family analysis service behind the CLI and the HTTP routes
"""

import hashlib
import json
import logging
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from config import settings
from exceptions import AdmissibilityError, FamilyFileError
from schemas import INDEX_ENTRIES, Report

from . import numeric
from .blocks import block_structure, wold_partition
from .expr import to_dict, to_text
from .family import Family
from .graph import (GeneratorKind, SignedGen, absorbed_generators, g_graph,
                    pi_validate, to_dot)
from .groupoid import (ShadowedGraph, Zero, counts_by_length, enumerate_elements, inverse,
                       sort_key)
from .index import StarIndex, classify_single

logger = logging.getLogger(__name__)


class FamilyAnalyzer:
    """
    Runs the classify, groupoid and verify commands on one family.

    Explicit arguments win over the family file's own depth, max_len and
    tol, which win over settings.
    """

    def __init__(self, family: Family, depth: Optional[int] = None,
                 max_len: Optional[int] = None, tol: Optional[float] = None):
        self.family = family
        self.depth = depth or family.depth or settings.DEFAULT_DEPTH
        self.max_len = max_len or family.max_len or settings.DEFAULT_MAX_LEN
        self.tol = tol or family.tol or settings.IDENTITY_TOL

    def _validate_pi(self) -> None:
        violations = pi_validate(self.family.generators, self.family.pi)
        if violations:
            logger.error(f"{self.family.source}: pi table rejected")
            raise AdmissibilityError(violations)

    def _digest(self, command: str, **flags) -> str:
        return self.family.digest(command=command, **flags)

    def classify(self) -> Report:
        """
        Indices and single-generator algebras of every declared generator,
        the G-graph summary and the block structure of the whole family
        """
        self._validate_pi()
        family = self.family

        generators = []
        for entry in family.entries:
            index = family.declared_index[entry.id]
            single = classify_single(index, entry.spectrum, space=entry.id)
            generators.append({
                "id": entry.id,
                "kind": entry.kind,
                "index": index.to_json(),
                "algebra": to_text(single),
            })

        part = wold_partition(family.generators)
        structure = block_structure(family.generators, family.pi, self.depth)
        graph = g_graph(family.generators, family.pi, self.depth)

        results = {
            "depth": self.depth,
            "generators": generators,
            "wold_family": {
                "unitaries": [g.id for g in part.unitaries],
                "infinite_shifts": [g.id for g in part.infinite_shifts],
                "finite_shifts": [g.id for g in part.finite_shifts],
            },
            "pi": family.pi.to_json(),
            "absorbed": absorbed_generators(family.generators, family.pi, self.depth),
            "g_graph": graph.summary(),
            "block_structure": {"text": to_text(structure), "json": to_dict(structure)},
        }
        logger.info(f"{family.source}: {results['block_structure']['text']}")
        return Report(command="classify", inputs_digest=self._digest("classify", depth=self.depth),
                      results=results)

    def groupoid(self, emit_dot: bool = False) -> Tuple[Report, Optional[str]]:
        """
        Enumerate the graph groupoid of the G-graph up to max_len.

        Returns:
            The report and, when emit_dot is set, the DOT source of the G-graph
        """
        self._validate_pi()
        graph = g_graph(self.family.generators, self.family.pi, self.depth)
        shadowed = ShadowedGraph(graph)
        elements = enumerate_elements(shadowed, self.max_len)

        closed = all(inverse(a) in elements for a in elements if not isinstance(a, Zero))
        results = {
            "depth": self.depth,
            "max_len": self.max_len,
            "g_graph": graph.summary(),
            "element_count": len(elements),
            "counts_by_length": {str(k): v for k, v in counts_by_length(elements).items()},
            "elements": [str(a) for a in sorted(elements, key=sort_key)],
            "closed_under_inverse": closed,
        }
        report = Report(
            command="groupoid",
            inputs_digest=self._digest("groupoid", depth=self.depth, max_len=self.max_len),
            results=results,
            status="ok" if closed else "mismatch",
        )
        return report, (to_dot(graph) if emit_dot else None)

    def verify(self) -> Report:
        """
        Check every symbolic prediction with a matrix against the matrix
        oracle: partial-isometry identities, Wold invariants, indices
        (after the infinity and truncation maps) and the pi table.
        """
        self._validate_pi()
        family = self.family
        if not family.matrices:
            raise FamilyFileError(f"{family.source}: no generator carries a matrix to verify")

        mismatches: List[str] = []
        residuals: Dict[str, float] = {}
        generators = []

        for entry_id, matrix in family.matrices.items():
            check = self._verify_generator(entry_id, matrix, residuals)
            mismatches += check.pop("mismatches")
            generators.append(check)

        pi_checks = self._verify_pi(mismatches)
        chain_checks = self._verify_chains(mismatches)

        results = {
            "tol": self.tol,
            "generators": generators,
            "pi": pi_checks,
            "chains": chain_checks,
            "mismatches": mismatches,
        }
        status = "mismatch" if mismatches else "ok"
        if mismatches:
            logger.warning(f"{family.source}: {len(mismatches)} mismatch(es)")
        return Report(command="verify", inputs_digest=self._digest("verify", tol=self.tol),
                      results=results, residuals=residuals, status=status)

    def _verify_generator(self, entry_id: str, matrix: np.ndarray,
                          residuals: Dict[str, float]) -> Dict[str, Any]:
        mismatches = []
        if not numeric.is_partial_isometry(matrix, self.tol):
            return {"id": entry_id, "partial_isometry": False,
                    "mismatches": [f"{entry_id}: not a partial isometry"]}

        split = numeric.wold_split(matrix, self.tol)
        for name, value in split.residuals(matrix).items():
            residuals[f"{entry_id}.{name}"] = value
        measured = split.star_index()
        declared = self.family.declared_index[entry_id]

        entries = compare_index(declared, measured,
                                self.family.infinity.get(entry_id, set()),
                                self.family.truncated.get(entry_id, set()))
        for name, outcome in entries.items():
            if outcome["status"] == "mismatch":
                mismatches.append(f"{entry_id}: {name} declared {outcome['declared']}, "
                                  f"measured {outcome['measured']}")
        return {
            "id": entry_id,
            "partial_isometry": True,
            "declared_index": declared.to_json(),
            "numeric_index": measured.to_json(),
            "entries": entries,
            "mismatches": mismatches,
        }

    def _symbolic_names(self) -> List[str]:
        return [e.id for e in self.family.entries
                if e.id in self.family.matrices and e.kind != "mixed"]

    def _verify_pi(self, mismatches: List[str]) -> List[Dict[str, Any]]:
        names = self._symbolic_names()
        measured = numeric.admissibility_table(
            {name: self.family.matrices[name] for name in names}, self.tol)
        checks = []
        for a_name in names:
            for b_name in names:
                if a_name == b_name:
                    continue
                for a_star in (False, True):
                    for b_star in (False, True):
                        a, b = SignedGen(a_name, adjoint=a_star), SignedGen(b_name, adjoint=b_star)
                        expected = self.family.pi.lookup(a, b)
                        found = (a, b) in measured.nonzero
                        checks.append({"pair": [str(a), str(b)], "symbolic": expected, "numeric": found})
                        if expected != found:
                            mismatches.append(f"pi({a}, {b}): symbolic {'nonzero' if expected else 'zero'}, "
                                              f"numeric {'nonzero' if found else 'zero'}")
        return checks

    def _verify_chains(self, mismatches: List[str]) -> List[Dict[str, Any]]:
        checks = []
        for g in self.family.generators:
            if g.kind != GeneratorKind.FINITE_SHIFT or g.id not in self.family.matrices:
                continue
            a = self.family.matrices[g.id]
            previous = None
            monotone = True
            for m in range(1, self.depth + 1):
                power = np.linalg.matrix_power(a, m)
                fin = power @ power.conj().T
                if previous is not None and not numeric.projection_leq(fin, previous, self.tol):
                    monotone = False
                previous = fin
            checks.append({"id": g.id, "depth": self.depth, "monotone": monotone})
            if not monotone:
                mismatches.append(f"{g.id}: final projections of powers are not decreasing")
        return checks


def compare_index(declared: StarIndex, measured: StarIndex,
                  infinity: set, truncated: set) -> Dict[str, Dict[str, Any]]:
    """
    Entry-by-entry comparison of a declared index with a measured one.
    Entries in `infinity` match a declared INF with any nonzero measurement;
    entries in `truncated` are truncation artefacts and are skipped.
    """
    out = {}
    for name, sym, num in zip(INDEX_ENTRIES, declared.entries(), measured.entries()):
        if name in truncated:
            status = "skipped"
        elif name in infinity:
            status = "ok" if sym.is_inf and bool(num) else "mismatch"
        else:
            status = "ok" if sym == num else "mismatch"
        out[name] = {"declared": sym.to_json(), "measured": num.to_json(), "status": status}
    return out


def _random_complex(rng: np.random.Generator, *shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def cayley_suite(dim: Optional[int] = None, seed: Optional[int] = None,
                 tol: Optional[float] = None, instances: Optional[int] = None) -> Report:
    """
    Cayley transform and rank-one defect checks on seeded random data:
    unitarity of the transform, the roundtrip, W^(n+1) = alpha^n W,
    ||W^n|| = |alpha|^(n-1) and the unitary extension of a truncated shift.
    Each random check runs on `instances` draws; the reported residual is
    the worst one.
    """
    dim = dim or settings.DEFAULT_CAYLEY_DIM
    seed = settings.DEFAULT_SEED if seed is None else seed
    instances = instances or settings.CAYLEY_INSTANCES
    roundtrip_tol = tol or settings.ROUNDTRIP_TOL
    # one stream per check
    hermitian_rng, defect_rng = (np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2))
    eye = np.eye(dim)

    residuals = {"cayley_unitarity": 0.0, "cayley_roundtrip": 0.0,
                 "defect_power_law": 0.0, "wn_norm_law": 0.0}
    alphas = []
    for _ in range(instances):
        x = _random_complex(hermitian_rng, dim, dim)
        t = (x + x.conj().T) / 2
        u = numeric.cayley_of_selfadjoint(t)
        t_back = numeric.inverse_cayley(u)
        residuals["cayley_unitarity"] = max(residuals["cayley_unitarity"],
                                            float(np.linalg.norm(u.conj().T @ u - eye, 2)))
        residuals["cayley_roundtrip"] = max(residuals["cayley_roundtrip"],
                                            float(np.linalg.norm(t_back - t, 2)))

    for _ in range(instances):
        e_plus, e_minus = _random_complex(defect_rng, dim), _random_complex(defect_rng, dim)
        defect = numeric.rank1_defect(e_plus / np.linalg.norm(e_plus), e_minus / np.linalg.norm(e_minus))
        residuals["defect_power_law"] = max(residuals["defect_power_law"], defect.max_power_residual)
        residuals["wn_norm_law"] = max(residuals["wn_norm_law"], defect.max_norm_residual)
        alphas.append(abs(defect.alpha))
    logger.info(f"Cayley suite: {instances} instance(s) of each check at dim {dim}, seed {seed}")

    u_zero = numeric.cayley_of_selfadjoint(np.zeros((dim, dim)))
    residuals["cayley_of_zero"] = float(np.linalg.norm(u_zero + eye, 2))
    residuals["inverse_cayley_of_minus_one"] = float(np.linalg.norm(numeric.inverse_cayley(-eye), 2))
    limits = {
        "cayley_unitarity": settings.IDENTITY_TOL,
        "cayley_roundtrip": roundtrip_tol,
        "cayley_of_zero": settings.IDENTITY_TOL,
        "inverse_cayley_of_minus_one": settings.IDENTITY_TOL,
        "defect_power_law": numeric.DEFECT_RESIDUAL_TOL,
        "wn_norm_law": numeric.DEFECT_RESIDUAL_TOL,
    }
    if dim >= 2:
        # V = truncated shift; e_plus spans ker V, e_minus spans ker V*
        shift = numeric.make_truncated_shift(1, dim)
        basis = np.eye(dim, dtype=complex)
        extension = numeric.unitary_extension(shift, numeric.rank1_defect(basis[dim - 1], basis[0]))
        cyclic = np.roll(np.eye(dim), 1, axis=0)
        residuals["extension_unitarity"] = float(np.linalg.norm(extension.conj().T @ extension - eye, 2))
        residuals["extension_is_cyclic_shift"] = float(np.linalg.norm(extension - cyclic, 2))
        limits["extension_unitarity"] = settings.IDENTITY_TOL
        limits["extension_is_cyclic_shift"] = settings.IDENTITY_TOL

    failed = [name for name, value in residuals.items() if value > limits[name]]
    results = {
        "dim": dim,
        "seed": seed,
        "instances": instances,
        "alpha_abs": {"min": min(alphas), "max": max(alphas)},
        "failed": failed,
    }
    return Report(
        command="cayley",
        inputs_digest=_flags_digest(command="cayley", dim=dim, seed=seed, tol=roundtrip_tol,
                                    instances=instances),
        results=results,
        residuals=residuals,
        status="mismatch" if failed else "ok",
    )


def _flags_digest(**flags) -> str:
    canonical = json.dumps(flags, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()
