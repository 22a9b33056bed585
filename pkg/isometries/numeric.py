"""
Matrix oracle: finite truncations of partial isometries, Wold splits,
numerical indices, the admissibility map and the Cayley transform
"""

import itertools
import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.linalg import block_diag, null_space, orth, solve, svd, svdvals

from config import settings
from exceptions import MatrixError

from .graph import AdmissibilityTable, SignedGen
from .index import StarIndex

logger = logging.getLogger(__name__)

DEFECT_POWER_CHECKS = 20
DEFECT_RESIDUAL_TOL = 1e-12


def _tol(tol: Optional[float]) -> float:
    return settings.IDENTITY_TOL if tol is None else tol


def _square(a: np.ndarray, what: str = "matrix") -> np.ndarray:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise MatrixError(f"{what} must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise MatrixError(f"{what} has non-finite entries")
    return a


def _norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(a, 2)) if a.size else 0.0


def rank(a: np.ndarray, tol: Optional[float] = None) -> int:
    """
    Numerical rank with threshold tol times the largest singular value.
    A matrix whose norm is at most tol has rank 0.
    """
    s = svdvals(np.asarray(a, dtype=complex)) if np.asarray(a).size else np.array([])
    tol = _tol(tol)
    if s.size == 0 or s[0] <= tol:
        return 0
    borderline = np.sum((s > tol * s[0] * 1e-2) & (s <= tol * s[0] * 1e2))
    if borderline:
        logger.warning(f"{borderline} singular value(s) within two decades of the rank threshold")
    return int(np.sum(s > tol * s[0]))


def projector(basis: np.ndarray) -> np.ndarray:
    return basis @ basis.conj().T


# Constructors

def make_truncated_shift(k: int, n: int) -> np.ndarray:
    """e_i -> e_{i+k} for i < n - k, the rest to 0"""
    if k < 1 or k >= n:
        raise MatrixError(f"shift needs 1 <= k < n, got k={k}, n={n}")
    a = np.zeros((n, n), dtype=complex)
    for i in range(n - k):
        a[i + k, i] = 1.0
    return a


def make_diag_unitary(thetas: Sequence[float]) -> np.ndarray:
    if len(thetas) == 0:
        raise MatrixError("diagonal unitary needs at least one angle")
    return np.diag(np.exp(1j * np.asarray(thetas, dtype=float)))


def make_diag_unitary_plus_shift(thetas: Sequence[float], k: int, m: int) -> np.ndarray:
    """diag(e^{i theta}) on the first block, a k-step truncated shift on an m-dimensional block"""
    return block_diag(make_diag_unitary(thetas), make_truncated_shift(k, m)).astype(complex)


def make_block_shift(n: int) -> np.ndarray:
    """[[0, 0], [1, 0]] tensored with the n x n identity"""
    if n < 1:
        raise MatrixError(f"block shift needs n >= 1, got {n}")
    return np.kron(np.array([[0, 0], [1, 0]], dtype=complex), np.eye(n, dtype=complex))


def make_odd_orbit_operator(n: int) -> np.ndarray:
    """xi_k -> xi_{2k+1} on C^n, dropping basis vectors that leave the truncation"""
    if n < 2:
        raise MatrixError(f"odd orbit operator needs n >= 2, got {n}")
    a = np.zeros((n, n), dtype=complex)
    for k in range(n):
        if 2 * k + 1 < n:
            a[2 * k + 1, k] = 1.0
    return a


def make_orbit_shift(m: int, n: int) -> np.ndarray:
    """The rank-one piece xi_m -> xi_{2m+1} of the odd orbit operator"""
    if 2 * m + 1 >= n:
        raise MatrixError(f"xi_{2 * m + 1} lies outside C^{n}")
    a = np.zeros((n, n), dtype=complex)
    a[2 * m + 1, m] = 1.0
    return a


# Identity checks

def is_projection(p: np.ndarray, tol: Optional[float] = None) -> bool:
    p = _square(p, "projection")
    tol = _tol(tol)
    return _norm(p @ p - p) <= tol and _norm(p - p.conj().T) <= tol


def is_partial_isometry(a: np.ndarray, tol: Optional[float] = None) -> bool:
    """a = aa*a, with a*a a projection"""
    a = _square(a)
    tol = _tol(tol)
    return _norm(a @ a.conj().T @ a - a) <= tol and is_projection(a.conj().T @ a, tol)


def is_unitary(u: np.ndarray, tol: Optional[float] = None) -> bool:
    u = _square(u)
    eye = np.eye(u.shape[0])
    tol = _tol(tol)
    return _norm(u.conj().T @ u - eye) <= tol and _norm(u @ u.conj().T - eye) <= tol


def is_hermitian(t: np.ndarray, tol: Optional[float] = None) -> bool:
    t = _square(t)
    return _norm(t - t.conj().T) <= _tol(tol)


def projection_leq(p: np.ndarray, q: np.ndarray, tol: Optional[float] = None) -> bool:
    """p <= q, i.e. range(p) inside range(q)"""
    tol = _tol(tol)
    if not is_projection(p, tol) or not is_projection(q, tol):
        raise MatrixError("projection_leq needs two projections")
    if p.shape != q.shape:
        raise MatrixError(f"dimension mismatch {p.shape} vs {q.shape}")
    return _norm(q @ p - p) <= tol


class PiCase(str, Enum):
    """Relative position of x*x and yy* when pi(x, y) is computed"""
    INIT_LEQ_FIN = "init_leq_fin"
    FIN_LEQ_INIT = "fin_leq_init"
    OVERLAP = "overlap"
    ZERO = "zero"


@dataclass
class PiResult:
    nonzero: bool
    product: np.ndarray
    case: PiCase


def pi_numeric(x: np.ndarray, y: np.ndarray, tol: Optional[float] = None) -> PiResult:
    """pi(x, y) = (x*x)(yy*)"""
    x, y = _square(x), _square(y)
    if x.shape != y.shape:
        raise MatrixError(f"dimension mismatch {x.shape} vs {y.shape}")
    tol = _tol(tol)
    init = x.conj().T @ x
    fin = y @ y.conj().T
    product = init @ fin
    if _norm(product) <= tol:
        return PiResult(False, product, PiCase.ZERO)
    if _norm(fin @ init - init) <= tol:
        case = PiCase.INIT_LEQ_FIN
    elif _norm(init @ fin - fin) <= tol:
        case = PiCase.FIN_LEQ_INIT
    else:
        case = PiCase.OVERLAP
    return PiResult(True, product, case)


# Wold split

@dataclass
class WoldSplit:
    """
    a = u + s with u unitary on H_u and s the shift part; bases are
    orthonormal columns
    """
    unitary_part: np.ndarray
    shift_part: np.ndarray
    h_u: np.ndarray
    h_s: np.ndarray
    ker_a: np.ndarray
    ker_a_star: np.ndarray
    ker_s_star: np.ndarray

    def star_index(self) -> StarIndex:
        return StarIndex.of(
            self.h_u.shape[1],
            self.ker_a.shape[1],
            self.ker_s_star.shape[1],
            self.ker_a_star.shape[1] - self.ker_s_star.shape[1],
        )

    def residuals(self, a: np.ndarray) -> Dict[str, float]:
        u, s = self.unitary_part, self.shift_part
        p_u = projector(self.h_u)
        return {
            "a_minus_u_plus_s": _norm(a - (u + s)),
            "u_star_u_minus_p_u": _norm(u.conj().T @ u - p_u),
            "u_u_star_minus_p_u": _norm(u @ u.conj().T - p_u),
            "h_u_dot_h_s": _norm(self.h_u.conj().T @ self.h_s) if self.h_u.size and self.h_s.size else 0.0,
        }


def _stable_range(a: np.ndarray, tol: float) -> np.ndarray:
    # range(a^m) once its rank stops dropping
    n = a.shape[0]
    power = a.copy()
    current = rank(power, tol)
    for _ in range(n + 1):
        nxt = power @ a
        nxt_rank = rank(nxt, tol)
        if nxt_rank == current:
            return orth(power, rcond=tol) if current else np.zeros((n, 0), dtype=complex)
        power, current = nxt, nxt_rank
    raise MatrixError("range of the powers did not stabilize")


def subspace_intersection(x: np.ndarray, y: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """
    Orthonormal basis of span(x) ∩ span(y): the directions whose principal
    angle between the two subspaces is zero up to tol
    """
    tol = _tol(tol)
    n = x.shape[0]
    empty = np.zeros((n, 0), dtype=complex)
    if x.shape[1] == 0 or y.shape[1] == 0:
        return empty
    qx, qy = orth(x, rcond=tol), orth(y, rcond=tol)
    if qx.shape[1] == 0 or qy.shape[1] == 0:
        return empty
    left, cosines, _ = svd(qx.conj().T @ qy, full_matrices=False)
    k = int(np.sum(cosines > 1.0 - tol))
    return qx @ left[:, :k]


def wold_split(a: np.ndarray, tol: Optional[float] = None) -> WoldSplit:
    """
    Wold decomposition of a finite partial isometry.

    H_u is where the ranges of a^m and a*^m stabilize simultaneously; u is
    a restricted to H_u and s = a - u. The shift part's defect space ker s*
    is taken inside span(H_s, range s).

    Raises:
        MatrixError: a is not a partial isometry, or the split fails its
            own invariants
    """
    a = _square(a)
    tol = _tol(tol)
    if not is_partial_isometry(a, tol):
        logger.error("wold_split called on a matrix that is not a partial isometry")
        raise MatrixError("not a partial isometry")
    n = a.shape[0]
    empty = np.zeros((n, 0), dtype=complex)

    forward = _stable_range(a, tol)
    backward = _stable_range(a.conj().T, tol)
    h_u = subspace_intersection(forward, backward, tol)
    p_u = projector(h_u) if h_u.shape[1] else np.zeros((n, n), dtype=complex)

    u = a @ p_u
    s = a - u
    h_s = orth(s.conj().T, rcond=tol) if rank(s, tol) else empty
    range_s = orth(s, rcond=tol) if rank(s, tol) else empty

    if h_s.shape[1]:
        shift_space = orth(np.hstack([h_s, range_s]), rcond=tol)
        ker_s_star = null_space(np.vstack([s.conj().T, np.eye(n) - projector(shift_space)]), rcond=tol)
    else:
        ker_s_star = empty

    split = WoldSplit(
        unitary_part=u,
        shift_part=s,
        h_u=h_u,
        h_s=h_s,
        ker_a=null_space(a, rcond=tol),
        ker_a_star=null_space(a.conj().T, rcond=tol),
        ker_s_star=ker_s_star,
    )
    scale = max(1.0, float(n))
    bad = {k: v for k, v in split.residuals(a).items() if v > tol * scale}
    if bad:
        logger.error(f"Wold split failed its invariants: {bad}")
        raise MatrixError(f"Wold split invariants violated: {sorted(bad)}")
    return split


def star_index_numeric(a: np.ndarray, tol: Optional[float] = None) -> StarIndex:
    """
    (dim H_u, dim ker a, dim ker s*, dim ker a* - dim ker s*) of a finite
    truncation; all entries finite
    """
    a = _square(a)
    if _norm(a) == 0.0:
        n = a.shape[0]
        logger.warning(f"star index of the zero matrix is degenerate, reporting (0, {n}, 0, {n})")
        return StarIndex.of(0, n, 0, n)
    return wold_split(a, tol).star_index()


def subspace_meet_join(hx: np.ndarray, hy: np.ndarray, admissible: bool,
                       tol: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """
    Meet and join of two subspaces under the admissibility flag: the
    intersection and the span when admissible, otherwise {0} and the
    external direct sum.
    """
    tol = _tol(tol)
    hx = np.asarray(hx, dtype=complex)
    hy = np.asarray(hy, dtype=complex)
    if not admissible:
        n = hx.shape[0] + hy.shape[0]
        return np.zeros((n, 0), dtype=complex), block_diag(hx, hy).astype(complex)
    if hx.shape[0] != hy.shape[0]:
        raise MatrixError(f"subspaces live in different spaces: {hx.shape[0]} vs {hy.shape[0]}")
    meet = subspace_intersection(hx, hy, tol)
    both = np.hstack([hx, hy])
    join = orth(both, rcond=tol) if rank(both, tol) else np.zeros((hx.shape[0], 0), dtype=complex)
    return meet, join


def admissibility_table(matrices: Mapping[str, np.ndarray], tol: Optional[float] = None,
                        chains: Iterable[str] = (), depth: int = 1) -> AdmissibilityTable:
    """
    The pi table of concrete generators: every ordered pair of distinct
    names and both adjoint signs, plus powers up to `depth` for the names
    in `chains`. Vanishing pairs are recorded as explicit zeros.
    """
    tol = _tol(tol)
    chains = frozenset(chains)
    signed: Dict[SignedGen, np.ndarray] = {}
    for name, matrix in matrices.items():
        matrix = _square(matrix, name)
        powers = range(1, depth + 1) if name in chains else (1,)
        for p in powers:
            m = np.linalg.matrix_power(matrix, p)
            signed[SignedGen(name, p)] = m
            signed[SignedGen(name, p, adjoint=True)] = m.conj().T

    nonzero, zero = set(), set()
    for (a, ma), (b, mb) in itertools.product(signed.items(), repeat=2):
        if a.name == b.name:
            continue
        (nonzero if pi_numeric(ma, mb, tol).nonzero else zero).add((a, b))
    return AdmissibilityTable(frozenset(nonzero), frozenset(zero), chains)


def group_action_space(matrices: Iterable[np.ndarray], tol: Optional[float] = None) -> np.ndarray:
    """Orthonormal basis of the join of every generator's initial and final space"""
    tol = _tol(tol)
    columns: List[np.ndarray] = []
    for matrix in matrices:
        matrix = _square(matrix)
        columns += [matrix, matrix.conj().T]
    if not columns:
        raise MatrixError("group action space of an empty family")
    stacked = np.hstack(columns)
    if not rank(stacked, tol):
        return np.zeros((stacked.shape[0], 0), dtype=complex)
    return orth(stacked, rcond=tol)


# Cayley transform

def cayley_of_selfadjoint(t: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """U = (T + i)(T - i)^-1"""
    t = _square(t)
    if not is_hermitian(t, tol):
        raise MatrixError("Cayley transform needs a Hermitian matrix")
    eye = np.eye(t.shape[0], dtype=complex)
    return solve(t - 1j * eye, t + 1j * eye)


def inverse_cayley(u: np.ndarray, tol: Optional[float] = None) -> np.ndarray:
    """T = i(U + 1)(U - 1)^-1"""
    u = _square(u)
    tol = _tol(tol)
    if not is_unitary(u, tol):
        raise MatrixError("inverse Cayley transform needs a unitary matrix")
    eye = np.eye(u.shape[0], dtype=complex)
    if svdvals(u - eye).min() <= tol:
        logger.error("1 lies in the spectrum of U; no self-adjoint preimage")
        raise MatrixError("1 is in the spectrum of U")
    return 1j * solve(u - eye, u + eye)


@dataclass
class DefectData:
    """W = |e_minus><e_plus| with alpha = <e_plus, e_minus>"""
    e_plus: np.ndarray
    e_minus: np.ndarray
    alpha: complex
    w: np.ndarray
    max_power_residual: float
    max_norm_residual: float = 0.0


def rank1_defect(e_plus: np.ndarray, e_minus: np.ndarray,
                 tol: Optional[float] = None) -> DefectData:
    """
    Rank-one defect operator between unit vectors, checked against
    W^(n+1) = alpha^n W and ||W^n|| = |alpha|^(n-1) for n up to
    DEFECT_POWER_CHECKS
    """
    tol = _tol(tol)
    e_plus = np.asarray(e_plus, dtype=complex).ravel()
    e_minus = np.asarray(e_minus, dtype=complex).ravel()
    if e_plus.shape != e_minus.shape:
        raise MatrixError(f"defect vectors differ in dimension: {e_plus.size} vs {e_minus.size}")
    for name, v in (("e_plus", e_plus), ("e_minus", e_minus)):
        if abs(np.linalg.norm(v) - 1.0) > tol:
            raise MatrixError(f"{name} is not a unit vector")

    w = np.outer(e_minus, e_plus.conj())
    alpha = complex(np.vdot(e_plus, e_minus))
    worst = 0.0
    worst_norm = abs(_norm(w) - 1.0)
    power = w.copy()
    for n in range(1, DEFECT_POWER_CHECKS + 1):
        power = power @ w
        worst = max(worst, _norm(power - alpha ** n * w))
        worst_norm = max(worst_norm, abs(_norm(power) - abs(alpha) ** n))
    if worst > DEFECT_RESIDUAL_TOL:
        raise MatrixError(f"W^(n+1) = alpha^n W fails with residual {worst:.3e}")
    if worst_norm > DEFECT_RESIDUAL_TOL:
        raise MatrixError(f"||W^n|| = |alpha|^(n-1) fails with residual {worst_norm:.3e}")
    return DefectData(e_plus, e_minus, alpha, w, worst, worst_norm)


def unitary_extension(v: np.ndarray, defect: Optional[DefectData],
                      tol: Optional[float] = None) -> np.ndarray:
    """
    U = V + W for a partial isometry V with one-dimensional kernels
    spanned by e_plus (ker V) and e_minus (ker V*)

    Raises:
        MatrixError: the defect vectors do not span the kernels, or the
            result is not unitary
    """
    v = _square(v)
    tol = _tol(tol)
    if defect is None:
        if not is_unitary(v, tol):
            raise MatrixError("V has defects but no defect data was given")
        return v
    if defect.w.shape != v.shape:
        raise MatrixError(f"defect lives in dimension {defect.w.shape[0]}, V in {v.shape[0]}")
    if not is_partial_isometry(v, tol):
        raise MatrixError("V is not a partial isometry")

    ker_v = null_space(v, rcond=tol)
    ker_v_star = null_space(v.conj().T, rcond=tol)
    if ker_v.shape[1] != 1 or ker_v_star.shape[1] != 1:
        raise MatrixError(f"defect indices are ({ker_v.shape[1]}, {ker_v_star.shape[1]}), need (1, 1)")
    if _norm(v @ defect.e_plus) > tol:
        raise MatrixError("e_plus does not span ker V")
    if _norm(v.conj().T @ defect.e_minus) > tol:
        raise MatrixError("e_minus does not span ker V*")

    u = v + defect.w
    if not is_unitary(u, tol):
        raise MatrixError("V + W is not unitary")
    return u
