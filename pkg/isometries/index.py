"""
Extended naturals, *-isomorphic indices and single-generator classification
"""

import logging
import sys
from dataclasses import dataclass
from functools import total_ordering
from typing import Optional, Union

from .expr import AlgebraExpr, ContinuousFunctions, DirectSum, MatrixAlg, Toeplitz, unit_tensor

logger = logging.getLogger(__name__)

SpectrumTag = str


@total_ordering
@dataclass(frozen=True)
class ExtNat:
    """
    Element of {0, 1, 2, ...} together with INF.

    `value` is None for INF.
    """
    value: Optional[int]

    def __post_init__(self):
        if self.value is None:
            return
        if isinstance(self.value, bool) or not isinstance(self.value, int):
            raise TypeError(f"ExtNat value must be an int or None, got {self.value!r}")
        if self.value < 0:
            raise ValueError(f"ExtNat value must be non-negative, got {self.value}")
        if self.value > sys.maxsize:
            raise ValueError(f"ExtNat value {self.value} exceeds the platform word size")

    @property
    def is_inf(self) -> bool:
        return self.value is None

    @property
    def is_finite(self) -> bool:
        return self.value is not None

    @classmethod
    def of(cls, raw: Union["ExtNat", int, str, None]) -> "ExtNat":
        """Accept an ExtNat, a non-negative int, or one of "inf"/"∞"/None"""
        if isinstance(raw, ExtNat):
            return raw
        if raw is None:
            return INF
        if isinstance(raw, str):
            text = raw.strip().lower()
            if text in ("inf", "infinity", "∞"):
                return INF
            return cls(int(text))
        return cls(raw)

    def __lt__(self, other: "ExtNat") -> bool:
        if not isinstance(other, ExtNat):
            return NotImplemented
        if self.is_inf:
            return False
        if other.is_inf:
            return True
        return self.value < other.value

    def __bool__(self) -> bool:
        return self.is_inf or self.value != 0

    def __str__(self) -> str:
        return "inf" if self.is_inf else str(self.value)

    def to_json(self) -> Union[int, str]:
        return "inf" if self.is_inf else self.value


INF = ExtNat(None)
ZERO = ExtNat(0)


def extnat_absdiff(a: ExtNat, b: ExtNat) -> ExtNat:
    """|a - b| with INF - INF = 0 and INF - n = INF"""
    if a.is_inf and b.is_inf:
        return ZERO
    if a.is_inf or b.is_inf:
        return INF
    return ExtNat(abs(a.value - b.value))


@dataclass(frozen=True)
class StarIndex:
    """
    The quadruple (dim H_u, dim ker a, dim ker s*, dim ker a* - dim ker s*)
    """
    eps0: ExtNat
    eps_plus: ExtNat
    eps_minus: ExtNat
    eps_minus_minus: ExtNat

    @classmethod
    def of(cls, eps0, eps_plus, eps_minus, eps_minus_minus) -> "StarIndex":
        return cls(ExtNat.of(eps0), ExtNat.of(eps_plus),
                   ExtNat.of(eps_minus), ExtNat.of(eps_minus_minus))

    def entries(self):
        return (self.eps0, self.eps_plus, self.eps_minus, self.eps_minus_minus)

    @property
    def is_pure_unitary(self) -> bool:
        return not self.eps_minus

    @property
    def is_pure_shift(self) -> bool:
        return not self.eps0 and bool(self.eps_minus)

    def to_json(self):
        return [entry.to_json() for entry in self.entries()]

    def __str__(self) -> str:
        return "(" + ", ".join(str(entry) for entry in self.entries()) + ")"


def index_subtract(i1: StarIndex, i2: StarIndex) -> StarIndex:
    return StarIndex(*(extnat_absdiff(a, b) for a, b in zip(i1.entries(), i2.entries())))


def star_equivalent(i1: StarIndex, i2: StarIndex, spectra_equal: bool) -> bool:
    """
    Two single generators generate *-isomorphic C*-algebras when their
    unitary parts share a spectrum and the index difference has the form
    (0, k1, k2, 0) with k1, k2 finite.

    A generator with a shift part is never matched with one without
    (eps_minus zero on one side only), and neither is a zero unitary
    part with a nonzero one.
    """
    if not spectra_equal:
        return False
    diff = index_subtract(i1, i2)
    if diff.eps0 or diff.eps_minus_minus:
        return False
    if diff.eps_plus.is_inf or diff.eps_minus.is_inf:
        return False
    return bool(i1.eps_minus) == bool(i2.eps_minus)


def power_index(index: StarIndex, n: int) -> StarIndex:
    """Index of x^n for a pure shift x: the co-rank eps_minus scales by n"""
    if n < 1:
        raise ValueError(f"power must be positive, got {n}")
    eps_minus = INF if index.eps_minus.is_inf else ExtNat(index.eps_minus.value * n)
    return StarIndex(index.eps0, index.eps_plus, eps_minus, index.eps_minus_minus)


def classify_single(index: StarIndex, spectrum_tag: Optional[SpectrumTag],
                    space: str = "H") -> AlgebraExpr:
    """
    C*-algebra generated by one partial isometry with the given index.

    Args:
        index: *-isomorphic index of the generator
        spectrum_tag: spectrum of the unitary part (ignored without one)
        space: tag of the Hilbert space the blocks act on

    Returns:
        C1 ⊗ C(spec) for a pure unitary, Toeplitz for a finite co-rank
        shift, C1 ⊗ M2 for an infinite co-rank shift, and the direct sum
        of the unitary block and the shift block otherwise
    """
    tag = spectrum_tag or "T"
    unitary_block = unit_tensor(space, ContinuousFunctions(tag))
    if not index.eps_minus:
        return unitary_block

    if index.eps_minus.is_inf:
        shift_block = unit_tensor(space, MatrixAlg(2))
    else:
        shift_block = Toeplitz(space)

    if not index.eps0:
        return shift_block
    logger.debug(f"Mixed index {index}: unitary part and shift part split into a direct sum")
    return DirectSum((unitary_block, shift_block))
