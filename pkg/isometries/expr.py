"""
Expression tree for the C*-algebras produced by the classifiers
"""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Tuple, Union


class Closure(str, Enum):
    ALGEBRAIC = "algebraic"
    TOPOLOGICAL = "topological"


@dataclass(frozen=True)
class ScalarUnit:
    """The scalar multiples of the identity on a named space"""
    space: str = "H"


@dataclass(frozen=True)
class ContinuousFunctions:
    """C(spec(u)) for a unitary whose spectrum is the given tag"""
    spectrum: str


@dataclass(frozen=True)
class MatrixAlg:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"matrix size must be positive, got {self.n}")


@dataclass(frozen=True)
class Toeplitz:
    space: str = "H"


@dataclass(frozen=True)
class Tensor:
    left: "AlgebraExpr"
    right: "AlgebraExpr"


@dataclass(frozen=True)
class DirectSum:
    items: Tuple["AlgebraExpr", ...]

    def __post_init__(self):
        if not self.items:
            raise ValueError("direct sum needs at least one summand")


@dataclass(frozen=True)
class FreeProduct:
    items: Tuple["AlgebraExpr", ...]
    closure: Closure = Closure.TOPOLOGICAL

    def __post_init__(self):
        if not self.items:
            raise ValueError("free product needs at least one factor")


AlgebraExpr = Union[ScalarUnit, ContinuousFunctions, MatrixAlg, Toeplitz,
                    Tensor, DirectSum, FreeProduct]


def unit_tensor(space: str, expr: AlgebraExpr) -> Tensor:
    return Tensor(ScalarUnit(space), expr)


def direct_sum(*items: AlgebraExpr) -> DirectSum:
    return DirectSum(tuple(items))


def free_product(*items: AlgebraExpr, closure: Closure = Closure.TOPOLOGICAL) -> FreeProduct:
    return FreeProduct(tuple(items), closure)


def to_text(expr: AlgebraExpr) -> str:
    """
    Canonical s-expression form, also used as the sort key for
    commutative operands
    """
    if isinstance(expr, ScalarUnit):
        return f"(ScalarUnit {expr.space})"
    if isinstance(expr, ContinuousFunctions):
        return f"(ContinuousFunctions {expr.spectrum})"
    if isinstance(expr, MatrixAlg):
        return f"(MatrixAlg {expr.n})"
    if isinstance(expr, Toeplitz):
        return f"(Toeplitz {expr.space})"
    if isinstance(expr, Tensor):
        return f"(Tensor {to_text(expr.left)} {to_text(expr.right)})"
    if isinstance(expr, DirectSum):
        return "(DirectSum " + " ".join(to_text(item) for item in expr.items) + ")"
    if isinstance(expr, FreeProduct):
        return (f"(FreeProduct:{expr.closure.value} "
                + " ".join(to_text(item) for item in expr.items) + ")")
    raise TypeError(f"not an algebra expression: {expr!r}")


def to_dict(expr: AlgebraExpr) -> Dict[str, Any]:
    """JSON form used in reports"""
    if isinstance(expr, ScalarUnit):
        return {"type": "ScalarUnit", "space": expr.space}
    if isinstance(expr, ContinuousFunctions):
        return {"type": "ContinuousFunctions", "spectrum": expr.spectrum}
    if isinstance(expr, MatrixAlg):
        return {"type": "MatrixAlg", "n": expr.n}
    if isinstance(expr, Toeplitz):
        return {"type": "Toeplitz", "space": expr.space}
    if isinstance(expr, Tensor):
        return {"type": "Tensor", "left": to_dict(expr.left), "right": to_dict(expr.right)}
    if isinstance(expr, DirectSum):
        return {"type": "DirectSum", "items": [to_dict(item) for item in expr.items]}
    if isinstance(expr, FreeProduct):
        return {
            "type": "FreeProduct",
            "closure": expr.closure.value,
            "items": [to_dict(item) for item in expr.items],
        }
    raise TypeError(f"not an algebra expression: {expr!r}")


def _carries_unit(expr: AlgebraExpr) -> bool:
    # Blocks that already come with their own scalar unit absorb an outer one
    if isinstance(expr, Toeplitz):
        return True
    if isinstance(expr, Tensor):
        return isinstance(expr.left, ScalarUnit)
    if isinstance(expr, DirectSum):
        return all(_carries_unit(item) for item in expr.items)
    return False


def normalize(expr: AlgebraExpr) -> AlgebraExpr:
    """
    Bring an expression to normal form: nested sums and free products
    (of the same closure) are flattened, single operands collapse,
    commutative operands are sorted by their canonical text, and an
    outer scalar unit over a block that carries its own unit is absorbed.

    Normalization is idempotent.
    """
    if isinstance(expr, Tensor):
        left = normalize(expr.left)
        right = normalize(expr.right)
        if isinstance(left, ScalarUnit) and _carries_unit(right):
            return right
        return Tensor(left, right)

    if isinstance(expr, DirectSum):
        flat = []
        for item in (normalize(item) for item in expr.items):
            if isinstance(item, DirectSum):
                flat.extend(item.items)
            else:
                flat.append(item)
        if len(flat) == 1:
            return flat[0]
        return DirectSum(tuple(sorted(flat, key=to_text)))

    if isinstance(expr, FreeProduct):
        flat = []
        for item in (normalize(item) for item in expr.items):
            if isinstance(item, FreeProduct) and item.closure == expr.closure:
                flat.extend(item.items)
            else:
                flat.append(item)
        if len(flat) == 1:
            return flat[0]
        return FreeProduct(tuple(sorted(flat, key=to_text)), expr.closure)

    return expr


def structurally_equal(a: AlgebraExpr, b: AlgebraExpr) -> bool:
    return normalize(a) == normalize(b)
