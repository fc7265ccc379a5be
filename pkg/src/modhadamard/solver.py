"""Decide existence of MH(n, m) for m in {2, 3, 4, 5, 6}, with certificates.

Every answer is a Certificate: either a recipe tree that materializes to a
verified matrix, or a named obstruction whose hypotheses can be re-checked.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Union

from .constructions import direct_sum_hadamard, two_design_hadamard
from .designs import (
    EXACT_PARAMS,
    DesignParams,
    ModularDesign,
    catalog,
    complement,
    core_params,
    core_to_design,
    euler_phi,
    example_block_26,
)
from .matrix import (
    Builder,
    SignMatrix,
    canonical,
    combined_modulus,
    is_modular_hadamard,
    kronecker,
    normalize,
)

SUPPORTED_MODULI = (2, 3, 4, 5, 6)

__all__ = [
    "Base", "Catalog", "Certificate", "Complement", "CoreOf", "DirectSum",
    "ExampleBlock26", "Kron", "Obstruction", "ObstructionKind", "RecipeError",
    "TwoDesign", "counting_obstruction", "decide", "euler_phi", "explain",
    "materialize", "parity_obstruction", "quadratic_obstruction",
]


class RecipeError(RuntimeError):
    """A recipe node failed to materialize or verify; names the failing subtree."""

    def __init__(self, node, m: int, message: str):
        super().__init__(f"{node.label()} at modulus {m}: {message}")
        self.node = node
        self.m = m


# -- obstructions ----------------------------------------------------------

class ObstructionKind(str, enum.Enum):
    QUADRATIC_NON_RESIDUE = "quadratic_non_residue"
    COUNTING_BOUND = "counting_bound"
    EVEN_MODULUS_PARITY = "even_modulus_parity"
    DOUBLY_EVEN_PARITY = "doubly_even_parity"


def squares_mod(m: int) -> tuple[int, ...]:
    return tuple(sorted({(x * x) % m for x in range(m)}))


@dataclass(frozen=True)
class Obstruction:
    kind: ObstructionKind
    n: int
    m: int
    r: int | None = None
    bound: int | None = None
    residue: int | None = None
    squares: tuple[int, ...] | None = None

    def holds(self) -> bool:
        """Re-check the hypotheses of the obstruction from n and m alone."""
        n, m = self.n, self.m
        if self.kind is ObstructionKind.QUADRATIC_NON_RESIDUE:
            return (n % 2 == 1 and math.gcd(n, m) == 1 and self.residue == n % m
                    and all((x * x - n) % m for x in range(m)))
        if self.kind is ObstructionKind.COUNTING_BOUND:
            if m < 3 or m % 2 == 0 or n < 3 or n % m == 0:
                return False
            ok_r = self.r is not None and 1 <= self.r <= m - 1
            ok_r = ok_r and (self.r - pow(2, euler_phi(m) - 2, m) * n) % m == 0
            return ok_r and self.bound == 4 * self.r and n < self.bound
        if self.kind is ObstructionKind.EVEN_MODULUS_PARITY:
            return n >= 3 and m % 2 == 0 and n % 2 == 1
        if self.kind is ObstructionKind.DOUBLY_EVEN_PARITY:
            return n >= 3 and m % 4 == 0 and n % 4 != 0
        return False

    def to_json(self) -> dict:
        out = {"kind": self.kind.value}
        for key in ("r", "bound", "residue"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        if self.squares is not None:
            out["squares"] = list(self.squares)
        return out

    def describe(self) -> str:
        n, m = self.n, self.m
        if self.kind is ObstructionKind.QUADRATIC_NON_RESIDUE:
            return (f"quadratic residue obstruction: n = {n} is odd and coprime to {m}, "
                    f"but {n} = {self.residue} (mod {m}) is not among the squares "
                    f"{{{', '.join(map(str, self.squares))}}}")
        if self.kind is ObstructionKind.COUNTING_BOUND:
            return (f"counting bound: r = 2^(phi({m})-2) * {n} mod {m} = {self.r}, "
                    f"so n >= 4r = {self.bound} is required, but n = {n}")
        if self.kind is ObstructionKind.EVEN_MODULUS_PARITY:
            return f"parity: modulus {m} is even, so n must be even, but n = {n}"
        return f"parity: modulus {m} is divisible by 4, so 4 | n is required, but n = {n}"


def quadratic_obstruction(n: int, m: int) -> Obstruction | None:
    if m < 2:
        raise ValueError("modulus must be >= 2")
    sq = squares_mod(m)
    if n % 2 == 1 and math.gcd(n, m) == 1 and n % m not in sq:
        return Obstruction(ObstructionKind.QUADRATIC_NON_RESIDUE, n, m, residue=n % m, squares=sq)
    return None


def counting_obstruction(n: int, m: int) -> Obstruction | None:
    if m < 3 or m % 2 == 0:
        raise ValueError(f"the counting bound needs an odd modulus >= 3, got {m}")
    if n < 3 or n % m == 0:
        return None
    r = pow(2, euler_phi(m) - 2, m) * n % m
    if n < 4 * r:
        return Obstruction(ObstructionKind.COUNTING_BOUND, n, m, r=r, bound=4 * r)
    return None


def parity_obstruction(n: int, m: int) -> Obstruction | None:
    if m < 2:
        raise ValueError("modulus must be >= 2")
    if n < 3:
        return None
    if m % 2 == 0 and n % 2 == 1:
        return Obstruction(ObstructionKind.EVEN_MODULUS_PARITY, n, m, residue=n % 2)
    if m % 4 == 0 and n % 4 != 0:
        return Obstruction(ObstructionKind.DOUBLY_EVEN_PARITY, n, m, residue=n % 4)
    return None


# -- recipes ---------------------------------------------------------------

_CATALOG_ORDERS = {"R13": 13, "D26": 26, "D21": 21, "D16": 16, "B11": 11, "B11C": 11}


@dataclass(frozen=True)
class Catalog:
    name: str

    def __post_init__(self):
        if self.name not in _CATALOG_ORDERS:
            raise ValueError(f"unknown catalog design {self.name!r}")

    @property
    def v(self) -> int:
        return _CATALOG_ORDERS[self.name]

    def params(self, m: int) -> DesignParams:
        if self.name in EXACT_PARAMS:
            return DesignParams(*EXACT_PARAMS[self.name], m)
        return DesignParams(26, 1, 2, 5)

    def label(self) -> str:
        if self.name in EXACT_PARAMS:
            v, k, lam = EXACT_PARAMS[self.name]
            return f"catalog {self.name} ({v},{k},{lam})"
        return f"catalog {self.name} (26,1,2;5)"

    def depth(self) -> int:
        return 0


@dataclass(frozen=True)
class ExampleBlock26:
    v = 26

    def params(self, m: int) -> DesignParams:
        return DesignParams(26, 1, 2, 5)

    def label(self) -> str:
        return "block design [[R13, J-I], [J-I, J-R13^T]] (26,1,2;5)"

    def depth(self) -> int:
        return 0


@dataclass(frozen=True)
class CoreOf:
    recipe: Recipe

    @property
    def v(self) -> int:
        return self.recipe.order - 1

    def params(self, m: int) -> DesignParams:
        return core_params(self.recipe.order, m)

    def label(self) -> str:
        return f"design (C+J)/2 from the core C of normalized MH({self.recipe.order},m)"

    def depth(self) -> int:
        return self.recipe.depth()


@dataclass(frozen=True)
class Complement:
    source: DesignSource

    @property
    def v(self) -> int:
        return self.source.v

    def params(self, m: int) -> DesignParams:
        p = self.source.params(m)
        return DesignParams(p.v, p.v - p.k, p.v - 2 * p.k + p.lam, m)

    def label(self) -> str:
        return "complement J-D"

    def depth(self) -> int:
        return self.source.depth()


DesignSource = Union[Catalog, ExampleBlock26, CoreOf, Complement]


@dataclass(frozen=True)
class Base:
    builder: Builder
    n: int

    def __post_init__(self):
        builder = Builder(self.builder)
        object.__setattr__(self, "builder", builder)
        fixed = builder.fixed_order
        if fixed is not None and self.n != fixed:
            raise ValueError(f"{builder.value} has order {fixed}, got {self.n}")

    @property
    def order(self) -> int:
        return self.n

    def depth(self) -> int:
        return 0

    def label(self) -> str:
        names = {"AllOnes": "J", "JMinusTwoI": "J-2I"}
        name = names.get(self.builder.value, self.builder.value)
        return f"{name} of order {self.n}" if self.builder.value in names else name


@dataclass(frozen=True)
class Kron:
    left: Recipe
    right: Recipe
    left_modulus: int
    right_modulus: int

    @property
    def order(self) -> int:
        return self.left.order * self.right.order

    @property
    def modulus(self) -> int:
        return combined_modulus(self.left_modulus, self.left.order, self.right_modulus, self.right.order)

    def depth(self) -> int:
        return 1 + max(self.left.depth(), self.right.depth())

    def label(self) -> str:
        return f"Kronecker product, order {self.order}"


@dataclass(frozen=True)
class TwoDesign:
    design: DesignSource

    @property
    def order(self) -> int:
        return self.design.v

    def depth(self) -> int:
        return 1 + self.design.depth()

    def label(self) -> str:
        return f"2D−J lift, order {self.order}"


@dataclass(frozen=True)
class DirectSum:
    first: DesignSource
    second: DesignSource

    @property
    def order(self) -> int:
        return self.first.v + self.second.v

    def depth(self) -> int:
        return 1 + max(self.first.depth(), self.second.depth())

    def label(self) -> str:
        return f"direct sum 2(D1⊕D2)−J, order {self.order}"


Recipe = Union[Base, Kron, TwoDesign, DirectSum]


# -- certificates ----------------------------------------------------------

@dataclass(frozen=True)
class Certificate:
    n: int
    m: int
    recipe: Recipe | None = None
    obstruction: Obstruction | None = None

    def __post_init__(self):
        if (self.recipe is None) == (self.obstruction is None):
            raise ValueError("a certificate carries exactly one of recipe / obstruction")

    @property
    def exists(self) -> bool:
        return self.recipe is not None

    def to_json(self) -> dict:
        out = {"n": self.n, "m": self.m, "outcome": "exists" if self.exists else "not_exists"}
        if self.exists:
            out["recipe"] = recipe_to_json(self.recipe)
        else:
            out["obstruction"] = self.obstruction.to_json()
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, doc: dict) -> Certificate:
        n, m = int(doc["n"]), int(doc["m"])
        if doc["outcome"] == "exists":
            return cls(n, m, recipe=recipe_from_json(doc["recipe"]))
        if doc["outcome"] != "not_exists":
            raise ValueError(f"unknown outcome {doc['outcome']!r}")
        ob = doc["obstruction"]
        sq = ob.get("squares")
        return cls(n, m, obstruction=Obstruction(
            ObstructionKind(ob["kind"]), n, m, r=ob.get("r"), bound=ob.get("bound"),
            residue=ob.get("residue"), squares=tuple(sq) if sq is not None else None,
        ))


def recipe_to_json(node) -> dict:
    if isinstance(node, Base):
        return {"kind": "base", "builder": node.builder.value, "n": node.n}
    if isinstance(node, Kron):
        return {"kind": "kron", "left": recipe_to_json(node.left), "right": recipe_to_json(node.right),
                "left_modulus": node.left_modulus, "right_modulus": node.right_modulus}
    if isinstance(node, TwoDesign):
        return {"kind": "two_design", "design": recipe_to_json(node.design)}
    if isinstance(node, DirectSum):
        return {"kind": "direct_sum", "first": recipe_to_json(node.first),
                "second": recipe_to_json(node.second)}
    if isinstance(node, Catalog):
        return {"kind": "catalog", "name": node.name}
    if isinstance(node, ExampleBlock26):
        return {"kind": "example_block_26"}
    if isinstance(node, CoreOf):
        return {"kind": "core_of", "recipe": recipe_to_json(node.recipe)}
    if isinstance(node, Complement):
        return {"kind": "complement", "design": recipe_to_json(node.source)}
    raise TypeError(f"not a recipe node: {node!r}")


def recipe_from_json(doc: dict):
    kind = doc["kind"]
    if kind == "base":
        return Base(Builder(doc["builder"]), int(doc["n"]))
    if kind == "kron":
        return Kron(recipe_from_json(doc["left"]), recipe_from_json(doc["right"]),
                    int(doc["left_modulus"]), int(doc["right_modulus"]))
    if kind == "two_design":
        return TwoDesign(recipe_from_json(doc["design"]))
    if kind == "direct_sum":
        return DirectSum(recipe_from_json(doc["first"]), recipe_from_json(doc["second"]))
    if kind == "catalog":
        return Catalog(doc["name"])
    if kind == "example_block_26":
        return ExampleBlock26()
    if kind == "core_of":
        return CoreOf(recipe_from_json(doc["recipe"]))
    if kind == "complement":
        return Complement(recipe_from_json(doc["design"]))
    raise ValueError(f"unknown recipe kind {kind!r}")


# -- recipe tables ---------------------------------------------------------

F1 = Base(Builder.F1, 1)
F2 = Base(Builder.F2, 2)


def _J(n):
    return Base(Builder.ALL_ONES, n)


def _JM2I(n):
    return Base(Builder.J_MINUS_TWO_I, n)


def _double(child: Recipe, child_modulus: int) -> Kron:
    return Kron(F2, child, 0, child_modulus)


def _table_2(n):
    if n == 1:
        return F1
    if n % 2 == 0:
        return _J(n)
    return parity_obstruction(n, 2)


def _table_3(n):
    if n == 1:
        return F1
    if n % 3 == 0:
        return _J(n)
    if n % 3 == 1:
        return _JM2I(n)
    if n % 6 == 2:
        return _double(_recipe(n // 2, 3), 3)
    return quadratic_obstruction(n, 3)


def _table_4(n):
    if n == 1:
        return F1
    if n == 2:
        return F2
    if n % 4 == 0:
        return _J(n)
    return parity_obstruction(n, 4)


def _table_6(n):
    if n == 1:
        return F1
    if n % 2 == 1:
        return parity_obstruction(n, 6)
    if n % 6 == 0:
        return _J(n)
    if n % 6 == 4:
        return _JM2I(n)
    return _double(_recipe(n // 2, 3), 3)


def _table_5(n):
    if n == 1:
        return F1
    if n in (6, 11):
        return counting_obstruction(n, 5)
    if n % 10 in (3, 7):
        return quadratic_obstruction(n, 5)
    if n % 5 == 0:
        return _J(n)
    if n % 5 == 4:
        return _JM2I(n)
    if n % 10 == 8:
        return _double(_JM2I(n // 2), 5)
    if n % 20 == 16:
        return _double(_double(_JM2I(n // 4), 5), 10)
    if n == 21:
        return TwoDesign(Catalog("D21"))
    if n == 26:
        return TwoDesign(Catalog("D26"))
    if n % 20 == 11:
        return DirectSum(Catalog("D16"), CoreOf(_recipe(n - 15, 5)))
    if n % 20 in (1, 6):
        return DirectSum(Catalog("D26"), CoreOf(_recipe(n - 25, 5)))
    if n == 12:
        return Base(Builder.H12, 12)
    if n == 22:
        return DirectSum(Catalog("B11"), Catalog("B11C"))
    if n % 10 == 2:
        return _double(_recipe(n // 2, 5), 5)
    raise AssertionError(f"no m=5 table row for n={n}")


_TABLES = {2: _table_2, 3: _table_3, 4: _table_4, 5: _table_5, 6: _table_6}


@lru_cache(maxsize=4096)
def _decide(n: int, m: int):
    out = _TABLES[m](n)
    if out is None:
        raise AssertionError(f"table for m={m} selected an obstruction that does not apply at n={n}")
    return out


def _recipe(n: int, m: int) -> Recipe:
    out = _decide(n, m)
    if isinstance(out, Obstruction):
        raise AssertionError(f"recipe table needs MH({n},{m}), which is obstructed")
    return out


def decide(n: int, m: int) -> Certificate:
    if m not in SUPPORTED_MODULI:
        raise ValueError(f"unsupported modulus {m}; supported: {SUPPORTED_MODULI}")
    if n < 1:
        raise ValueError(f"order must be >= 1, got {n}")
    out = _decide(n, m)
    if isinstance(out, Obstruction):
        return Certificate(n, m, obstruction=out)
    return Certificate(n, m, recipe=out)


# -- materialization -------------------------------------------------------

def _design(src, m: int) -> ModularDesign:
    if isinstance(src, Catalog):
        return catalog(src.name, m)
    if isinstance(src, ExampleBlock26):
        return example_block_26(catalog("R13", m))
    if isinstance(src, Complement):
        return complement(_design(src.source, m))
    if isinstance(src, CoreOf):
        H = normalize(materialize(src.recipe, m))
        return core_to_design(H, m)
    raise TypeError(f"not a design source: {src!r}")


def _implies(big: int, m: int) -> bool:
    """MH(n, big) implies MH(n, m) exactly when m divides big (0 is divisible by all)."""
    return big == 0 if m == 0 else big % m == 0


def _build(node, m: int) -> SignMatrix:
    if isinstance(node, Base):
        return canonical(node.builder, node.n)
    if isinstance(node, Kron):
        if not _implies(node.modulus, m):
            raise RecipeError(node, m, f"combined modulus {node.modulus} is not a multiple of {m}")
        return kronecker(materialize(node.left, node.left_modulus),
                         materialize(node.right, node.right_modulus))
    if isinstance(node, TwoDesign):
        return two_design_hadamard(_design(node.design, m))
    if isinstance(node, DirectSum):
        return direct_sum_hadamard(_design(node.first, m), _design(node.second, m))
    raise TypeError(f"not a recipe node: {node!r}")


@lru_cache(maxsize=48)
def materialize(recipe: Recipe, m: int) -> SignMatrix:
    """Build the matrix bottom-up; every node is verified against its modulus."""
    try:
        H = _build(recipe, m)
    except RecipeError:
        raise
    except Exception as exc:
        raise RecipeError(recipe, m, f"{type(exc).__name__}: {exc}") from exc
    if H.order != recipe.order:
        raise RecipeError(recipe, m, f"built order {H.order}, expected {recipe.order}")
    if not is_modular_hadamard(H, m):
        raise RecipeError(recipe, m, "result is not a modular Hadamard matrix")
    return H


def construct(n: int, m: int) -> tuple[Certificate, SignMatrix | None]:
    cert = decide(n, m)
    return cert, materialize(cert.recipe, m) if cert.exists else None


def check_certificate(cert: Certificate) -> bool:
    """Re-check a certificate: obstructions by their hypotheses, recipes by materializing."""
    if not cert.exists:
        ob = cert.obstruction
        return ob.n == cert.n and ob.m == cert.m and ob.holds()
    if cert.recipe.order != cert.n:
        return False
    try:
        materialize(cert.recipe, cert.m)
    except RecipeError:
        return False
    return True


# -- explanation -----------------------------------------------------------

def _explain_source(src, m: int, depth: int, lines: list[str], tag: str):
    pad = "  " * depth
    if isinstance(src, Catalog):
        lines.append(f"{pad}{tag}: {src.label()}")
    elif isinstance(src, ExampleBlock26):
        lines.append(f"{pad}{tag}: {src.label()}")
    elif isinstance(src, Complement):
        lines.append(f"{pad}{tag}: complement J-D, {src.params(m)}")
        _explain_source(src.source, m, depth + 1, lines, "D")
    elif isinstance(src, CoreOf):
        lines.append(f"{pad}{tag}: core design (C+J)/2 of normalized MH({src.recipe.order},{m}), "
                     f"{src.params(m)}")
        _explain_recipe(src.recipe, m, depth + 1, lines)


def _explain_recipe(node, m: int, depth: int, lines: list[str]):
    pad = "  " * depth
    if isinstance(node, Base):
        lines.append(f"{pad}base {node.label()} -> MH({node.n},{m})")
    elif isinstance(node, Kron):
        lines.append(f"{pad}Kronecker product -> MH({node.order},{node.modulus}), "
                     f"factors MH({node.left.order},{node.left_modulus}) and "
                     f"MH({node.right.order},{node.right_modulus})")
        _explain_recipe(node.left, node.left_modulus, depth + 1, lines)
        _explain_recipe(node.right, node.right_modulus, depth + 1, lines)
    elif isinstance(node, TwoDesign):
        lines.append(f"{pad}2D−J lift -> MH({node.order},{m})")
        _explain_source(node.design, m, depth + 1, lines, "D")
    elif isinstance(node, DirectSum):
        lines.append(f"{pad}direct sum 2(D1⊕D2)−J -> MH({node.order},{m})")
        _explain_source(node.first, m, depth + 1, lines, "D1")
        _explain_source(node.second, m, depth + 1, lines, "D2")


def explain(cert: Certificate) -> str:
    if not cert.exists:
        return (f"MH({cert.n},{cert.m}) does not exist\n"
                f"  {cert.obstruction.describe()}\n")
    lines = [f"MH({cert.n},{cert.m}) exists"]
    _explain_recipe(cert.recipe, cert.m, 1, lines)
    return "\n".join(lines) + "\n"
