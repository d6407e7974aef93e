"""Expression trees, types, and the canonical printer for scoring skills.

A skill is a single pure expression over its parameters. There is no
recursion and no general loop; list combinators (map, pairwise, sort_by,
fold) are the only iteration, so every evaluation terminates.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from ..relations import Axis


# ---- types ----

@dataclass(frozen=True)
class Ty:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class ListTy:
    elem: "TypeLike"

    def __str__(self) -> str:
        return f"list<{self.elem}>"


TypeLike = Union[Ty, ListTy]

REAL = Ty("real")
BOOL = Ty("bool")
VEC3 = Ty("vec3")
EULER = Ty("euler")
LAYOUT = Ty("layout")
AXIS = Ty("axis")

SCALAR_TYPES = {t.name: t for t in (REAL, BOOL, VEC3, EULER, LAYOUT, AXIS)}


# ---- expression nodes ----
# `ty` is filled in by the typechecker; `pos` is (line, col) from the parser.
# Neither participates in structural equality.

_ANNOT = dict(default=None, compare=False, repr=False)


@dataclass(eq=True)
class Num:
    value: float
    pos: tuple[int, int] | None = field(**_ANNOT)
    ty: TypeLike | None = field(**_ANNOT)


@dataclass(eq=True)
class Bool:
    value: bool
    pos: tuple[int, int] | None = field(**_ANNOT)
    ty: TypeLike | None = field(**_ANNOT)


@dataclass(eq=True)
class AxisLit:
    axis: Axis
    pos: tuple[int, int] | None = field(**_ANNOT)
    ty: TypeLike | None = field(**_ANNOT)


@dataclass(eq=True)
class Var:
    name: str
    pos: tuple[int, int] | None = field(**_ANNOT)
    ty: TypeLike | None = field(**_ANNOT)


@dataclass(eq=True)
class Let:
    name: str
    value: "Expr"
    body: "Expr"
    pos: tuple[int, int] | None = field(**_ANNOT)
    ty: TypeLike | None = field(**_ANNOT)


@dataclass(eq=True)
class If:
    cond: "Expr"
    then: "Expr"
    orelse: "Expr"
    pos: tuple[int, int] | None = field(**_ANNOT)
    ty: TypeLike | None = field(**_ANNOT)


@dataclass(eq=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"
    pos: tuple[int, int] | None = field(**_ANNOT)
    ty: TypeLike | None = field(**_ANNOT)


@dataclass(eq=True)
class UnOp:
    op: str  # "-" or "not"
    operand: "Expr"
    pos: tuple[int, int] | None = field(**_ANNOT)
    ty: TypeLike | None = field(**_ANNOT)


@dataclass(eq=True)
class Call:
    fn: str
    args: tuple["Expr", ...]
    pos: tuple[int, int] | None = field(**_ANNOT)
    ty: TypeLike | None = field(**_ANNOT)


Expr = Union[Num, Bool, AxisLit, Var, Let, If, BinOp, UnOp, Call]


@dataclass(frozen=True)
class SkillParam:
    name: str
    ty: TypeLike
    default: object | None = None  # float | bool | Axis; None means required


@dataclass(eq=True)
class SkillDef:
    name: str
    params: tuple[SkillParam, ...]
    body: Expr


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, (Num, Bool, AxisLit, Var)):
        return ()
    if isinstance(e, Let):
        return (e.value, e.body)
    if isinstance(e, If):
        return (e.cond, e.then, e.orelse)
    if isinstance(e, BinOp):
        return (e.left, e.right)
    if isinstance(e, UnOp):
        return (e.operand,)
    return e.args


def node_label(e: Expr) -> str:
    """Stable label used for tree comparison."""
    if isinstance(e, Num):
        return f"num:{e.value!r}"
    if isinstance(e, Bool):
        return f"bool:{e.value}"
    if isinstance(e, AxisLit):
        return f"axis:{e.axis.value}"
    if isinstance(e, Var):
        return f"var:{e.name}"
    if isinstance(e, Let):
        return f"let:{e.name}"
    if isinstance(e, If):
        return "if"
    if isinstance(e, BinOp):
        return f"bin:{e.op}"
    if isinstance(e, UnOp):
        return f"un:{e.op}"
    return f"call:{e.fn}"


def node_count(e: Expr) -> int:
    return 1 + sum(node_count(c) for c in children(e))


# ---- canonical printing ----
# Precedence levels; a child is parenthesized when its level is below what
# its context demands. let/if sit at level 0 and bind as far right as the
# surrounding keywords allow.

_BIN_LEVEL = {
    "or": 1, "and": 2,
    "==": 4, "!=": 4, "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6,
}


def _level(e: Expr) -> int:
    if isinstance(e, (Let, If)):
        return 0
    if isinstance(e, BinOp):
        return _BIN_LEVEL[e.op]
    if isinstance(e, UnOp):
        return 3 if e.op == "not" else 7
    return 8


def _print(e: Expr, minimum: int) -> str:
    text = _print_bare(e)
    if _level(e) < minimum:
        return f"({text})"
    return text


def _print_bare(e: Expr) -> str:
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Bool):
        return "true" if e.value else "false"
    if isinstance(e, AxisLit):
        return e.axis.value
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Let):
        return (f"let {e.name} = {_print(e.value, 0)} "
                f"in {_print(e.body, 0)}")
    if isinstance(e, If):
        return (f"if {_print(e.cond, 0)} then {_print(e.then, 0)} "
                f"else {_print(e.orelse, 0)}")
    if isinstance(e, BinOp):
        lv = _BIN_LEVEL[e.op]
        if lv == 4:  # comparisons do not chain
            return f"{_print(e.left, 5)} {e.op} {_print(e.right, 5)}"
        return f"{_print(e.left, lv)} {e.op} {_print(e.right, lv + 1)}"
    if isinstance(e, UnOp):
        if e.op == "not":
            return f"not {_print(e.operand, 3)}"
        return f"-{_print(e.operand, 7)}"
    args = ", ".join(_print(a, 0) for a in e.args)
    return f"{e.fn}({args})"


def print_expr(e: Expr) -> str:
    return _print(e, 0)


def _print_default(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, Axis):
        return value.value
    return repr(float(value))


def print_skill(d: SkillDef) -> str:
    """Canonical single-body-line form; parses back to an equal tree."""
    parts = []
    for p in d.params:
        piece = f"{p.name}: {p.ty}"
        if p.default is not None:
            piece += f" = {_print_default(p.default)}"
        parts.append(piece)
    header = f"skill {d.name}({', '.join(parts)}) -> score"
    return f"{header}\n  {print_expr(d.body)}\n"
