"""Static typing for skill expressions.

Every node gets annotated with its type; the skill body must come out
real-valued. Combinators bind their element variables lexically: `it` in
map/sort_by, `a` and `b` in pairwise, `acc` and `it` in fold.
"""
from __future__ import annotations

from ..relations import Axis
from .expr import (
    AXIS, BOOL, EULER, LAYOUT, REAL, VEC3,
    AxisLit, BinOp, Bool, Call, Expr, If, Let, ListTy, Num, SkillDef,
    TypeLike, UnOp, Var, print_expr,
)


class TypeCheckError(ValueError):
    pass


# Fixed-signature builtins: name -> (arg types, result type).
FIXED_BUILTINS: dict[str, tuple[tuple[TypeLike, ...], TypeLike]] = {
    "dist": ((VEC3, VEC3), REAL),
    "dot": ((VEC3, VEC3), REAL),
    "norm": ((VEC3,), REAL),
    "normalize": ((VEC3,), VEC3),
    "sub": ((VEC3, VEC3), VEC3),
    "add": ((VEC3, VEC3), VEC3),
    "vec": ((REAL, REAL, REAL), VEC3),
    "euler_vec": ((EULER,), VEC3),
    "forward": ((EULER,), VEC3),
    "clamp": ((REAL, REAL, REAL), REAL),
    "abs": ((REAL,), REAL),
    "cos": ((REAL,), REAL),
    "sin": ((REAL,), REAL),
    "atan2": ((REAL, REAL), REAL),
    "mod": ((REAL, REAL), REAL),
    "location": ((LAYOUT,), VEC3),
    "bbox_min": ((LAYOUT,), VEC3),
    "bbox_max": ((LAYOUT,), VEC3),
    "orientation": ((LAYOUT,), EULER),
    "axis_of": ((VEC3, AXIS), REAL),
    "volume": ((LAYOUT,), REAL),
}

_REAL_LIST_REDUCERS = ("mean", "var", "median", "min", "max")
_COMBINATORS = ("map", "pairwise", "sort_by", "fold")
_LIST_UTILS = ("length", "nth", "append", "indices")

BUILTIN_NAMES = (tuple(FIXED_BUILTINS) + _REAL_LIST_REDUCERS
                 + _COMBINATORS + _LIST_UTILS)


def _where(e: Expr) -> str:
    if e.pos is not None:
        return f" at line {e.pos[0]}, column {e.pos[1]}"
    return ""


def _fail(e: Expr, message: str) -> TypeCheckError:
    return TypeCheckError(f"{message} in '{print_expr(e)}'{_where(e)}")


def _expect(e: Expr, arg: Expr, got: TypeLike, want: TypeLike,
            context: str) -> None:
    if got != want:
        raise _fail(e, f"{context} must be {want}, got {got}")


def _expect_list(e: Expr, got: TypeLike, context: str) -> ListTy:
    if not isinstance(got, ListTy):
        raise _fail(e, f"{context} must be a list, got {got}")
    return got


def infer(e: Expr, env: dict[str, TypeLike]) -> TypeLike:
    ty = _infer(e, env)
    e.ty = ty
    return ty


def _infer(e: Expr, env: dict[str, TypeLike]) -> TypeLike:
    if isinstance(e, Num):
        return REAL
    if isinstance(e, Bool):
        return BOOL
    if isinstance(e, AxisLit):
        return AXIS
    if isinstance(e, Var):
        if e.name not in env:
            raise _fail(e, f"unbound variable '{e.name}'")
        return env[e.name]
    if isinstance(e, Let):
        vt = infer(e.value, env)
        return infer(e.body, {**env, e.name: vt})
    if isinstance(e, If):
        _expect(e, e.cond, infer(e.cond, env), BOOL, "condition")
        tt = infer(e.then, env)
        et = infer(e.orelse, env)
        if tt != et:
            raise _fail(e, f"branches disagree: {tt} vs {et}")
        return tt
    if isinstance(e, BinOp):
        lt = infer(e.left, env)
        rt = infer(e.right, env)
        if e.op in ("+", "-", "*", "/"):
            _expect(e, e.left, lt, REAL, "left operand")
            _expect(e, e.right, rt, REAL, "right operand")
            return REAL
        if e.op in ("<", "<=", ">", ">="):
            _expect(e, e.left, lt, REAL, "left operand")
            _expect(e, e.right, rt, REAL, "right operand")
            return BOOL
        if e.op in ("==", "!="):
            if lt != rt:
                raise _fail(e, f"cannot compare {lt} with {rt}")
            if lt not in (REAL, BOOL, AXIS):
                raise _fail(e, f"equality is not defined on {lt}")
            return BOOL
        # and / or
        _expect(e, e.left, lt, BOOL, "left operand")
        _expect(e, e.right, rt, BOOL, "right operand")
        return BOOL
    if isinstance(e, UnOp):
        ot = infer(e.operand, env)
        if e.op == "-":
            _expect(e, e.operand, ot, REAL, "operand")
            return REAL
        _expect(e, e.operand, ot, BOOL, "operand")
        return BOOL
    return _infer_call(e, env)


def _arity(e: Call, n: int) -> None:
    if len(e.args) != n:
        raise _fail(e, f"'{e.fn}' takes {n} arguments, got {len(e.args)}")


def _infer_call(e: Call, env: dict[str, TypeLike]) -> TypeLike:
    if e.fn in FIXED_BUILTINS:
        want, result = FIXED_BUILTINS[e.fn]
        _arity(e, len(want))
        for arg, w in zip(e.args, want):
            _expect(e, arg, infer(arg, env), w, f"argument of '{e.fn}'")
        return result
    if e.fn in _REAL_LIST_REDUCERS:
        _arity(e, 1)
        lt = _expect_list(e, infer(e.args[0], env), f"argument of '{e.fn}'")
        if lt.elem != REAL:
            raise _fail(e, f"'{e.fn}' needs list<real>, got {lt}")
        return REAL
    if e.fn == "length":
        _arity(e, 1)
        _expect_list(e, infer(e.args[0], env), "argument of 'length'")
        return REAL
    if e.fn == "indices":
        _arity(e, 1)
        _expect_list(e, infer(e.args[0], env), "argument of 'indices'")
        return ListTy(REAL)
    if e.fn == "nth":
        _arity(e, 2)
        lt = _expect_list(e, infer(e.args[0], env), "first argument of 'nth'")
        _expect(e, e.args[1], infer(e.args[1], env), REAL, "index")
        return lt.elem
    if e.fn == "append":
        _arity(e, 2)
        lt = _expect_list(e, infer(e.args[0], env),
                          "first argument of 'append'")
        et = infer(e.args[1], env)
        if et != lt.elem:
            raise _fail(e, f"cannot append {et} to {lt}")
        return lt
    if e.fn == "map":
        _arity(e, 2)
        lt = _expect_list(e, infer(e.args[0], env), "first argument of 'map'")
        body_ty = infer(e.args[1], {**env, "it": lt.elem})
        return ListTy(body_ty)
    if e.fn == "pairwise":
        _arity(e, 2)
        lt = _expect_list(e, infer(e.args[0], env),
                          "first argument of 'pairwise'")
        body_ty = infer(e.args[1], {**env, "a": lt.elem, "b": lt.elem})
        return ListTy(body_ty)
    if e.fn == "sort_by":
        _arity(e, 2)
        lt = _expect_list(e, infer(e.args[0], env),
                          "first argument of 'sort_by'")
        key_ty = infer(e.args[1], {**env, "it": lt.elem})
        if key_ty != REAL:
            raise _fail(e, f"sort key must be real, got {key_ty}")
        return lt
    if e.fn == "fold":
        _arity(e, 3)
        lt = _expect_list(e, infer(e.args[0], env),
                          "first argument of 'fold'")
        acc_ty = infer(e.args[1], env)
        body_ty = infer(e.args[2], {**env, "acc": acc_ty, "it": lt.elem})
        if body_ty != acc_ty:
            raise _fail(e, f"fold body must keep type {acc_ty}, "
                           f"got {body_ty}")
        return acc_ty
    raise _fail(e, f"unknown function '{e.fn}'")


def _default_matches(ty: TypeLike, default: object) -> bool:
    if isinstance(default, bool):
        return ty == BOOL
    if isinstance(default, Axis):
        return ty == AXIS
    if isinstance(default, float):
        return ty == REAL
    return False


def member_param_count(d: SkillDef) -> int:
    """How many leading params bind member layouts.

    Returns -1 when the first param is list<layout> (all members bind to
    it); otherwise the length of the leading run of layout params.
    """
    if d.params and d.params[0].ty == ListTy(LAYOUT):
        return -1
    n = 0
    for p in d.params:
        if p.ty == LAYOUT:
            n += 1
        else:
            break
    return n


def check_skill(d: SkillDef) -> SkillDef:
    """Validate a parsed skill and annotate its body in place."""
    member_n = member_param_count(d)
    arg_params = d.params[1:] if member_n < 0 else d.params[member_n:]
    for p in arg_params:
        if p.ty == LAYOUT or p.ty == ListTy(LAYOUT):
            raise TypeCheckError(
                f"skill '{d.name}': layout parameter '{p.name}' must come "
                f"first (members bind positionally)")
    for p in d.params:
        if p.default is not None and not _default_matches(p.ty, p.default):
            raise TypeCheckError(
                f"skill '{d.name}': default for '{p.name}' does not match "
                f"declared type {p.ty}")
    env = {p.name: p.ty for p in d.params}
    body_ty = infer(d.body, env)
    if body_ty != REAL:
        raise TypeCheckError(
            f"skill '{d.name}' must score a real, got {body_ty}")
    return d
