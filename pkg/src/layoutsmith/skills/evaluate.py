"""Skill evaluation.

Evaluation is total for finite inputs: division or modulo by zero yields
0.0, nth clamps its index (an empty list yields the zero value of the
element type), and the final score is clamped into [0, 1] with non-finite
results mapped to 0.0. Arithmetic goes through the same helpers the
native scorers use, so a faithful DSL transcription reproduces the native
result bit for bit.
"""
from __future__ import annotations

import math
from typing import Mapping, Sequence

from .. import geometry
from ..geometry import Aabb, Euler, Layout, Vec3
from ..relations import ArityError, Axis, coerce_axis, coerce_vec3
from .expr import (
    AXIS, BOOL, EULER, LAYOUT, REAL, VEC3,
    AxisLit, BinOp, Bool, Call, Expr, If, Let, ListTy, Num, SkillDef,
    TypeLike, UnOp, Var,
)
from .typecheck import member_param_count


class ArgMismatch(ValueError):
    """A skill argument is missing or cannot take the declared type."""


_ZERO_LAYOUT = Layout(geometry.ZERO, Aabb(geometry.ZERO, geometry.ZERO))


def zero_value(ty: TypeLike):
    if isinstance(ty, ListTy):
        return []
    return {
        REAL: 0.0, BOOL: False, VEC3: geometry.ZERO,
        EULER: Euler(), AXIS: Axis.X, LAYOUT: _ZERO_LAYOUT,
    }[ty]


def _coerce_arg(name: str, value: object, ty: TypeLike):
    try:
        if ty == REAL:
            return float(value)  # type: ignore[arg-type]
        if ty == BOOL:
            return bool(value)
        if ty == AXIS:
            return coerce_axis(value)
        if ty == VEC3:
            return coerce_vec3(value)
        if ty == EULER:
            if isinstance(value, Euler):
                return value
            if isinstance(value, (list, tuple)) and len(value) == 3:
                return Euler(float(value[0]), float(value[1]),
                             float(value[2]))
        if ty == ListTy(REAL):
            return [float(v) for v in value]  # type: ignore[union-attr]
    except (TypeError, ValueError) as exc:
        raise ArgMismatch(f"arg '{name}' does not fit {ty}: {exc}") from exc
    raise ArgMismatch(f"arg '{name}' cannot be supplied as {ty}")


def _div(a: float, b: float) -> float:
    if b == 0.0:
        return 0.0
    return a / b


def _mod(a: float, b: float) -> float:
    if b == 0.0:
        return 0.0
    return a % b


def _eval(e: Expr, env: dict[str, object]):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Bool):
        return e.value
    if isinstance(e, AxisLit):
        return e.axis
    if isinstance(e, Var):
        return env[e.name]
    if isinstance(e, Let):
        return _eval(e.body, {**env, e.name: _eval(e.value, env)})
    if isinstance(e, If):
        if _eval(e.cond, env):
            return _eval(e.then, env)
        return _eval(e.orelse, env)
    if isinstance(e, BinOp):
        if e.op == "and":
            return bool(_eval(e.left, env)) and bool(_eval(e.right, env))
        if e.op == "or":
            return bool(_eval(e.left, env)) or bool(_eval(e.right, env))
        a = _eval(e.left, env)
        b = _eval(e.right, env)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            return _div(a, b)
        if e.op == "==":
            return a == b
        if e.op == "!=":
            return a != b
        if e.op == "<":
            return a < b
        if e.op == "<=":
            return a <= b
        if e.op == ">":
            return a > b
        return a >= b
    if isinstance(e, UnOp):
        v = _eval(e.operand, env)
        if e.op == "-":
            return -v
        return not v
    return _eval_call(e, env)


def _eval_call(e: Call, env: dict[str, object]):
    fn = e.fn
    if fn == "map":
        lst = _eval(e.args[0], env)
        return [_eval(e.args[1], {**env, "it": v}) for v in lst]
    if fn == "pairwise":
        lst = _eval(e.args[0], env)
        return [_eval(e.args[1], {**env, "a": lst[i], "b": lst[i + 1]})
                for i in range(len(lst) - 1)]
    if fn == "sort_by":
        lst = _eval(e.args[0], env)
        return sorted(lst, key=lambda v: _eval(e.args[1], {**env, "it": v}))
    if fn == "fold":
        lst = _eval(e.args[0], env)
        acc = _eval(e.args[1], env)
        for v in lst:
            acc = _eval(e.args[2], {**env, "acc": acc, "it": v})
        return acc

    args = [_eval(a, env) for a in e.args]
    if fn == "dist":
        return geometry.dist(args[0], args[1])
    if fn == "dot":
        return geometry.dot(args[0], args[1])
    if fn == "norm":
        return geometry.norm(args[0])
    if fn == "normalize":
        return geometry.normalize(args[0])
    if fn == "sub":
        return geometry.sub(args[0], args[1])
    if fn == "add":
        return geometry.add(args[0], args[1])
    if fn == "vec":
        return Vec3(args[0], args[1], args[2])
    if fn == "euler_vec":
        ee: Euler = args[0]
        return Vec3(ee.pitch, ee.yaw, ee.roll)
    if fn == "forward":
        return geometry.forward_vector(args[0])
    if fn == "clamp":
        return geometry.clamp(args[0], args[1], args[2])
    if fn == "abs":
        return abs(args[0])
    if fn == "cos":
        return math.cos(args[0])
    if fn == "sin":
        return math.sin(args[0])
    if fn == "atan2":
        return math.atan2(args[0], args[1])
    if fn == "mod":
        return _mod(args[0], args[1])
    if fn == "location":
        return args[0].location
    if fn == "bbox_min":
        return args[0].bbox.min
    if fn == "bbox_max":
        return args[0].bbox.max
    if fn == "orientation":
        return args[0].orientation
    if fn == "axis_of":
        axis: Axis = args[1]
        return axis.component(args[0])
    if fn == "volume":
        return geometry.volume(args[0].bbox)
    if fn == "length":
        return float(len(args[0]))
    if fn == "indices":
        return [float(i) for i in range(len(args[0]))]
    if fn == "nth":
        lst = args[0]
        if not lst:
            return zero_value(e.ty)
        idx = int(args[1])
        idx = min(max(idx, 0), len(lst) - 1)
        return lst[idx]
    if fn == "append":
        return list(args[0]) + [args[1]]
    if fn == "mean":
        return geometry.mean(args[0])
    if fn == "var":
        return geometry.pvariance(args[0])
    if fn == "median":
        return geometry.median(args[0])
    if fn == "min":
        return min(args[0]) if args[0] else 0.0
    if fn == "max":
        return max(args[0]) if args[0] else 0.0
    raise AssertionError(f"unreachable builtin '{fn}'")


def bind_params(d: SkillDef, members: Sequence[Layout],
                args: Mapping[str, object]) -> dict[str, object]:
    """Bind member layouts positionally, then named args with defaults.

    Arg keys that match no parameter are ignored; per-kind key validation
    belongs to relation-node validation, not evaluation.
    """
    env: dict[str, object] = {}
    member_n = member_param_count(d)
    if member_n < 0:
        env[d.params[0].name] = list(members)
        rest = d.params[1:]
    else:
        if len(members) != member_n:
            raise ArityError(
                f"skill '{d.name}' binds {member_n} member layouts, "
                f"got {len(members)}")
        for p, m in zip(d.params[:member_n], members):
            env[p.name] = m
        rest = d.params[member_n:]
    for p in rest:
        if p.name in args:
            env[p.name] = _coerce_arg(p.name, args[p.name], p.ty)
        elif p.default is not None:
            env[p.name] = p.default
        else:
            raise ArgMismatch(f"skill '{d.name}' requires arg '{p.name}'")
    return env


def eval_skill(d: SkillDef, members: Sequence[Layout],
               args: Mapping[str, object] | None = None) -> float:
    """Evaluate a typechecked skill; result is clamped into [0, 1]."""
    env = bind_params(d, members, args or {})
    result = float(_eval(d.body, env))
    if not math.isfinite(result):
        return 0.0
    return geometry.clamp(result, 0.0, 1.0)
