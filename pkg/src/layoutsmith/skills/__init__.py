"""Scoring-skill DSL: parsing, typing, evaluation, and the versioned library."""
from .evaluate import ArgMismatch, eval_skill
from .expr import (
    AXIS, BOOL, EULER, LAYOUT, REAL, VEC3,
    AxisLit, BinOp, Bool, Call, Expr, If, Let, ListTy, Num, SkillDef,
    SkillParam, Ty, UnOp, Var, print_expr, print_skill,
)
from .library import (
    DSL_BUILTIN_NAMES, EmptyCandidateSet, IncompatibleParams, NATIVE_BUILTIN_NAMES,
    Skill, SkillLibrary, UnresolvedSkill, ast_similarity, builtin_source,
    default_library, merge_candidates, tree_edit_distance,
)
from .parser import ParseError, parse_expr, parse_skill
from .typecheck import TypeCheckError, check_skill

__all__ = [
    "AXIS", "BOOL", "EULER", "LAYOUT", "REAL", "VEC3",
    "ArgMismatch", "AxisLit", "BinOp", "Bool", "Call",
    "DSL_BUILTIN_NAMES", "EmptyCandidateSet", "Expr", "If",
    "IncompatibleParams", "Let", "ListTy", "NATIVE_BUILTIN_NAMES", "Num",
    "ParseError", "Skill", "SkillDef", "SkillLibrary", "SkillParam", "Ty",
    "TypeCheckError", "UnOp", "UnresolvedSkill", "Var", "ast_similarity",
    "builtin_source", "check_skill", "default_library", "eval_skill",
    "merge_candidates", "parse_expr", "parse_skill", "print_expr",
    "print_skill", "tree_edit_distance",
]
