"""Constraint-driven 3D scene layout.

A scene is a bipartite graph of assets and spatial relations; each
relation scores its members' layouts in [0, 1] and the solver pushes the
summed score uphill. An oracle-driven dual loop revises the graph (and
the scoring functions themselves) between solves.
"""

__version__ = "0.1.0"

from .geometry import Aabb, Euler, Layout, Vec3
from .relations import Axis, RelationKind
from .scenegraph import (AddRelation, AssetRef, CameraSpec, RelationNode,
                         RemoveRelation, ReplaceSkillBody, ReviewFeedback,
                         SceneDocument, SetArg, SubScene, total_objective,
                         validate)
from .skills.library import Skill, SkillLibrary, default_library
from .solver import SolveResult, SolverConfig, solve
from .workflow import InnerResult, OuterResult, RunConfig, run_inner, \
    run_outer

__all__ = [
    "Aabb", "AddRelation", "AssetRef", "Axis", "CameraSpec", "Euler",
    "InnerResult", "Layout", "OuterResult", "RelationKind", "RelationNode",
    "RemoveRelation", "ReplaceSkillBody", "ReviewFeedback", "RunConfig",
    "SceneDocument", "SetArg", "Skill", "SkillLibrary", "SolveResult",
    "SolverConfig", "SubScene", "Vec3", "default_library", "run_inner",
    "run_outer", "solve", "total_objective", "validate",
]
