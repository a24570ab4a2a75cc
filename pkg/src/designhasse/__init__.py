"""Layout structures and Hasse diagrams for experimental designs."""

from .confound import ConfoundReport, detect_confounding, residual_df_rank
from .datasets import (
    FixtureDesign, all_fixtures, bibd_6_10_3, crossover_design, factorial_2p4,
    get_fixture, splitplot_design,
)
from .design import (
    DesignError, DesignTable, Diagnostic, Factor, Partition, check_design, load_design,
    partition_of, read_flags_sidecar, write_flags_sidecar,
)
from .layout import LayoutStructure, StructuralObject, build_layout, relation_table, to_json
from .randexpr import ExpressionError, UnsupportedExpression, format_expr, parse_rand_expr, rand_nest_set
from .relations import Relationship, classify, refines
from .render import DiagramSpec, StyleConfig, emit_dot, emit_svg, layout_diagram
from .rls import (
    PlanError, RandomisationPlan, RestrictedLayoutStructure, build_rls, model_equation,
    plan_template, read_arrows, read_plan, rls_relation_table, suggest_rls_objects,
    suggestion_plan, validate_plan,
)

__version__ = "0.1.0"
