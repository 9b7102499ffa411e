"""Weak-span graph rewriting with joint application of coherent match sets.

Rules take the shape L <- K <- I -> R over graphs attributed by finite label
sets: K is what survives deletion and I is the part a rule actively extends.
A set of matches whose required parts all embed in each other's deletion
contexts can be applied in a single step even when no order of one-at-a-time
applications reproduces it.
"""

from .algebras import (AlgebraMorphism, EvaluationError, FiniteEnum, LabelSet,
                       Lit, NatPlus, OpApp, OpSignature, PLUS_SIGNATURE,
                       TermAlg, TermSyntaxError, Var, apply_to_labelset,
                       evaluate_term, parse_term, render_term, render_value)
from .attrgraphs import (AttrMorphism, AttributedGraph, ValidationReport,
                         Violation, compose_attr, identity_attr,
                         is_attr_isomorphic, rename_attributed,
                         validate_attr_morphism)
from .constructions import (ComplementResult, GluingError, PullbackResult,
                            PushoutResult, check_universal_property,
                            colimit_of_neutrals, limit_of_neutrals,
                            pullback_of_neutrals, pushout_along_neutral,
                            pushout_complement)
from .fileio import (ParseError, SystemSpec, ValidationError, export_dot,
                     load_system, loads_system, save_graph, save_system)
from .graphs import (Graph, GraphMorphism, SortSignature, compose,
                     disjoint_union, enumerate_morphisms, is_isomorphic,
                     is_mono)
from .hexgrid import HexGridSpec, ca_oracle, encode_grid, hex_system, huw_rules, live_cells
from .presets import fibonacci_system
from .rewriting import (CoherenceCheckResult, CoherenceWitness,
                        DirectTransformation, IncoherentSetError, Match,
                        ParallelStep, WeakSpan, apply_direct, apply_span_dpo,
                        associated_span, check_parallel_coherent,
                        check_parallel_independent, coherent_set_check,
                        coproduct_rule, derive_span_from_pct, find_matches,
                        pct)
from .runner import (HexcaResult, RunResult, StepReport, all_matches,
                     apply_parallel_step, apply_sequential_step, cmd_hexca,
                     cmd_run, transport_match)

__version__ = "0.1.0"
