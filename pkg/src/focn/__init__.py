"""Learning Boolean tuple classifiers over relational structures with
local access, plus an exact evaluator for first-order logic with counting
terms and numerical predicates.
"""

from .errors import (BudgetError, FocnError, GenerationError, ParseError,
                     SphereShapeError)
from .generators import (GadgetBundle, SimpleGraph, eth_phi, eth_psi,
                         gen_encyclopedia, gen_eth, gen_random, gen_thm2,
                         pad_with_isolated, plant_target)
from .learner import (MODE_CONSISTENT, MODE_MIN_ERROR, Hypothesis,
                      LearnOutcome, LearnerConfig, TrainingSequence,
                      candidate_parameters, evaluate_hypothesis,
                      format_training, learn_bounded, learn_consistent,
                      learn_min_error, load_training, parse_hypothesis,
                      serialize_hypothesis, training_error)
from .locality import (Sphere, canonical_form, canonical_key,
                       count_type_occurrences, evaluate_sphere_formula,
                       extract_sphere, parse_sphere, render_sphere_formula,
                       serialize_sphere, spheres_isomorphic)
from .logic import (CompiledFormula, Interpretation, PredicateCollection,
                    binding_rank, binding_width, default_predicates,
                    evaluate_formula, evaluate_term, format_formula,
                    free_variables, parse_formula, parse_term)
from .oracle import (OracleBudget, brute_force_clique, brute_force_consistent,
                     brute_force_iso, brute_force_min_error, phi_star_walk)
from .pac import (Distribution, PacReport, PhiStarBounds, TrialResult,
                  class_min_generalization_error, format_distribution,
                  generalization_error, load_distribution,
                  neighborhood_size_bound, pac_sample_size, phi_star_bounds,
                  realized_class_size, run_pac_experiment, uc_sample_size)
from .structure import (AccessReceipt, Signature, Structure, build_structure,
                        load_structure)

__version__ = "0.1.0"

__all__ = [
    "AccessReceipt", "BudgetError", "CompiledFormula", "Distribution",
    "FocnError", "GadgetBundle", "GenerationError", "Hypothesis",
    "Interpretation", "LearnOutcome", "LearnerConfig", "MODE_CONSISTENT",
    "MODE_MIN_ERROR", "OracleBudget", "PacReport", "ParseError",
    "PhiStarBounds", "PredicateCollection", "Signature",
    "SimpleGraph", "Sphere", "SphereShapeError", "Structure",
    "TrainingSequence", "TrialResult", "binding_rank", "binding_width",
    "brute_force_clique", "brute_force_consistent", "brute_force_iso",
    "brute_force_min_error", "build_structure", "candidate_parameters",
    "canonical_form", "canonical_key", "class_min_generalization_error",
    "count_type_occurrences", "default_predicates", "eth_phi", "eth_psi",
    "evaluate_formula", "evaluate_hypothesis", "evaluate_sphere_formula",
    "evaluate_term", "extract_sphere", "format_distribution",
    "format_formula", "format_training", "free_variables",
    "gen_encyclopedia", "gen_eth", "gen_random", "gen_thm2",
    "generalization_error", "learn_bounded", "learn_consistent",
    "learn_min_error", "load_distribution", "load_structure",
    "load_training", "neighborhood_size_bound", "pac_sample_size",
    "pad_with_isolated", "parse_formula", "parse_hypothesis", "parse_sphere",
    "parse_term", "phi_star_bounds", "phi_star_walk", "plant_target",
    "realized_class_size", "render_sphere_formula", "run_pac_experiment",
    "serialize_hypothesis", "serialize_sphere", "spheres_isomorphic",
    "training_error", "uc_sample_size",
]
