"""Multi-objective multigene genetic programming for fusing quality measures.

Evolves linear fusions ``y = d0 + sum_i d_i * G_i(X)`` of input measures,
trading goodness of fit against expressional complexity on a Pareto front,
and scores predictions with the usual IQA indices (SRCC, KRCC, PCC, RMSE).
"""

from .builtin import MEASURES, builtin_coefficients, builtin_predict
from .dataset import DataError, Dataset, load_csv
from .evolution import (
    EvolutionConfig,
    EvolutionResult,
    Individual,
    ParetoArchive,
    crowding_distance,
    dominates,
    evolve,
    high_level_crossover,
    init_population,
    low_level_crossover,
    merge_archives,
    mutate,
    non_dominated_sort,
    select_final,
    tournament_select,
)
from .expr import (
    FunctionSet,
    Leaf,
    Op,
    ParseError,
    eval_tree,
    parse_sexpr,
    print_sexpr,
    random_tree,
    tree_metrics,
)
from .multigene import (
    MultiGeneModel,
    ObjectivePair,
    fit_weights,
    load_model,
    model_objectives,
    predict,
    r_squared,
    save_model,
)
from .quality import EvaluationReport, LogisticFit, evaluate_report, krcc, logistic_fit, pcc, rmse, srcc

__version__ = "0.1.0"
