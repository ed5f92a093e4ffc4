"""Combinatorial machinery for labeled graphs over a rose: word and
graph primitives, edge folding, covers and path lifting, random-word
statistics, derived presentations with piece statistics, and the
factor-complexity calculus with reduction moves."""

from .words import (
    CyclicWord,
    GenTuple,
    NielsenMove,
    Word,
    apply_nielsen,
    commutator_class,
    cyclic_reduce,
    empty_word,
    free_reduce,
    occurrences,
    parse_word,
    format_word,
    standard_tuple,
)
from .graphs import (
    Arc,
    EdgePath,
    LabeledGraph,
    Subgraph,
    betti,
    canonical_key,
    collapse,
    core,
    format_graph,
    is_core_graph,
    isomorphic_labeled,
    maximal_arcs,
    parse_graph,
    rose,
    subgraph_as_graph,
    subgraph_from_edges,
)
from .folding import (
    FoldTrace,
    PsiWitness,
    fold_all,
    fold_once,
    fold_to_delta,
    folds_onto_rose,
    injective_arcs,
    is_folded,
    replace_arc,
    wedge_of_loops,
)
from .covers import (
    enumerate_candidates,
    is_path_surjective_up_to,
    is_two_sheeted_cover,
    lift_paths,
    shortest_non_lifting_word,
    survey_two_cover_characterization,
    two_sheeted_cover,
)
from .genericity import (
    SampleConfig,
    alpha_injectivity,
    complementary_distribution,
    disjoint_coverage,
    longest_repeated_subword,
    random_reduced_word,
    repeat_length_bound,
)
from .presentations import (
    Presentation,
    build_relators,
    find_sc_move,
    piece_report,
    sample_presentation,
    trim_surviving_middles,
)
from .complexity import (
    ComplexityValue,
    Thresholds,
    UWordIndex,
    admissible_decompositions,
    c1,
    ell_hat,
    reduction_move,
    tuple_complexity,
)
from .complexity import complexity as word_complexity
from .surgery import run_surgery, surgery_demo

__version__ = "0.1.0"
