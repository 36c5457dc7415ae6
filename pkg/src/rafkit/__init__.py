"""Relaxed agreement forests for unrooted binary phylogenetic trees.

Exact solvers, bounds, a greedy approximation, monotone permutation
partitioning, caterpillar dynamic programming, and instance generators.
"""

from .approx import find_greedy_gap_witness, greedy_mast_raf
from .caterpillar_dp import (BagDecomposition, caterpillar_minimum_raf,
                             caterpillar_pair, caterpillar_xp_decide,
                             path_bags, pims_to_mraf, raf_to_pims,
                             raf_to_pims_bound)
from .gadgets import (HardnessInstance, check_structural_lemmas,
                      hardness_instance, nochain_caterpillar_family,
                      nochain_witness, pims_solution_to_raf_gadget,
                      unbounded_maf_instance, unbounded_maf_witness)
from .mast import MastResult, mast, mast_bruteforce
from .pims import (DECREASING, INCREASING, MonotonePartition,
                   check_monotone_partition, erdos_szekeres_partition,
                   es_class_bound, lds, lis, pims_bruteforce, pims_exact,
                   random_permutation)
from .raf import (ConflictHypergraph, MrafBounds, MrafResult, RafPartition,
                  SolverTimeout, build_conflict_hypergraph, is_agreement_set,
                  maf_bruteforce, mraf_bounds, mraf_bruteforce, mraf_exact,
                  validate_af, validate_raf)
from .reduction import (ReductionTrace, find_chain_unsafety_witness,
                        find_common_chains, hang_pendant_chain,
                        plant_common_chain, subtree_reduce)
from .trees import (CaterpillarOrder, NewickError, PhyloTree, Quartet,
                    caterpillar_order, identity_caterpillar, is_homeomorphic,
                    parse_newick, permutation_caterpillar, random_pair,
                    random_tree, trees_equal, write_newick)

__version__ = "0.1.0"
