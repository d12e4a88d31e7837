from golay_noma.gf2.boolean import BinarySequence, algebraic_degree, binary_expansion, truth_table
from golay_noma.gf2.matrix import (
    Gf2Matrix,
    brute_force_rank,
    gf2_rank,
    quadratic_matrix,
    symplectic_matrix,
    symplectic_rank,
)
from golay_noma.gf2.permutation import (
    InvalidPermutationError,
    Permutation,
    canonical_permutations,
    random_canonical_permutation,
)
