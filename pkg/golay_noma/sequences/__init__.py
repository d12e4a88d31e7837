from golay_noma.sequences.baselines import ZcConfig, nearest_prime, random_matrix, zc_matrix
from golay_noma.sequences.golay import (
    block_matrix,
    golay_sequence,
    modulate,
    spreading_matrix,
    walsh_hadamard,
)
from golay_noma.sequences.spreading_matrix import SequenceFamily, SpreadingMatrix
