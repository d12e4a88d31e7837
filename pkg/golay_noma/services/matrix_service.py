from typing import Optional, Sequence

from loguru import logger

from golay_noma.core.entities.component import Component
from golay_noma.gf2.permutation import Permutation
from golay_noma.search.permutation_search import permutation_set_for
from golay_noma.sequences.baselines import ZcConfig, nearest_prime, random_matrix, zc_matrix
from golay_noma.sequences.golay import spreading_matrix
from golay_noma.sequences.spreading_matrix import SequenceFamily, SpreadingMatrix
from golay_noma.services.properties import SearchProperties


class MatrixService(Component):
    """Builds spreading matrices of every family from command-level parameters."""

    search_properties: SearchProperties

    def build(
        self,
        family: SequenceFamily,
        m: int,
        L: int,
        seed: int,
        permutations: Optional[Sequence[Permutation]] = None,
        zc_roots: Optional[Sequence[int]] = None,
        N: Optional[int] = None,
        workers: int = 1,
    ) -> SpreadingMatrix:
        M = 1 << m
        match family:
            case SequenceFamily.Golay:
                if permutations is None:
                    permutations = permutation_set_for(m, L, seed, self.search_properties.max_trials, workers)
                matrix = spreading_matrix(list(permutations), N)
            case SequenceFamily.Zc:
                if zc_roots is not None:
                    config = ZcConfig(M_zc=nearest_prime(M), roots=tuple(zc_roots), seed=seed)
                else:
                    config = ZcConfig.random(M, L, seed)
                matrix = zc_matrix(config)
            case SequenceFamily.Bipolar | SequenceFamily.Gaussian:
                matrix = random_matrix(family, M, N or M * L, seed)
        logger.info(f"[MATRIX BUILT] {family.value} {matrix.M}x{matrix.N}")
        return matrix
