import math
from typing import Optional

from pydantic import BaseModel


class RecoveryBounds(BaseModel):
    """
    Conservative integer sparsity levels for which unique recovery is guaranteed by the coherence
    spark bound, for a single measurement vector and for jointly sparse measurement vectors.
    """

    spark_lb: float
    spark_min: Optional[int] = None
    k_max_smv: Optional[int] = None
    k_max_mmv: Optional[int] = None
    orthogonal: bool = False
    derivation: str


def recovery_bounds(mu: float, rank_x: int = 1, M: Optional[int] = None) -> RecoveryBounds:
    """
    spark > 1 + 1/mu, so the smallest admissible integer spark is floor(1 + 1/mu) + 1. For
    mu = 1 the strict inequality cannot hold (duplicate columns give spark 2), so spark >= 2 is
    used. Unique recovery needs K < spark / 2 (SMV) and K < (spark - 1 + rank X) / 2 (MMV);
    the largest such integer K is (numerator - 1) // 2.
    """
    if not 0.0 <= mu <= 1.0:
        raise ValueError(f"[INVALID COHERENCE] mu={mu} must lie in [0, 1]")
    if rank_x < 1:
        raise ValueError(f"[INVALID RANK] rank(X)={rank_x} must be at least 1")

    if mu == 0.0:
        return RecoveryBounds(
            spark_lb=math.inf,
            k_max_smv=M,
            k_max_mmv=M,
            orthogonal=True,
            derivation="orthogonal columns: every support is identifiable, K bounded by M",
        )

    spark_lb = 1.0 + 1.0 / mu
    spark_min = 2 if mu >= 1.0 else math.floor(spark_lb + 1e-9) + 1
    k_max_smv = (spark_min - 1) // 2
    k_max_mmv = (spark_min - 1 + rank_x - 1) // 2
    derivation = (
        f"spark > 1 + 1/mu = {spark_lb:g} => spark >= {spark_min}; "
        f"K < {spark_min}/2 => K <= {k_max_smv}; "
        f"K < ({spark_min} - 1 + {rank_x})/2 => K <= {k_max_mmv}"
    )
    return RecoveryBounds(
        spark_lb=spark_lb,
        spark_min=spark_min,
        k_max_smv=k_max_smv,
        k_max_mmv=k_max_mmv,
        derivation=derivation,
    )
