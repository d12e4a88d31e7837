import itertools
from typing import Iterator

import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator

from golay_noma.commons.errors import GolayNomaError


class InvalidPermutationError(GolayNomaError): ...


class Permutation(BaseModel):
    """
    An ordering of {1, ..., m} defining the quadratic form x_p(1) x_p(2) + ... + x_p(m-1) x_p(m).

    Entries are 1-based. Any bijection is accepted; the canonical representative of the
    reversal class is the one with `entries[0] < entries[-1]`, since a permutation and its
    reversal define the identical quadratic form.
    """

    model_config = ConfigDict(frozen=True)

    entries: tuple[int, ...]

    @field_validator("entries")
    @classmethod
    def _validate_bijection(cls, entries: tuple[int, ...]) -> tuple[int, ...]:
        m = len(entries)
        if m < 2:
            raise InvalidPermutationError(
                f"[INVALID PERMUTATION] Dimension must be at least 2, got entries: {entries}"
            )
        if sorted(entries) != list(range(1, m + 1)):
            raise InvalidPermutationError(
                f"[INVALID PERMUTATION] Entries {entries} are not a bijection on 1..{m}"
            )
        return entries

    @classmethod
    def of(cls, *entries: int) -> "Permutation":
        return cls(entries=tuple(entries))

    @property
    def m(self) -> int:
        return len(self.entries)

    @property
    def is_canonical(self) -> bool:
        return self.entries[0] < self.entries[-1]

    def canonical(self) -> "Permutation":
        if self.is_canonical:
            return self
        return Permutation(entries=tuple(reversed(self.entries)))

    def edges(self) -> list[tuple[int, int]]:
        """0-based (row, col) positions of the quadratic matrix ones, row < col."""
        return [
            (min(a, b) - 1, max(a, b) - 1) for a, b in zip(self.entries, self.entries[1:])
        ]

    def adjacency_masks(self) -> tuple[int, ...]:
        """
        Row bitmasks of the symmetric matrix Q + Q^T: bit j of row i is set when x_i x_j is a term.
        """
        return adjacency_masks_of(self.entries)

    def to_text(self) -> str:
        return ",".join(str(entry) for entry in self.entries)

    def __str__(self) -> str:
        return f"({self.to_text()})"


def canonical_permutations(m: int) -> Iterator[Permutation]:
    """Yields all m!/2 canonical permutations of dimension m in lexicographic order."""
    if m < 2:
        raise InvalidPermutationError(f"[INVALID PERMUTATION] Dimension must be at least 2, got {m}")
    for entries in itertools.permutations(range(1, m + 1)):
        if entries[0] < entries[-1]:
            yield Permutation(entries=entries)


def random_canonical_entries(m: int, rng: np.random.Generator) -> tuple[int, ...]:
    """
    Draws a canonical permutation uniformly by rejection sampling; returned as a raw tuple so
    that hot Monte-Carlo loops skip model validation.
    """
    while True:
        entries = tuple(int(entry) for entry in rng.permutation(m) + 1)
        if entries[0] < entries[-1]:
            return entries


def random_canonical_permutation(m: int, rng: np.random.Generator) -> Permutation:
    return Permutation(entries=random_canonical_entries(m, rng))


def adjacency_masks_of(entries: tuple[int, ...]) -> tuple[int, ...]:
    # path graph of consecutive entries, as symmetric row bitmasks
    masks = [0] * len(entries)
    for a, b in zip(entries, entries[1:]):
        masks[a - 1] |= 1 << (b - 1)
        masks[b - 1] |= 1 << (a - 1)
    return tuple(masks)
