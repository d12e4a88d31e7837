from pathlib import Path
from typing import Iterable, Union

from golay_noma.gf2.permutation import InvalidPermutationError, Permutation


def parse_permutation_line(line: str) -> Permutation:
    """Parses "5,4,3,2,1" (surrounding parentheses and spaces are tolerated)."""
    tokens = [token.strip() for token in line.strip().strip("()").split(",")]
    try:
        entries = tuple(int(token) for token in tokens)
    except ValueError as error:
        raise InvalidPermutationError(f"[INVALID PERMUTATION] Cannot parse line: {line!r}") from error
    return Permutation(entries=entries)


def parse_permutations(text: str) -> list[Permutation]:
    """One permutation per line; blank lines and lines starting with '#' are skipped."""
    return [
        parse_permutation_line(line)
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]


def format_permutations(permutations: Iterable[Permutation]) -> str:
    return "".join(f"{permutation.to_text()}\n" for permutation in permutations)


def read_permutations(path: Union[str, Path]) -> list[Permutation]:
    return parse_permutations(Path(path).read_text())


def write_permutations(permutations: Iterable[Permutation], path: Union[str, Path]) -> None:
    Path(path).write_text(format_permutations(permutations))
