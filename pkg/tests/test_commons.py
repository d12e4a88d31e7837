from pathlib import Path

import numpy as np
import pytest
from pydantic import BaseModel

from golay_noma.commons.json_config_repository import JsonConfigRepository
from golay_noma.commons.matrix_io import (
    HEADER,
    MatrixFormatError,
    decode_matrix,
    encode_matrix,
    format_matrix_csv,
    read_matrix,
    write_matrix,
)
from golay_noma.commons.parallel import OrderedWorkerPool, ordered_map
from golay_noma.commons.permutation_io import (
    format_permutations,
    parse_permutation_line,
    parse_permutations,
    read_permutations,
    write_permutations,
)
from golay_noma.commons.rng import derive_seed, substream
from golay_noma.commons.sidecar import ArtifactSidecar, read_sidecar, sidecar_path, write_sidecar
from golay_noma.gf2 import InvalidPermutationError, Permutation
from golay_noma.search.reference_tables import REFERENCE_PERMUTATION_SETS
from golay_noma.sequences import SequenceFamily, ZcConfig, spreading_matrix, zc_matrix


def square(value: int) -> int:
    return value * value


class TestPermutationText:
    def test_parse_tolerates_spaces_and_parentheses(self):
        assert parse_permutation_line(" (5, 4,3,2,1) ") == Permutation.of(5, 4, 3, 2, 1)

    def test_parse_skips_comments_and_blank_lines(self):
        text = "# m=3 set\n1,2,3\n\n2,1,3\n"
        assert parse_permutations(text) == [Permutation.of(1, 2, 3), Permutation.of(2, 1, 3)]

    @pytest.mark.parametrize("line", ["1,2,x", "1,2,2", ""])
    def test_invalid_lines(self, line: str):
        with pytest.raises(InvalidPermutationError):
            parse_permutation_line(line)

    def test_file_round_trip(self, tmp_path: Path):
        permutations = REFERENCE_PERMUTATION_SETS[2].permutations
        path = tmp_path / "gamma.txt"
        write_permutations(permutations, path)
        assert path.read_text().splitlines()[0] == "3,4,5,2,6,1"
        assert read_permutations(path) == permutations
        assert format_permutations(permutations[:1]) == "3,4,5,2,6,1\n"


class TestMatrixFile:
    def test_binary_layout(self):
        matrix = spreading_matrix(REFERENCE_PERMUTATION_SETS[0].permutations[:2])
        data = encode_matrix(matrix)
        assert len(data) == HEADER.size + 16 * 32 * 64
        assert HEADER.unpack_from(data) == (b"GLYM", 32, 64, SequenceFamily.Golay.tag)

    def test_complex_entries_survive(self, tmp_path: Path):
        matrix = zc_matrix(ZcConfig(M_zc=13, roots=(2, 5)))
        path = tmp_path / "zc.bin"
        write_matrix(matrix, path)
        loaded = read_matrix(path)
        assert loaded.family == SequenceFamily.Zc
        np.testing.assert_array_equal(loaded.entries, matrix.entries)

    @pytest.mark.parametrize(
        "data",
        [b"GLY", HEADER.pack(b"XXXX", 1, 1, 0) + bytes(16), HEADER.pack(b"GLYM", 2, 2, 0) + bytes(16), HEADER.pack(b"GLYM", 1, 1, 9) + bytes(16)],
        ids=["short", "magic", "length", "family"],
    )
    def test_corrupt_files(self, data: bytes):
        with pytest.raises(MatrixFormatError):
            decode_matrix(data)

    def test_csv_is_column_major_long_format(self):
        matrix = spreading_matrix([Permutation.of(1, 2)])
        lines = format_matrix_csv(matrix).splitlines()
        assert lines[0] == "row,col,re,im"
        assert len(lines) == 1 + 16
        assert lines[1] == "0,0,0.5,0.0"
        assert lines[4] == "3,0,-0.5,0.0"


class TestSidecar:
    def test_path_appends_json(self, tmp_path: Path):
        assert sidecar_path(tmp_path / "table.csv") == tmp_path / "table.csv.json"

    def test_write_and_read(self, tmp_path: Path):
        sidecar = ArtifactSidecar(
            command="search",
            argv=["search", "--m", "5", "--L", "4", "--seed", "3"],
            seed=3,
            version="0.1.0",
            results={"achieved": True},
        )
        path = write_sidecar(tmp_path / "gamma.txt", sidecar)
        assert read_sidecar(path) == sidecar


class _Limits(BaseModel):
    frames: int
    label: str = "default"


class _LimitsRepository(JsonConfigRepository[_Limits]): ...


class TestJsonConfigRepository:
    def test_create_get_and_save(self, tmp_path: Path):
        path = tmp_path / "limits.json"
        repository = _LimitsRepository.create(path, _Limits(frames=10))
        assert repository.get_config() == _Limits(frames=10)

        repository.get_config().frames = 20
        repository.save_config()
        repository.reload_config()
        assert _LimitsRepository(path).get_config().frames == 20

    def test_target_key(self, tmp_path: Path):
        path = tmp_path / "document.json"
        path.write_text('{"limits": {"frames": 3, "label": "nested"}}')
        assert _LimitsRepository(path, target_key="limits").get_config().label == "nested"
        with pytest.raises(ValueError, match="TARGET KEY NOT FOUND"):
            _LimitsRepository(path, target_key="missing")

    def test_create_rejects_other_models(self, tmp_path: Path):
        with pytest.raises(TypeError):
            _LimitsRepository.create(tmp_path / "x.json", ArtifactSidecar(command="x", argv=[], version="0"))  # type: ignore[arg-type]


class TestDeterminism:
    def test_substreams_are_reproducible_and_distinct(self):
        first = substream(7, 4, 0, 1).random(5)
        np.testing.assert_array_equal(first, substream(7, 4, 0, 1).random(5))
        assert not np.array_equal(first, substream(7, 4, 0, 2).random(5))
        assert derive_seed(7, 3, 0, 2) == derive_seed(7, 3, 0, 2)
        assert derive_seed(7, 3, 0, 2) != derive_seed(7, 3, 1, 2)

    @pytest.mark.parametrize("workers", [1, 3])
    def test_ordered_map_keeps_task_order(self, workers: int):
        assert ordered_map(square, range(10), workers) == [value * value for value in range(10)]

    def test_pool_without_workers_runs_inline(self):
        with OrderedWorkerPool(0) as pool:
            assert pool.workers == 1
            assert pool.map(lambda value: value + 1, [1, 2]) == [2, 3]
