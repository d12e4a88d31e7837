from pathlib import Path

import pytest
from pytest_mock import MockerFixture

from golay_noma.core.entities.properties.properties import Properties
from golay_noma.core.entities.properties.properties_loader import (
    InvalidPropertiesKeyError,
    _PropertiesLoader,
)
from golay_noma.services.properties import SearchProperties, SimulationProperties
from golay_noma.noma.recovery import StoppingRule


class TestPropertiesLoader:
    @pytest.fixture
    def mock_properties_classes(self) -> list[type[Properties]]:
        class MockProperties(Properties):
            __key__ = "mock_properties"
            attr: str = "default"

        return [MockProperties]

    def test_load_properties_from_valid_json_file(
        self, mocker: MockerFixture, mock_properties_classes: list[type[Properties]]
    ):
        mocker.patch.object(Path, "read_text", return_value='{"mock_properties": {"attr": "value"}}')
        loader = _PropertiesLoader("test.json", mock_properties_classes)
        properties = loader.load_properties()

        assert "mock_properties" in properties
        assert isinstance(properties["mock_properties"], mock_properties_classes[-1])
        assert properties["mock_properties"].attr == "value"  # type: ignore[attr-defined]

    def test_load_properties_from_valid_yaml_file(
        self, mocker: MockerFixture, mock_properties_classes: list[type[Properties]]
    ):
        mocker.patch.object(Path, "read_text", return_value="mock_properties:\n  attr: yaml-value\n")
        loader = _PropertiesLoader("test.yaml", mock_properties_classes)
        properties = loader.load_properties()

        assert properties["mock_properties"].attr == "yaml-value"  # type: ignore[attr-defined]

    def test_missing_path_uses_class_defaults(self, mock_properties_classes: list[type[Properties]]):
        properties = _PropertiesLoader(None, mock_properties_classes).load_properties()
        assert properties["mock_properties"].attr == "default"  # type: ignore[attr-defined]

    def test_missing_section_uses_class_defaults(self, tmp_path: Path):
        path = tmp_path / "properties.yml"
        path.write_text("simulation:\n  stopping_rule: frobenius\n")
        properties = _PropertiesLoader(path, [SearchProperties, SimulationProperties]).load_properties()

        assert properties["search"] == SearchProperties()
        assert properties["simulation"].stopping_rule == StoppingRule.Frobenius  # type: ignore[attr-defined]

    def test_load_properties_from_file_without_extension(self):
        with pytest.raises(ValueError, match="no file extension found"):
            _PropertiesLoader("testfile", []).load_properties()

    def test_load_properties_from_unsupported_extension(self, mocker: MockerFixture):
        mocker.patch.object(Path, "read_text", return_value="{}")
        with pytest.raises(ValueError, match="Unsupported file extension"):
            _PropertiesLoader("test.txt", []).load_properties()

    def test_load_properties_with_invalid_keys(self, mocker: MockerFixture):
        mocker.patch.object(Path, "read_text", return_value='{"invalid_key": {"attr": "value"}}')
        loader = _PropertiesLoader("test.json", [SearchProperties])
        with pytest.raises(InvalidPropertiesKeyError, match="Invalid properties key"):
            loader.load_properties()

    def test_unknown_field_is_rejected(self, tmp_path: Path):
        path = tmp_path / "properties.json"
        path.write_text('{"search": {"max_trails": 10}}')
        with pytest.raises(ValueError):
            _PropertiesLoader(path, [SearchProperties]).load_properties()

    def test_handle_empty_properties_file_content(self, mocker: MockerFixture):
        mocker.patch.object(Path, "read_text", return_value="")
        loader = _PropertiesLoader("test.yaml", [])
        assert loader.load_properties() == {}
