"""
Tests for the configuration cascade and its validation.
"""

import json

import pytest

from polypareto.config.defaults import DEFAULT_CONFIG
from polypareto.config.manager import ConfigurationManager
from polypareto.config.schemas import ConfigSchema, ConfigValidationError


@pytest.mark.unit
class TestDefaults:

    def test_defaults_are_valid(self):
        ConfigSchema.validate_config(DEFAULT_CONFIG)

    def test_defaults_loaded(self, config_manager):
        assert config_manager.get('budgets.tangency.n_seeds') == 32
        assert config_manager.get('tolerances.cluster_rtol') == 1e-3
        assert config_manager.get('run.seed') == 0

    def test_missing_key_returns_default(self, config_manager):
        assert config_manager.get('budgets.nothing.here', 7) == 7

    def test_get_before_load(self):
        with pytest.raises(RuntimeError):
            ConfigurationManager().get('run.seed')

    def test_as_dict_is_a_copy(self, config_manager):
        snapshot = config_manager.as_dict()
        snapshot['run']['seed'] = 99
        assert config_manager.get('run.seed') == 0


@pytest.mark.unit
class TestFiles:

    def test_general_file_merged(self, tmp_path):
        path = tmp_path / "polypareto_config.json"
        path.write_text(json.dumps({"budgets": {"tangency": {"n_seeds": 4}}}), encoding="utf-8")
        manager = ConfigurationManager()
        manager.load_configuration(general_config_path=str(path))
        assert manager.get('budgets.tangency.n_seeds') == 4
        assert manager.get('budgets.tangency.n_weights') == 8

    def test_user_file_wins_over_general(self, tmp_path):
        general = tmp_path / "general.json"
        user = tmp_path / "user.json"
        general.write_text(json.dumps({"run": {"seed": 1}}), encoding="utf-8")
        user.write_text(json.dumps({"run": {"seed": 2}}), encoding="utf-8")
        manager = ConfigurationManager()
        manager.load_configuration(str(general), str(user))
        assert manager.get('run.seed') == 2

    def test_missing_general_file_is_an_error(self, tmp_path):
        with pytest.raises(ConfigValidationError):
            ConfigurationManager().load_configuration(general_config_path=str(tmp_path / "absent.json"))

    def test_missing_user_file_ignored(self, tmp_path):
        manager = ConfigurationManager()
        manager.load_configuration(user_config_path=str(tmp_path / "absent.json"))
        assert manager.get('run.seed') == 0

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(ConfigValidationError):
            ConfigurationManager().load_configuration(general_config_path=str(path))

    def test_invalid_values_in_file(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"tolerances": {"cluster_rtol": -1.0}}), encoding="utf-8")
        with pytest.raises(ConfigValidationError):
            ConfigurationManager().load_configuration(general_config_path=str(path))

    def test_layers_described(self, tmp_path):
        general = tmp_path / "general.json"
        general.write_text(json.dumps({"run": {"seed": 1}}), encoding="utf-8")
        manager = ConfigurationManager()
        manager.load_configuration(str(general), str(tmp_path / "absent.json"))
        assert manager.describe()['layers'] == {'general': str(general)}


@pytest.mark.unit
class TestOverrides:

    def test_override_applied(self, config_manager):
        config_manager.apply_overrides([("budgets.pareto.box_radius", 2.0)], source="test")
        assert config_manager.get('budgets.pareto.box_radius') == 2.0
        assert config_manager.describe()['overrides'] == {'budgets.pareto.box_radius': 2.0}

    def test_later_override_wins(self, config_manager):
        config_manager.apply_overrides([("run.seed", 1), ("run.seed", 2)])
        assert config_manager.get('run.seed') == 2

    def test_null_default_key_is_known(self, config_manager):
        config_manager.apply_overrides([("performance.max_workers", 2)])
        assert config_manager.get('performance.max_workers') == 2

    def test_unknown_key(self, config_manager):
        with pytest.raises(ConfigValidationError):
            config_manager.apply_overrides([("budgets.tangency.n_sedes", 4)])

    def test_overrides_before_load(self):
        with pytest.raises(RuntimeError):
            ConfigurationManager().apply_overrides([("run.seed", 1)])

    @pytest.mark.parametrize("key, value", [
        ("tolerances.dependency_tol", -1e-6),
        ("tolerances.cluster_rtol", 0.0),
        ("budgets.tangency.radius_factor", 1.0),
        ("budgets.sublevel.sweep_factor", 0.5),
        ("budgets.sublevel.divergence_threshold", 0.0),
        ("budgets.tangency.n_seeds", 0),
        ("budgets.rabier.max_components", 17),
        ("run.seed", -1),
        ("run.seed", 2 ** 64),
        ("performance.max_workers", 0),
        ("output.format", "xml"),
        ("output.indent", -2),
        ("logging.level", "LOUD"),
        ("budgets.pareto.box_radius", "big"),
    ])
    def test_invalid_values(self, config_manager, key, value):
        with pytest.raises(ConfigValidationError):
            config_manager.apply_overrides([(key, value)])


@pytest.mark.unit
class TestParseOverride:

    @pytest.mark.parametrize("text, expected", [
        ("tangency.n_seeds=16", ("tangency.n_seeds", 16)),
        ("pareto.box_radius = 2.5", ("pareto.box_radius", 2.5)),
        ("sublevel.R_max=1e5", ("sublevel.R_max", 1e5)),
        ("flag=true", ("flag", True)),
        ("flag=False", ("flag", False)),
        ("performance.max_workers=null", ("performance.max_workers", None)),
        ("output.format=csv", ("output.format", "csv")),
    ])
    def test_literals(self, text, expected):
        assert ConfigurationManager.parse_override(text) == expected

    def test_integral_literal_stays_int(self):
        _, value = ConfigurationManager.parse_override("tangency.n_seeds=16")
        assert isinstance(value, int)

    @pytest.mark.parametrize("text", ["tangency.n_seeds", "=3", ""])
    def test_malformed(self, text):
        with pytest.raises(ConfigValidationError):
            ConfigurationManager.parse_override(text)


@pytest.mark.unit
def test_set_creates_records(config_manager):
    config_manager.set('output.extra.flag', True)
    assert config_manager.get('output.extra.flag') is True
