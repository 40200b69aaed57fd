import json

from pytest import mark, raises

from modules.config_tools import BudgetConfig, Config, LabConfig, _strip_jsonc_comments


def test_defaults_without_a_file():
    config = Config.from_dict({})
    assert config.threads == 1
    assert config.budgets == BudgetConfig()
    assert config.lab == LabConfig()
    assert config.lab.mp_dps == 80


def test_json_round_trip():
    config = Config.from_dict(
        {
            "seed": "7",
            "threads": 2,
            "budgets": {"enumeration_nodes": "1_000"},
            "lab": {"flag_threshold": 2.5},
        }
    )
    assert config.seed == 7
    assert config.budgets.enumeration_nodes == 1000
    assert Config.from_json(config.to_json()) == config


def test_schema_key_is_ignored():
    assert Config.from_dict({"$schema": "./config.schema.json"}) == Config()


def test_jsonc_comments():
    raw = '{\n    // number of workers\n    "threads": 3\n}'
    assert json.loads(_strip_jsonc_comments(raw)) == {"threads": 3}


@mark.parametrize(
    ("data", "message"),
    [
        ({"threads": 0}, "threads"),
        ({"budgets": {"weyl_group_cap": -1}}, "weyl_group_cap"),
        ({"lab": {"mp_dps": 10}}, "mp_dps"),
        ({"lab": {"cone_constant": 1.5}}, "cone_constant"),
    ],
)
def test_invalid_values(data, message):
    with raises(ValueError, match=message):
        Config.from_dict(data)


def test_to_int():
    assert Config.to_int("2_000") == 2000
    assert Config.to_int("None") is None
    assert Config.to_int(5) == 5


def test_trailing_jsonc_comments_outside_strings():
    raw = (
        '{\n    "seed": 4, // fixed seed\n'
        '    "note": "http://example.org // not a comment",\n'
        '    "escaped": "a \\" // b"\n}'
    )
    assert json.loads(_strip_jsonc_comments(raw)) == {
        "seed": 4,
        "note": "http://example.org // not a comment",
        "escaped": 'a " // b',
    }


def test_save_writes_loadable_json(tmp_path):
    config = Config.from_dict({"seed": 11, "lab": {"cone_constant": 0.25}})
    path = tmp_path / "config.json"
    config.save(path)
    assert Config.from_json(path.read_text(encoding="utf-8")) == config
