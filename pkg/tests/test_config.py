"""Config grammar: round trips, defaults, and line-numbered errors."""

import pytest

from netlms.config import (
    get_preset,
    parse_config,
    preset_names,
    render_config,
    with_overrides,
)
from netlms.errors import ConfigError

MINIMAL = """
[experiment]
horizon = 10

[model]
nodes = 2
dim = 2
node_dims = 1 1
x0 = 1.0 0.0
init_1 = 0.0 0.0
init_2 = 0.0 0.0

[graph]
kind = iid-uniform
low = 0.0
high = 1.0

[regression]
kind = fixed
h_1 = 1.0 0.0
h_2 = 0.0 1.0

[gains]
a_coef = 1.0
a_exp = 0.6
b_coef = 1.0
b_exp = 0.6
"""


def test_minimal_config_defaults():
    cfg = parse_config(MINIMAL)
    assert cfg.name == "custom" and cfg.seed == 0 and cfg.runs == 1
    assert cfg.node_dims == (1, 1)
    assert cfg.gains.lambda_coef == 0.0
    assert cfg.noise.sigma_f == 0.1
    assert cfg.excitation.window == 2


def test_node_dims_default_is_square():
    text = MINIMAL.replace("node_dims = 1 1\n", "").replace(
        "h_1 = 1.0 0.0", "h_1 = 1.0 0.0 ; 0.0 0.0"
    ).replace("h_2 = 0.0 1.0", "h_2 = 0.0 1.0 ; 0.0 0.0")
    cfg = parse_config(text)
    assert cfg.node_dims == (2, 2)


def test_node_dims_mismatch_rejected():
    text = MINIMAL.replace("node_dims = 1 1", "node_dims = 2 1")
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert "row counts" in str(err.value)


def test_every_preset_round_trips():
    for name in preset_names():
        cfg = get_preset(name)
        again = parse_config(render_config(cfg))
        assert again == cfg
        # rendering is canonical: render(parse(render(c))) == render(c)
        assert render_config(again) == render_config(cfg)


def test_comments_and_blank_lines_ignored():
    text = MINIMAL.replace("horizon = 10", "horizon = 10  # inline comment")
    cfg = parse_config("# leading comment\n" + text)
    assert cfg.horizon == 10


def test_unknown_section_reports_line():
    text = MINIMAL + "\n[telemetry]\nrate = 1\n"
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert "telemetry" in str(err.value)
    assert err.value.line == MINIMAL.count("\n") + 2


def test_unknown_key_reports_line_and_section():
    text = MINIMAL.replace("low = 0.0", "low = 0.0\nwobble = 3")
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert "wobble" in str(err.value) and "[graph]" in str(err.value)
    assert err.value.line == text.splitlines().index("wobble = 3") + 1


def test_missing_required_key():
    text = MINIMAL.replace("horizon = 10", "")
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert "horizon" in str(err.value)


def test_missing_section():
    text = MINIMAL.replace("[gains]", "[noise]").replace("a_coef = 1.0", "")
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert "gains" in str(err.value)


def test_type_errors_carry_line_numbers():
    text = MINIMAL.replace("horizon = 10", "horizon = soon")
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert err.value.line == text.splitlines().index("horizon = soon") + 1
    assert "integer" in str(err.value)


def test_duplicate_key_rejected():
    text = MINIMAL.replace("low = 0.0", "low = 0.0\nlow = 0.5")
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert "duplicate" in str(err.value)


def test_ragged_matrix_rejected():
    text = MINIMAL.replace("h_1 = 1.0 0.0", "h_1 = 1.0 0.0 ; 1.0")
    with pytest.raises(ConfigError) as err:
        parse_config(text)
    assert "equally long" in str(err.value)


def test_key_outside_section():
    with pytest.raises(ConfigError) as err:
        parse_config("horizon = 5\n" + MINIMAL)
    assert err.value.line == 1


def test_shape_mismatch_caught_by_validation():
    text = MINIMAL.replace("x0 = 1.0 0.0", "x0 = 1.0 0.0 3.0")
    with pytest.raises(ConfigError):
        parse_config(text)


def test_with_overrides():
    cfg = get_preset("setting-iii")
    out = with_overrides(cfg, seed=7, runs=3, horizon=123, out="/tmp/x")
    assert (out.seed, out.runs, out.horizon, out.out) == (7, 3, 123, "/tmp/x")
    # untouched fields survive
    assert out.gains == cfg.gains and out.name == cfg.name
    # None leaves everything alone
    assert with_overrides(cfg) == cfg


def test_get_preset_case_insensitive():
    assert get_preset("SETTING-I") == get_preset("setting-i")
    with pytest.raises(Exception):
        get_preset("setting-xyz")
