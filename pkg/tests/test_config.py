import json

import pytest

from transduce.chain import ModeParams, TransducerChain
from transduce.config import (
    chain_from_config,
    chain_to_config,
    ensemble_from_config,
    ensemble_to_config,
    load_chain_config,
    parse_json,
    read_json,
    schema,
)
from transduce.ensemble import EnsembleSpec
from transduce.errors import ConfigError


def doc():
    return {
        "modes": [
            {"detuning": 0.1, "kappa_i": 0.0, "kappa_ex": 1.0},
            {"detuning": 0.0, "kappa_i": 0.2, "kappa_ex": 0.0},
            {"detuning": -0.3, "kappa_i": 0.1, "kappa_ex": 0.8},
        ],
        "couplings": [0.5, 0.7],
        "label": "demo",
        "unit": "MHz",
        "occupations": {"M1": 2.0},
    }


def test_chain_round_trip(tmp_path):
    cfg = chain_from_config(doc())
    assert cfg.chain.n_stages == 1 and cfg.label == "demo" and cfg.unit == "MHz"
    assert cfg.to_dict() == doc()
    path = tmp_path / "c.json"
    path.write_text(json.dumps(doc()))
    assert load_chain_config(path).chain == cfg.chain


@pytest.mark.parametrize("mutate, field", [
    (lambda d: d["modes"][1].update(kappa_i=-1), "modes[1].kappa_i"),
    (lambda d: d["modes"][0].update(kapa_ex=1), "modes[0].kapa_ex"),
    (lambda d: d.pop("couplings"), "couplings"),
    (lambda d: d.update(extra=1), "extra"),
    (lambda d: d["occupations"].update(M1=-2), "occupations.M1"),
])
def test_validation_names_field(mutate, field):
    d = doc()
    mutate(d)
    with pytest.raises(ConfigError) as exc:
        chain_from_config(d)
    assert exc.value.field == field


def test_structural_errors_become_config_errors():
    d = doc()
    d["couplings"] = [0.5]
    with pytest.raises(ConfigError, match="couplings"):
        chain_from_config(d)
    d = doc()
    d["occupations"] = {"M7": 1.0}
    with pytest.raises(ConfigError) as exc:
        chain_from_config(d)
    assert exc.value.field == "occupations"


def test_degenerate_flag_round_trip():
    ch = TransducerChain.lossless_ends([1, 1, 1], [1, 0], degenerate=True)
    d = chain_to_config(ch)
    assert d["degenerate"] is True
    assert chain_from_config(d).chain == ch


def test_json_errors_report_position(tmp_path):
    with pytest.raises(ConfigError, match="line 2, column"):
        parse_json('{"modes":\n ]')
    with pytest.raises(ConfigError, match="cannot read"):
        read_json(tmp_path / "missing.json")


def test_ensemble_round_trip():
    spec = EnsembleSpec(50, ModeParams(0, 0, 1), ModeParams(0.2, 0.1, 1), 0.1, 0.4, 0.2, gamma_2=0.3)
    assert ensemble_from_config(ensemble_to_config(spec)) == spec
    bad = ensemble_to_config(spec)
    bad["n_atoms"] = 0
    with pytest.raises(ConfigError):
        ensemble_from_config(bad)


def test_schemas_are_strict():
    for name in ("chain", "ensemble"):
        assert schema(name)["additionalProperties"] is False
