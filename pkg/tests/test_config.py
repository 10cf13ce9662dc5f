# tests/test_config.py
from __future__ import annotations

import json
import math

import numpy as np
import pytest
from pydantic import ValidationError

from core.constants import N_BAR_STRETCH
from helper.artifacts import config_document
from helper.artifacts import csv_artifact
from helper.artifacts import json_artifact
from helper.json_helper import dump_json
from helper.json_helper import load_json_document
from helper.json_helper import to_jsonable
from models.config import NoiseConfig
from models.config import PhysicsConfig
from models.config import RunConfig
from models.config import ScanConfig
from models.errors import ConfigError
from models.params import GateParams
from os_env import ARTIFACT_SCHEMA


def test_physics_defaults_reproduce_the_preset():
    for variant in ('laser', 'microwave'):
        params = PhysicsConfig().to_params(variant)
        preset = GateParams.preset(variant)
        assert params.delta == pytest.approx(preset.delta)
        assert params.carrier_pi_time == pytest.approx(preset.carrier_pi_time)
        assert params.omega_j == pytest.approx(preset.omega_j)


def test_physics_overrides():
    params = PhysicsConfig(delta_khz=10.0, carrier_pi_time_us=4.0, omega_0_khz=50.0, n_max=6).to_params('laser')
    assert params.delta == pytest.approx(2 * math.pi * 1e4)
    assert params.carrier_pi_time == pytest.approx(4e-6)
    assert params.omega_0_rabi == pytest.approx(2 * math.pi * 5e4)
    assert params.cutoff.n_max == 6


def test_stretch_occupation_defaults_per_command():
    assert PhysicsConfig().stretch_occupation() == 0.0
    assert PhysicsConfig().stretch_occupation(N_BAR_STRETCH) == N_BAR_STRETCH
    assert PhysicsConfig(n_bar_stretch=0.5).stretch_occupation(N_BAR_STRETCH) == 0.5
    assert PhysicsConfig(n_bar_stretch=0.0).stretch_occupation(N_BAR_STRETCH) == 0.0
    with pytest.raises(ValidationError):
        PhysicsConfig(n_bar_stretch=-0.1)


def test_fastscan_ratios_must_be_positive():
    assert ScanConfig(fastscan_ratios=(5.0, 40.0)).fastscan_ratios == (5.0, 40.0)
    for ratios in ((10.0, 0.0), (-5.0,)):
        with pytest.raises(ValidationError):
            ScanConfig(fastscan_ratios=ratios)


def test_overlay_is_off_by_default():
    assert NoiseConfig().overlay_noise('laser') is None
    noise = NoiseConfig(overlay=True).overlay_noise('laser')
    assert noise.se_rate_per_ion > 0
    assert noise.spam_error == pytest.approx(0.017)
    assert noise.heating_rate == 0.0
    assert not noise.is_stochastic


def test_noise_overrides():
    noise = NoiseConfig(spam_error=0.03, carrier_fast_tau_us=5.0, debye_waller=False).to_noise('microwave')
    assert noise.spam_error == 0.03
    assert noise.carrier_fast_tau == pytest.approx(5e-6)
    assert noise.debye_waller is None
    warm = NoiseConfig(n_bar_com=1.0).to_noise('microwave')
    assert warm.debye_waller.n_bar_com == 1.0


def test_run_config_rejects_unknown_keys():
    with pytest.raises(ValidationError):
        RunConfig.model_validate({'physics': {'n_maxx': 4}})
    with pytest.raises(ValidationError):
        RunConfig(shots=0)


def test_config_error_names_the_key_path():
    err = ConfigError('must be positive', key_path='physics.n_max')
    assert err.key_path == 'physics.n_max'
    assert str(err).startswith('physics.n_max:')


def test_load_json_document_errors(tmp_path):
    with pytest.raises(ConfigError):
        load_json_document(tmp_path / 'missing.json')
    broken = tmp_path / 'broken.json'
    broken.write_text('{"variant": ', encoding='utf-8')
    with pytest.raises(ConfigError):
        load_json_document(broken)
    listing = tmp_path / 'list.json'
    listing.write_text('[1, 2]', encoding='utf-8')
    with pytest.raises(ConfigError) as info:
        load_json_document(listing)
    assert info.value.key_path == str(listing)


def test_to_jsonable_handles_numpy_and_complex():
    value = to_jsonable({'a': np.float64(0.5), 'b': np.arange(2), 'c': 1 + 2j, 'd': (np.bool_(True),)})
    assert value == {'a': 0.5, 'b': [0, 1], 'c': [1.0, 2.0], 'd': [True]}
    assert dump_json({'b': 1, 'a': 2}, indent=None) == '{"a":2,"b":1}'


def test_artifact_config_leaves_out_execution_details():
    config = RunConfig(workers=3, output_dir='/tmp/somewhere')
    document = config_document(config)
    assert 'workers' not in document
    assert 'output_dir' not in document
    assert document['variant'] == 'microwave'


def test_json_artifact_layout():
    text = json_artifact('calibrate', RunConfig(), {'fidelity': 0.99995})
    assert text.endswith('\n')
    document = json.loads(text)
    assert document['schema'] == ARTIFACT_SCHEMA
    assert document['command'] == 'calibrate'
    assert document['result'] == {'fidelity': 0.99995}
    assert list(document) == sorted(document)


def test_csv_artifact_layout():
    text = csv_artifact(RunConfig(seed=7), ('t_us', 'P_dd'), [(0.0, 1.0), (0.1, 0.5)])
    lines = text.splitlines()
    assert lines[0] == f"# schema: {ARTIFACT_SCHEMA}"
    assert json.loads(lines[1].removeprefix('# config: '))['seed'] == 7
    assert lines[2] == 't_us,P_dd'
    assert lines[3] == '0,1'
    assert lines[4] == '0.10000000000000001,0.5'


def test_csv_artifact_rejects_ragged_rows():
    with pytest.raises(ValueError):
        csv_artifact(RunConfig(), ('a', 'b'), [(1.0,)])
