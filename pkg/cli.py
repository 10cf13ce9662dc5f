# cli.py
"""
Batch runner for the dressed-state gate simulator.

Commands:
- calibrate: sideband amplitude search for the chosen variant.
- evolve:    populations against interrogation time.
- parity:    parity oscillation under a phase-scanned analysis pulse.
- budget:    error budget next to the measured reference column.
- fastscan:  fast-term error against Omega_C / delta.

Configuration precedence: variant preset < --config file < command-line flags.
Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import math
import sys
from collections.abc import Callable
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import numpy as np
from pydantic import ValidationError

import os_env
from core.constants import N_BAR_STRETCH
from core.states import initial_state
from core.states import thermal_state
from dynamics.ensemble import monte_carlo_ensemble
from helper.artifacts import write_csv_artifact
from helper.artifacts import write_json_artifact
from helper.json_helper import load_json_document
from helper.workers import map_ordered
from measurement.fidelity import bell_fidelity
from measurement.histogram import fit_poisson_mixture
from measurement.histogram import simulate_histogram
from measurement.parity import phase_grid
from measurement.parity import parity_scan
from measurement.populations import populations_from_state
from models.config import RunConfig
from models.errors import ConfigError
from models.errors import PropagationError
from models.errors import SimulationError
from models.noise import CALIBRATED_FIELDS
from models.noise import NoiseModel
from models.params import GateParams
from models.readout import DetectionModel
from models.readout import PoissonMixtureFit
from models.readout import PopulationProbs
from models.state import CompositeState
from noise.budget import error_budget_report
from noise.probes import fast_term_error_scan
from noise.sampling import sample_noise
from noise.spam import apply_spam
from sequences.calibration import calibrate_sideband_amplitude
from sequences.compiler import gate_duration
from sequences.compiler import gate_sequence
from sequences.compiler import scan_sequence
from sequences.runner import analyzed_populations
from sequences.runner import run_experiment

logger = logging.getLogger('cli')

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

LOG_FORMAT = '[%(name)s] %(levelname)s %(message)s'


# ---------------------------------------------------------
# CONFIGURATION
# ---------------------------------------------------------

def resolve_config(args: argparse.Namespace) -> RunConfig:
    """
    Merges the config file with command-line overrides and validates the result.

    Raises:
        ConfigError: unreadable file or a field that fails validation; the
            message names the offending key path.
    """
    document: dict[str, Any] = load_json_document(args.config) if args.config else {}
    overrides = {
        'variant': args.variant,
        'seed': args.seed,
        'shots': args.shots,
        'mode': args.mode,
        'output_dir': args.out,
        'workers': args.workers,
    }
    document.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig.model_validate(document)
    except ValidationError as e:
        first = e.errors()[0]
        key_path = '.'.join(str(part) for part in first['loc'])
        raise ConfigError(first['msg'], key_path=key_path) from e


def calibrated_params(config: RunConfig, variant: str | None = None) -> GateParams:
    """Gate parameters with Omega_0 from the calibration unless the config pins it."""
    variant = variant or config.variant
    params = config.physics.to_params(variant)
    if config.physics.omega_0_khz is not None:
        return params
    result = calibrate_sideband_amplitude(
        params.delta, variant, params, config.integrator, grid_points=config.scan.calibration_grid,
    )
    return result.apply(params)


def _point_seeds(seed: int, n: int) -> list[int]:
    return [int(child.generate_state(1)[0]) for child in np.random.SeedSequence(seed).spawn(n)]


def _out_path(config: RunConfig, name: str) -> Path:
    return Path(config.output_dir) / name


# ---------------------------------------------------------
# SHARED EXPERIMENT PLUMBING
# ---------------------------------------------------------

def final_state(
    config: RunConfig,
    params: GateParams,
    noise: NoiseModel | None,
    duration: float | None = None,
    seed: int | None = None,
    workers: int | None = None,
) -> CompositeState:
    """
    State after the gate (or after `duration` of sideband time), averaged over
    drive-noise draws when the overlay holds stochastic channels.
    """
    seq = gate_sequence(config.variant, params) if duration is None else scan_sequence(config.variant, params, duration)
    start = initial_state('dd', motion=thermal_state(config.physics.stretch_occupation(), params.cutoff))
    dynamics_noise = noise.without_spam() if noise is not None else None
    if dynamics_noise is None or not dynamics_noise.is_stochastic:
        return run_experiment(seq, start, params, dynamics_noise, config.integrator)
    result = monte_carlo_ensemble(
        lambda draw: run_experiment(seq, start, params, dynamics_noise, config.integrator, draw=draw),
        lambda rng: sample_noise(dynamics_noise, seq.total_duration, rng),
        config.scan.mc_shots,
        config.seed if seed is None else seed,
        workers,
    )
    return result.mean


def readout(
    config: RunConfig,
    p: PopulationProbs,
    seed: int,
    det: DetectionModel | None = None,
) -> PopulationProbs | PoissonMixtureFit:
    """Exact populations, or a mixture fit to a simulated histogram in sampled mode."""
    if config.mode == 'exact':
        return p
    det = det or DetectionModel()
    return fit_poisson_mixture(simulate_histogram(p, det, config.shots, seed), det)


def _spam(noise: NoiseModel | None) -> float:
    return noise.spam_error if noise is not None else 0.0


def _calibration_flags(noise: NoiseModel | None) -> list[str]:
    if noise is None:
        return []
    return sorted(f for f in CALIBRATED_FIELDS if getattr(noise, f, 0.0))


# ---------------------------------------------------------
# COMMANDS
# ---------------------------------------------------------

def cmd_calibrate(config: RunConfig) -> dict[str, Any]:
    params = config.params()
    result = calibrate_sideband_amplitude(
        params.delta, config.variant, params, config.integrator, grid_points=config.scan.calibration_grid,
    )
    record = {
        'omega_0_rad_s': result.omega_0_rabi,
        'omega_0_khz': result.omega_0_rabi / (2.0 * math.pi * 1e3),
        'fidelity': result.fidelity,
        'evaluations': result.evaluations,
        'scan': [list(point) for point in result.scan],
    }
    write_json_artifact(_out_path(config, f"calibrate_{config.variant}.json"), 'calibrate', config, record)
    return record


def cmd_evolve(config: RunConfig) -> list[list[float]]:
    params = calibrated_params(config)
    noise = config.noise.overlay_noise(config.variant)
    t_max = (config.scan.evolve_max_us * 1e-6) if config.scan.evolve_max_us else gate_duration(config.variant, params)
    durations = [float(t) for t in np.linspace(0.0, t_max, config.scan.evolve_points)]
    seeds = _point_seeds(config.seed, len(durations))

    def point(index: int) -> list[float]:
        try:
            state = final_state(config, params, noise, durations[index], seed=seeds[index], workers=1)
        except PropagationError as e:
            raise PropagationError(
                f"evolve point {index}: {e.detail}", t=e.t, segment=e.segment, worst_local_error=e.worst_local_error,
            ) from e
        result = readout(config, apply_spam(populations_from_state(state), _spam(noise)), seeds[index])
        if isinstance(result, PoissonMixtureFit):
            p, (e0, e1, e2) = result.populations, result.stderr
        else:
            p, (e0, e1, e2) = result, (0.0, 0.0, 0.0)
        return [durations[index] * 1e6, p.P2, p.P0, p.P1, e2, e0, e1]

    rows = map_ordered(point, list(range(len(durations))), config.workers)
    write_csv_artifact(
        _out_path(config, f"evolve_{config.variant}.csv"),
        config,
        ('t_us', 'P_dd', 'P_uu', 'P_anti', 'stderr_dd', 'stderr_uu', 'stderr_anti'),
        rows,
    )
    return rows


def cmd_parity(config: RunConfig) -> dict[str, Any]:
    params = calibrated_params(config)
    noise = config.noise.overlay_noise(config.variant)
    eps = _spam(noise)
    state = final_state(config, params, noise, workers=config.workers)
    phis = phase_grid(config.scan.parity_points)
    seeds = _point_seeds(config.seed, len(phis) + 1)
    seed_of = {float(phi): s for phi, s in zip(phis, seeds)}

    def point(phi: float) -> PopulationProbs | PoissonMixtureFit:
        p = apply_spam(analyzed_populations(state, phi, params), eps)
        return readout(config, p, seed_of[float(phi)])

    scan = parity_scan(point, phis, config.workers)

    base = readout(config, apply_spam(populations_from_state(state), eps), seeds[-1])
    if isinstance(base, PoissonMixtureFit):
        populations = base.populations
        fidelity = bell_fidelity(
            populations.P0, populations.P2, scan.fit.A,
            sigma_p0=base.stderr[0], sigma_p2=base.stderr[2], sigma_a=scan.fit.stderr_A, cov_p0_p2=base.cov_p0_p2,
        )
    else:
        populations = base
        fidelity = bell_fidelity(populations.P0, populations.P2, scan.fit.A, sigma_a=scan.fit.stderr_A)

    stderr = scan.stderr or (0.0,) * len(scan.phis)
    write_csv_artifact(
        _out_path(config, f"parity_{config.variant}.csv"),
        config,
        ('phi', 'parity', 'stderr'),
        zip(scan.phis, scan.parity, stderr),
    )
    record = {
        'fit': scan.fit.model_dump(),
        'populations': populations.model_dump(),
        'fidelity': fidelity.model_dump(),
        'calibrated_inputs': _calibration_flags(noise),
    }
    write_json_artifact(_out_path(config, f"parity_{config.variant}.json"), 'parity', config, record)
    logger.info(f"{config.variant} parity: A = {scan.fit.A:.4f}, F = {fidelity.fidelity:.4f}")
    return record


def cmd_budget(config: RunConfig) -> dict[str, Any]:
    params = calibrated_params(config)
    noise = config.noise_model()
    budget = error_budget_report(
        params,
        noise,
        config.variant,
        cfg=config.integrator,
        shots=config.scan.mc_shots,
        seed=config.seed,
        workers=config.workers,
        n_bar_stretch=config.physics.stretch_occupation(N_BAR_STRETCH),
        include_stretch_thermal=config.scan.include_stretch_thermal,
    )
    record = {
        **budget.model_dump(),
        'reference_total': budget.reference_total,
        'calibrated_inputs': _calibration_flags(noise),
    }
    write_json_artifact(_out_path(config, f"budget_{config.variant}.json"), 'budget', config, record)
    table = budget.as_table()
    path = _out_path(config, f"budget_{config.variant}.txt")
    path.write_text(table + '\n', encoding='utf-8')
    print(table)
    return record


def cmd_fastscan(config: RunConfig) -> list[tuple[float, float]]:
    variant = config.scan.fastscan_variant
    params = config.physics.to_params(variant)
    rows = fast_term_error_scan(
        config.scan.fastscan_ratios,
        variant,
        params,
        config.integrator,
        grid_points=config.scan.calibration_grid,
        workers=config.workers,
    )
    write_csv_artifact(_out_path(config, f"fastscan_{variant}.csv"), config, ('ratio', 'infidelity'), rows)
    return rows


COMMANDS: dict[str, Callable[[RunConfig], Any]] = {
    'calibrate': cmd_calibrate,
    'evolve': cmd_evolve,
    'parity': cmd_parity,
    'budget': cmd_budget,
    'fastscan': cmd_fastscan,
}


# ---------------------------------------------------------
# MAIN ENTRY POINT
# ---------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='dressed-gate', description='Dressed-state phase gate simulator')
    parser.add_argument('command', choices=sorted(COMMANDS))
    parser.add_argument('--config', help='JSON run configuration')
    parser.add_argument('--seed', type=int, help='master seed for every random stream')
    parser.add_argument('--out', help='output directory for artifacts')
    parser.add_argument('--variant', choices=('microwave', 'laser'))
    parser.add_argument('--shots', type=int, help='detection shots per point in sampled mode')
    parser.add_argument('--workers', type=int, help='worker threads (default from the environment)')
    mode = parser.add_mutually_exclusive_group()
    mode.add_argument('--exact', dest='mode', action='store_const', const='exact')
    mode.add_argument('--sampled', dest='mode', action='store_const', const='sampled')
    parser.add_argument('-v', '--verbose', action='store_true')
    return parser


def configure_logging(verbose: bool = False) -> None:
    level = logging.DEBUG if verbose else getattr(logging, os_env.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)
    try:
        config = resolve_config(args)
    except ConfigError as e:
        logger.error(f"invalid configuration: {e}")
        return EXIT_CONFIG

    try:
        COMMANDS[args.command](config)
    except SimulationError as e:
        logger.error(f"{args.command} failed: {e}")
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
