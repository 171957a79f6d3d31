"""Command-line entry point.

    qdiode <mode> --config <file.json> [--out <dir>] [--seed <n>] [--threads <n>]

Modes: steady-state, sweep-power, sweep-frequency, spectrum, fit, mirror-mc.
Each run writes its data files plus run_manifest.json into the output
directory. Exit codes: 0 success, 2 configuration error, 3 solver error,
4 fit error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import io
from .config import MODES, ConfigError, RunConfig, load
from .diode import (DiodeConfig, SweepRow, build_diode_liouvillian,
                    dark_state_population, diode_efficiency, diode_output_ops,
                    operating_point, transmission)
from .fitting import FitError, fit_single_qubit
from .mirror import spawn_seeds, sweep_row
from .operators import SolverError, expectation, steady_state
from .single_qubit import (DriveConfig, QubitParams,
                           build_single_qubit_liouvillian,
                           single_qubit_output_ops)
from .spectrum import (SpectrumError, fit_lorentzian, linewidth_estimate,
                       predicted_linewidth, psd)

TWO_PI = 2.0 * math.pi

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_FIT = 4


def _diode_config(p: dict) -> DiodeConfig:
    """Two-qubit device from validated internal-unit parameters."""
    gamma_bar = math.sqrt(p["gamma_r1_hz"] * p["gamma_r2_hz"])
    delta = p["delta"]
    det1 = p.get("detuning1_hz")
    det2 = p.get("detuning2_hz")
    if det1 is None:
        det1 = -delta * gamma_bar
    if det2 is None:
        det2 = 0.0
    q1 = QubitParams(omega_q=det1, gamma_r=p["gamma_r1_hz"],
                     gamma_nr=p.get("gamma_nr_hz", 0.0),
                     gamma_phi=p.get("gamma_phi_hz", 0.0))
    q2 = QubitParams(omega_q=det2, gamma_r=p["gamma_r2_hz"],
                     gamma_nr=p.get("gamma_nr_hz", 0.0),
                     gamma_phi=p.get("gamma_phi_hz", 0.0))
    return DiodeConfig.from_delta(q1, q2, omega_d=0.0, delta=delta)


def _sweep_sides(p: dict) -> tuple[str, ...]:
    if p.get("alpha", 0.0) != 0.0:
        return ("forward",)
    if p.get("beta", 0.0) != 0.0:
        return ("reverse",)
    return ("forward", "reverse")


def _pmap(fn, items, threads: int) -> list:
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


# -----------------------------------------------------------------------------
#                               Modes
# -----------------------------------------------------------------------------

def _run_steady_state(cfg: RunConfig, out_dir: str, threads: int):
    p = cfg.params
    c = _diode_config(p)
    gamma_bar = c.gamma_bar
    payload: dict = {"gamma_bar_hz": gamma_bar / TWO_PI}

    alpha = p.get("alpha", 0.0) * math.sqrt(gamma_bar)
    beta = p.get("beta", 0.0) * math.sqrt(gamma_bar)
    if alpha != 0.0 or beta != 0.0:
        cc = c.with_amplitudes(alpha, beta)
        rho = steady_state(build_diode_liouvillian(cc))
        a_out, b_out = diode_output_ops(cc)
        payload["general"] = {
            "alpha_over_sqrt_gammabar": p.get("alpha", 0.0),
            "beta_over_sqrt_gammabar": p.get("beta", 0.0),
            "dark_population": dark_state_population(rho),
            "flux_a_over_gammabar": float(
                expectation(a_out.conj().T @ a_out, rho).real) / gamma_bar,
            "flux_b_over_gammabar": float(
                expectation(b_out.conj().T @ b_out, rho).real) / gamma_bar,
            "populations": [float(rho[i, i].real) for i in range(4)],
        }
    else:
        power = p.get("p_over_gammabar", 0.0) * gamma_bar
        op = operating_point(c, power)
        payload["operating_point"] = {
            "p_over_gammabar": p.get("p_over_gammabar", 0.0),
            "t_forward": [op.t_forward.real, op.t_forward.imag],
            "t_reverse": [op.t_reverse.real, op.t_reverse.imag],
            "t_forward_abs": abs(op.t_forward),
            "t_reverse_abs": abs(op.t_reverse),
            "efficiency": op.efficiency,
            "dark_population_forward": op.dark_population_forward,
            "dark_population_reverse": op.dark_population_reverse,
        }
    path = os.path.join(out_dir, "steady_state.json")
    io.write_json(path, payload)
    return [path], [], EXIT_OK


def _run_sweep_power(cfg: RunConfig, out_dir: str, threads: int):
    p = cfg.params
    c = _diode_config(p)
    gamma_bar = c.gamma_bar
    powers = np.geomspace(p["power_min_over_gammabar"],
                          p["power_max_over_gammabar"],
                          p["n_powers"]) * gamma_bar
    sides = _sweep_sides(p)
    nan = float("nan")

    def solve(power: float) -> SweepRow:
        try:
            t_f = t_r = complex(nan, nan)
            d_f = d_r = nan
            amp = math.sqrt(power)
            if "forward" in sides:
                cc = c.with_amplitudes(amp, 0.0)
                t_f = transmission(cc, "forward")
                d_f = dark_state_population(
                    steady_state(build_diode_liouvillian(cc)))
            if "reverse" in sides:
                cc = c.with_amplitudes(0.0, amp)
                t_r = transmission(cc, "reverse")
                d_r = dark_state_population(
                    steady_state(build_diode_liouvillian(cc)))
            eff = (diode_efficiency(t_f, t_r) if len(sides) == 2 else nan)
            return SweepRow(power=power, t_forward=t_f, t_reverse=t_r,
                            efficiency=eff, dark_population_forward=d_f,
                            dark_population_reverse=d_r)
        except (SolverError, ValueError) as exc:
            return SweepRow(power=power, t_forward=complex(nan, nan),
                            t_reverse=complex(nan, nan), efficiency=nan,
                            dark_population_forward=nan,
                            dark_population_reverse=nan, error=str(exc))

    rows = _pmap(solve, powers, threads)
    path = os.path.join(out_dir, "power_sweep.csv")
    io.write_sweep_csv(path, rows, gamma_bar)
    notes = [f"p/gammabar = {r.power / gamma_bar:.6g}: {r.error}"
             for r in rows if r.error]
    return [path], notes, EXIT_OK


def _run_sweep_frequency(cfg: RunConfig, out_dir: str, threads: int):
    p = cfg.params
    q = QubitParams(omega_q=0.0, gamma_r=p["gamma_r_hz"],
                    gamma_nr=p.get("gamma_nr_hz", 0.0),
                    gamma_phi=p.get("gamma_phi_hz", 0.0))
    amp = math.sqrt(p["power_over_gamma_r"] * q.gamma_r)
    half_span = p["span_linewidths"] * q.gamma_2
    grid = np.linspace(-half_span, half_span, p["n_points"])
    drive_beta = p.get("beta", 0.0) != 0.0

    def solve(delta_omega: float) -> complex:
        # The file axis is delta_omega = omega_q - omega_d; in the rotating
        # frame only this difference enters.
        qq = QubitParams(omega_q=delta_omega, gamma_r=q.gamma_r,
                         gamma_nr=q.gamma_nr, gamma_phi=q.gamma_phi)
        d = (DriveConfig(omega_d=0.0, alpha=0.0, beta=amp) if drive_beta
             else DriveConfig(omega_d=0.0, alpha=amp, beta=0.0))
        rho = steady_state(build_single_qubit_liouvillian(qq, d))
        a_out, b_out = single_qubit_output_ops(qq, d)
        out = b_out if drive_beta else a_out
        return complex(expectation(out, rho)) / amp

    t_vals = np.array(_pmap(solve, grid, threads))
    path = os.path.join(out_dir, "frequency_sweep.csv")
    io.write_transmission_csv(path, grid, t_vals)
    return [path], [], EXIT_OK


def _run_spectrum(cfg: RunConfig, out_dir: str, threads: int):
    p = cfg.params
    c = _diode_config(p)
    gamma_bar = c.gamma_bar
    amp = math.sqrt(p["p_over_gammabar"] * gamma_bar)
    direction = p["direction"]
    cc = (c.with_amplitudes(amp, 0.0) if direction == "forward"
          else c.with_amplitudes(0.0, amp))
    predicted = predicted_linewidth(c.delta, gamma_bar,
                                    c.q1.gamma_nr, c.q1.gamma_phi)
    width_scale = max(predicted, 2.0 * linewidth_estimate(c))
    half_span = 0.5 * p["span_linewidths"] * width_scale
    grid = np.linspace(-half_span, half_span, p["n_freq"])

    result = psd(cc, direction, p["port"], grid, n_taus=p["n_taus"])
    notes = []
    code = EXIT_OK
    if p["fit"]:
        try:
            result = result.with_fit(fit_lorentzian(result))
        except SpectrumError as exc:
            notes.append(f"lorentzian fit failed: {exc}")
            code = EXIT_FIT

    path = os.path.join(out_dir, "spectrum.csv")
    sidecar = io.write_spectrum_csv(path, result, sidecar_extra={
        "direction": direction,
        "port": p["port"],
        "predicted_fwhm_hz": (predicted + p.get("gamma_exc_hz", 0.0)) / TWO_PI,
        "p_over_gammabar": p["p_over_gammabar"],
    })
    return [path, sidecar], notes, code


def _run_fit(cfg: RunConfig, out_dir: str, threads: int):
    p = cfg.params
    delta_omega, t = io.read_transmission_csv(p["input_csv"])
    alpha = math.sqrt(p.get("power_over_gamma_r", 0.0) * p["initial_gamma_r_hz"])
    s0 = p.get("initial_s_hz")
    initial = QubitParams(omega_q=0.0, gamma_r=p["initial_gamma_r_hz"],
                          gamma_nr=0.0,
                          gamma_phi=0.5 * s0 if s0 is not None else 0.0)
    fitted, report = fit_single_qubit(list(zip(delta_omega, t)), alpha,
                                      initial,
                                      magnitude_only=p.get("magnitude_only"))
    payload = {
        "gamma_r_hz": report.gamma_r / TWO_PI,
        "s_hz": report.s / TWO_PI,
        "center_offset_hz": report.omega_q / TWO_PI,
        "stderr_gamma_r_hz": report.stderr_gamma_r / TWO_PI,
        "stderr_s_hz": report.stderr_s / TWO_PI,
        "stderr_center_offset_hz": report.stderr_omega_q / TWO_PI,
        "residual_norm": report.residual_norm,
        "n_iterations": report.n_iterations,
        "converged": report.converged,
        "magnitude_only": report.magnitude_only,
        "gamma_2_hz": fitted.gamma_2 / TWO_PI,
    }
    path = os.path.join(out_dir, "fit_result.json")
    io.write_json(path, payload)
    return [path], [], EXIT_OK


def _run_mirror_mc(cfg: RunConfig, out_dir: str, threads: int):
    p = cfg.params
    notes = []
    if "p_dark_fwd" in p:
        p_fwd, p_rev = p["p_dark_fwd"], p["p_dark_rev"]
    else:
        c = _diode_config(p)
        op = operating_point(c, p["p_over_gammabar"] * c.gamma_bar)
        p_fwd = min(max(op.dark_population_forward, 0.0), 1.0)
        p_rev = min(max(op.dark_population_reverse, 0.0), 1.0)
        notes.append(f"p_dark from diode steady state: fwd = {p_fwd:.6g}, "
                     f"rev = {p_rev:.6g}")
    powers = np.linspace(p["power_min"], p["power_max"], p["n_powers"])
    seeds = spawn_seeds(cfg.seed, 2 * powers.size)

    def solve(k: int):
        return sweep_row(powers[k], p_fwd, p_rev, p["sigma_w"],
                         p["n_samples"], seeds[2 * k], seeds[2 * k + 1],
                         p.get("dwell_samples", 0.0))

    rows = _pmap(solve, range(powers.size), threads)
    path = os.path.join(out_dir, "mirror_sweep.csv")
    io.write_mirror_csv(path, rows, cfg.seed)
    return [path], notes, EXIT_OK


_RUNNERS = {
    "steady-state": _run_steady_state,
    "sweep-power": _run_sweep_power,
    "sweep-frequency": _run_sweep_frequency,
    "spectrum": _run_spectrum,
    "fit": _run_fit,
    "mirror-mc": _run_mirror_mc,
}


# -----------------------------------------------------------------------------
#                             Entry point
# -----------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdiode",
        description="Waveguide quantum diode simulation and analysis")
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode in MODES:
        sp = sub.add_parser(mode)
        sp.add_argument("--config", required=True, help="JSON config file")
        sp.add_argument("--out", default=".", help="output directory")
        sp.add_argument("--seed", type=int, default=None,
                        help="override the config seed")
        sp.add_argument("--threads", type=int, default=1,
                        help="worker threads for sweep points")
    return parser


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    t0 = time.perf_counter()
    try:
        cfg = load(args.mode, args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("--seed must be nonnegative")
            cfg = RunConfig(mode=cfg.mode, echo=cfg.echo, params=cfg.params,
                            seed=args.seed)
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        os.makedirs(args.out, exist_ok=True)
        outputs, notes, code = _RUNNERS[cfg.mode](cfg, args.out, args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except FitError as exc:
        print(f"fit error: {exc}", file=sys.stderr)
        return EXIT_FIT
    except (SolverError, SpectrumError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (OSError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    wall = time.perf_counter() - t0
    io.write_manifest(args.out, cfg.mode, cfg.echo, cfg.seed, wall,
                      outputs, notes)
    for path in outputs:
        print(path)
    for note in notes:
        print(f"note: {note}", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())
