"""Least-squares spectroscopy fitter for single-emitter transmission traces.

The data axis is the detuning delta_omega = omega_q_nominal - omega_d swept by
the drive; the fitter estimates a center correction dc so the returned qubit
frequency is initial.omega_q + dc. A single low-power magnitude trace cannot
separate gamma_nr from gamma_phi (they enter the lineshape through gamma_2
nearly degenerately), so the fit parameters are

    gamma_r,   s = gamma_nr + 2 gamma_phi,   omega_q

with the fitted s reported directly. When a QubitParams is constructed from
the result it uses the convention gamma_nr = 0, gamma_phi = s/2, which leaves
gamma_1 equal to the fitted radiative rate.

Algorithm: damped Gauss-Newton (Levenberg damping on the normal equations)
with a numerically differenced Jacobian, in log-rate coordinates so rates stay
positive. Damping starts at 1e-3, the iteration cap is 200, and convergence is
declared when the relative residual change drops below 1e-10.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .single_qubit import QubitParams, transmission_analytic

DAMPING_INIT = 1e-3
MAX_ITERATIONS = 200
REL_RESIDUAL_TOL = 1e-10


class FitError(RuntimeError):
    """Fit rejected (unidentifiable data) or failed to converge."""


@dataclass(frozen=True)
class FitReport:
    """Fit diagnostics: residual norm, standard errors, iteration record."""

    residual_norm: float
    gamma_r: float
    s: float                       # gamma_nr + 2 gamma_phi
    omega_q: float
    stderr_gamma_r: float
    stderr_s: float
    stderr_omega_q: float
    n_iterations: int
    converged: bool
    magnitude_only: bool


def _model(theta: np.ndarray, delta_omega: np.ndarray, alpha: complex,
           omega_q0: float) -> np.ndarray:
    """Transmission model at log-rate parameters theta = (ln gr, ln s, dc)."""
    gamma_r = np.exp(theta[0])
    s = np.exp(theta[1])
    q = QubitParams(omega_q=omega_q0 + theta[2], gamma_r=gamma_r,
                    gamma_nr=0.0, gamma_phi=0.5 * s)
    return transmission_analytic(q, delta_omega + theta[2], alpha)


def _residuals(theta, delta_omega, target, alpha, omega_q0, magnitude_only):
    t = _model(theta, delta_omega, alpha, omega_q0)
    if magnitude_only:
        return np.abs(t) - target
    diff = t - target
    return np.concatenate([diff.real, diff.imag])


def _jacobian(theta, delta_omega, target, alpha, omega_q0, magnitude_only,
              linewidth_scale):
    """Forward-difference Jacobian of the residual vector."""
    r0 = _residuals(theta, delta_omega, target, alpha, omega_q0, magnitude_only)
    jac = np.empty((r0.size, theta.size))
    # Log-rate coordinates are O(1); the center offset scales with the linewidth.
    steps = np.array([1e-7, 1e-7, 1e-7 * linewidth_scale])
    for k in range(theta.size):
        tp = theta.copy()
        tp[k] += steps[k]
        jac[:, k] = (_residuals(tp, delta_omega, target, alpha, omega_q0,
                                magnitude_only) - r0) / steps[k]
    return r0, jac


def _noise_floor(values: np.ndarray) -> float:
    """Robust noise estimate from successive differences of an ordered trace."""
    diffs = np.diff(values)
    if diffs.size == 0:
        return 0.0
    return 1.4826 * np.median(np.abs(diffs)) / np.sqrt(2.0)


def fit_single_qubit(data, alpha: complex, initial: QubitParams,
                     magnitude_only: bool | None = None):
    """Fit (gamma_r, gamma_nr + 2 gamma_phi, omega_q) to a transmission trace.

    ``data`` is a sequence of (delta_omega, t) pairs; t may be complex or a
    real magnitude |t|. Returns (QubitParams, FitReport). Raises FitError for
    unidentifiable (flat) data or non-convergence.
    """
    pairs = list(data)
    if len(pairs) < 6:
        raise FitError(f"need at least 6 data points, got {len(pairs)}")
    delta_omega = np.array([p[0] for p in pairs], dtype=float)
    t_raw = np.array([p[1] for p in pairs])
    if magnitude_only is None:
        magnitude_only = not np.iscomplexobj(t_raw)
    if magnitude_only:
        target = np.abs(t_raw).astype(float)
    else:
        target = t_raw.astype(complex)

    # Identifiability guard: a trace with no resonance feature above its own
    # noise floor pins none of the parameters.
    order = np.argsort(delta_omega)
    magnitudes = np.abs(target)[order]
    floor = _noise_floor(magnitudes)
    if np.ptp(magnitudes) <= max(3.0 * floor, 1e-12):
        raise FitError("data is flat within its noise floor; "
                       "no resonance to fit (unidentifiable)")

    s0 = initial.gamma_nr + 2.0 * initial.gamma_phi
    if s0 <= 0:
        s0 = 1e-4 * initial.gamma_r
    theta = np.array([np.log(initial.gamma_r), np.log(s0), 0.0])
    linewidth_scale = initial.gamma_2

    lam = DAMPING_INIT
    r = _residuals(theta, delta_omega, target, alpha, initial.omega_q, magnitude_only)
    rss = float(r @ r)
    n_iter = 0
    converged = False
    for n_iter in range(1, MAX_ITERATIONS + 1):
        r, jac = _jacobian(theta, delta_omega, target, alpha, initial.omega_q,
                           magnitude_only, linewidth_scale)
        jtj = jac.T @ jac
        jtr = jac.T @ r
        accepted = False
        for _ in range(25):
            damped = jtj + lam * np.diag(np.maximum(np.diag(jtj), 1e-30))
            try:
                step = np.linalg.solve(damped, -jtr)
            except np.linalg.LinAlgError:
                lam *= 10.0
                continue
            theta_new = theta + step
            r_new = _residuals(theta_new, delta_omega, target, alpha,
                               initial.omega_q, magnitude_only)
            rss_new = float(r_new @ r_new)
            if np.isfinite(rss_new) and rss_new <= rss:
                accepted = True
                break
            lam *= 10.0
        if not accepted:
            # Damping saturated: the current point is a numerical minimum.
            converged = True
            break
        improvement = rss - rss_new
        theta, rss = theta_new, rss_new
        lam = max(lam / 10.0, 1e-15)
        if improvement <= REL_RESIDUAL_TOL * max(rss, 1e-300):
            converged = True
            break

    if not converged:
        raise FitError(f"no convergence after {MAX_ITERATIONS} iterations "
                       f"(residual norm {np.sqrt(rss):.3e}, damping {lam:.1e})")

    gamma_r = float(np.exp(theta[0]))
    s = float(np.exp(theta[1]))
    omega_q = initial.omega_q + float(theta[2])

    # Standard errors: delta method on the log-rate covariance from the
    # Jacobian at the optimum.
    r, jac = _jacobian(theta, delta_omega, target, alpha, initial.omega_q,
                       magnitude_only, linewidth_scale)
    dof = max(r.size - theta.size, 1)
    sigma2 = float(r @ r) / dof
    try:
        cov = sigma2 * np.linalg.inv(jac.T @ jac)
        errs = np.sqrt(np.maximum(np.diag(cov), 0.0))
        stderr_gamma_r = gamma_r * errs[0]
        stderr_s = s * errs[1]
        stderr_omega_q = errs[2]
    except np.linalg.LinAlgError:
        stderr_gamma_r = stderr_s = stderr_omega_q = np.inf

    params = QubitParams(omega_q=omega_q, gamma_r=gamma_r,
                         gamma_nr=0.0, gamma_phi=0.5 * s)
    report = FitReport(residual_norm=float(np.sqrt(rss)),
                       gamma_r=gamma_r, s=s, omega_q=omega_q,
                       stderr_gamma_r=stderr_gamma_r, stderr_s=stderr_s,
                       stderr_omega_q=stderr_omega_q,
                       n_iterations=n_iter, converged=converged,
                       magnitude_only=magnitude_only)
    return params, report
