"""Distributed online estimator: innovation + consensus + shrinkage.

Each node updates its estimate with a local least-mean-square innovation
term, a consensus move toward the (noisy) messages of its in-neighbours,
and a vanishing ridge-style shrinkage pulling the estimate toward zero:

    x_i+ = x_i + a(k) H_i^T (y_i - H_i x_i)
               + b(k) sum_j w_ij (mu_ji - x_i)
               - lambda(k) x_i.

``node_step`` evaluates exactly that; ``compact_step`` evaluates the
equivalent stacked recursion built from the graph Laplacian, the
block-diagonal observation matrix and the stacked noise factors.  The two
must agree to machine precision on identical draws — that equivalence is
the main structural test of the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig
from .errors import InvalidInputError
from .graphs import GraphSample, sample_graph
from .linalg import kron
from .noise import BoundCheckReport, build_WM
from .regression import RegressionSample, sample_regression

__all__ = [
    "GainSchedule",
    "GainConditionReport",
    "EstimatorState",
    "TrajectoryRecord",
    "validate_gains",
    "node_step",
    "compact_step",
    "run_trajectory",
    "substream",
]


@dataclass(frozen=True)
class GainSchedule:
    """Power-law step sizes.

    ``a(k) = a_coef (k+1)^-a_exp`` weights the innovation, ``b`` the
    consensus term and ``lam`` the shrinkage, all evaluated at ``k + 1``
    so step 0 uses the coefficient itself.
    """

    a_coef: float
    a_exp: float
    b_coef: float
    b_exp: float
    lam_coef: float
    lam_exp: float

    def __post_init__(self):
        vals = (self.a_coef, self.a_exp, self.b_coef, self.b_exp, self.lam_coef, self.lam_exp)
        if any(not np.isfinite(v) or v < 0 for v in vals):
            raise InvalidInputError("gain coefficients and exponents must be finite and nonnegative")

    def a(self, k: int) -> float:
        return self.a_coef * (k + 1) ** -self.a_exp

    def b(self, k: int) -> float:
        return self.b_coef * (k + 1) ** -self.b_exp

    def lam(self, k: int) -> float:
        return self.lam_coef * (k + 1) ** -self.lam_exp

    def at(self, k: int) -> tuple[float, float, float]:
        return self.a(k), self.b(k), self.lam(k)

    @classmethod
    def from_config(cls, cfg: ExperimentConfig) -> "GainSchedule":
        g = cfg.gains
        return cls(g.a_coef, g.a_exp, g.b_coef, g.b_exp, g.lambda_coef, g.lambda_exp)


@dataclass(frozen=True)
class GainConditionReport:
    """Pass/fail of each clause of a step-size condition."""

    mode: str
    passed: bool
    checks: tuple[tuple[str, bool, str], ...]

    def failing(self) -> tuple[str, ...]:
        return tuple(name for name, ok, _ in self.checks if not ok)


def validate_gains(schedule: GainSchedule, mode: str = "C1") -> GainConditionReport:
    """Check a power-law schedule against one of the two admissibility
    conditions.

    For power laws the asymptotic clauses reduce to exponent
    inequalities: ``sum min(a, b)`` diverges iff both coefficients are
    positive and ``max(a_exp, b_exp) <= 1``; a power law is
    square-summable iff twice its exponent exceeds 1; and ``f = o(g)``
    iff f's exponent strictly exceeds g's (or f vanishes identically).
    """
    if mode not in ("C1", "C2"):
        raise InvalidInputError(f"mode must be 'C1' or 'C2', got {mode!r}")
    s = schedule
    slow = max(s.a_exp, s.b_exp)
    lam_zero = s.lam_coef == 0.0
    checks: list[tuple[str, bool, str]] = []

    diverges = s.a_coef > 0 and s.b_coef > 0 and slow <= 1.0
    checks.append(
        (
            "persistent-stepsizes",
            diverges,
            f"sum min(a,b) diverges iff a_coef,b_coef > 0 and max(a_exp, b_exp) <= 1; "
            f"max exponent is {slow}",
        )
    )
    if mode == "C1":
        checks.append(
            (
                "square-summable-gains",
                2 * s.a_exp > 1 and 2 * s.b_exp > 1,
                f"needs a_exp > 0.5 and b_exp > 0.5, got {s.a_exp}, {s.b_exp}",
            )
        )
        checks.append(
            (
                "summable-shrinkage",
                lam_zero or s.lam_exp > 1,
                "lambda identically zero" if lam_zero else f"needs lam_exp > 1, got {s.lam_exp}",
            )
        )
        checks.append(
            (
                "shrinkage-dominated",
                lam_zero or s.lam_exp > slow,
                "lambda identically zero"
                if lam_zero
                else f"lambda = o(min(a,b)) needs lam_exp > {slow}, got {s.lam_exp}",
            )
        )
        checks.append(
            (
                "slow-decay-ratio",
                True,
                "a(k)/a(k+1) -> 1 for every power law, so a(k) = O(a(k+1)) holds",
            )
        )
    else:
        vanish = (
            (s.a_coef == 0 or s.a_exp > 0)
            and (s.b_coef == 0 or s.b_exp > 0)
            and (lam_zero or s.lam_exp > 0)
        )
        checks.append(("vanishing-gains", vanish, "every nonzero gain needs a positive exponent"))
        checks.append(
            (
                "squared-gains-dominated",
                2 * s.a_exp > slow and 2 * s.b_exp > slow,
                f"a^2 + b^2 = o(min(a,b)) needs 2 a_exp > {slow} and 2 b_exp > {slow}",
            )
        )
        checks.append(
            (
                "shrinkage-dominated",
                lam_zero or s.lam_exp > slow,
                "lambda identically zero"
                if lam_zero
                else f"lambda = o(min(a,b)) needs lam_exp > {slow}, got {s.lam_exp}",
            )
        )
    return GainConditionReport(mode=mode, passed=all(ok for _, ok, _ in checks), checks=tuple(checks))


@dataclass(slots=True)
class EstimatorState:
    """Estimates of all nodes at one step; ``estimates`` has shape (N, n)."""

    step: int
    estimates: np.ndarray
    x0: np.ndarray


def node_step(
    state: EstimatorState,
    graph: GraphSample,
    regression: RegressionSample,
    messages: np.ndarray,
    gains: tuple[float, float, float],
) -> EstimatorState:
    """One update in per-node form.

    ``messages[i, j]`` is the (noisy) message node ``i`` received from
    node ``j``; entries for pairs with zero weight are ignored.  Messages
    must be present (finite) for every j with ``w_ij != 0``.
    """
    a, b, lam = gains
    x = state.estimates
    w = graph.adjacency
    h = regression.h_stacked
    # per-row residual against the owning node's estimate, then fold the
    # weighted rows back into per-node innovation vectors
    resid = regression.y - np.einsum("rn,rn->r", h, x[regression._row_node])
    innov = np.add.reduceat(h * resid[:, None], regression._starts, axis=0)
    consensus = np.einsum("ij,ijn->in", w, messages) - w.sum(axis=1)[:, None] * x
    new_x = (1.0 - lam) * x + a * innov + b * consensus
    return EstimatorState(step=state.step + 1, estimates=new_x, x0=state.x0)


def compact_step(
    state: EstimatorState,
    graph: GraphSample,
    regression: RegressionSample,
    xi: np.ndarray,
    gains: tuple[float, float, float],
    intensity,
) -> EstimatorState:
    """One update in stacked form: ``x+ = P x + a H^T y + b W M xi`` with
    ``P = (1 - lam) I - b (L (x) I_n) - a H^T H``.

    ``xi`` may be shaped ``(N, N, n)`` (receiver-major, like the message
    draws) or already flat of length ``N^2 n``.  Mathematically identical
    to :func:`node_step`; kept as an independent implementation so the
    two can be checked against each other.
    """
    a, b, lam = gains
    x = state.estimates
    n_nodes, dim = x.shape
    xf = x.reshape(-1)
    hb = regression.h_block
    lap_big = kron(graph.laplacian, np.eye(dim))
    xi_flat = np.asarray(xi, dtype=float).reshape(-1)
    if xi_flat.shape[0] != n_nodes * n_nodes * dim:
        raise InvalidInputError("xi must have N^2 n entries")
    w, m = build_WM(graph.adjacency, x, intensity)
    new_flat = (
        (1.0 - lam) * xf
        - b * (lap_big @ xf)
        - a * (hb.T @ (hb @ xf))
        + a * (hb.T @ regression.y)
        + b * (w @ (m @ xi_flat))
    )
    return EstimatorState(step=state.step + 1, estimates=new_flat.reshape(n_nodes, dim), x0=state.x0)


@dataclass
class TrajectoryRecord:
    """Everything recorded along one simulated run.

    Arrays are indexed by step ``0..horizon`` inclusive; row ``k`` holds
    the state *before* the update at ``k`` together with that step's
    draws, so ``v[k]`` is the total squared error ``sum_i |x_i(k) - x0|^2``
    and ``excess_losses[k, i]`` the per-step quantity
    ``0.5 sum_j |H_j(k) (x_i(k) - x0)|^2`` whose cumulative sums estimate
    regret.  ``cum_losses`` accumulates the raw losses
    ``0.5 sum_j |H_j(k) x_i(k) - y_j(k)|^2``.
    """

    seed: int
    horizon: int
    steps: np.ndarray
    v: np.ndarray
    err_norms: np.ndarray
    est_norms: np.ndarray
    gains_used: np.ndarray
    cum_losses: np.ndarray
    excess_losses: np.ndarray
    x_final: np.ndarray
    x0: np.ndarray
    bound_report: BoundCheckReport | None = None


def _sym_eigmax(g: np.ndarray) -> np.ndarray | float:
    """Largest eigenvalue of symmetric matrices, batched over leading axes.

    Closed forms up to 3x3 (trigonometric solution of the characteristic
    cubic), LAPACK beyond.  The bound checks of :func:`run_trajectory`
    evaluate this once per recorded step over the whole stacked history,
    where per-step eigendecompositions would dominate the run time.
    """
    m = g.shape[-1]
    if m == 1:
        return np.asarray(g)[..., 0, 0] + 0.0
    if m == 2:
        a, b, c = g[..., 0, 0], g[..., 1, 1], g[..., 0, 1]
        return 0.5 * (a + b) + np.hypot(0.5 * (a - b), c)
    if m == 3:
        a, b, c = g[..., 0, 0], g[..., 1, 1], g[..., 2, 2]
        d, e, f = g[..., 0, 1], g[..., 0, 2], g[..., 1, 2]
        q = (a + b + c) / 3.0
        p = np.sqrt(
            ((a - q) ** 2 + (b - q) ** 2 + (c - q) ** 2 + 2.0 * (d * d + e * e + f * f)) / 6.0
        )
        safe = np.where(p > 0.0, p, 1.0)
        aa, bb, cc = (a - q) / safe, (b - q) / safe, (c - q) / safe
        dd, ee, ff = d / safe, e / safe, f / safe
        half_det = 0.5 * (
            aa * (bb * cc - ff * ff) - dd * (dd * cc - ff * ee) + ee * (dd * ff - bb * ee)
        )
        phi = np.arccos(np.clip(half_det, -1.0, 1.0)) / 3.0
        # p == 0 means the matrix is q I, whose only eigenvalue is q
        return np.where(p > 0.0, q + 2.0 * p * np.cos(phi), q)
    return np.linalg.eigvalsh(g)[..., -1]


def substream(master_seed: int, index: int) -> np.random.Generator:
    """Independent per-run generator: stream ``index`` under one master seed.

    Uses ``SeedSequence(master, spawn_key=(index,))``, so adding runs
    never perturbs earlier ones.
    """
    return np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(index,)))


def run_trajectory(
    config: ExperimentConfig,
    seed,
    horizon: int | None = None,
    check_bounds: bool = True,
) -> TrajectoryRecord:
    """Simulate one run: draw graph, observations and channel noise each
    step, record, then apply :func:`node_step`.

    ``seed`` may be an int or a ``SeedSequence``/``Generator``-compatible
    seed.  With ``check_bounds`` the stacked-factor norm bounds are
    verified (exactly, no tolerance) at every step from the closed forms.
    Horizon ``T`` records rows ``0..T`` and applies ``T`` updates; the
    draws at row ``T`` complete that row's losses.
    """
    horizon = config.horizon if horizon is None else int(horizon)
    if horizon < 0:
        raise InvalidInputError("horizon must be nonnegative")
    gp = config.graph.to_process()
    rp = config.regression.to_process(config.nodes, config.dim)
    meas = config.noise.measurement()
    chan = config.noise.channel()
    inten = config.noise.intensity()
    gains = GainSchedule.from_config(config)
    x0 = np.asarray(config.x0, dtype=float)
    x = np.asarray(config.init, dtype=float)
    n_nodes, dim = x.shape

    ar_hist = None
    if rp.kind == "ar-driven":
        ar_hist = (
            np.zeros((n_nodes, dim))
            if config.regression.ar_init is None
            else np.asarray(config.regression.ar_init, dtype=float)
        )

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    seed_label = seed if isinstance(seed, (int, np.integer)) else -1

    # The loop below only advances the recursion and stashes each step's
    # raw state and draws; every recorded statistic and bound check is
    # evaluated afterwards in stacked form, which is far cheaper than
    # per-step reductions on tiny arrays.
    rows = horizon + 1
    total_rows = rp.total_rows
    x_hist = np.empty((rows, n_nodes, dim))
    h_hist = np.empty((rows, total_rows, dim))
    y_hist = np.empty((rows, total_rows))
    y_clean_hist = np.empty((rows, total_rows))
    adj_hist = np.empty((rows, n_nodes, n_nodes)) if check_bounds else None
    f_max = np.empty(rows) if check_bounds else None

    state = EstimatorState(step=0, estimates=x, x0=x0)
    prev_state = None
    for k in range(rows):
        gs = sample_graph(gp, k, rng, prev_state)
        prev_state = gs.state
        reg = sample_regression(rp, x0, k, meas, rng, ar_hist)
        if ar_hist is not None:
            ar_hist = np.concatenate([reg.y[:, None], ar_hist[:, :-1]], axis=1)
        xi = chan.sample(rng, (n_nodes, n_nodes, dim))

        x = state.estimates
        x_hist[k] = x
        h_hist[k] = reg.h_stacked
        y_hist[k] = reg.y
        y_clean_hist[k] = reg.y_clean
        if check_bounds:
            adj_hist[k] = gs.adjacency
            f = inten.matrix(x)
            f_max[k] = f.max()
        elif k < horizon:
            f = inten.matrix(x)
        if k < horizon:
            messages = x[None, :, :] + f[:, :, None] * xi
            state = node_step(state, gs, reg, messages, gains.at(k))

    steps = np.arange(rows)
    k1 = steps + 1.0
    gains_used = np.column_stack(
        [
            gains.a_coef * k1**-gains.a_exp,
            gains.b_coef * k1**-gains.b_exp,
            gains.lam_coef * k1**-gains.lam_exp,
        ]
    )
    diff = x_hist - x0
    per_err = np.einsum("kij,kij->ki", diff, diff)
    v = per_err.sum(axis=1)
    err_norms = np.sqrt(per_err)
    est_norms = np.sqrt(np.einsum("kij,kij->ki", x_hist, x_hist))
    hx = h_hist @ x_hist.transpose(0, 2, 1)
    resid = y_hist[:, :, None] - hx
    cum_losses = np.cumsum(0.5 * np.einsum("kri,kri->ki", resid, resid), axis=0)
    hx -= y_clean_hist[:, :, None]
    excess = 0.5 * np.einsum("kri,kri->ki", hx, hx)

    report = None
    if check_bounds:
        w_lhs = np.sqrt(np.einsum("kij,kij->ki", adj_hist, adj_hist).max(axis=1))
        grams = adj_hist @ adj_hist.transpose(0, 2, 1)
        a_norms = np.sqrt(np.maximum(_sym_eigmax(grams), 0.0))
        w_margins = math.sqrt(n_nodes) * a_norms - w_lhs
        m_margins = (4.0 * inten.sigma**2 * v + 2.0 * inten.bias**2) - f_max**2
        report = BoundCheckReport(
            steps_checked=rows,
            w_violations=int((w_margins < 0.0).sum()),
            m_violations=int((m_margins < 0.0).sum()),
            min_w_margin=float(w_margins.min()),
            min_m_margin=float(m_margins.min()),
        )
    return TrajectoryRecord(
        seed=int(seed_label),
        horizon=horizon,
        steps=steps,
        v=v,
        err_norms=err_norms,
        est_norms=est_norms,
        gains_used=gains_used,
        cum_losses=cum_losses,
        excess_losses=excess,
        x_final=state.estimates.copy(),
        x0=x0,
        bound_report=report,
    )
