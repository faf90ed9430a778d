"""Per-node observation models y_i(k) = H_i(k) x0 + v_i(k).

Each node ``i`` observes the unknown n-vector through its own random
matrix ``H_i(k)`` of shape ``(n_i, n)``.  Process kinds:

``fixed``
    constant matrices;
``entrywise-uniform``
    ``H_i(k) = base_i + coef_i * u`` with a fresh uniform draw per active
    cell (cells where ``coef_i`` is nonzero) per step;
``bernoulli-failure``
    ``H_i(k) = mu_i(k) * pattern_i`` with ``mu_i(k)`` i.i.d. Bernoulli —
    the whole sensor drops out when the draw fails;
``ar-driven``
    scalar autoregression per node: ``H_i(k)`` is the row of the last
    ``n`` outputs and the unknown parameter is the AR coefficient vector,
    so ``y_i(k) = H_i(k) x0 + v_i(k)`` is the recursion itself.

Entrywise-uniform and bernoulli-failure have closed-form conditional
Grams; ar-driven does not (its regressor is a function of past outputs)
and must go through the explicit Monte Carlo helper.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, UnsupportedAnalyticError
from .graphs import ConditionalExpectation
from .linalg import as_matrix, block_diag
from .noise import MeasurementNoise

__all__ = [
    "RegressionProcess",
    "RegressionSample",
    "fixed_regression",
    "entrywise_uniform_regression",
    "bernoulli_failure_regression",
    "ar_driven_regression",
    "freeze_regression",
    "sample_regression",
    "conditional_expected_node_gram",
    "conditional_expected_gram",
    "spatio_temporal_gram",
    "monte_carlo_expected_gram",
    "support_gram_norm_bound",
]

_KINDS = ("fixed", "entrywise-uniform", "bernoulli-failure", "ar-driven")


@dataclass(frozen=True, eq=False)
class RegressionProcess:
    kind: str
    nodes: int
    dim: int
    node_dims: tuple[int, ...]
    h_nodes: tuple[np.ndarray, ...] | None = None
    base: tuple[np.ndarray, ...] | None = None
    coef: tuple[np.ndarray, ...] | None = None
    low: float = 0.0
    high: float = 1.0
    active_prob: float = 1.0
    # stacked-row offset of each node's block, derived from node_dims
    offsets: tuple[int, ...] = field(default=(), repr=False)
    # sampling fast path: stacked constant part, flat indices of the random
    # cells, their coefficients, and the node index of every stacked row
    _stacked: np.ndarray | None = field(default=None, repr=False)
    _active_flat: np.ndarray | None = field(default=None, repr=False)
    _active_scale: np.ndarray | None = field(default=None, repr=False)
    _row_node: np.ndarray | None = field(default=None, repr=False)
    _starts: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise InvalidInputError(f"unknown regression kind {self.kind!r}")
        setattr_ = object.__setattr__
        setattr_(self, "offsets", _offsets(self.node_dims))
        setattr_(self, "_row_node", np.repeat(np.arange(self.nodes), self.node_dims))
        setattr_(self, "_starts", np.asarray(self.offsets[:-1], dtype=np.intp))
        if self.kind == "fixed":
            setattr_(self, "_stacked", _lock(np.concatenate(self.h_nodes, axis=0)))
        elif self.kind == "entrywise-uniform":
            setattr_(self, "_stacked", _lock(np.concatenate(self.base, axis=0)))
            coef = np.concatenate(self.coef, axis=0)
            flat = np.flatnonzero(coef)
            setattr_(self, "_active_flat", flat)
            setattr_(self, "_active_scale", coef.ravel()[flat].copy())
        elif self.kind == "bernoulli-failure":
            setattr_(self, "_stacked", _lock(np.concatenate(self.coef, axis=0)))

    @property
    def total_rows(self) -> int:
        return sum(self.node_dims)


class RegressionSample:
    """One step's realized observation model.

    Attributes: ``step``; ``h_nodes`` (tuple of per-node ``(n_i, n)``
    matrices); ``h_stacked`` (all rows stacked, ``(sum n_i, n)``);
    ``h_block`` (block-diagonal ``(sum n_i, N n)``, built on first use);
    ``y`` (stacked measurements); ``y_clean`` (the noise-free part
    ``H x0``); ``offsets`` (row offset of each node's block).
    """

    __slots__ = ("step", "h_nodes", "h_stacked", "y", "y_clean", "offsets",
                 "_row_node", "_starts", "_h_block")

    def __init__(self, step, h_nodes, h_stacked, y, y_clean, offsets, row_node, starts):
        self.step = step
        self.h_nodes = h_nodes
        self.h_stacked = h_stacked
        self.y = y
        self.y_clean = y_clean
        self.offsets = offsets
        self._row_node = row_node
        self._starts = starts
        self._h_block = None

    @property
    def h_block(self) -> np.ndarray:
        if self._h_block is None:
            self._h_block = block_diag(self.h_nodes)
        return self._h_block


def _offsets(node_dims) -> tuple[int, ...]:
    out = [0]
    for d in node_dims:
        out.append(out[-1] + d)
    return tuple(out)


def _lock(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def _check_h_list(h_list, name: str) -> tuple[tuple[np.ndarray, ...], int]:
    mats = tuple(as_matrix(h, f"{name}[{i}]") for i, h in enumerate(h_list))
    if not mats:
        raise InvalidInputError("need at least one node")
    dim = mats[0].shape[1]
    for m in mats:
        if m.shape[1] != dim:
            raise InvalidInputError("all per-node matrices must share the column count")
        m.flags.writeable = False
    return mats, dim


def fixed_regression(h_nodes) -> RegressionProcess:
    """Constant per-node observation matrices."""
    mats, dim = _check_h_list(h_nodes, "h_nodes")
    return RegressionProcess(
        kind="fixed",
        nodes=len(mats),
        dim=dim,
        node_dims=tuple(m.shape[0] for m in mats),
        h_nodes=mats,
    )


def entrywise_uniform_regression(base, coef, low: float = 0.0, high: float = 1.0) -> RegressionProcess:
    """``H_i(k) = base_i + coef_i * u``, fresh ``u ~ U(low, high)`` per
    nonzero cell of ``coef_i`` per step, independent across cells."""
    bases, dim = _check_h_list(base, "base")
    coefs, dim_c = _check_h_list(coef, "coef")
    if len(bases) != len(coefs) or dim != dim_c:
        raise InvalidInputError("base and coef must be equally shaped lists")
    for b, c in zip(bases, coefs):
        if b.shape != c.shape:
            raise InvalidInputError("base and coef must be equally shaped lists")
    if not (np.isfinite(low) and np.isfinite(high)) or low > high:
        raise InvalidInputError("need finite low <= high")
    return RegressionProcess(
        kind="entrywise-uniform",
        nodes=len(bases),
        dim=dim,
        node_dims=tuple(b.shape[0] for b in bases),
        base=bases,
        coef=coefs,
        low=float(low),
        high=float(high),
    )


def bernoulli_failure_regression(patterns, active_prob: float) -> RegressionProcess:
    """Whole-sensor dropout: node ``i`` observes through ``patterns[i]``
    with probability ``active_prob``, else through the zero matrix."""
    mats, dim = _check_h_list(patterns, "patterns")
    if not 0.0 <= active_prob <= 1.0:
        raise InvalidInputError("active_prob must lie in [0, 1]")
    return RegressionProcess(
        kind="bernoulli-failure",
        nodes=len(mats),
        dim=dim,
        node_dims=tuple(m.shape[0] for m in mats),
        coef=mats,
        active_prob=float(active_prob),
    )


def ar_driven_regression(nodes: int, order: int) -> RegressionProcess:
    """Scalar AR(``order``) outputs per node; the unknown parameter is the
    coefficient vector, so ``dim == order`` and every ``n_i == 1``."""
    if nodes < 1 or order < 1:
        raise InvalidInputError("nodes and order must be positive")
    return RegressionProcess(
        kind="ar-driven",
        nodes=int(nodes),
        dim=int(order),
        node_dims=(1,) * int(nodes),
    )


def freeze_regression(
    process: RegressionProcess,
    rng: np.random.Generator,
    ar_history: np.ndarray | None = None,
) -> RegressionProcess:
    """Draw the observation matrices once (at step 0) and reuse them
    forever, returning a fixed-kind process.

    A frozen draw is measurable from step 0 on, so its conditional Gram at
    any cut is the realized ``H^T H`` — which is exactly what the fixed
    kind returns.
    """
    noise = MeasurementNoise(kind="zero", std=0.0)
    sample = sample_regression(process, np.zeros(process.dim), 0, noise, rng, ar_history)
    return fixed_regression([h.copy() for h in sample.h_nodes])


def _stack_h(process: RegressionProcess, step: int, rng: np.random.Generator,
             ar_history: np.ndarray | None) -> np.ndarray:
    if process.kind == "fixed":
        # constant and write-locked, so every sample can share it
        return process._stacked
    if process.kind == "entrywise-uniform":
        out = process._stacked.copy()
        idx = process._active_flat
        if idx.size:
            # fresh uniform per random cell, in stacked row-major order
            out.ravel()[idx] += process._active_scale * rng.uniform(
                process.low, process.high, idx.size
            )
        return out
    if process.kind == "bernoulli-failure":
        active = rng.random(process.nodes) < process.active_prob
        return process._stacked * active[process._row_node][:, None]
    # ar-driven: the regressor at step k is the history row itself
    if ar_history is None:
        raise InvalidInputError("ar-driven sampling needs ar_history (N, order), newest first")
    hist = np.asarray(ar_history, dtype=float)
    if hist.shape != (process.nodes, process.dim):
        raise InvalidInputError(
            f"ar_history must have shape {(process.nodes, process.dim)}, got {hist.shape}"
        )
    return hist.copy()


def sample_regression(
    process: RegressionProcess,
    x0,
    step: int,
    noise: MeasurementNoise,
    rng: np.random.Generator,
    ar_history: np.ndarray | None = None,
) -> RegressionSample:
    """Draw the observation model and measurements at one step.

    ``ar_history`` (ar-driven only) carries each node's last ``order``
    outputs, newest first; the caller threads it between steps.
    """
    if step < 0:
        raise InvalidInputError("step must be nonnegative")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (process.dim,):
        raise InvalidInputError(f"x0 must have shape ({process.dim},), got {x0.shape}")
    h_stacked = _stack_h(process, step, rng, ar_history)
    y_clean = h_stacked @ x0
    y = y_clean + noise.sample(rng, h_stacked.shape[0])
    off = process.offsets
    h_nodes = tuple(h_stacked[off[i] : off[i + 1]] for i in range(process.nodes))
    return RegressionSample(
        step, h_nodes, h_stacked, y, y_clean, off, process._row_node, process._starts
    )


def conditional_expected_node_gram(process: RegressionProcess, node: int, step: int = 0) -> np.ndarray:
    """Closed-form ``E[H_i(step)^T H_i(step)]`` for one node.

    All supported kinds draw independently across steps, so conditioning
    on any earlier cut leaves the answer unchanged.
    """
    if not 0 <= node < process.nodes:
        raise InvalidInputError("node index out of range")
    if process.kind == "fixed":
        h = process.h_nodes[node]
        return h.T @ h
    if process.kind == "entrywise-uniform":
        # Independent cells: E[H^T H] = M^T M + Var(u) * diag(column sums of coef^2)
        # with M = base + coef * E[u].
        mean_u = 0.5 * (process.low + process.high)
        var_u = (process.high - process.low) ** 2 / 12.0
        m = process.base[node] + process.coef[node] * mean_u
        return m.T @ m + var_u * np.diag((process.coef[node] ** 2).sum(axis=0))
    if process.kind == "bernoulli-failure":
        c = process.coef[node]
        return process.active_prob * (c.T @ c)
    raise UnsupportedAnalyticError(
        "ar-driven regressors are functions of past outputs; "
        "use monte_carlo_expected_gram explicitly"
    )


def conditional_expected_gram(
    process: RegressionProcess,
    step: int,
    history_cut: int = -1,
) -> ConditionalExpectation:
    """``E[H^T H | F(history_cut)]`` for the stacked block-diagonal
    observation matrix, an ``(N n) x (N n)`` block-diagonal result."""
    if step < 0:
        raise InvalidInputError("step must be nonnegative")
    if history_cut > step:
        raise InvalidInputError("history_cut must not exceed step")
    if history_cut == step and process.kind != "fixed":
        raise InvalidInputError(
            "conditioning an independent draw on its own step needs the realization; "
            "use an earlier history cut"
        )
    blocks = [conditional_expected_node_gram(process, i, step) for i in range(process.nodes)]
    return ConditionalExpectation(matrix=block_diag(blocks), exactness="analytic")


def spatio_temporal_gram(
    process: RegressionProcess,
    window_index: int,
    window: int,
) -> np.ndarray:
    """Sum of all nodes' expected Grams over one window of steps.

    This is the ``n x n`` matrix ``sum_{i in window} sum_j E[H_j(i)^T
    H_j(i) | F(cut)]`` with the cut just before the window, the quantity
    whose smallest eigenvalue the joint-observability condition bounds.
    """
    if window < 1:
        raise InvalidInputError("window must be positive")
    if window_index < 0:
        raise InvalidInputError("window_index must be nonnegative")
    out = np.zeros((process.dim, process.dim))
    for step in range(window_index * window, (window_index + 1) * window):
        for node in range(process.nodes):
            out += conditional_expected_node_gram(process, node, step)
    return out


def monte_carlo_expected_gram(
    process: RegressionProcess,
    x0,
    step: int,
    noise: MeasurementNoise,
    rng: np.random.Generator,
    samples: int = 10_000,
    ar_init: np.ndarray | None = None,
) -> ConditionalExpectation:
    """Monte Carlo estimate of ``E[H^T H]`` at ``step``.

    The explicit fallback for kinds without a closed form.  For ar-driven
    processes each sample replays the recursion from ``ar_init`` (zeros by
    default) up to ``step``, so the estimate is the unconditional Gram
    given that initial history.
    """
    if samples < 1:
        raise InvalidInputError("samples must be positive")
    x0 = np.asarray(x0, dtype=float)
    size = process.nodes * process.dim
    acc = np.zeros((size, size))
    for _ in range(samples):
        if process.kind == "ar-driven":
            hist = (
                np.zeros((process.nodes, process.dim))
                if ar_init is None
                else np.asarray(ar_init, dtype=float).copy()
            )
            sample = None
            for k in range(step + 1):
                sample = sample_regression(process, x0, k, noise, rng, hist)
                hist = np.concatenate([sample.y[:, None], hist[:, :-1]], axis=1)
        else:
            sample = sample_regression(process, x0, step, noise, rng)
        hb = sample.h_block
        acc += hb.T @ hb
    return ConditionalExpectation(matrix=acc / samples, exactness="monte-carlo", samples=samples)


def support_gram_norm_bound(process: RegressionProcess) -> float:
    """Deterministic upper bound on ``||H^T H||`` valid for every draw.

    Uses ``||H^T H|| = max_i ||H_i||^2 <= max_i ||H_i||_F^2`` with each
    cell bounded over its support.  Raises for ar-driven, whose regressor
    support is unbounded.
    """
    if process.kind == "fixed":
        return max(float(np.linalg.norm(h, 2) ** 2) for h in process.h_nodes)
    if process.kind == "entrywise-uniform":
        worst = 0.0
        for b, c in zip(process.base, process.coef):
            hi = np.maximum(np.abs(b + c * process.low), np.abs(b + c * process.high))
            worst = max(worst, float((hi * hi).sum()))
        return worst
    if process.kind == "bernoulli-failure":
        return max(float(np.linalg.norm(c, 2) ** 2) for c in process.coef)
    raise UnsupportedAnalyticError("ar-driven regressors have unbounded support")
