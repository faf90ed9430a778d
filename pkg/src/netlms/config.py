"""Experiment configuration: a line-oriented config format plus presets.

Grammar (documented in the README as well):

* ``[section]`` headers; known sections are ``experiment``, ``model``,
  ``graph``, ``regression``, ``noise``, ``gains``, ``excitation``.
* ``key = value`` lines inside a section.  ``#`` starts a comment anywhere.
* Scalars are plain numbers or words.  Vectors are whitespace-separated
  numbers (``x0 = 5 4 3``).  Matrices separate rows with ``;``
  (``adjacency = 0 1 ; 0 0``).  Per-node families use numbered keys
  (``init_1``, ``base_2``, ``state_3``, ...).

Parsing reports the first offending line; semantic validation (dimension
mismatches and the like) names the section and key.  Every preset
round-trips exactly through ``parse_config(render_config(cfg))``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable

from .errors import ConfigError

__all__ = [
    "GraphConfig",
    "RegressionConfig",
    "NoiseConfig",
    "GainConfig",
    "ExcitationConfig",
    "ExperimentConfig",
    "parse_config",
    "load_config",
    "render_config",
    "get_preset",
    "preset_names",
    "PRESET_SUMMARIES",
    "with_overrides",
]

Matrix = tuple[tuple[float, ...], ...]


@dataclass(frozen=True)
class GraphConfig:
    kind: str
    adjacency: Matrix | None = None
    even_low: float = 0.0
    even_high: float = 1.0
    odd_low: float = 0.0
    odd_high: float = 1.0
    low: float = 0.0
    high: float = 1.0
    states: tuple[Matrix, ...] = ()
    transition: Matrix | None = None
    initial_state: int = 0

    def to_process(self):
        from . import graphs

        if self.kind == "fixed":
            return graphs.fixed_graph(self.adjacency)
        if self.kind == "alternating-uniform":
            return graphs.alternating_uniform_graph(
                self._nodes, (self.even_low, self.even_high), (self.odd_low, self.odd_high)
            )
        if self.kind == "iid-uniform":
            return graphs.iid_uniform_graph(self._nodes, (self.low, self.high))
        return graphs.markov_switching_graph(self.states, self.transition, self.initial_state)

    _nodes: int = 0


@dataclass(frozen=True)
class RegressionConfig:
    kind: str
    h_nodes: tuple[Matrix, ...] = ()
    base: tuple[Matrix, ...] = ()
    coef: tuple[Matrix, ...] = ()
    low: float = 0.0
    high: float = 1.0
    active_prob: float = 1.0
    ar_init: Matrix | None = None

    def to_process(self, nodes: int, dim: int):
        from . import regression

        if self.kind == "fixed":
            return regression.fixed_regression(self.h_nodes)
        if self.kind == "entrywise-uniform":
            return regression.entrywise_uniform_regression(self.base, self.coef, self.low, self.high)
        if self.kind == "bernoulli-failure":
            return regression.bernoulli_failure_regression(self.coef, self.active_prob)
        return regression.ar_driven_regression(nodes, dim)


@dataclass(frozen=True)
class NoiseConfig:
    measurement_kind: str = "gaussian"
    measurement_std: float = 1.0
    channel_kind: str = "gaussian"
    channel_std: float = 1.0
    sigma_f: float = 0.1
    b_f: float = 0.1

    def measurement(self):
        from .noise import MeasurementNoise

        return MeasurementNoise(kind=self.measurement_kind, std=self.measurement_std)

    def channel(self):
        from .noise import ChannelNoise

        return ChannelNoise(kind=self.channel_kind, std=self.channel_std)

    def intensity(self):
        from .noise import NoiseIntensity

        return NoiseIntensity(sigma=self.sigma_f, bias=self.b_f)


@dataclass(frozen=True)
class GainConfig:
    """Power-law step sizes a(k) = a_coef (k+1)^-a_exp, likewise b and the
    regularizer weight lambda."""

    a_coef: float = 1.0
    a_exp: float = 0.6
    b_coef: float = 1.0
    b_exp: float = 0.6
    lambda_coef: float = 1.0
    lambda_exp: float = 2.0


@dataclass(frozen=True)
class ExcitationConfig:
    window: int = 2
    theta1: float = 0.5
    theta2: float = 0.2
    rho0: float = 5.0


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    seed: int
    horizon: int
    runs: int
    nodes: int
    dim: int
    node_dims: tuple[int, ...]
    x0: tuple[float, ...]
    init: tuple[tuple[float, ...], ...]
    graph: GraphConfig
    regression: RegressionConfig
    noise: NoiseConfig = field(default_factory=NoiseConfig)
    gains: GainConfig = field(default_factory=GainConfig)
    excitation: ExcitationConfig = field(default_factory=ExcitationConfig)
    record_every: int = 1
    out: str = ""

    def validate(self) -> "ExperimentConfig":
        def fail(msg):
            raise ConfigError(msg)

        if self.seed < 0:
            fail("[experiment] seed must be nonnegative")
        if self.horizon < 0:
            fail("[experiment] horizon must be nonnegative")
        if self.runs < 1:
            fail("[experiment] runs must be positive")
        if self.record_every < 1:
            fail("[experiment] record_every must be positive")
        if self.nodes < 1 or self.dim < 1:
            fail("[model] nodes and dim must be positive")
        if len(self.node_dims) != self.nodes or any(d < 1 for d in self.node_dims):
            fail("[model] node_dims must list one positive row count per node")
        if len(self.x0) != self.dim:
            fail(f"[model] x0 must have {self.dim} entries, got {len(self.x0)}")
        if len(self.init) != self.nodes or any(len(r) != self.dim for r in self.init):
            fail(f"[model] need init_1..init_{self.nodes}, each with {self.dim} entries")
        try:
            gp = self.graph.to_process()
            rp = self.regression.to_process(self.nodes, self.dim)
        except Exception as exc:  # surface process-level validation as config errors
            raise ConfigError(str(exc)) from exc
        if gp.nodes != self.nodes:
            fail(f"[graph] describes {gp.nodes} nodes but [model] has {self.nodes}")
        if rp.nodes != self.nodes:
            fail(f"[regression] describes {rp.nodes} nodes but [model] has {self.nodes}")
        if rp.dim != self.dim:
            fail(f"[regression] column count {rp.dim} does not match dim {self.dim}")
        if rp.node_dims != self.node_dims:
            fail(f"[regression] row counts {rp.node_dims} do not match node_dims {self.node_dims}")
        if self.regression.kind == "ar-driven":
            ai = self.regression.ar_init
            if ai is not None and (len(ai) != self.nodes or any(len(r) != self.dim for r in ai)):
                fail(f"[regression] ar_init must be {self.nodes} rows of {self.dim} entries")
        if self.excitation.window < 1:
            fail("[excitation] window must be positive")
        return self


# ---------------------------------------------------------------------------
# parsing

_SECTIONS = ("experiment", "model", "graph", "regression", "noise", "gains", "excitation")


def _parse_scalar(raw: str, line: int, want: str):
    try:
        if want == "int":
            return int(raw)
        if want == "float":
            return float(raw)
    except ValueError:
        raise ConfigError(f"expected {'an integer' if want == 'int' else 'a number'}, got {raw!r}", line)
    return raw


def _parse_vector(raw: str, line: int) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in raw.split())
    except ValueError:
        raise ConfigError(f"expected a whitespace-separated vector, got {raw!r}", line)


def _parse_matrix(raw: str, line: int) -> Matrix:
    rows = []
    for part in raw.split(";"):
        rows.append(_parse_vector(part, line))
    if not rows or any(len(r) != len(rows[0]) for r in rows):
        raise ConfigError(f"matrix rows must be nonempty and equally long: {raw!r}", line)
    return tuple(rows)


class _SectionView:
    """Tracks which keys were consumed so leftovers can be reported."""

    def __init__(self, name: str, entries: dict[str, tuple[str, int]]):
        self.name = name
        self.entries = entries
        self.used: set[str] = set()

    def take(self, key: str, kind: str, default=None, required: bool = False):
        if key not in self.entries:
            if required:
                raise ConfigError(f"[{self.name}] missing required key '{key}'")
            return default
        raw, line = self.entries[key]
        self.used.add(key)
        if kind == "vector":
            return _parse_vector(raw, line)
        if kind == "matrix":
            return _parse_matrix(raw, line)
        if kind == "str":
            return raw
        return _parse_scalar(raw, line, kind)

    def take_family(self, prefix: str, count: int, kind: str) -> tuple:
        out = []
        for i in range(1, count + 1):
            out.append(self.take(f"{prefix}{i}", kind, required=True))
        return tuple(out)

    def finish(self):
        leftover = [k for k in self.entries if k not in self.used]
        if leftover:
            key = min(leftover, key=lambda k: self.entries[k][1])
            raise ConfigError(f"unknown key '{key}' in [{self.name}]", self.entries[key][1])


def _split_sections(text: str) -> dict[str, dict[str, tuple[str, int]]]:
    sections: dict[str, dict[str, tuple[str, int]]] = {}
    current: dict[str, tuple[str, int]] | None = None
    for lineno, rawline in enumerate(text.splitlines(), 1):
        line = rawline.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError("malformed section header", lineno)
            name = line[1:-1].strip()
            if name not in _SECTIONS:
                raise ConfigError(f"unknown section [{name}]", lineno)
            if name in sections:
                raise ConfigError(f"duplicate section [{name}]", lineno)
            current = sections.setdefault(name, {})
            continue
        if "=" not in line:
            raise ConfigError("expected 'key = value' or '[section]'", lineno)
        if current is None:
            raise ConfigError("key outside any section", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError("empty key", lineno)
        if key in current:
            raise ConfigError(f"duplicate key '{key}'", lineno)
        current[key] = (value, lineno)
    return sections


def parse_config(text: str) -> ExperimentConfig:
    """Parse config text into a validated :class:`ExperimentConfig`."""
    raw = _split_sections(text)
    for required in ("experiment", "model", "graph", "regression", "gains"):
        if required not in raw:
            raise ConfigError(f"missing section [{required}]")

    exp = _SectionView("experiment", raw["experiment"])
    name = exp.take("name", "str", default="custom")
    seed = exp.take("seed", "int", default=0)
    horizon = exp.take("horizon", "int", required=True)
    runs = exp.take("runs", "int", default=1)
    record_every = exp.take("record_every", "int", default=1)
    out = exp.take("out", "str", default="")
    exp.finish()

    model = _SectionView("model", raw["model"])
    nodes = model.take("nodes", "int", required=True)
    dim = model.take("dim", "int", required=True)
    if nodes < 1 or dim < 1:
        raise ConfigError("[model] nodes and dim must be positive")
    node_dims_vec = model.take("node_dims", "vector", default=tuple(float(dim) for _ in range(nodes)))
    node_dims = tuple(int(d) for d in node_dims_vec)
    x0 = model.take("x0", "vector", required=True)
    init = model.take_family("init_", nodes, "vector")
    model.finish()

    g = _SectionView("graph", raw["graph"])
    gkind = g.take("kind", "str", required=True)
    if gkind == "fixed":
        graph = GraphConfig(kind=gkind, adjacency=g.take("adjacency", "matrix", required=True))
    elif gkind == "alternating-uniform":
        graph = GraphConfig(
            kind=gkind,
            even_low=g.take("even_low", "float", required=True),
            even_high=g.take("even_high", "float", required=True),
            odd_low=g.take("odd_low", "float", required=True),
            odd_high=g.take("odd_high", "float", required=True),
            _nodes=nodes,
        )
    elif gkind == "iid-uniform":
        graph = GraphConfig(
            kind=gkind,
            low=g.take("low", "float", required=True),
            high=g.take("high", "float", required=True),
            _nodes=nodes,
        )
    elif gkind == "markov-switching":
        n_states = g.take("states", "int", required=True)
        if n_states < 1:
            raise ConfigError("[graph] states must be positive")
        graph = GraphConfig(
            kind=gkind,
            states=g.take_family("state_", n_states, "matrix"),
            transition=g.take("transition", "matrix", required=True),
            initial_state=g.take("initial_state", "int", default=0),
        )
    else:
        raise ConfigError(f"[graph] unknown kind {gkind!r}")
    g.finish()

    r = _SectionView("regression", raw["regression"])
    rkind = r.take("kind", "str", required=True)
    if rkind == "fixed":
        reg = RegressionConfig(kind=rkind, h_nodes=r.take_family("h_", nodes, "matrix"))
    elif rkind == "entrywise-uniform":
        reg = RegressionConfig(
            kind=rkind,
            base=r.take_family("base_", nodes, "matrix"),
            coef=r.take_family("coef_", nodes, "matrix"),
            low=r.take("low", "float", default=0.0),
            high=r.take("high", "float", default=1.0),
        )
    elif rkind == "bernoulli-failure":
        reg = RegressionConfig(
            kind=rkind,
            coef=r.take_family("pattern_", nodes, "matrix"),
            active_prob=r.take("active_prob", "float", required=True),
        )
    elif rkind == "ar-driven":
        ar_init = r.take("ar_init", "matrix", default=None)
        reg = RegressionConfig(kind=rkind, ar_init=ar_init)
    else:
        raise ConfigError(f"[regression] unknown kind {rkind!r}")
    r.finish()

    noise = NoiseConfig()
    if "noise" in raw:
        nv = _SectionView("noise", raw["noise"])
        noise = NoiseConfig(
            measurement_kind=nv.take("measurement_kind", "str", default="gaussian"),
            measurement_std=nv.take("measurement_std", "float", default=1.0),
            channel_kind=nv.take("channel_kind", "str", default="gaussian"),
            channel_std=nv.take("channel_std", "float", default=1.0),
            sigma_f=nv.take("sigma_f", "float", default=0.1),
            b_f=nv.take("b_f", "float", default=0.1),
        )
        nv.finish()

    gv = _SectionView("gains", raw["gains"])
    gains = GainConfig(
        a_coef=gv.take("a_coef", "float", required=True),
        a_exp=gv.take("a_exp", "float", required=True),
        b_coef=gv.take("b_coef", "float", required=True),
        b_exp=gv.take("b_exp", "float", required=True),
        lambda_coef=gv.take("lambda_coef", "float", default=0.0),
        lambda_exp=gv.take("lambda_exp", "float", default=0.0),
    )
    gv.finish()

    excitation = ExcitationConfig()
    if "excitation" in raw:
        ev = _SectionView("excitation", raw["excitation"])
        excitation = ExcitationConfig(
            window=ev.take("window", "int", default=2),
            theta1=ev.take("theta1", "float", default=0.5),
            theta2=ev.take("theta2", "float", default=0.2),
            rho0=ev.take("rho0", "float", default=5.0),
        )
        ev.finish()

    cfg = ExperimentConfig(
        name=name,
        seed=seed,
        horizon=horizon,
        runs=runs,
        record_every=record_every,
        out=out,
        nodes=nodes,
        dim=dim,
        node_dims=node_dims,
        x0=x0,
        init=init,
        graph=graph,
        regression=reg,
        noise=noise,
        gains=gains,
        excitation=excitation,
    )
    return cfg.validate()


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


# ---------------------------------------------------------------------------
# rendering

def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _fmt_vector(v) -> str:
    return " ".join(_fmt(float(e)) for e in v)


def _fmt_matrix(m) -> str:
    return " ; ".join(_fmt_vector(row) for row in m)


def render_config(cfg: ExperimentConfig) -> str:
    """Render a config to canonical text (fixed section and key order)."""
    lines = ["[experiment]"]
    lines.append(f"name = {cfg.name}")
    lines.append(f"seed = {cfg.seed}")
    lines.append(f"horizon = {cfg.horizon}")
    lines.append(f"runs = {cfg.runs}")
    lines.append(f"record_every = {cfg.record_every}")
    if cfg.out:
        lines.append(f"out = {cfg.out}")

    lines.append("")
    lines.append("[model]")
    lines.append(f"nodes = {cfg.nodes}")
    lines.append(f"dim = {cfg.dim}")
    lines.append(f"node_dims = {' '.join(str(d) for d in cfg.node_dims)}")
    lines.append(f"x0 = {_fmt_vector(cfg.x0)}")
    for i, row in enumerate(cfg.init, 1):
        lines.append(f"init_{i} = {_fmt_vector(row)}")

    lines.append("")
    lines.append("[graph]")
    lines.append(f"kind = {cfg.graph.kind}")
    if cfg.graph.kind == "fixed":
        lines.append(f"adjacency = {_fmt_matrix(cfg.graph.adjacency)}")
    elif cfg.graph.kind == "alternating-uniform":
        lines.append(f"even_low = {_fmt(cfg.graph.even_low)}")
        lines.append(f"even_high = {_fmt(cfg.graph.even_high)}")
        lines.append(f"odd_low = {_fmt(cfg.graph.odd_low)}")
        lines.append(f"odd_high = {_fmt(cfg.graph.odd_high)}")
    elif cfg.graph.kind == "iid-uniform":
        lines.append(f"low = {_fmt(cfg.graph.low)}")
        lines.append(f"high = {_fmt(cfg.graph.high)}")
    else:
        lines.append(f"states = {len(cfg.graph.states)}")
        for i, s in enumerate(cfg.graph.states, 1):
            lines.append(f"state_{i} = {_fmt_matrix(s)}")
        lines.append(f"transition = {_fmt_matrix(cfg.graph.transition)}")
        lines.append(f"initial_state = {cfg.graph.initial_state}")

    lines.append("")
    lines.append("[regression]")
    lines.append(f"kind = {cfg.regression.kind}")
    if cfg.regression.kind == "fixed":
        for i, h in enumerate(cfg.regression.h_nodes, 1):
            lines.append(f"h_{i} = {_fmt_matrix(h)}")
    elif cfg.regression.kind == "entrywise-uniform":
        for i, b in enumerate(cfg.regression.base, 1):
            lines.append(f"base_{i} = {_fmt_matrix(b)}")
        for i, c in enumerate(cfg.regression.coef, 1):
            lines.append(f"coef_{i} = {_fmt_matrix(c)}")
        lines.append(f"low = {_fmt(cfg.regression.low)}")
        lines.append(f"high = {_fmt(cfg.regression.high)}")
    elif cfg.regression.kind == "bernoulli-failure":
        for i, c in enumerate(cfg.regression.coef, 1):
            lines.append(f"pattern_{i} = {_fmt_matrix(c)}")
        lines.append(f"active_prob = {_fmt(cfg.regression.active_prob)}")
    else:
        if cfg.regression.ar_init is not None:
            lines.append(f"ar_init = {_fmt_matrix(cfg.regression.ar_init)}")

    lines.append("")
    lines.append("[noise]")
    lines.append(f"measurement_kind = {cfg.noise.measurement_kind}")
    lines.append(f"measurement_std = {_fmt(cfg.noise.measurement_std)}")
    lines.append(f"channel_kind = {cfg.noise.channel_kind}")
    lines.append(f"channel_std = {_fmt(cfg.noise.channel_std)}")
    lines.append(f"sigma_f = {_fmt(cfg.noise.sigma_f)}")
    lines.append(f"b_f = {_fmt(cfg.noise.b_f)}")

    lines.append("")
    lines.append("[gains]")
    lines.append(f"a_coef = {_fmt(cfg.gains.a_coef)}")
    lines.append(f"a_exp = {_fmt(cfg.gains.a_exp)}")
    lines.append(f"b_coef = {_fmt(cfg.gains.b_coef)}")
    lines.append(f"b_exp = {_fmt(cfg.gains.b_exp)}")
    lines.append(f"lambda_coef = {_fmt(cfg.gains.lambda_coef)}")
    lines.append(f"lambda_exp = {_fmt(cfg.gains.lambda_exp)}")

    lines.append("")
    lines.append("[excitation]")
    lines.append(f"window = {cfg.excitation.window}")
    lines.append(f"theta1 = {_fmt(cfg.excitation.theta1)}")
    lines.append(f"theta2 = {_fmt(cfg.excitation.theta2)}")
    lines.append(f"rho0 = {_fmt(cfg.excitation.rho0)}")
    lines.append("")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# presets: the three-node benchmark used throughout the tests and demos

def _benchmark_config(name, a_coef, a_exp, lam_coef, lam_exp, horizon, runs, seed) -> ExperimentConfig:
    zero3 = (0.0, 0.0, 0.0)
    return ExperimentConfig(
        name=name,
        seed=seed,
        horizon=horizon,
        runs=runs,
        record_every=100,
        nodes=3,
        dim=3,
        node_dims=(2, 3, 3),
        x0=(5.0, 4.0, 3.0),
        init=((12.0, 11.0, 6.0), (10.0, 16.0, 8.0), (14.0, 16.0, 13.0)),
        graph=GraphConfig(
            kind="alternating-uniform",
            even_low=0.0,
            even_high=1.0,
            odd_low=-0.5,
            odd_high=0.5,
            _nodes=3,
        ),
        regression=RegressionConfig(
            kind="entrywise-uniform",
            base=(
                (zero3, (0.5, 0.0, 0.0)),
                ((0.0, -0.5, 0.0), zero3, (0.5, 0.0, 0.0)),
                ((0.0, 0.0, 0.5), zero3, zero3),
            ),
            coef=(
                (zero3, (1.0, 0.0, 0.0)),
                ((0.0, -1.0, 0.0), zero3, (1.0, 0.0, 0.0)),
                ((0.0, 0.0, 1.0), zero3, zero3),
            ),
            low=0.0,
            high=1.0,
        ),
        noise=NoiseConfig(),
        gains=GainConfig(
            a_coef=a_coef,
            a_exp=a_exp,
            b_coef=a_coef,
            b_exp=a_exp,
            lambda_coef=lam_coef,
            lambda_exp=lam_exp,
        ),
        excitation=ExcitationConfig(window=2, theta1=0.5, theta2=0.2, rho0=5.0),
    )


_PRESETS: dict[str, Callable[[], ExperimentConfig]] = {
    "setting-i": lambda: _benchmark_config("setting-i", 1.0, 0.6, 1.0, 2.0, 100_000, 10, 42),
    "setting-ii": lambda: _benchmark_config("setting-ii", 1.0, 0.6, 1.0, 3.0, 100_000, 10, 42),
    "setting-iii": lambda: _benchmark_config("setting-iii", 1.0, 0.8, 1.0, 2.0, 100_000, 10, 42),
    "setting-iv": lambda: _benchmark_config("setting-iv", 1.0, 0.8, 1.0, 3.0, 100_000, 10, 42),
    "setting-v": lambda: _benchmark_config("setting-v", 1.0, 0.6, 0.0, 0.0, 100_000, 10, 42),
    "setting-vi": lambda: _benchmark_config("setting-vi", 1.0, 0.8, 0.0, 0.0, 100_000, 10, 42),
    "regret": lambda: _benchmark_config("regret", 0.1, 0.6, 0.2, 1.2, 100_000, 50, 42),
}

PRESET_SUMMARIES = {
    "setting-i": "slow gain decay (0.6) with fast-vanishing regularizer (exp 2)",
    "setting-ii": "slow gain decay (0.6) with faster-vanishing regularizer (exp 3)",
    "setting-iii": "fast gain decay (0.8) with fast-vanishing regularizer (exp 2)",
    "setting-iv": "fast gain decay (0.8) with faster-vanishing regularizer (exp 3)",
    "setting-v": "slow gain decay (0.6), no regularizer",
    "setting-vi": "fast gain decay (0.8), no regularizer",
    "regret": "small gains 0.1 (k+1)^-0.6 for regret experiments, 50 runs",
}


def preset_names() -> tuple[str, ...]:
    return tuple(_PRESETS)


def get_preset(name: str) -> ExperimentConfig:
    """Look up a named preset; accepts any case."""
    key = name.strip().lower()
    if key not in _PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(_PRESETS)}")
    return _PRESETS[key]().validate()


def with_overrides(cfg: ExperimentConfig, seed=None, runs=None, horizon=None, out=None) -> ExperimentConfig:
    """Apply the CLI-level overrides, leaving other fields untouched."""
    updates = {}
    if seed is not None:
        updates["seed"] = int(seed)
    if runs is not None:
        updates["runs"] = int(runs)
    if horizon is not None:
        updates["horizon"] = int(horizon)
    if out is not None:
        updates["out"] = str(out)
    return replace(cfg, **updates).validate() if updates else cfg
