# pottscluster/trainer.py
"""Training loop for the clustering encoder.

A run is a pure function of (graph, features, config): weight init draws
from ``default_rng(seed)`` and the dropout stream from
``default_rng([seed, 1])``, so repeating a run reproduces every float bit
for bit. Optimization is plain Adam over the three weight matrices plus the
scalar resolution gamma, which is clamped to [0, gamma_max] after each step.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .graph import Graph, normalized_adjacency
from .losses import COLLAPSE_SCALINGS, LOSS_KINDS, LossBreakdown, evaluate_objective
from .metrics import MetricsReport, evaluate_partition, hard_assign
from .model import ModelParams, backward, forward

__all__ = [
    "TrainConfig",
    "TrainDivergedError",
    "EpochRecord",
    "RunTrace",
    "AdamState",
    "init_params",
    "adam_step",
    "train",
    "SeedRun",
    "SeedSweep",
    "run_seeds",
]

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


@dataclass(frozen=True)
class TrainConfig:
    """Hyperparameters for one training run."""

    seed: int = 0
    k: int = 16
    hidden: int = 64
    dropout_keep: float = 0.5
    learning_rate: float = 1e-3
    epochs: int = 1000
    gamma_init: float = 1.0
    gamma_max: float = 5.0
    w_collapse: float = 1.0
    w_gamma: float = 0.01
    loss: str = "potts"
    collapse_scaling: str = "sqrtk_over_n"

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")
        if self.k < 2:
            raise ValueError(f"k must be at least 2, got {self.k}")
        if self.hidden < 1:
            raise ValueError(f"hidden must be positive, got {self.hidden}")
        if not 0.0 < self.dropout_keep <= 1.0:
            raise ValueError(f"dropout_keep must be in (0, 1], got {self.dropout_keep}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be non-negative, got {self.epochs}")
        if self.gamma_max <= 0:
            raise ValueError(f"gamma_max must be positive, got {self.gamma_max}")
        if not 0.0 <= self.gamma_init <= self.gamma_max:
            raise ValueError(
                f"gamma_init must lie in [0, gamma_max={self.gamma_max}], got {self.gamma_init}"
            )
        if self.w_collapse < 0 or self.w_gamma < 0:
            raise ValueError("regularizer weights must be non-negative")
        if self.loss not in LOSS_KINDS:
            raise ValueError(f"unknown loss {self.loss!r}, expected one of {LOSS_KINDS}")
        if self.collapse_scaling not in COLLAPSE_SCALINGS:
            raise ValueError(
                f"unknown collapse_scaling {self.collapse_scaling!r},"
                f" expected one of {COLLAPSE_SCALINGS}"
            )

    @classmethod
    def from_dict(cls, raw: dict[str, Any]) -> "TrainConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(raw) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**raw)

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)


class TrainDivergedError(RuntimeError):
    """Raised when the objective becomes non-finite during training."""

    def __init__(self, epoch: int, breakdown: LossBreakdown):
        super().__init__(f"objective became non-finite at epoch {epoch}: total={breakdown.total}")
        self.epoch = epoch
        self.breakdown = breakdown


@dataclass(frozen=True)
class EpochRecord:
    """One trace row: loss terms at the epoch's evaluation, gamma after its update."""

    epoch: int
    total: float
    potts: float
    collapse: float
    gamma_reg: float
    gamma: float


@dataclass(frozen=True)
class RunTrace:
    """Full result of one training run."""

    records: list[EpochRecord]
    final_params: ModelParams
    final_assignment: np.ndarray  # eval-mode soft assignment, shape (n, k)

    @property
    def gamma_final(self) -> float:
        return self.final_params.gamma


@dataclass(frozen=True)
class AdamState:
    """First/second moment accumulators for every trainable slot."""

    m_w: np.ndarray
    v_w: np.ndarray
    m_skip: np.ndarray
    v_skip: np.ndarray
    m_out: np.ndarray
    v_out: np.ndarray
    m_gamma: float
    v_gamma: float
    t: int

    @classmethod
    def zeros(cls, params: ModelParams) -> "AdamState":
        return cls(
            m_w=np.zeros_like(params.w),
            v_w=np.zeros_like(params.w),
            m_skip=np.zeros_like(params.w_skip),
            v_skip=np.zeros_like(params.w_skip),
            m_out=np.zeros_like(params.w_out),
            v_out=np.zeros_like(params.w_out),
            m_gamma=0.0,
            v_gamma=0.0,
            t=0,
        )


def init_params(num_features: int, config: TrainConfig) -> ModelParams:
    """Standard-normal weight init; draw order is w, w_skip, w_out."""
    rng = np.random.default_rng(config.seed)
    w = rng.standard_normal((num_features, config.hidden))
    w_skip = rng.standard_normal((num_features, config.hidden))
    w_out = rng.standard_normal((config.hidden, config.k))
    return ModelParams(w=w, w_skip=w_skip, w_out=w_out, gamma=config.gamma_init)


def _adam_slot(value, grad, m, v, t: int, lr: float):
    m = ADAM_BETA1 * m + (1.0 - ADAM_BETA1) * grad
    v = ADAM_BETA2 * v + (1.0 - ADAM_BETA2) * grad * grad
    m_hat = m / (1.0 - ADAM_BETA1**t)
    v_hat = v / (1.0 - ADAM_BETA2**t)
    return value - lr * m_hat / (np.sqrt(v_hat) + ADAM_EPS), m, v


def adam_step(
    params: ModelParams,
    grads,
    state: AdamState,
    learning_rate: float,
    gamma_max: float,
) -> tuple[ModelParams, AdamState]:
    """One Adam update over all parameter slots; gamma is clamped to [0, gamma_max]."""
    t = state.t + 1
    w, m_w, v_w = _adam_slot(params.w, grads.d_w, state.m_w, state.v_w, t, learning_rate)
    w_skip, m_s, v_s = _adam_slot(
        params.w_skip, grads.d_w_skip, state.m_skip, state.v_skip, t, learning_rate
    )
    w_out, m_o, v_o = _adam_slot(
        params.w_out, grads.d_w_out, state.m_out, state.v_out, t, learning_rate
    )
    gamma, m_g, v_g = _adam_slot(
        params.gamma, grads.d_gamma, state.m_gamma, state.v_gamma, t, learning_rate
    )
    gamma = float(min(max(gamma, 0.0), gamma_max))
    new_params = ModelParams(w=w, w_skip=w_skip, w_out=w_out, gamma=gamma)
    new_state = AdamState(
        m_w=m_w, v_w=v_w, m_skip=m_s, v_skip=v_s, m_out=m_o, v_out=v_o,
        m_gamma=float(m_g), v_gamma=float(v_g), t=t,
    )
    return new_params, new_state


def _objective(g: Graph, c: np.ndarray, gamma: float, config: TrainConfig, with_grads: bool):
    return evaluate_objective(
        g,
        c,
        gamma,
        config.loss,
        w_potts=1.0,
        w_collapse=config.w_collapse,
        w_gamma=config.w_gamma,
        gamma_max=config.gamma_max,
        collapse_scaling=config.collapse_scaling,
        with_grads=with_grads,
    )


def train(g: Graph, x: np.ndarray, config: TrainConfig) -> RunTrace:
    """Train the encoder on (g, x) and return the epoch trace.

    Record 0 holds the eval-mode loss of the freshly initialized model.
    Record e (1-based) holds the training-mode loss the optimizer saw at
    epoch e, together with gamma as it stands after that epoch's update, so
    the trace has epochs + 1 records.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] != g.n:
        raise ValueError(f"features shape {x.shape} does not match n={g.n}")
    abar = normalized_adjacency(g)
    params = init_params(x.shape[1], config)
    if config.loss == "dmon":
        # the baseline pins the resolution at 1; its gamma gradient is zero
        params = dataclasses.replace(params, gamma=1.0)
    state = AdamState.zeros(params)
    dropout_rng = np.random.default_rng([config.seed, 1])

    c0, _ = forward(abar, x, params)
    first = _objective(g, c0, params.gamma, config, with_grads=False)
    records = [
        EpochRecord(
            epoch=0,
            total=first.total,
            potts=first.potts,
            collapse=first.collapse,
            gamma_reg=first.gamma_reg,
            gamma=params.gamma,
        )
    ]
    if not np.isfinite(first.total):
        raise TrainDivergedError(0, first)

    for epoch in range(1, config.epochs + 1):
        mask = None
        if config.dropout_keep < 1.0:
            mask = (
                dropout_rng.random(x.shape) < config.dropout_keep
            ).astype(np.float64) / config.dropout_keep
        c, cache = forward(abar, x, params, dropout_mask=mask)
        breakdown, d_c, d_gamma = _objective(g, c, params.gamma, config, with_grads=True)
        if not np.isfinite(breakdown.total):
            raise TrainDivergedError(epoch, breakdown)
        grads = backward(cache, d_c, d_gamma)
        params, state = adam_step(params, grads, state, config.learning_rate, config.gamma_max)
        records.append(
            EpochRecord(
                epoch=epoch,
                total=breakdown.total,
                potts=breakdown.potts,
                collapse=breakdown.collapse,
                gamma_reg=breakdown.gamma_reg,
                gamma=params.gamma,
            )
        )

    c_final, _ = forward(abar, x, params)
    return RunTrace(records=records, final_params=params, final_assignment=c_final)


@dataclass(frozen=True)
class SeedRun:
    """One seed's trace plus the scores of its final hard partition."""

    seed: int
    trace: RunTrace
    report: MetricsReport

    @property
    def gamma_final(self) -> float:
        return self.trace.gamma_final


@dataclass(frozen=True)
class SeedSweep:
    """Results over consecutive seeds with per-metric mean and std."""

    runs: list[SeedRun]
    mean: dict[str, float | None] = field(default_factory=dict)
    std: dict[str, float | None] = field(default_factory=dict)


_SWEEP_KEYS = ("modularity", "conductance", "nmi", "pairwise_f1", "gamma_final", "total")


def _run_scalar(run: SeedRun, key: str) -> float | None:
    if key == "gamma_final":
        return run.gamma_final
    if key == "total":
        return run.trace.records[-1].total
    return getattr(run.report, key)


def run_seeds(
    g: Graph,
    x: np.ndarray,
    config: TrainConfig,
    num_seeds: int,
    labels: np.ndarray | None = None,
) -> SeedSweep:
    """Train with seeds config.seed .. config.seed + num_seeds - 1 and aggregate."""
    if num_seeds < 1:
        raise ValueError(f"num_seeds must be positive, got {num_seeds}")
    runs = []
    for i in range(num_seeds):
        cfg = dataclasses.replace(config, seed=config.seed + i)
        trace = train(g, x, cfg)
        pred = hard_assign(trace.final_assignment)
        report = evaluate_partition(g, pred, labels)
        runs.append(SeedRun(seed=cfg.seed, trace=trace, report=report))
    mean: dict[str, float | None] = {}
    std: dict[str, float | None] = {}
    for key in _SWEEP_KEYS:
        vals = [_run_scalar(r, key) for r in runs]
        if any(v is None for v in vals):
            mean[key] = None
            std[key] = None
        else:
            arr = np.asarray(vals, dtype=np.float64)
            mean[key] = float(arr.mean())
            std[key] = float(arr.std())
    return SeedSweep(runs=runs, mean=mean, std=std)
