"""Numeric knobs for every evaluator."""

from __future__ import annotations

from dataclasses import dataclass, field, replace


@dataclass(frozen=True)
class EvalParams:
    """Budgets and tolerances.

    ``grid_step`` drives the forward scan of the boundary solver,
    ``sample_step`` is the default spacing of exported trajectory grids and
    ``seq_check_step`` the spacing at which "for every s in [0, t]" side
    conditions are checked (defaults to ``grid_step``).
    """

    max_unfold: int = 10000
    zeno_eps: float = 1e-9
    zeno_window: int = 64
    grid_step: float = 1e-3
    sample_step: float = 0.1
    boundary_tol: float = 1e-9
    horizon: float = 1e6
    seq_check_step: float | None = field(default=None)

    def __post_init__(self) -> None:
        if self.max_unfold < 1:
            raise ValueError("max_unfold must be >= 1")
        if self.zeno_window < 2:
            raise ValueError("zeno_window must be >= 2")
        for name in ("zeno_eps", "grid_step", "sample_step", "boundary_tol", "horizon"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if self.seq_check_step is not None and not self.seq_check_step > 0:
            raise ValueError("seq_check_step must be positive")

    @property
    def check_step(self) -> float:
        return self.grid_step if self.seq_check_step is None else self.seq_check_step

    def with_(self, **changes) -> "EvalParams":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {
            "max_unfold": self.max_unfold,
            "zeno_eps": self.zeno_eps,
            "zeno_window": self.zeno_window,
            "grid_step": self.grid_step,
            "sample_step": self.sample_step,
            "boundary_tol": self.boundary_tol,
            "horizon": self.horizon,
            "seq_check_step": self.seq_check_step,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EvalParams":
        return cls(**data)


DEFAULT_PARAMS = EvalParams()
