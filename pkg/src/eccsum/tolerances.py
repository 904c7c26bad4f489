from dataclasses import dataclass, replace


@dataclass(frozen=True)
class ToleranceConfig:
    feas_tol: float = 1e-9
    duality_gap_tol: float = 1e-7
    pivot_tol: float = 1e-11
    metric_tol: float = 1e-7

    def override(self, **kwargs):
        """Copy with the non-None keyword values replaced."""
        return replace(self, **{k: v for k, v in kwargs.items() if v is not None})


DEFAULT_TOL = ToleranceConfig()
