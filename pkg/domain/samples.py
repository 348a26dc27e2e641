from dataclasses import dataclass, field

import numpy as np

from domain.errors import EmptySampleError, NonFiniteValueError


@dataclass
class GbmState:
    """A batch of paths of E_t = exp(B_t + drift*t) and A_t = int E^2.

    All fields are arrays of equal shape, one entry per path.
    """
    t: np.ndarray
    B: np.ndarray
    E: np.ndarray
    A: np.ndarray

    @classmethod
    def start(cls, size):
        return cls(t=np.zeros(size), B=np.zeros(size),
                   E=np.ones(size), A=np.zeros(size))

    def select(self, mask):
        return GbmState(self.t[mask], self.B[mask],
                        self.E[mask], self.A[mask])

    def __len__(self):
        return len(self.t)


@dataclass(frozen=True)
class HittingSample:
    sigma: float
    crossed: bool
    bm_time_at_cross: float


@dataclass
class SampleSet:
    values: np.ndarray
    label: str = ""
    seed: int = 0
    n_requested: int = 0
    n_valid: int = 0
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not np.all(np.isfinite(self.values)):
            raise NonFiniteValueError(
                f"sample set {self.label} holds non-finite values")
        if not self.n_valid:
            self.n_valid = len(self.values)
        if not self.n_requested:
            self.n_requested = self.n_valid

    @classmethod
    def of(cls, values, label=""):
        return cls(np.asarray(values, dtype=float), label=label)

    @property
    def excluded_fraction(self):
        if self.n_requested == 0:
            return 0.0
        return 1.0 - self.n_valid / self.n_requested

    def require_nonempty(self):
        if len(self.values) == 0:
            raise EmptySampleError(self.label)
        return self

    def map(self, func, label=None):
        return SampleSet(func(self.values),
                         label=self.label if label is None else label,
                         seed=self.seed, n_requested=self.n_requested,
                         n_valid=self.n_valid, metadata=dict(self.metadata))

    def header(self):
        return {"label": self.label, "seed": self.seed,
                "n_requested": self.n_requested, "n_valid": self.n_valid,
                **self.metadata}

    def __len__(self):
        return len(self.values)
