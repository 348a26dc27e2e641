from dataclasses import dataclass, replace, asdict

from domain.errors import DomainError


@dataclass(frozen=True)
class QuadratureConfig:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    laguerre_order: int = 200

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_subdivisions < 8 or self.laguerre_order < 8:
            raise DomainError("quadrature orders must be at least 8")

    def with_tolerance(self, abs_tol, rel_tol=None):
        return replace(self, abs_tol=abs_tol,
                       rel_tol=abs_tol if rel_tol is None else rel_tol)

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class InversionConfig:
    """Vertical contour s = a + it, |t| <= half_height, trapezoid step."""
    abscissa: float = 1.0
    half_height: float = 400.0
    step: float = 0.1
    tail_tol: float = 1e-8
    orientation: int = 1
    workers: int = 1

    def __post_init__(self):
        if self.abscissa <= 0:
            raise DomainError("contour abscissa must be positive")
        if self.half_height <= 0 or self.step <= 0:
            raise DomainError("contour height and step must be positive")
        if self.step > self.half_height / 50:
            raise DomainError("contour step must not exceed half_height/50")
        if self.orientation not in (1, -1):
            raise DomainError("orientation is +1 or -1")
        if self.workers < 1:
            raise DomainError("workers must be at least 1")

    @property
    def nodes(self):
        return int(round(self.half_height / self.step))

    def with_abscissa(self, abscissa):
        return replace(self, abscissa=abscissa)

    def flipped(self):
        return replace(self, orientation=-self.orientation)

    def as_dict(self):
        # workers do not change results
        return {key: value for key, value in asdict(self).items()
                if key != "workers"}


@dataclass(frozen=True)
class SimConfig:
    dt: float = 1e-4
    max_bm_time: float = 50.0
    n_paths: int = 10_000
    seed: int = 42
    stream_id: int = 0
    batch_size: int = 1024
    chunk_steps: int = 2000
    workers: int = 1
    bridge_correction: bool = False
    renewal_tail: bool = False
    perpetuity_rtol: float = 1e-10

    def __post_init__(self):
        if self.dt <= 0:
            raise DomainError("dt must be positive")
        if self.n_paths < 1:
            raise DomainError("n_paths must be at least 1")
        if self.max_bm_time < 100 * self.dt:
            raise DomainError("max_bm_time must be at least 100 dt")
        if self.batch_size < 1 or self.chunk_steps < 1 or self.workers < 1:
            raise DomainError("batch_size, chunk_steps, workers must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise DomainError("seed must be a 64-bit unsigned integer")
        if self.stream_id < 0:
            raise DomainError("stream_id must be nonnegative")

    def with_paths(self, n_paths):
        return replace(self, n_paths=n_paths)

    def with_dt(self, dt):
        return replace(self, dt=dt)

    def with_seed(self, seed, stream_id=None):
        return replace(self, seed=seed,
                       stream_id=self.stream_id if stream_id is None
                       else stream_id)

    def with_workers(self, workers):
        return replace(self, workers=workers)

    def with_horizon(self, max_bm_time):
        return replace(self, max_bm_time=max_bm_time)

    def with_bridge(self, enabled=True):
        return replace(self, bridge_correction=enabled)

    def with_renewal(self, enabled=True):
        return replace(self, renewal_tail=enabled)

    def as_dict(self):
        return {key: value for key, value in asdict(self).items()
                if key != "workers"}
