"""Monte-Carlo engine for the Lamperti construction.

exp(B_t + index*t) = R^(index) evaluated at
A_t = int_0^t exp(2(B_s + index*s)) ds,
so the first Brownian time tau at which E_tau^2 = (b + A_tau)/c gives the
Bessel hitting time sigma = A_tau. Paths are simulated in batches; each
batch owns a random stream keyed by (seed, stream_id, role, batch index),
so the output does not depend on how many workers run the batches.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from domain.config import SimConfig
from domain.errors import DomainError
from domain.infrastructure.statistics import mean_and_error
from domain.infrastructure.streams import Stream, substream
from domain.process import BesselSpec, IndexSign
from domain.samples import GbmState, HittingSample, SampleSet

logger = logging.getLogger(__name__)


# region(Exact samplers)
def gamma_sample(alpha, rng):
    """One Gamma(alpha, 1) draw (Marsaglia-Tsang, boosted below 1)."""
    if not alpha > 0:
        raise DomainError(f"gamma shape must be positive, got {alpha}")
    if alpha < 1:
        return gamma_sample(alpha + 1, rng) * (1 - rng.random()) ** (1 / alpha)
    d = alpha - 1 / 3
    c = 1 / math.sqrt(9 * d)
    while True:
        x = rng.standard_normal()
        v = (1 + c * x) ** 3
        if v <= 0:
            continue
        u = 1 - rng.random()
        if math.log(u) < 0.5 * x * x + d - d * v + d * math.log(v):
            return d * v


def gamma_samples(alpha, size, rng):
    """size independent Gamma(alpha, 1) draws, vectorised Marsaglia-Tsang."""
    if not alpha > 0:
        raise DomainError(f"gamma shape must be positive, got {alpha}")
    if alpha < 1:
        boost = (1 - rng.random(size)) ** (1 / alpha)
        return gamma_samples(alpha + 1, size, rng) * boost
    d = alpha - 1 / 3
    c = 1 / math.sqrt(9 * d)
    out = np.empty(size)
    pending = np.arange(size)
    while pending.size:
        x = rng.standard_normal(pending.size)
        v = (1 + c * x) ** 3
        u = 1 - rng.random(pending.size)
        with np.errstate(invalid="ignore", divide="ignore"):
            accept = (v > 0) & (
                np.log(u) < 0.5 * x * x + d - d * v + d * np.log(v))
        out[pending[accept]] = d * v[accept]
        pending = pending[~accept]
    return out


def sample_dufresne(nu, rng):
    """Exact draw of A_inf^(-nu), distributed as 1 / (2 gamma_nu)."""
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu}")
    return 1 / (2 * gamma_sample(nu, rng))


def dufresne_samples(nu, size, rng):
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu}")
    return 1 / (2 * gamma_samples(nu, size, rng))
# endregion


# region(Path engine)
def _steps(cfg):
    return int(math.ceil(cfg.max_bm_time / cfg.dt))


def _advance(state, drift, dt, n, rng):
    """n exact Gaussian steps. Returns columns 0..n of t, E^2 and A."""
    increments = rng.standard_normal((len(state), n)) * math.sqrt(dt)
    t = state.t[0] + dt * np.arange(n + 1)
    B = np.hstack((state.B[:, None],
                   state.B[:, None] + np.cumsum(increments, axis=1)))
    log_e2 = 2 * (B + drift * t)
    e2 = np.exp(log_e2)
    # trapezoid in time on E^2
    A = np.hstack((state.A[:, None], state.A[:, None] + np.cumsum(
        0.5 * (e2[:, :-1] + e2[:, 1:]) * dt, axis=1)))
    return t, B, e2, A


def _first_crossing(t, e2, A, bnd, step, cfg, rng):
    """Rows that cross within the chunk, sigma and BM time at the crossing."""
    gap = e2 - (bnd.b + A) / bnd.c
    hit = gap[:, 1:] <= 0
    bridge = np.zeros_like(hit)
    if cfg.bridge_correction:
        uniforms = rng.random(hit.shape)
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.log(e2) - np.log((bnd.b + A) / bnd.c)
        x0, x1 = x[:, :-1], x[:, 1:]
        # a Brownian bridge of variance 4 dt dips below 0 between
        # positive endpoints with probability exp(-x0 x1 / (2 dt))
        bridge = (x0 > 0) & (x1 > 0) & (
            uniforms < np.exp(-x0 * x1 / (2 * step)))
        hit = hit | bridge

    rows = np.flatnonzero(hit.any(axis=1))
    col = np.argmax(hit[rows], axis=1)
    g0, g1 = gap[rows, col], gap[rows, col + 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        lam = np.where(bridge[rows, col], 0.5,
                       np.clip(g0 / (g0 - g1), 0.0, 1.0))
    a0, a1 = A[rows, col], A[rows, col + 1]
    return rows, a0 + lam * (a1 - a0), t[col] + lam * step


def _hitting_batch(spec, bnd, cfg, rng, size, refinements=(1,)):
    """First crossings of one batch, one row per refinement of cfg.dt.

    All refinements read the same Brownian path, drawn on the finest grid,
    so their difference is the discretisation error alone.
    """
    levels = len(refinements)
    sigma = np.zeros((levels, size))
    bm_time = np.zeros((levels, size))
    crossed = np.ones((levels, size), dtype=bool)
    if bnd.degenerate:
        return sigma, crossed, bm_time

    crossed[:] = False
    bm_time[:] = np.nan
    finest = max(refinements)
    B = np.zeros(size)
    A = np.zeros((levels, size))
    active = np.arange(size)
    start, total, done = 0.0, _steps(cfg), 0
    while active.size and done < total:
        n = min(cfg.chunk_steps, total - done)
        increments = rng.standard_normal((active.size, n * finest)) \
            * math.sqrt(cfg.dt / finest)
        path = np.hstack((B[active, None], B[active, None]
                          + np.cumsum(increments, axis=1)))
        for level, refinement in enumerate(refinements):
            step = cfg.dt / refinement
            B_k = path[:, ::finest // refinement]
            t = start + step * np.arange(B_k.shape[1])
            e2 = np.exp(2 * (B_k + spec.drift * t))
            # trapezoid in time on E^2
            A_k = np.hstack((A[level, active, None], A[level, active, None]
                             + np.cumsum(0.5 * (e2[:, :-1] + e2[:, 1:])
                                         * step, axis=1)))
            rows, values, times = _first_crossing(t, e2, A_k, bnd, step,
                                                  cfg, rng)
            fresh = ~crossed[level, active[rows]]
            paths = active[rows[fresh]]
            sigma[level, paths] = values[fresh]
            bm_time[level, paths] = times[fresh]
            crossed[level, paths] = True
            A[level, active] = A_k[:, -1]

        B[active] = path[:, -1]
        start += n * cfg.dt
        done += n
        active = active[~crossed[:, active].all(axis=0)]
    return sigma, crossed, bm_time


def _run_batches(cfg, job):
    sizes = [min(cfg.batch_size, cfg.n_paths - start)
             for start in range(0, cfg.n_paths, cfg.batch_size)]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return list(pool.map(job, range(len(sizes)), sizes))
# endregion


def sample_hitting_time(spec: BesselSpec, bnd, cfg, rng):
    """One path; sigma = A at the first crossing of (b + A)/c by E^2."""
    sigma, crossed, bm_time = _hitting_batch(spec, bnd, cfg, rng, 1)
    return HittingSample(float(sigma[0, 0]), bool(crossed[0, 0]),
                         float(bm_time[0, 0]))


def _hitting_sets(spec, bnd, cfg, refinements):
    def job(index, size):
        rng = substream(cfg.seed, cfg.stream_id, Stream.Hitting, index)
        return _hitting_batch(spec, bnd, cfg, rng, size, refinements)

    batches = _run_batches(cfg, job)
    sets = []
    for level, refinement in enumerate(refinements):
        sigma = np.concatenate([batch[0][level] for batch in batches])
        crossed = np.concatenate([batch[1][level] for batch in batches])
        excluded = 1 - crossed.mean()
        if excluded > 0:
            logger.warning("%d of %d paths did not cross by BM time %g",
                           (~crossed).sum(), cfg.n_paths, cfg.max_bm_time)
        sets.append(SampleSet(
            sigma[crossed], label=f"sigma[{spec.sign.short}]",
            seed=cfg.seed, n_requested=cfg.n_paths,
            n_valid=int(crossed.sum()),
            metadata={"excluded_fraction": float(excluded),
                      "dt": cfg.dt / refinement,
                      **spec.as_dict(), **bnd.as_dict()}))
    return sets


def hitting_times(spec: BesselSpec, bnd, cfg=SimConfig()):
    """SampleSet of sigma over cfg.n_paths paths; non-crossed paths dropped."""
    return _hitting_sets(spec, bnd, cfg, (1,))[0]


def refined_hitting_times(spec: BesselSpec, bnd, cfg=SimConfig()):
    """sigma at step cfg.dt and at cfg.dt / 2 along the same paths."""
    return tuple(_hitting_sets(spec, bnd, cfg, (1, 2)))


def _perpetuity_batch(nu, cfg, rng, size):
    state = GbmState.start(size)
    active = np.arange(size)
    values = np.zeros(size)
    bounds = np.zeros(size)
    capped = np.zeros(size, dtype=bool)
    window = max(1, int(round(1 / cfg.dt)))
    total, done = _steps(cfg), 0
    last_check = state.A.copy()
    while active.size and done < total:
        n = min(cfg.chunk_steps, total - done, window - done % window)
        t, B, e2, A = _advance(state, -nu, cfg.dt, n, rng)
        state = GbmState(t=np.full(len(active), t[-1]), B=B[:, -1],
                         E=np.sqrt(e2[:, -1]), A=A[:, -1])
        done += n
        if done % window and done < total:
            continue
        settled = state.A - last_check < cfg.perpetuity_rtol * state.A
        if done >= total:
            capped[active[~settled]] = True
            settled[:] = True
        finished = active[settled]
        values[finished] = state.A[settled]
        bounds[finished] = state.E[settled] ** 2
        active = active[~settled]
        state = state.select(~settled)
        last_check = state.A.copy()
    if cfg.renewal_tail:
        # A_inf = A_T + E_T^2 Z' with Z' an independent copy
        values = values + bounds * dufresne_samples(nu, size, rng)
    return values, bounds, capped


def sample_perpetuity_truncated(nu, cfg, rng):
    """One draw of int_0^T exp(2(B_s - nu s)) ds, stopped when settled."""
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu}")
    values, _, _ = _perpetuity_batch(nu, cfg, rng, 1)
    return float(values[0])


def perpetuities(nu, cfg=SimConfig()):
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu}")

    def job(index, size):
        rng = substream(cfg.seed, cfg.stream_id, Stream.Perpetuity, index)
        return _perpetuity_batch(nu, cfg, rng, size)

    batches = _run_batches(cfg, job)
    values = np.concatenate([batch[0] for batch in batches])
    bounds = np.concatenate([batch[1] for batch in batches])
    capped = np.concatenate([batch[2] for batch in batches])
    if capped.any() and not cfg.renewal_tail:
        logger.warning("%d of %d perpetuities stopped at BM time %g "
                       "before settling", capped.sum(), cfg.n_paths,
                       cfg.max_bm_time)
    return SampleSet(values, label="perpetuity", seed=cfg.seed,
                     n_requested=cfg.n_paths,
                     metadata={"nu": nu, "renewal_tail": cfg.renewal_tail,
                               "truncation_bound": float(bounds.max()),
                               "unsettled_fraction": float(capped.mean())})


def dufresne_sample_set(nu, cfg=SimConfig(), role=Stream.Dufresne):
    def job(index, size):
        rng = substream(cfg.seed, cfg.stream_id, role, index)
        return dufresne_samples(nu, size, rng)

    values = np.concatenate(_run_batches(cfg, job))
    return SampleSet(values, label="dufresne", seed=cfg.seed,
                     metadata={"nu": nu})


def sample_affine_pair(nu, bnd, cfg, rng):
    """(b + Z1, (b + sigma)(1 + Z2/c)) from three independent streams.

    The right side is None when the sigma path does not cross.
    """
    left_rng, hit_rng, right_rng = rng.spawn(3)
    lhs = bnd.b + sample_dufresne(nu, left_rng)
    hit = sample_hitting_time(BesselSpec(nu, IndexSign.Negative), bnd, cfg,
                              hit_rng)
    if not hit.crossed:
        return lhs, None
    z = sample_dufresne(nu, right_rng)
    return lhs, (bnd.b + hit.sigma) * (1 + z / bnd.c)


def affine_pairs(nu, bnd, cfg=SimConfig(), rhs_boundary=None):
    """Both sides of b + Z = (b + sigma)(1 + Z'/c) over cfg.n_paths draws.

    rhs_boundary replaces the boundary on the right side only.
    """
    rhs_bnd = bnd if rhs_boundary is None else rhs_boundary
    z_left = dufresne_sample_set(nu, cfg, Stream.Dufresne)
    sigma = hitting_times(BesselSpec(nu, IndexSign.Negative), rhs_bnd, cfg)
    z_right = dufresne_sample_set(nu, cfg.with_paths(sigma.n_valid),
                                  Stream.DufresneRight)
    lhs = z_left.map(lambda z: bnd.b + z, label="b+Z")
    rhs = SampleSet((rhs_bnd.b + sigma.values)
                    * (1 + z_right.values / rhs_bnd.c),
                    label="(b+sigma)(1+Z/c)", seed=cfg.seed,
                    n_requested=cfg.n_paths, n_valid=sigma.n_valid,
                    metadata=dict(sigma.metadata))
    return lhs, rhs


def martingale_mean(cfg=SimConfig(), horizon=1.0):
    """Mean and standard error of E_t^(-1/2) at t = horizon."""
    n = int(round(horizon / cfg.dt))

    def job(index, size):
        rng = substream(cfg.seed, cfg.stream_id, Stream.Martingale, index)
        state = GbmState.start(size)
        for start in range(0, n, cfg.chunk_steps):
            steps = min(cfg.chunk_steps, n - start)
            t, B, e2, A = _advance(state, -0.5, cfg.dt, steps, rng)
            state = GbmState(np.full(size, t[-1]), B[:, -1],
                             np.sqrt(e2[:, -1]), A[:, -1])
        return state.E

    return mean_and_error(np.concatenate(_run_batches(cfg, job)))


def moment_estimate(samples: SampleSet, b, s):
    """Mean and standard error of (b + sigma)^-s, excluded fraction."""
    mean, error = mean_and_error(samples.map(lambda x: (b + x) ** -s))
    return mean, error, samples.excluded_fraction
