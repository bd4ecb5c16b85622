"""Monte Carlo simulation of threshold feedback and max-SINR scheduling.

Seeding contract: the sample index space is cut into fixed chunks of
``CHUNK`` samples. Chunk ``c`` draws from a Philox stream keyed by
``(seed, c)`` and the per-chunk statistics are merged in chunk order, so
the estimate depends only on ``(seed, samples)`` and never on how many
worker threads ran the chunks.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

__all__ = ["RateEstimate", "simulate", "simulate_pair_conditional", "CHUNK",
           "worker_count", "chunk_rng"]

CHUNK = 4096
THREADS_ENV = "BEAMCAST_THREADS"


@dataclass(frozen=True)
class RateEstimate:
    mean_rate: float
    std_error: float
    mean_load: float
    load_std_error: float
    samples: int
    seed: int
    beam_rates: tuple = ()
    beam_std_errors: tuple = ()

    def as_dict(self):
        return {"mean_rate": self.mean_rate, "std_error": self.std_error,
                "mean_load": self.mean_load, "load_std_error": self.load_std_error,
                "samples": self.samples, "seed": self.seed,
                "beam_rates": list(self.beam_rates),
                "beam_std_errors": list(self.beam_std_errors)}


def worker_count():
    """Threads to use: ``BEAMCAST_THREADS`` if set, else the CPU count."""
    raw = os.environ.get(THREADS_ENV, "").strip()
    if raw:
        try:
            value = int(raw)
        except ValueError:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}") from None
        if value < 1:
            raise ValueError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
        return value
    return os.cpu_count() or 1


def chunk_rng(seed, chunk):
    """Independent counter-based generator for one chunk."""
    ss = np.random.SeedSequence(entropy=int(seed) & (2 ** 64 - 1), spawn_key=(int(chunk),))
    return np.random.Generator(np.random.Philox(ss))


class _Moments:
    """Count, mean and centred sum of squares, merged in a fixed order."""

    __slots__ = ("n", "mean", "m2")

    def __init__(self, values=None):
        if values is None or len(values) == 0:
            self.n, self.mean, self.m2 = 0, 0.0, 0.0
            return
        v = np.asarray(values, dtype=float)
        self.n = v.size
        self.mean = math.fsum(v) / self.n
        self.m2 = math.fsum((v - self.mean) ** 2)

    def merge(self, other):
        if other.n == 0:
            return
        if self.n == 0:
            self.n, self.mean, self.m2 = other.n, other.mean, other.m2
            return
        n = self.n + other.n
        delta = other.mean - self.mean
        self.mean = math.fsum((self.mean * self.n, other.mean * other.n)) / n
        self.m2 = math.fsum((self.m2, other.m2, delta * delta * self.n * other.n / n))
        self.n = n

    def std_error(self):
        if self.n < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.n - 1) / self.n)


def _chunk_bounds(samples):
    n_chunks = -(-samples // CHUNK)
    return [(c, min(CHUNK, samples - c * CHUNK)) for c in range(n_chunks)]


def _run_chunks(fn, samples, threads):
    bounds = _chunk_bounds(samples)
    if threads <= 1 or len(bounds) == 1:
        return [fn(c, size) for c, size in bounds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda b: fn(*b), bounds))


def _validate_common(samples):
    samples = int(samples)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    return samples


def simulate(model, policy, samples=1_000_000, seed=0, reporting="all", threads=None):
    """Estimate the ergodic sum rate and feedback load of ``policy``.

    Parameters
    ----------
    model : FadingModel
    policy : ThresholdPolicy
    samples : int
        Channel realisations.
    seed : int
        64-bit seed; identical ``(seed, samples)`` give identical output.
    reporting : {"all", "best"}
        ``"all"`` reports every beam at or above the user's threshold;
        ``"best"`` reports only the user's strongest beam (when it clears
        the threshold). Analytic rates only cover ``"all"``.
    threads : int, optional
        Worker threads; defaults to :func:`worker_count`.
    """
    samples = _validate_common(samples)
    if reporting not in ("all", "best"):
        raise ValueError(f"reporting must be 'all' or 'best', got {reporting!r}")
    taus = np.asarray(policy.thresholds, dtype=float)
    n = taus.size
    M = model.beams
    threads = worker_count() if threads is None else int(threads)

    def chunk(c, size):
        rng = chunk_rng(seed, c)
        gamma = model.sample(n, rng, size=size)  # (size, n, M)
        reported = gamma >= taus[None, :, None]
        if reporting == "best":
            best = np.argmax(gamma, axis=2)
            onehot = np.zeros_like(reported)
            np.put_along_axis(onehot, best[..., None], True, axis=2)
            reported &= onehot
        truncated = np.where(reported, gamma, 0.0)
        beam = np.log1p(truncated.max(axis=1))  # (size, M); 0 when nobody reports
        load = (gamma[:, :, 0] >= taus[None, :]).sum(axis=1).astype(float)
        return (_Moments(beam.sum(axis=1)), _Moments(load),
                [_Moments(beam[:, m]) for m in range(M)])

    parts = _run_chunks(chunk, samples, threads)
    rate, load = _Moments(), _Moments()
    beams = [_Moments() for _ in range(M)]
    for r, ld, bs in parts:
        rate.merge(r)
        load.merge(ld)
        for acc, b in zip(beams, bs):
            acc.merge(b)
    return RateEstimate(mean_rate=rate.mean, std_error=rate.std_error(),
                        mean_load=load.mean, load_std_error=load.std_error(),
                        samples=samples, seed=int(seed),
                        beam_rates=tuple(b.mean for b in beams),
                        beam_std_errors=tuple(b.std_error() for b in beams))


def simulate_pair_conditional(model, tau_low, tau_high, y, samples=1_000_000, seed=0,
                              threads=None):
    """Estimate ``E[log(1 + max(trunc_low, trunc_high, y))]`` for a user pair.

    The two users draw independent beam-1 SINRs and are truncated at their
    own thresholds; ``y`` plays the best competing reported SINR. The load
    fields count how many of the pair report.
    """
    samples = _validate_common(samples)
    if y < 0:
        raise ValueError(f"y must be >= 0, got {y}")
    taus = np.array([tau_low, tau_high], dtype=float)
    threads = worker_count() if threads is None else int(threads)

    def chunk(c, size):
        rng = chunk_rng(seed, c)
        gamma = model.sample(2, rng, size=size)[:, :, 0]
        reported = gamma >= taus[None, :]
        best = np.where(reported, gamma, 0.0).max(axis=1)
        return _Moments(np.log1p(np.maximum(best, y))), _Moments(reported.sum(axis=1))

    parts = _run_chunks(chunk, samples, threads)
    rate, load = _Moments(), _Moments()
    for r, ld in parts:
        rate.merge(r)
        load.merge(ld)
    return RateEstimate(mean_rate=rate.mean, std_error=rate.std_error(),
                        mean_load=load.mean, load_std_error=load.std_error(),
                        samples=samples, seed=int(seed),
                        beam_rates=(rate.mean,), beam_std_errors=(rate.std_error(),))
