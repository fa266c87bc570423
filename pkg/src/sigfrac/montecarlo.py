"""Monte Carlo engine for signal fractions in Poisson downlink networks.

The path loss process is sampled exactly in one dimension: the delta-th
powers of the ordered path loss values are unit-rate Poisson arrival
times, so no spatial window is involved.  Per realization, generation
stops once the not-yet-generated tail of the received power can only
move the result at the configured relative tolerance; the tail's
conditional mean is added to the denominator, which turns the
truncation error into a zero-mean fluctuation of relative size at most
tail_eps instead of a one-sided bias.  Conditioned on the current
arrival time G = xi_K^delta, the tail of sum h_k/xi_k has

    mean      delta/(1-delta)          * G^((delta-1)/delta)
    variance  E[h^2] delta/(2-delta)   * G^((delta-2)/delta)

by Campbell's formula over the unit-rate remainder.

Realizations are grouped into fixed-size shards; each shard draws from
its own counter-based (Philox) stream keyed by (seed, shard index), so
results are bit-identical for any worker count or scheduling order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .rayleigh import NetworkParams

_SHARD = 16384        # realizations per RNG substream; part of the output contract
_CHUNK_MAX = 8192
_CHUNK_ELEMS = 4_000_000


class SimulationError(RuntimeError):
    """Too many realizations hit the point budget before convergence."""


@dataclass(frozen=True)
class FadingModel:
    """Power fading law with unit mean: none, or Nakagami-m (gamma with
    shape m).  m = 1 is Rayleigh; m = 1/2 is the half-normal-squared case."""

    kind: str
    m: float | None = None

    def __post_init__(self):
        if self.kind not in ("none", "nakagami"):
            raise ValueError(f"unknown fading kind {self.kind!r}")
        if self.kind == "nakagami":
            if self.m is None or self.m <= 0.0:
                raise ValueError(f"nakagami parameter m must be > 0, got {self.m}")
        elif self.m is not None:
            raise ValueError("fading 'none' takes no parameter")

    @classmethod
    def none(cls) -> "FadingModel":
        return cls(kind="none")

    @classmethod
    def nakagami(cls, m: float) -> "FadingModel":
        return cls(kind="nakagami", m=float(m))

    @property
    def second_moment(self) -> float:
        if self.kind == "none":
            return 1.0
        return 1.0 + 1.0 / self.m


@dataclass(frozen=True)
class AssociationRule:
    """Which base station serves the user: nearest (nba), instantaneously
    strongest (isba), random with probabilities SF_k (rba), or the k-th
    strongest (kth_strongest)."""

    kind: str
    k: int | None = None

    def __post_init__(self):
        if self.kind not in ("nba", "isba", "rba", "kth"):
            raise ValueError(f"unknown association kind {self.kind!r}")
        if self.kind == "kth":
            if self.k is None or self.k < 1:
                raise ValueError(f"kth association needs k >= 1, got {self.k}")
        elif self.k is not None:
            raise ValueError(f"association {self.kind!r} takes no index")

    @classmethod
    def nba(cls) -> "AssociationRule":
        return cls(kind="nba")

    @classmethod
    def isba(cls) -> "AssociationRule":
        return cls(kind="isba")

    @classmethod
    def rba(cls) -> "AssociationRule":
        return cls(kind="rba")

    @classmethod
    def kth_strongest(cls, k: int) -> "AssociationRule":
        return cls(kind="kth", k=int(k))


@dataclass(frozen=True)
class SimConfig:
    params: NetworkParams
    fading: FadingModel
    assoc: AssociationRule
    samples: int
    point_budget: int = 1_000_000
    tail_eps: float = 1e-4
    seed: int = 0

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if self.point_budget < 10:
            raise ValueError(f"point_budget must be >= 10, got {self.point_budget}")
        if not 0.0 < self.tail_eps < 1.0:
            raise ValueError(f"tail_eps must be in (0, 1), got {self.tail_eps}")
        if self.assoc.kind in ("rba", "kth") and self.fading.kind != "none":
            raise ValueError(
                f"{self.assoc.kind} association is defined on the no-fading "
                "path loss process")


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Sorted sample set on [0, 1] with ccdf/moment/KS queries."""

    samples: np.ndarray
    count: int = field(default=0)

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=float)
        object.__setattr__(self, "samples", x)
        object.__setattr__(self, "count", int(x.size))
        if x.size == 0:
            raise ValueError("empirical distribution needs at least one sample")
        if x[0] < 0.0 or x[-1] > 1.0 or np.any(np.diff(x) < 0.0):
            raise ValueError("samples must be sorted and lie in [0, 1]")

    def ccdf(self, t):
        return empirical_ccdf(self, t)

    def moment(self, k: int) -> float:
        return empirical_moment(self, k)


@dataclass(frozen=True)
class SimResult:
    dist: EmpiricalDistribution
    flagged: int


def empirical_ccdf(dist: EmpiricalDistribution, t):
    """Fraction of samples strictly above t; vectorized over t."""
    n = dist.count
    pos = np.searchsorted(dist.samples, t, side="right")
    out = (n - pos) / n
    return float(out) if np.isscalar(t) else out


def empirical_moment(dist: EmpiricalDistribution, k: int) -> float:
    if k < 1:
        raise ValueError(f"moment order must be >= 1, got {k}")
    return float(np.mean(dist.samples ** k))


def ks_distance(dist: EmpiricalDistribution, cdf_fn) -> float:
    """Exact sup over the sample points of |F_emp - F|."""
    x = dist.samples
    try:
        f = np.asarray(cdf_fn(x), dtype=float)
        if f.shape != x.shape:
            raise TypeError
    except (TypeError, ValueError):
        f = np.array([cdf_fn(v) for v in x])
    n = x.size
    hi = np.arange(1, n + 1) / n
    lo = np.arange(0, n) / n
    return float(max(np.max(hi - f), np.max(f - lo)))


def _rng_for(seed: int, shard: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(shard,))
    return np.random.Generator(np.random.Philox(ss))


def _pow_neg(x, expo, out=None):
    # x ** expo for expo < 0, with cheap paths for the half-integer
    # exponents that dominate the common alpha values; the half-integer
    # paths need the original x, so they ignore an aliased `out`
    if expo == -2.0:
        r = np.multiply(x, x, out=out)
        return np.reciprocal(r, out=r)
    if expo == -1.5:
        r = np.sqrt(x)
        r *= x
        return np.reciprocal(r, out=r)
    if expo == -2.5:
        r = np.sqrt(x)
        r *= x
        r *= x
        return np.reciprocal(r, out=r)
    return np.power(x, expo, out=out)


def sample_nakagami(m: float, rng: np.random.Generator, size=None):
    """Unit-mean Nakagami-m power gain: gamma with shape m, scale 1/m.

    m = 1 is the unit exponential (Rayleigh power); m = 1/2 is the
    square of a standard normal.
    """
    if m <= 0.0:
        raise ValueError(f"m must be positive, got {m}")
    if m == 0.5:
        z = rng.standard_normal(size)
        return z * z if size is not None else float(z) ** 2
    if m == 1.0:
        h = rng.standard_exponential(size)
        return h if size is not None else float(h)
    h = rng.standard_gamma(m, size)
    h = h / m
    return h if size is not None else float(h)


def _tail_consts(delta: float, h2: float):
    cm = delta / (1.0 - delta)
    cv = math.sqrt(h2 * delta / (2.0 - delta))
    em = (delta - 1.0) / delta
    ev = (delta - 2.0) / (2.0 * delta)
    return cm, cv, em, ev


def _sim_shard(config: SimConfig, n: int, rng: np.random.Generator,
               ntop: int = 0):
    """Simulate n realizations; returns (values, flagged_count).

    values has shape (n,) for scalar associations or (n, ntop) when the
    ntop strongest no-fading signal fractions per realization are
    requested.
    """
    params = config.params
    delta = params.delta
    pw = -1.0 / delta
    fading = config.fading
    fad_m = fading.m if fading.kind == "nakagami" else None
    cm, cv, em, ev = _tail_consts(delta, fading.second_moment)
    g_expo = 2.0 * delta / (2.0 - delta)   # inverts the sd criterion for G
    eps = config.tail_eps
    budget = config.point_budget
    isba_fad = config.assoc.kind == "isba" and fad_m is not None

    idx = np.arange(n)
    glast = np.zeros(n)
    power = np.zeros(n)
    flagged = np.zeros(n, dtype=bool)
    if ntop:
        out = np.empty((n, ntop))
    else:
        sig = np.zeros(n)
        out = np.empty(n)

    npts = 0
    chunk = max(32, ntop)
    first = True
    while idx.size:
        na = idx.size
        chunk = int(min(max(chunk, 32), _CHUNK_MAX, max(_CHUNK_ELEMS // na, 32),
                        budget - npts))
        if first and chunk < ntop:
            raise ValueError(
                f"point budget {budget} too small for the {ntop} ordered points")
        e = rng.standard_exponential((na, chunk))
        np.cumsum(e, axis=1, out=e)
        e += glast[idx][:, None]
        newg = e[:, -1].copy()
        v = _pow_neg(e, pw, out=e)
        if fad_m is not None:
            v *= sample_nakagami(fad_m, rng, (na, chunk))
        power[idx] += v.sum(axis=1)
        if first:
            if ntop:
                out[idx] = v[:, :ntop]
            else:
                sig[idx] = v[:, 0]
            first = False
        if isba_fad:
            sig[idx] = np.maximum(sig[idx], v.max(axis=1))
        glast[idx] = newg
        npts += chunk

        mean_tail = cm * np.power(newg, em)
        sd_tail = cv * np.power(newg, ev)
        tot = power[idx] + mean_tail
        done = sd_tail <= eps * tot
        if npts >= budget:
            flagged[idx[~done]] = True
            done[:] = True
        if done.any():
            fin = idx[done]
            if ntop:
                out[fin] /= tot[done][:, None]
            else:
                out[fin] = sig[fin] / tot[done]
        idx = idx[~done]
        if idx.size:
            g_req = (cv / (eps * tot[~done])) ** g_expo
            deficit = g_req - glast[idx]
            chunk = int(np.percentile(deficit, 75.0)) + 32
    return out, int(np.count_nonzero(flagged))


def _rba_shard(config: SimConfig, n: int, rng: np.random.Generator):
    """Random association: one realization at a time, since the selection
    walk needs every generated point.

    When the selection lands in the not-yet-generated tail (probability
    M/total, about 1% at delta = 2/3), the picked value is drawn from
    the tail's size-biased law: the tail values follow a Poisson process
    with intensity d v^(-1-d) dv on (0, v_K), so the value-weighted pick
    has cdf (v/v_K)^(1-d) and is sampled by direct inversion.  The error
    of using the mean tail weight for the band is the tail fluctuation,
    bounded by tail_eps * total."""
    params = config.params
    delta = params.delta
    pw = -1.0 / delta
    cm, cv, em, ev = _tail_consts(delta, 1.0)
    g_expo = 2.0 * delta / (2.0 - delta)
    eps = config.tail_eps
    budget = config.point_budget

    out = np.empty(n)
    flagged = 0
    for j in range(n):
        blocks = []
        g0 = 0.0
        power = 0.0
        npts = 0
        chunk = 64
        while True:
            e = rng.standard_exponential(chunk)
            np.cumsum(e, out=e)
            e += g0
            g0 = e[-1]
            v = _pow_neg(e, pw, out=e)
            blocks.append(v)
            power += v.sum()
            npts += chunk
            tot = power + cm * g0 ** em
            if cv * g0 ** ev <= eps * tot:
                break
            if npts >= budget:
                flagged += 1
                break
            need = (cv / (eps * tot)) ** g_expo - g0
            chunk = int(min(max(need + 32.0, 64.0), _CHUNK_MAX,
                            budget - npts))
        vals = np.concatenate(blocks) if len(blocks) > 1 else blocks[0]
        u = rng.random() * tot
        if u <= power:
            k = int(np.searchsorted(np.cumsum(vals), u))
            if k >= vals.size:
                k = vals.size - 1
            out[j] = vals[k] / tot
        else:
            out[j] = vals[-1] * rng.random() ** (1.0 / (1.0 - delta)) / tot
    return out, flagged


def sample_plp(params: NetworkParams, point_budget: int, tail_eps: float,
               rng: np.random.Generator):
    """One realization of the ordered path loss values xi_1 < xi_2 < ...

    xi_k = (E_1 + ... + E_k)^(1/delta) with iid unit exponentials E_j;
    generation stops by the same tail criterion as the SF sampler.
    Returns (values, truncated_flag).
    """
    delta = params.delta
    cm, cv, em, ev = _tail_consts(delta, 1.0)
    g_expo = 2.0 * delta / (2.0 - delta)
    blocks = []
    g0 = 0.0
    power = 0.0
    npts = 0
    chunk = 64
    flag = False
    while True:
        e = rng.standard_exponential(chunk)
        np.cumsum(e, out=e)
        e += g0
        g0 = e[-1]
        blocks.append(e)
        power += _pow_neg(e, -1.0 / delta).sum()
        npts += chunk
        tot = power + cm * g0 ** em
        if cv * g0 ** ev <= tail_eps * tot:
            break
        if npts >= point_budget:
            flag = True
            break
        need = (cv / (tail_eps * tot)) ** g_expo - g0
        chunk = int(min(max(need + 32.0, 64.0), _CHUNK_MAX, point_budget - npts))
    g = np.concatenate(blocks) if len(blocks) > 1 else blocks[0]
    return g ** (1.0 / delta), flag


def _run_shard(args):
    config, shard_idx, count, ntop = args
    rng = _rng_for(config.seed, shard_idx)
    if config.assoc.kind == "rba":
        vals, flagged = _rba_shard(config, count, rng)
    else:
        vals, flagged = _sim_shard(config, count, rng, ntop=ntop)
    return shard_idx, vals, flagged


def worker_count(requested: int | None = None) -> int:
    """Worker processes to use: explicit argument, else SIGFRAC_THREADS,
    else the machine's CPU count.  Never affects results, only speed."""
    if requested is not None:
        return max(1, int(requested))
    env = os.environ.get("SIGFRAC_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run_all(config: SimConfig, ntop: int, workers: int | None):
    shards = []
    left = config.samples
    i = 0
    while left > 0:
        take = min(_SHARD, left)
        shards.append((config, i, take, ntop))
        left -= take
        i += 1
    w = min(worker_count(workers), len(shards))
    if w <= 1:
        results = [_run_shard(s) for s in shards]
    else:
        with ProcessPoolExecutor(max_workers=w) as pool:
            results = list(pool.map(_run_shard, shards, chunksize=1))
    results.sort(key=lambda r: r[0])
    vals = np.concatenate([r[1] for r in results])
    flagged = sum(r[2] for r in results)
    if flagged > 0.001 * config.samples:
        raise SimulationError(
            f"{flagged} of {config.samples} realizations hit the point "
            f"budget {config.point_budget} before the tail criterion")
    return vals, flagged


def sample_sf(config: SimConfig, workers: int | None = None) -> SimResult:
    """Sample `config.samples` independent signal fractions.

    nba serves the nearest base station (fading applied to every
    received power); isba serves the instantaneously strongest one;
    rba picks station k with probability SF_k; kth_strongest(k) returns
    the k-th largest element of the no-fading SF sequence.  Identical
    configs (including seed) give bit-identical output for any worker
    count.
    """
    ntop = config.assoc.k if config.assoc.kind == "kth" else 0
    vals, flagged = _run_all(config, ntop, workers)
    if ntop:
        vals = vals[:, ntop - 1].copy()
        if vals.max() > 1.0 / ntop:
            raise AssertionError(
                f"SF_{ntop} sample exceeds its support bound 1/{ntop}")
    vals.sort()
    return SimResult(dist=EmpiricalDistribution(samples=vals), flagged=flagged)


def sample_sf_topk(config: SimConfig, ntop: int,
                   workers: int | None = None):
    """The ntop largest no-fading signal fractions per realization, as an
    (samples, ntop) array in realization order, plus the flagged count.
    Rows are joint draws: column k is SF_{k+1} of the same network."""
    if config.fading.kind != "none":
        raise ValueError("ordered signal fractions require no fading")
    if ntop < 1:
        raise ValueError(f"ntop must be >= 1, got {ntop}")
    return _run_all(config, ntop, workers)


def arcsine_moment(k: int) -> float:
    """k-th moment of the arcsine law: C(2k, k) / 4^k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return math.comb(2 * k, k) / 4.0 ** k


def arcsine_cdf(t):
    return 2.0 / math.pi * np.arcsin(np.sqrt(t))


@dataclass(frozen=True)
class ConjectureReport:
    """Comparison of the Nakagami-1/2, alpha = 4 SF distribution with
    the arcsine law: first ten moments and the KS sup-distance."""

    samples: int
    seed: int
    empirical_moments: tuple
    arcsine_moments: tuple
    rel_moment_diffs: tuple
    ks_distance: float
    flagged: int

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "seed": self.seed,
            "alpha": 4.0,
            "fading_m": 0.5,
            "moments": [
                {"k": k + 1, "empirical": e, "arcsine": a, "rel_diff": r}
                for k, (e, a, r) in enumerate(
                    zip(self.empirical_moments, self.arcsine_moments,
                        self.rel_moment_diffs))
            ],
            "ks_distance": self.ks_distance,
            "flagged": self.flagged,
        }


def conjecture_report(samples: int, seed: int, point_budget: int = 1_000_000,
                      tail_eps: float = 1e-4,
                      workers: int | None = None) -> ConjectureReport:
    """Simulate NBA with Nakagami-1/2 fading at alpha = 4 and compare
    against the arcsine distribution (cdf 2 arcsin(sqrt t) / pi)."""
    config = SimConfig(params=NetworkParams.from_alpha(4.0),
                       fading=FadingModel.nakagami(0.5),
                       assoc=AssociationRule.nba(),
                       samples=samples, point_budget=point_budget,
                       tail_eps=tail_eps, seed=seed)
    res = sample_sf(config, workers)
    x = res.dist.samples
    emp = []
    acc = np.ones_like(x)
    for _ in range(10):
        acc = acc * x
        emp.append(float(acc.mean()))
    arc = [arcsine_moment(k) for k in range(1, 11)]
    rel = [abs(e - a) / a for e, a in zip(emp, arc)]
    ks = ks_distance(res.dist, arcsine_cdf)
    return ConjectureReport(samples=samples, seed=seed,
                            empirical_moments=tuple(emp),
                            arcsine_moments=tuple(arc),
                            rel_moment_diffs=tuple(rel),
                            ks_distance=ks, flagged=res.flagged)
