"""Seeded Monte Carlo experiments over conditional trees.

Every replication ``r`` at size ``n`` draws from its own generator
``make_rng(seed, n, r)`` and writes into slot ``r`` of a preallocated
array, so results do not depend on how replications are spread over
worker processes.  Verdict tolerances are ordinary parameters with
defaults listed in ``CATALOG``; they were calibrated on pilot runs and
the output says so.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import __version__, apollonian, heavy, limits
from .errors import ConfigurationError, DomainError, InvariantViolation
from .offspring import expected_zk, gw_total_size_pmf_upto, in_support, nearest_sizes, parse_distribution, size_biased
from .sampler import ALGORITHM_ID, make_rng, sample_conditional
from .tree import OrderedTree, fringe_counts, height

QUANTILES = (0.05, 0.25, 0.5, 0.75, 0.95)
THREADS_ENV = "GWHEAVY_THREADS"


# ---------------------------------------------------------------------------
# per-replication statistics


def _sanity(n, row):
    """Cheap consistency checks on one replication; a failure means a bug."""
    H = row.get("H")
    if H is not None:
        if "L" in row and row["L"] > H:
            raise InvariantViolation(f"heavy path length {row['L']} exceeds height {H}")
        if "maxdist" in row and row["maxdist"] > H:
            raise InvariantViolation(f"max distance {row['maxdist']} exceeds height {H}")
    if "B" in row and not 1 <= row["B"] <= n:
        raise InvariantViolation(f"2-heavy size {row['B']} outside [1, {n}]")


def _rep_heavy_path(tree, d, p):
    L = heavy.heavy_path(tree, d).length
    return {"L_scaled": L / math.sqrt(tree.n), "L": L, "H": height(tree)}


def _rep_two_heavy(tree, d, p):
    B = heavy.k_heavy_size(tree, 2, d)[0]
    return {"B_frac": B / tree.n, "B": B}


def _rep_distance(tree, d, p):
    return {"maxdist": heavy.max_distance_to_k_heavy(tree, p["k"], d), "H": height(tree)}


def _rep_nk_max(tree, d, p):
    nk, nkplus = heavy.max_kth_subtree(tree, p["k"], d)
    return {"max_Nk": nk, "max_Nkplus": nkplus}


def _rep_nk_root(tree, d, p):
    k = p["k"]
    s = heavy.root_order_stats(tree, d)
    nk = int(s[k - 1]) if k <= s.size else 0
    nkplus = int(s[k - 1 :].sum()) if k <= s.size else 0
    return {"Nk_root": nk, "Nkplus_root": nkplus}


def _rep_zk(tree, d, p):
    z = fringe_counts(tree)
    return {f"Zk_ratio_{k}": z[k - 1] / p["_zk_means"][tree.n][k] for k in p["ks"]}


def _rep_patterns(tree, d, p):
    return {
        "heavy_path_nodes": heavy.pattern_count(tree, d, heavy.PatternSpec.heavy_path()),
        "binary_blocks_1": heavy.pattern_count(tree, d, heavy.PatternSpec.binary_blocks(1)),
    }


def _rep_height(tree, d, p):
    H = height(tree)
    return {"H_scaled": p["_sigma"] * H / math.sqrt(2 * tree.n), "H": H}


def _rep_local(tree, d, p):
    s = heavy.root_order_stats(tree, d)
    return {
        "root_degree": int(tree.degrees[0]),
        "N2": int(s[1]) if s.size > 1 else 0,
        "N3": int(s[2]) if s.size > 2 else 0,
    }


def _rep_apollonian(tree, d, p):
    net = apollonian.build_from_dual(tree)
    path = apollonian.heavy_simple_path(net)
    m = net.num_subdivisions
    ok = apollonian.verify_simple_path(net, path)
    return {
        "path_frac": len(path) / max(m, 1),
        "selected_frac": path.selected_internal / max(m, 1),
        "vertices": len(path),
        "selected": path.selected_internal,
        "valid": 1.0 if ok else 0.0,
    }


# ---------------------------------------------------------------------------
# catalog


@dataclass(frozen=True)
class Experiment:
    name: str
    primary: str
    stats: tuple
    rep: object
    needs_decomposition: bool
    defaults: dict
    checks: str


CATALOG = {
    e.name: e
    for e in (
        Experiment(
            "heavy_path_moments", "L_scaled", ("L_scaled", "L", "H"), _rep_heavy_path, True,
            dict(dist="full_binary", sizes=[1001, 10001, 100001, 1000001], replications=[10000, 10000, 2000, 400],
                 first_moment_tol=0.15, second_moment_rel_tol=0.15, monotone_se=2.0),
            "moments of L_n/sqrt(n) converge to (2/sigma)^j E[T^j], E[T^j] = j!/(phi(1/2)...phi(j/2))",
        ),
        Experiment(
            "two_heavy_fraction", "B_frac", ("B_frac", "B"), _rep_two_heavy, True,
            dict(dist="apollonian_ternary", sizes=[300001], replications=200, floor=0.10, stdev_max=0.02),
            "B_n/n stays above a positive constant and below 1 - sum_{i>=3} (i-2) p_i",
        ),
        Experiment(
            "distance_scaling", "maxdist", ("maxdist", "H"), _rep_distance, True,
            dict(dist="catalan", sizes=[1000, 10000, 100000, 1000000], replications=500, k=2, slope_halfwidth=0.06),
            "max distance to the k-heavy tree grows like n^(1/(k+1))",
        ),
        Experiment(
            "nk_max_scaling", "max_Nk", ("max_Nk", "max_Nkplus"), _rep_nk_max, True,
            dict(dist="apollonian_ternary", sizes=[1000, 10000, 100000, 1000000], replications=200, k=3,
                 slope_halfwidth=0.09),
            "max over nodes of the k-th largest child subtree grows like n^(2/k)",
        ),
        Experiment(
            "nk_root_tail", "Nk_root", ("Nk_root", "Nkplus_root"), _rep_nk_root, True,
            dict(dist="catalan", sizes=[100000], replications=100000, k=2, t_min=100, t_max=10000, thresholds=13,
                 slope_halfwidth=0.15),
            "P(N_k >= t) at the root decays like t^((1-k)/2)",
        ),
        Experiment(
            "zk_concentration", "Zk_ratio_1", (), _rep_zk, False,
            dict(dist="catalan", sizes=[1000, 10000], replications=1000, ks=[1, 2, 3, 5, 10], tol=0.05),
            "Z_k / E[Z_k] concentrates at 1 (exact E[Z_k] from walk probabilities)",
        ),
        Experiment(
            "pattern_growth", "heavy_path_nodes", ("heavy_path_nodes", "binary_blocks_1"), _rep_patterns, True,
            dict(dist="catalan", sizes=[1000, 10000, 100000, 1000000], replications=200,
                 slope_range_heavy_path=[0.44, 0.56], slope_range_binary_blocks=[0.48, 0.64]),
            "|V(1*)| and |V((1*2)1*)| grow like sqrt(n) log^k n",
        ),
        Experiment(
            "height_theta", "H_scaled", ("H_scaled", "H"), _rep_height, False,
            dict(dist="full_binary", sizes=[100001], replications=10000, ks_max=0.05),
            "sigma H_n / sqrt(2n) follows the theta law",
        ),
        Experiment(
            "apollonian_path", "path_frac", ("path_frac", "selected_frac", "vertices", "selected", "valid"), _rep_apollonian, False,
            dict(dist="apollonian_ternary", sizes=[100, 1000, 10000, 100000], replications=50, floor=0.05),
            "Apollonian networks with m subdivisions have simple paths of length >= c m; sizes are m",
        ),
        Experiment(
            "local_limit", "root_degree", ("root_degree", "N2", "N3"), _rep_local, True,
            dict(dist="catalan", sizes=[10000], replications=10000, tv_max=0.05, mean_tol=0.05, tail_bucket=20,
                 nk_tv_max=0.05),
            "root degree tends to the size-biased law; off-spine subtree sizes tend to GW sizes",
        ),
    )
}


# ---------------------------------------------------------------------------
# configuration and results


@dataclass
class ExperimentConfig:
    experiment: str
    dist: str | None = None
    sizes: list | None = None
    replications: int | list | None = None
    seed: int = 0
    params: dict = field(default_factory=dict)
    workers: int | None = None

    def __post_init__(self):
        if self.experiment not in CATALOG:
            raise ConfigurationError(f"unknown experiment {self.experiment!r}; choose from {', '.join(CATALOG)}")
        defaults = dict(CATALOG[self.experiment].defaults)
        if self.dist is None:
            self.dist = defaults["dist"]
        if self.sizes is None:
            self.sizes = defaults["sizes"]
        if self.replications is None:
            self.replications = defaults["replications"]
        unknown = set(self.params) - set(defaults)
        if unknown:
            raise ConfigurationError(f"unknown parameters for {self.experiment}: {sorted(unknown)}")
        for key in ("dist", "sizes", "replications"):
            defaults.pop(key)
        self.params = {**defaults, **self.params}
        self.sizes = [int(n) for n in self.sizes]
        reps = self.replications
        if isinstance(reps, (list, tuple)):
            if len(reps) != len(self.sizes):
                raise ConfigurationError("replications list must match sizes")
            self.replications = [int(r) for r in reps]
        else:
            self.replications = [int(reps)] * len(self.sizes)
        if any(r < 1 for r in self.replications):
            raise ConfigurationError("replications must be >= 1")
        if not self.sizes:
            raise ConfigurationError("at least one size is required")
        if self.experiment == "apollonian_path" and self.dist != "apollonian_ternary":
            raise ConfigurationError("apollonian_path only runs on apollonian_ternary")

    @classmethod
    def from_json(cls, path_or_dict, **overrides):
        if isinstance(path_or_dict, dict):
            data = dict(path_or_dict)
        else:
            with open(path_or_dict) as fh:
                data = json.load(fh)
        data.update({k: v for k, v in overrides.items() if v is not None})
        if "master_seed" in data:
            data["seed"] = data.pop("master_seed")
        known = {"experiment", "dist", "sizes", "replications", "seed", "params", "workers"}
        extra = set(data) - known
        if extra:
            raise ConfigurationError(f"unknown config keys {sorted(extra)}")
        return cls(**data)


@dataclass
class SizeSummary:
    n: int
    count: int
    mean: float
    stderr: float
    quantiles: dict
    extras: dict

    def to_dict(self):
        return {"n": self.n, "count": self.count, "mean": self.mean, "stderr": self.stderr,
                "quantiles": self.quantiles, "extras": self.extras}


@dataclass
class McSummary:
    experiment: str
    dist: str
    params: dict
    seed: int
    per_n: list
    fits: dict
    verdicts: dict
    raw: dict = field(default_factory=dict, repr=False)

    def to_dict(self):
        return _clean({
            "experiment": self.experiment,
            "dist": self.dist,
            "params": {k: v for k, v in self.params.items() if not k.startswith("_")},
            "seed": self.seed,
            "algorithm_id": ALGORITHM_ID,
            "version": __version__,
            "tolerances": "pilot-calibrated",
            "per_n": [s.to_dict() for s in self.per_n],
            "fits": self.fits,
            "verdicts": self.verdicts,
        })

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"

    def write_raw_csv(self, path) -> None:
        """One row per replication: n, rep and every recorded statistic."""
        with open(path, "w") as fh:
            names = None
            for n, table in self.raw.items():
                if names is None:
                    names = list(table)
                    fh.write(",".join(["n", "rep"] + names) + "\n")
                for r in range(len(table[names[0]])):
                    fh.write(",".join([str(n), str(r)] + [repr(float(table[c][r])) for c in names]) + "\n")

    @property
    def passed(self) -> bool:
        return all(v for k, v in self.verdicts.items() if isinstance(v, bool))


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else None
    return obj


# ---------------------------------------------------------------------------
# execution


def worker_count(config_workers=None) -> int:
    if config_workers is not None:
        return max(1, int(config_workers))
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigurationError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def _stat_names(config):
    exp = CATALOG[config.experiment]
    if config.experiment == "zk_concentration":
        return tuple(f"Zk_ratio_{k}" for k in config.params["ks"])
    return exp.stats


def _tree_size(config, n):
    return 3 * n + 1 if config.experiment == "apollonian_path" else n


def _run_chunk(args):
    name, dist, n, start, stop, seed, params, names = args
    exp = CATALOG[name]
    tree_n = 3 * n + 1 if name == "apollonian_path" else n
    out = np.empty((stop - start, len(names)))
    for i, r in enumerate(range(start, stop)):
        rng = make_rng(seed, n, r)
        tree: OrderedTree = sample_conditional(dist, tree_n, rng)
        d = heavy.compute(tree) if exp.needs_decomposition else None
        row = exp.rep(tree, d, params)
        _sanity(tree.n, row)
        out[i] = [row[c] for c in names]
    return out


def _prepare_params(config, dist):
    p = dict(config.params)
    p["_sigma"] = math.sqrt(dist.sigma2)
    if config.experiment == "zk_concentration":
        p["_zk_means"] = {n: {k: expected_zk(dist, n, k)[0] for k in p["ks"]} for n in config.sizes}
    return p


def simulate(config: ExperimentConfig) -> dict:
    """Raw per-replication values ``{n: {stat: array}}``."""
    dist = parse_distribution(config.dist)
    for n in config.sizes:
        tn = _tree_size(config, n)
        if n < (0 if config.experiment == "apollonian_path" else 1) or not in_support(dist, tn):
            raise DomainError(
                f"n={n} is not a feasible size for {dist.name} (nearest valid sizes: {nearest_sizes(dist, tn)})"
            )
    params = _prepare_params(config, dist)
    names = _stat_names(config)
    workers = worker_count(config.workers)
    raw = {}
    jobs = []
    for n, reps in zip(config.sizes, config.replications):
        chunk = max(1, math.ceil(reps / (4 * workers))) if workers > 1 else reps
        for a in range(0, reps, chunk):
            jobs.append((config.experiment, dist, n, a, min(reps, a + chunk), config.seed, params, names))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_chunk, jobs))
    else:
        results = [_run_chunk(j) for j in jobs]
    for n, reps in zip(config.sizes, config.replications):
        raw[n] = np.empty((reps, len(names)))
    for job, block in zip(jobs, results):
        raw[job[2]][job[3] : job[4]] = block
    return {n: {c: table[:, j] for j, c in enumerate(names)} for n, table in raw.items()}


def _basic(n, values):
    v = np.asarray(values, dtype=float)
    sd = float(v.std(ddof=1)) if v.size > 1 else 0.0
    q = np.quantile(v, QUANTILES)
    return SizeSummary(
        n=int(n),
        count=int(v.size),
        mean=float(v.mean()),
        stderr=sd / math.sqrt(v.size),
        quantiles={f"{int(round(100 * a))}": float(x) for a, x in zip(QUANTILES, q)},
        extras={"stdev": sd},
    )


def _fit(sizes, means):
    pts = [(n, m) for n, m in zip(sizes, means) if m > 0]
    if len(pts) < 3:
        return None
    f = limits.fit_power_law(pts)
    lo, hi = f.slope_ci()
    return {"slope": f.slope, "intercept": f.intercept, "r2": f.r2, "slope_stderr": f.slope_stderr, "slope_ci95": [lo, hi]}


def _slope_verdict(fit, target, params, key="slope_range", halfwidth_key="slope_halfwidth"):
    lo, hi = params.get(key) or (target - params[halfwidth_key], target + params[halfwidth_key])
    return {"target": target, "range": [lo, hi], "ok": fit is not None and lo <= fit["slope"] <= hi}


def run(config: ExperimentConfig) -> McSummary:
    """Run every replication and assemble the summary with fits and verdicts."""
    dist = parse_distribution(config.dist)
    raw = simulate(config)
    exp = CATALOG[config.experiment]
    primary = exp.primary if config.experiment != "zk_concentration" else f"Zk_ratio_{config.params['ks'][0]}"
    per_n = []
    for n in config.sizes:
        s = _basic(n, raw[n][primary])
        for c, v in raw[n].items():
            if c != primary:
                s.extras[f"mean_{c}"] = float(np.mean(v))
        per_n.append(s)
    fits, verdicts = {}, {}
    _ANALYSES[config.experiment](config, dist, raw, per_n, fits, verdicts)
    return McSummary(config.experiment, dist.name, config.params, int(config.seed), per_n, fits, verdicts, raw)


# ---------------------------------------------------------------------------
# experiment-specific analyses


def _an_heavy_path(config, dist, raw, per_n, fits, verdicts):
    p = config.params
    sigma = math.sqrt(dist.sigma2)
    targets = {j: (2 / sigma) ** j * limits.t_infinity_moment(j) for j in (1, 2, 3)}
    for s in per_n:
        x = raw[s.n]["L_scaled"]
        for j in (1, 2, 3):
            xj = x**j
            s.extras[f"moment_{j}"] = float(xj.mean())
            s.extras[f"moment_{j}_stderr"] = float(xj.std(ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0
            s.extras[f"target_{j}"] = targets[j]
    monotone = all(
        b.mean >= a.mean - p["monotone_se"] * math.hypot(a.stderr, b.stderr) for a, b in zip(per_n, per_n[1:])
    )
    last = per_n[-1]
    verdicts["monotone_within_se"] = monotone
    verdicts["first_moment_error"] = abs(last.mean - targets[1])
    verdicts["first_moment_ok"] = verdicts["first_moment_error"] <= p["first_moment_tol"]
    rel = abs(last.extras["moment_2"] - targets[2]) / targets[2]
    verdicts["second_moment_rel_error"] = rel
    verdicts["second_moment_ok"] = rel <= p["second_moment_rel_tol"]


def _an_two_heavy(config, dist, raw, per_n, fits, verdicts):
    p = config.params
    bound = 1.0 - sum((i - 2) * q for i, q in enumerate(dist.probs) if i >= 3)
    last = per_n[-1]
    verdicts["upper_bound"] = bound
    verdicts["floor_ok"] = last.mean >= p["floor"]
    verdicts["upper_bound_ok"] = last.mean <= bound
    verdicts["stdev_ok"] = last.extras["stdev"] <= p["stdev_max"]


def _an_scaling(stat, target_fn):
    def analyse(config, dist, raw, per_n, fits, verdicts):
        means = [float(np.mean(raw[n][stat])) for n in config.sizes]
        fit = _fit(config.sizes, means)
        fits[stat] = fit
        v = _slope_verdict(fit, target_fn(config.params["k"]), config.params)
        if fit is None:
            # e.g. every rank is <= k when no node has more than k children
            v["reason"] = "fewer than three sizes with a positive mean; power law undefined"
        verdicts[f"{stat}_slope"] = v

    return analyse


def tail_thresholds(t_min, t_max, count):
    return sorted(set(int(round(t)) for t in np.geomspace(t_min, t_max, int(count))))


def _an_nk_tail(config, dist, raw, per_n, fits, verdicts):
    p = config.params
    k = p["k"]
    ts = tail_thresholds(p["t_min"], p["t_max"], p["thresholds"])
    for s in per_n:
        for stat in ("Nk_root", "Nkplus_root"):
            x = raw[s.n][stat]
            freqs = [float(np.mean(x >= t)) for t in ts]
            s.extras[f"tail_{stat}"] = {str(t): f for t, f in zip(ts, freqs)}
            fit = _fit(ts, freqs)
            fits[f"{stat}_tail_n{s.n}"] = fit
    target = (1 - k) / 2
    last = config.sizes[-1]
    verdicts["Nk_root_tail_slope"] = _slope_verdict(fits[f"Nk_root_tail_n{last}"], target, p)
    verdicts["Nkplus_root_tail_slope"] = _slope_verdict(fits[f"Nkplus_root_tail_n{last}"], target, p)


def _an_zk(config, dist, raw, per_n, fits, verdicts):
    p = config.params
    last = config.sizes[-1]
    worst = 0.0
    for s in per_n:
        for k in p["ks"]:
            x = raw[s.n][f"Zk_ratio_{k}"]
            s.extras[f"stdev_Zk_ratio_{k}"] = float(x.std(ddof=1)) if x.size > 1 else 0.0
            if s.n == last:
                worst = max(worst, abs(float(x.mean()) - 1.0))
    verdicts["max_mean_deviation"] = worst
    verdicts["concentration_ok"] = worst <= p["tol"]


def _an_patterns(config, dist, raw, per_n, fits, verdicts):
    p = config.params
    for stat, key in (("heavy_path_nodes", "slope_range_heavy_path"), ("binary_blocks_1", "slope_range_binary_blocks")):
        fit = _fit(config.sizes, [float(np.mean(raw[n][stat])) for n in config.sizes])
        fits[stat] = fit
        verdicts[f"{stat}_slope"] = _slope_verdict(fit, 0.5, p, key=key)


def _an_height(config, dist, raw, per_n, fits, verdicts):
    p = config.params
    worst = 0.0
    for s in per_n:
        res = stats.kstest(raw[s.n]["H_scaled"], limits.theta_cdf)
        s.extras["ks_distance"] = float(res.statistic)
        worst = float(res.statistic)
    verdicts["ks_distance"] = worst
    verdicts["ks_ok"] = worst <= p["ks_max"]


def _an_apollonian(config, dist, raw, per_n, fits, verdicts):
    p = config.params
    for s in per_n:
        s.extras["min_path_frac"] = float(raw[s.n]["path_frac"].min())
        s.extras["identity_holds"] = bool(np.all(raw[s.n]["vertices"] == raw[s.n]["selected"] + 2))
    verdicts["all_paths_valid"] = all(bool(np.all(raw[n]["valid"] == 1.0)) for n in config.sizes)
    verdicts["identity_ok"] = all(s.extras["identity_holds"] for s in per_n)
    verdicts["min_path_frac"] = per_n[-1].extras["min_path_frac"]
    verdicts["floor_ok"] = verdicts["min_path_frac"] >= p["floor"]


def local_limit_law(dist, tail_bucket):
    """Limit laws at the root: size-biased degree and the joint law of the
    two largest off-spine subtree sizes, capped at ``tail_bucket + 1``.

    Returns ``(degree_pmf, joint)`` with ``joint[a, b] = P(N_2 = a, N_3 = b)``
    on ``0..tail_bucket+1`` (the last index means "more than tail_bucket").
    """
    zeta = size_biased(dist)
    T = int(tail_bucket)
    sizes = gw_total_size_pmf_upto(dist, T)
    q = np.zeros(T + 2)
    q[1 : T + 1] = sizes[1:]
    q[T + 1] = max(0.0, 1.0 - sizes[1:].sum())
    F = np.cumsum(q)
    # P(M1 <= a, M2 <= b) for the top two of r iid copies, b <= a
    joint = np.zeros((T + 2, T + 2))
    for z, w in enumerate(zeta):
        if w == 0:
            continue
        r = z - 1
        if r <= 0:
            joint[0, 0] += w
            continue

        def G(a, b):
            if a < 0 or b < 0:
                return 0.0
            b = min(a, b)
            fb = F[b]
            return fb**r + r * fb ** (r - 1) * (F[a] - fb)

        for a in range(1, T + 2):
            lo_b = 0 if r == 1 else 1
            for b in range(lo_b, a + 1):
                if r == 1:
                    # only one off-spine subtree: N_3 = 0
                    if b == 0:
                        joint[a, 0] += w * q[a]
                    continue
                mass = G(a, b) - G(a - 1, b) - G(a, b - 1) + G(a - 1, b - 1)
                joint[a, b] += w * mass
    return zeta, joint


def _an_local(config, dist, raw, per_n, fits, verdicts):
    p = config.params
    T = int(p["tail_bucket"])
    zeta, joint = local_limit_law(dist, T)
    last = per_n[-1]
    x = raw[last.n]["root_degree"].astype(np.int64)
    emp = np.bincount(x, minlength=len(zeta)) / x.size
    ref = np.zeros(max(len(emp), len(zeta)))
    ref[: len(zeta)] = zeta
    emp = np.pad(emp, (0, len(ref) - len(emp)))
    tv = 0.5 * float(np.abs(emp - ref).sum())
    a = np.minimum(raw[last.n]["N2"].astype(np.int64), T + 1)
    b = np.minimum(raw[last.n]["N3"].astype(np.int64), T + 1)
    emp2 = np.zeros_like(joint)
    np.add.at(emp2, (a, b), 1.0 / a.size)
    tv2 = 0.5 * float(np.abs(emp2 - joint).sum())
    mean_target = float(np.dot(np.arange(len(zeta)), zeta))
    verdicts["root_degree_tv"] = tv
    verdicts["root_degree_tv_ok"] = tv <= p["tv_max"]
    verdicts["root_degree_mean"] = float(x.mean())
    verdicts["root_degree_mean_target"] = mean_target
    verdicts["root_degree_mean_ok"] = abs(float(x.mean()) - mean_target) <= p["mean_tol"]
    verdicts["n2_n3_tv"] = tv2
    verdicts["n2_n3_tv_ok"] = tv2 <= p["nk_tv_max"]


_ANALYSES = {
    "heavy_path_moments": _an_heavy_path,
    "two_heavy_fraction": _an_two_heavy,
    "distance_scaling": _an_scaling("maxdist", lambda k: 1 / (k + 1)),
    "nk_max_scaling": _an_scaling("max_Nk", lambda k: 2 / k),
    "nk_root_tail": _an_nk_tail,
    "zk_concentration": _an_zk,
    "pattern_growth": _an_patterns,
    "height_theta": _an_height,
    "apollonian_path": _an_apollonian,
    "local_limit": _an_local,
}
