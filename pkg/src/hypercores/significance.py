"""Significance of core quality metrics against random node subsets of the same size.

Each baseline subset is scored with exactly the metric suite used for the real
core; a two-sided one-sample t-test then compares the baseline values of every
metric with the core's value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betainc

from .quality import DistanceTable, QualityError, core_metrics, metric_names


class SignificanceError(ValueError):
    pass


@dataclass
class BaselineSample:
    index: int
    nodes: tuple
    metrics: dict
    error: str | None = None


@dataclass(frozen=True)
class TTestResult:
    t: float
    df: int
    p: float
    mean: float
    sd: float
    n: int


@dataclass
class PValueVector:
    p: dict = field(default_factory=dict)
    t: dict = field(default_factory=dict)
    df: dict = field(default_factory=dict)
    used: dict = field(default_factory=dict)

    def passes(self, threshold: float = 1e-5) -> bool:
        return bool(self.p) and all(p < threshold for p in self.p.values())


def t_sf_two_sided(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise SignificanceError("degrees of freedom must be positive")
    if math.isinf(t):
        return 0.0
    return float(betainc(df / 2.0, 0.5, df / (df + t * t)))


def t_cdf(t: float, df: float) -> float:
    tail = 0.5 * t_sf_two_sided(t, df)
    return tail if t < 0 else 1.0 - tail


def one_sample_t_test(samples, hypothesis: float) -> TTestResult:
    """Two-sided one-sample t-test of ``mean(samples) == hypothesis``.

    Uses the n-1 sample standard deviation. With zero spread the p-value is 1
    when the mean equals the hypothesis and 0 otherwise.
    """
    x = np.asarray(list(samples), dtype=float)
    n = x.size
    if n < 2:
        raise SignificanceError("need at least two samples")
    if not np.all(np.isfinite(x)) or not math.isfinite(hypothesis):
        raise SignificanceError("samples and hypothesis must be finite")
    mean = math.fsum(x) / n
    sd = math.sqrt(math.fsum((x - mean) ** 2) / (n - 1))
    df = n - 1
    if sd == 0.0:
        if mean == hypothesis:
            return TTestResult(0.0, df, 1.0, mean, sd, n)
        return TTestResult(math.copysign(math.inf, mean - hypothesis), df, 0.0, mean, sd, n)
    t = (mean - hypothesis) / (sd / math.sqrt(n))
    return TTestResult(t, df, t_sf_two_sided(t, df), mean, sd, n)


def subset_streams(seed: int, count: int) -> list:
    """One independent generator per subset index, derived from ``seed``."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(count)]


def sample_subsets(h, size: int, count: int = 100, seed: int = 0) -> list:
    nodes = list(h.nodes)
    if not 0 < size < len(nodes):
        raise SignificanceError(f"subset size must lie in (0, {len(nodes)}), got {size}")
    out = []
    for rng in subset_streams(seed, count):
        pick = rng.choice(len(nodes), size=size, replace=False)
        out.append(tuple(sorted(nodes[i] for i in pick)))
    return out


def sample_baselines(h, size: int, count: int = 100, seed: int = 0, table: DistanceTable | None = None) -> list:
    """Score ``count`` uniform random ``size``-subsets of ``h``'s nodes.

    A subset is treated as the only core when picking the node pairs for the
    centrality metrics. Subsets on which a metric is undefined (for example a
    directed subset whose nodes all have in-degree 0) get NaN metrics and an
    ``error`` message.
    """
    table = table if table is not None else DistanceTable(h)
    names = metric_names(h.directed)
    out = []
    for i, nodes in enumerate(sample_subsets(h, size, count, seed)):
        try:
            metrics, _ = core_metrics(h, [nodes], nodes, table)
            out.append(BaselineSample(i, nodes, metrics))
        except QualityError as exc:
            out.append(BaselineSample(i, nodes, {m: math.nan for m in names}, str(exc)))
    return out


def core_p_values(h, report, baselines) -> PValueVector:
    """Per-metric p-values of ``report`` against ``baselines``; stores them on the report too.

    Baselines whose value for a metric is NaN are left out of that metric's
    test. If fewer than two remain the p-value is NaN, which fails the gate.
    """
    vec = PValueVector()
    for name in metric_names(h.directed):
        values = [b.metrics[name] for b in baselines if not math.isnan(b.metrics[name])]
        vec.used[name] = len(values)
        if len(values) < 2:
            vec.p[name], vec.t[name], vec.df[name] = math.nan, math.nan, 0
            continue
        res = one_sample_t_test(values, report.metrics[name])
        vec.p[name], vec.t[name], vec.df[name] = res.p, res.t, res.df
    report.p_values = dict(vec.p)
    return vec
