"""Short-term router measurements smoothed with EWMA.

Two signals are sampled at every router on a fixed interval: the number of
pending Interests held in the PIT and the number of Content Store hits since
the previous sample. Each signal feeds an :class:`EwmaEstimator` whose
estimate is the smoothed mean plus a tenth of the smoothed absolute
deviation.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass

__all__ = [
    "EwmaEstimator",
    "RouterFeatureRecord",
    "sample_router",
    "collect_features",
    "features_to_csv",
    "features_from_csv",
    "write_features",
    "read_features",
]

GAIN = 0.125
DEV_GAIN = 0.25
MARGIN = 0.1


class EwmaEstimator:
    """Running average, deviation and margin-padded estimate of one signal.

    The first sample seeds the average with a zero deviation. Later samples
    update the average first, and the deviation is then measured against the
    updated average.
    """

    def __init__(self, g=GAIN, g_prime=DEV_GAIN, margin_coeff=MARGIN):
        if not (0 < g < 1 and 0 < g_prime < 1):
            raise ValueError("gains must lie strictly between 0 and 1")
        self.g = g
        self.g_prime = g_prime
        self.margin_coeff = margin_coeff
        self.avg = 0.0
        self.dev = 0.0
        self.initialized = False
        self.count = 0

    def __repr__(self):
        return f"EwmaEstimator(avg={self.avg!r}, dev={self.dev!r}, count={self.count})"

    def update(self, sample):
        if sample < 0:
            raise ValueError(f"negative sample {sample}")
        if not self.initialized:
            self.avg = float(sample)
            self.dev = 0.0
            self.initialized = True
        else:
            self.avg = self.g * sample + (1.0 - self.g) * self.avg
            self.dev = self.dev + self.g_prime * (abs(sample - self.avg) - self.dev)
        self.count += 1
        return self

    def estimate(self):
        if not self.initialized:
            raise ValueError("estimator has not seen any sample")
        return self.avg + self.margin_coeff * self.dev


def sample_router(router, pi_est, hi_est, hit_mode="delta"):
    """Feed one PIT-occupancy sample and one hit sample to the estimators.

    With ``hit_mode="delta"`` the hit sample is the number of Content Store
    hits since the previous call and the router's window counter is reset.
    ``"cumulative"`` feeds the running hit total instead.

    Returns the ``(pi_sample, hi_sample)`` pair that was fed.
    """
    pi = router.pending_count()
    if hit_mode == "delta":
        hi = router.window_hits
        router.window_hits = 0
    elif hit_mode == "cumulative":
        hi = router.cs.hits
    else:
        raise ValueError(f"unknown hit_mode {hit_mode!r}")
    pi_est.update(pi)
    hi_est.update(hi)
    return pi, hi


@dataclass(frozen=True)
class RouterFeatureRecord:
    router: int
    bc: float
    estimated_pi: float
    estimated_hi: float


def collect_features(routers, bc, estimators):
    """One raw feature record per router, in ascending router id.

    Parameters
    ----------
    routers : iterable of int
    bc : dict
        Router id to betweenness.
    estimators : dict
        Router id to ``(pi_estimator, hi_estimator)``. Routers whose
        estimators never saw a sample report zero.
    """
    records = []
    for r in sorted(routers):
        pi_est, hi_est = estimators[r]
        pi = pi_est.estimate() if pi_est.initialized else 0.0
        hi = hi_est.estimate() if hi_est.initialized else 0.0
        records.append(RouterFeatureRecord(r, float(bc[r]), pi, hi))
    return records


HEADER = ("router_id", "bc", "ewma_pi", "ewma_hi")


def _fmt(x):
    return format(x, ".9g")


def features_to_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for rec in records:
        w.writerow([rec.router, _fmt(rec.bc), _fmt(rec.estimated_pi), _fmt(rec.estimated_hi)])
    return buf.getvalue()


def features_from_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or tuple(rows[0]) != HEADER:
        raise ValueError(f"feature table must start with header {','.join(HEADER)}")
    return [
        RouterFeatureRecord(int(r[0]), float(r[1]), float(r[2]), float(r[3]))
        for r in rows[1:]
        if r
    ]


def write_features(records, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(features_to_csv(records))


def read_features(path):
    with open(path, encoding="utf-8") as fh:
        return features_from_csv(fh.read())
