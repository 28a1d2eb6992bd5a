"""Disclosure-risk and information-loss metrics for an (original, masked) pair.

Row-correspondence metrics (dbrl, rid, sdid, mae/mse, brmae/brmse) assume row
i of the masked data is the masked version of row i of the original. For
maskers without such a mapping use :func:`averaged_sorted`.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import expit, ndtr

from .core import ArrayLike, InvalidInputError, InvalidParameterError, as_array, derive_seed, rank_matrix

INTERVAL_PERCENTS = range(1, 11)
PS_RIDGE = 1e-6
PS_MAX_ITER = 200
PS_TOL = 1e-8
DECILES = np.arange(1, 10) / 10.0


class ConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class MetricBundle:
    dbrl: float
    rid: float
    sdid: float
    ps_scaled: float
    pil: float
    mae: float
    mse: float
    brmae: float
    brmse: float

    BOUNDED = ("dbrl", "rid", "sdid", "ps_scaled", "pil", "brmae", "brmse")

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def _pair(original: ArrayLike, masked: ArrayLike) -> tuple[np.ndarray, np.ndarray]:
    x = as_array(original)
    xm = as_array(masked)
    if x.shape != xm.shape:
        raise InvalidInputError(f"shape mismatch: original {x.shape}, masked {xm.shape}")
    return x, xm


def _column_sd(x: np.ndarray) -> np.ndarray:
    sd = x.std(axis=0, ddof=1)
    sd[sd == 0] = 1.0
    return sd


# --- disclosure risk ---------------------------------------------------------


def dbrl(original: ArrayLike, masked: ArrayLike, chunk: int = 1024) -> float:
    """Share of masked records whose nearest original record is their own.

    Both datasets are standardized with the original's column means and
    standard deviations. A distance tie with the own record counts as linked.
    """
    x, xm = _pair(original, masked)
    mu = x.mean(axis=0)
    sd = _column_sd(x)
    z = (x - mu) / sd
    zm = (xm - mu) / sd
    linked = 0
    for start in range(0, x.shape[0], chunk):
        d = cdist(zm[start : start + chunk], z, "sqeuclidean")
        rows = np.arange(d.shape[0])
        own = d[rows, rows + start]
        linked += int(np.count_nonzero(own <= d.min(axis=1)))
    return linked / x.shape[0]


def _interval_disclosure(deviation: np.ndarray, bounds, percents) -> float:
    """Mean over widths of the share of rows whose deviation is in-band in every column.

    ``bounds(w)`` gives the per-column half-width for percentage ``w``.
    """
    shares = [np.all(deviation <= bounds(w), axis=1).mean() for w in percents]
    return float(np.mean(shares))


def rid(original: ArrayLike, masked: ArrayLike, percents=INTERVAL_PERCENTS) -> float:
    """Rank interval disclosure averaged over widths of 1%..10% of n.

    Ranks are positions within the sorted masked column: for a value v,
    ``#{masked values < v} + 1``. Record i is disclosed at width w when the
    rank of x_ij is within w*n of the rank of x*_ij for every column j.
    """
    x, xm = _pair(original, masked)
    n = x.shape[0]
    dev = np.empty(x.shape, dtype=np.int64)
    for j in range(x.shape[1]):
        ref = np.sort(xm[:, j])
        r_orig = np.searchsorted(ref, x[:, j], side="left")
        r_mask = np.searchsorted(ref, xm[:, j], side="left")
        dev[:, j] = np.abs(r_orig - r_mask)
    # integer comparison: |dr| <= w*n/100  <=>  100*|dr| <= w*n
    return _interval_disclosure(100 * dev, lambda w: w * n, percents)


def sdid(original: ArrayLike, masked: ArrayLike, percents=INTERVAL_PERCENTS) -> float:
    """Standard-deviation interval disclosure averaged over widths of 1%..10% of sd.

    Record i is disclosed at width w when |x_ij - x*_ij| <= w*sd_j for every
    column j, sd_j the original column's standard deviation.
    """
    x, xm = _pair(original, masked)
    sd = x.std(axis=0, ddof=1)
    dev = np.abs(x - xm)
    return _interval_disclosure(dev, lambda w: w * sd / 100.0, percents)


# --- information loss ----------------------------------------------------------


def propensity_features(stacked: np.ndarray) -> np.ndarray:
    """Linear, squared and pairwise-product terms, z-scored, with an intercept.

    Constant columns are dropped.
    """
    p = stacked.shape[1]
    cols = [stacked, stacked**2]
    iu, ju = np.triu_indices(p, k=1)
    if iu.size:
        cols.append(stacked[:, iu] * stacked[:, ju])
    f = np.hstack(cols)
    sd = f.std(axis=0)
    keep = sd > 0
    f = (f[:, keep] - f[:, keep].mean(axis=0)) / sd[keep]
    return np.hstack([np.ones((f.shape[0], 1)), f])


def _penalized_loglik(beta: np.ndarray, f: np.ndarray, y: np.ndarray, ridge: float) -> float:
    eta = f @ beta
    return float(np.sum(y * eta - np.logaddexp(0.0, eta)) - 0.5 * ridge * np.sum(beta[1:] ** 2))


def fit_logistic(
    f: np.ndarray,
    y: np.ndarray,
    ridge: float = PS_RIDGE,
    max_iter: int = PS_MAX_ITER,
    tol: float = PS_TOL,
) -> tuple[np.ndarray, bool]:
    """Ridge-penalized logistic regression by damped IRLS (Newton with step halving).

    The intercept (column 0) is not penalized. Returns (coefficients, converged).
    """
    m = f.shape[1]
    penalty = np.full(m, ridge)
    penalty[0] = 0.0
    beta = np.zeros(m)
    ll = _penalized_loglik(beta, f, y, ridge)
    for _ in range(max_iter):
        mu = expit(f @ beta)
        w = mu * (1.0 - mu)
        grad = f.T @ (y - mu) - penalty * beta
        hess = (f * w[:, None]).T @ f + np.diag(penalty)
        try:
            step = np.linalg.solve(hess, grad)
        except np.linalg.LinAlgError:
            step = np.linalg.lstsq(hess, grad, rcond=None)[0]
        t = 1.0
        for _ in range(60):
            cand = beta + t * step
            ll_new = _penalized_loglik(cand, f, y, ridge)
            if ll_new >= ll:
                break
            t *= 0.5
        else:
            return beta, True
        beta = cand
        if abs(ll_new - ll) <= tol * (abs(ll) + tol):
            return beta, True
        ll = ll_new
    return beta, False


def propensity_score_il(original: ArrayLike, masked: ArrayLike) -> float:
    """Propensity-score information loss scaled to [0, 1] (4 times the raw score).

    Stacks original (label 0) and masked (label 1) data, fits a second-order
    logistic model, and returns 4/(2n) * sum_i (p_i - 1/2)^2.
    """
    x = as_array(original)
    xm = as_array(masked)
    if x.shape[1] != xm.shape[1]:
        raise InvalidInputError(f"column count mismatch: {x.shape[1]} vs {xm.shape[1]}")
    stacked = np.vstack([x, xm])
    y = np.concatenate([np.zeros(x.shape[0]), np.ones(xm.shape[0])])
    f = propensity_features(stacked)
    beta, converged = fit_logistic(f, y)
    if not converged:
        warnings.warn(
            f"propensity model did not converge in {PS_MAX_ITER} iterations; using last iterate",
            ConvergenceWarning,
            stacklevel=2,
        )
    probs = expit(f @ beta)
    return float(4.0 * np.mean((probs - 0.5) ** 2))


def silverman_bandwidth(x: np.ndarray) -> float:
    sd = x.std(ddof=1)
    q75, q25 = np.quantile(x, [0.75, 0.25])
    spread = min(sd, (q75 - q25) / 1.34) or sd
    return float(0.9 * spread * x.size ** (-0.2))


def kde_density(x: np.ndarray, at: np.ndarray) -> np.ndarray:
    """Gaussian-kernel density estimate of ``x`` evaluated at ``at``."""
    h = silverman_bandwidth(x)
    if h == 0:
        return np.full(np.shape(at), np.inf)
    u = (np.asarray(at)[:, None] - x[None, :]) / h
    return np.exp(-0.5 * u**2).sum(axis=1) / (x.size * h * np.sqrt(2 * np.pi))


def pil_statistics(original: ArrayLike, masked: ArrayLike) -> dict[str, tuple[np.ndarray, ...]]:
    """Per-family (original stat, masked stat, variance of masked stat).

    Correlations are compared on the Fisher z scale.
    """
    x, xm = _pair(original, masked)
    n, p = x.shape
    out = {}
    out["means"] = (x.mean(axis=0), xm.mean(axis=0), xm.var(axis=0, ddof=1) / n)

    cov = np.atleast_2d(np.cov(x, rowvar=False))
    cov_m = np.atleast_2d(np.cov(xm, rowvar=False))
    var_m = np.diag(cov_m)
    out["variances"] = (np.diag(cov), var_m, 2.0 * var_m**2 / (n - 1))

    iu, ju = np.triu_indices(p, k=1)
    if iu.size:
        out["covariances"] = (
            cov[iu, ju],
            cov_m[iu, ju],
            (var_m[iu] * var_m[ju] + cov_m[iu, ju] ** 2) / n,
        )
        with np.errstate(invalid="ignore", divide="ignore"):
            corr = np.atleast_2d(np.corrcoef(x, rowvar=False))[iu, ju]
            corr_m = np.atleast_2d(np.corrcoef(xm, rowvar=False))[iu, ju]
        lim = 1 - 1e-12
        out["correlations"] = (
            np.arctanh(np.clip(np.nan_to_num(corr), -lim, lim)),
            np.arctanh(np.clip(np.nan_to_num(corr_m), -lim, lim)),
            np.full(iu.size, 1.0 / (n - 3) if n > 3 else 0.0),
        )

    q = np.quantile(x, DECILES, axis=0)
    q_m = np.quantile(xm, DECILES, axis=0)
    var_q = np.empty_like(q_m)
    for j in range(p):
        dens = kde_density(xm[:, j], q_m[:, j])
        var_q[:, j] = DECILES * (1 - DECILES) / (n * dens**2)
    out["deciles"] = (q.ravel(), q_m.ravel(), var_q.ravel())
    return out


def pil_terms(theta: np.ndarray, theta_m: np.ndarray, var_m: np.ndarray) -> np.ndarray:
    """2 * (Phi(|theta_m - theta| / sd) - 1/2), with the degenerate sd = 0 case as 0/1."""
    diff = np.abs(np.asarray(theta_m) - np.asarray(theta))
    var_m = np.asarray(var_m, dtype=np.float64)
    terms = np.empty(diff.shape)
    ok = var_m > 0
    terms[ok] = 2.0 * (ndtr(diff[ok] / np.sqrt(var_m[ok])) - 0.5)
    if not ok.all():
        warnings.warn("zero variance estimate in PIL; scoring those statistics 0/1", RuntimeWarning, stacklevel=2)
        terms[~ok] = (diff[~ok] > 0).astype(np.float64)
    return terms


def pil(original: ArrayLike, masked: ArrayLike) -> float:
    """Probabilistic information loss, the unweighted mean over all statistics."""
    terms = [pil_terms(*stats) for stats in pil_statistics(original, masked).values()]
    return float(np.concatenate(terms).mean())


def mae_mse(original: ArrayLike, masked: ArrayLike) -> tuple[float, float]:
    x, xm = _pair(original, masked)
    d = x - xm
    return float(np.mean(np.abs(d))), float(np.mean(d**2))


def rank_distance_bounds(n: int) -> tuple[int, int]:
    """Normalizers of brMAE and brMSE: sum_k (n-2k+1) and sum_k (n-2k+1)^2, k=1..floor(n/2)."""
    terms = n - 2 * np.arange(1, n // 2 + 1, dtype=np.int64) + 1
    return int(terms.sum()), int((terms**2).sum())


def brmae_brmse(original: ArrayLike, masked: ArrayLike, seed: int = 0) -> tuple[float, float]:
    """Bounded rank-based MAE and MSE; ties are broken at random from ``seed``."""
    x, xm = _pair(original, masked)
    n, p = x.shape
    r = rank_matrix(x, seed, stream=0)
    rm = rank_matrix(xm, seed, stream=1)
    d = r - rm
    s1, s2 = rank_distance_bounds(n)
    if s1 == 0:
        return 0.0, 0.0
    return float(np.abs(d).sum() / (2 * p * s1)), float((d**2).sum() / (2 * p * s2))


# --- averaged sorted wrapper ----------------------------------------------------

SORTABLE = ("dbrl", "rid", "sdid", "mae", "mse", "brmae", "brmse")


def _row_metric(name: str, x: np.ndarray, xm: np.ndarray, seed: int) -> float:
    if name == "dbrl":
        return dbrl(x, xm)
    if name == "rid":
        return rid(x, xm)
    if name == "sdid":
        return sdid(x, xm)
    if name in ("mae", "mse"):
        return mae_mse(x, xm)[name == "mse"]
    return brmae_brmse(x, xm, seed)[name == "brmse"]


def sorted_pairs(original: ArrayLike, masked: ArrayLike):
    """Yield (j, original sorted by its column j, masked sorted by its column j)."""
    x, xm = _pair(original, masked)
    for j in range(x.shape[1]):
        yield j, x[np.argsort(x[:, j], kind="stable")], xm[np.argsort(xm[:, j], kind="stable")]


def averaged_sorted(metric: str, original: ArrayLike, masked: ArrayLike, seed: int = 0) -> float:
    """Mean over columns j of ``metric`` on both datasets sorted by their own column j."""
    if metric not in SORTABLE:
        raise InvalidParameterError(f"averaged_sorted does not support {metric!r}; choose from {SORTABLE}")
    vals = [_row_metric(metric, xs, xms, derive_seed(seed, j)) for j, xs, xms in sorted_pairs(original, masked)]
    return float(np.mean(vals))


def evaluate(original: ArrayLike, masked: ArrayLike, sorted_metrics: bool = False, seed: int = 0) -> MetricBundle:
    """All metrics for one pair; row-correspondence metrics sorted-averaged on request."""
    x, xm = _pair(original, masked)
    if sorted_metrics:
        per_col: dict[str, list[float]] = {m: [] for m in SORTABLE}
        for j, xs, xms in sorted_pairs(x, xm):
            row = {"dbrl": dbrl(xs, xms), "rid": rid(xs, xms), "sdid": sdid(xs, xms)}
            row["mae"], row["mse"] = mae_mse(xs, xms)
            row["brmae"], row["brmse"] = brmae_brmse(xs, xms, derive_seed(seed, j))
            for m in SORTABLE:
                per_col[m].append(row[m])
        vals = {m: float(np.mean(v)) for m, v in per_col.items()}
    else:
        vals = {"dbrl": dbrl(x, xm), "rid": rid(x, xm), "sdid": sdid(x, xm)}
        vals["mae"], vals["mse"] = mae_mse(x, xm)
        vals["brmae"], vals["brmse"] = brmae_brmse(x, xm, seed)
    return MetricBundle(ps_scaled=propensity_score_il(x, xm), pil=pil(x, xm), **vals)
