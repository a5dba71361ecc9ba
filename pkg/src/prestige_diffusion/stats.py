"""Permutation null for hiring adoptions, curve fits, LOWESS, and the decile collapse."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .adoption import NON_HIRING, Corpus, TopicSpec
from .graph import N_DECILES, decile_groups
from .parallel import pmap


class FitError(RuntimeError):
    """A least-squares fit failed to converge."""


class DegenerateDataError(ValueError):
    """Input carries no information about the fitted parameters."""


# ---------------------------------------------------------------- permutation


@dataclass(frozen=True)
class PermutationResult:
    topic: str
    f_obs: float
    null_samples: np.ndarray
    f_exp_mean: float
    f_exp_sd: float
    p_value: float
    n_perms: int
    seed: int

    @property
    def resolution(self):
        return 1.0 / (self.n_perms + 1)


def empirical_pvalue(f_obs, null_samples) -> float:
    """One-sided add-one p-value: (1 + #{null >= f_obs}) / (1 + n).

    NaN null samples never count as exceeding.
    """
    null = np.asarray(null_samples, dtype=float)
    if null.size == 0:
        raise ValueError("null_samples is empty")
    return (1 + int(np.sum(null >= f_obs))) / (1 + null.size)


def _fraction(h, n):
    return float("nan") if h + n == 0 else h / (h + n)


def permutation_null(careers, topic: TopicSpec, n_perms=100, seed=0, grace=2,
                     ties=NON_HIRING, strict_subsequent=False, workers=1) -> PermutationResult:
    """Null distribution of the hiring-adoption fraction under shuffled titles.

    Every title in the corpus is pooled and dealt back, without
    replacement, onto the existing (faculty, year) publication slots, so
    each person keeps their publication years and counts.  Replicate i
    shuffles with a generator seeded by ``(seed, i)``.
    """
    if n_perms < 1:
        raise ValueError("n_perms must be >= 1")
    corpus = careers if isinstance(careers, Corpus) else Corpus(careers)
    if len(corpus) == 0:
        raise ValueError("corpus has no publications")
    mask = corpus.topic_mask(topic)
    f_obs = _fraction(*corpus.hiring_counts(mask, grace, ties, strict_subsequent))
    if math.isnan(f_obs):
        raise ValueError(f"no department adopts topic {topic.name!r}; f_obs undefined")

    def one(i):
        rng = np.random.default_rng([seed, i])
        return _fraction(*corpus.hiring_counts(mask[rng.permutation(mask.size)], grace, ties,
                                               strict_subsequent))

    null = np.array(pmap(one, range(n_perms), workers))
    return PermutationResult(
        topic=topic.name, f_obs=f_obs, null_samples=null,
        f_exp_mean=float(np.nanmean(null)), f_exp_sd=float(np.nanstd(null)),
        p_value=empirical_pvalue(f_obs, null), n_perms=n_perms, seed=seed,
    )


# ---------------------------------------------------------------- logistic fits


@dataclass(frozen=True)
class LogisticFit:
    y_max: float
    k: float
    pi_mid: float
    residual: float
    iterations: int

    def __call__(self, x):
        return logistic(np.asarray(x, dtype=float), self.y_max, self.k, self.pi_mid)


def logistic(x, y_max, k, mid):
    return y_max * expit(k * (x - mid))


def _initial_guess(x, y, y_max):
    order = np.argsort(x, kind="stable")
    xs, ys = x[order], y[order]
    top = ys.max() if y_max is None else y_max
    mid = xs[np.argmin(np.abs(ys - top / 2))]
    sign = np.sign(ys[-1] - ys[0])
    if sign == 0:
        sign = np.sign(np.corrcoef(xs, ys)[0, 1]) or 1.0
    span = xs[-1] - xs[0]
    k = sign * 4.0 / span
    return top, k, mid


def _lm(x, y, theta, fixed_ymax, max_iter=500, tol=1e-10):
    """Damped Gauss-Newton (Levenberg-Marquardt) on the logistic model."""

    def model(th):
        ymax = fixed_ymax if fixed_ymax is not None else th[0]
        k, m = th[-2], th[-1]
        s = expit(k * (x - m))
        f = ymax * s
        ds = s * (1 - s)
        cols = [] if fixed_ymax is not None else [s]
        cols += [ymax * ds * (x - m), -ymax * ds * k]
        return f, np.stack(cols, axis=1)

    theta = np.asarray(theta, dtype=float)
    f, J = model(theta)
    r = y - f
    cost = r @ r
    lam = 1e-3
    for it in range(1, max_iter + 1):
        A = J.T @ J
        g = J.T @ r
        while True:
            D = np.diag(np.maximum(np.diag(A), 1e-12))
            try:
                step = np.linalg.solve(A + lam * D, g)
            except np.linalg.LinAlgError:
                lam *= 10
                if lam > 1e16:
                    raise FitError("singular normal equations") from None
                continue
            cand = theta + step
            f_new, J_new = model(cand)
            r_new = y - f_new
            cost_new = r_new @ r_new
            if np.isfinite(cost_new) and cost_new <= cost:
                theta, J, r, cost = cand, J_new, r_new, cost_new
                lam = max(lam / 3, 1e-12)
                break
            lam *= 4
            if lam > 1e16:
                # no descent direction left: at a minimum to machine precision
                return theta, it
        if np.linalg.norm(step) < tol * (1 + np.linalg.norm(theta)):
            return theta, it
    raise FitError(f"logistic fit did not converge in {max_iter} iterations")


def fit_logistic(points, y_max=None) -> LogisticFit:
    """Least-squares fit of ``y = y_max / (1 + exp(-k (x - mid)))``.

    ``points`` is a sequence of (x, y).  Pass ``y_max`` to hold the
    plateau fixed and fit only (k, mid).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 4:
        raise ValueError("need at least 4 (x, y) points")
    x, y = pts[:, 0], pts[:, 1]
    if np.any(y < 0) or np.any(y > 1):
        raise ValueError("y values must lie in [0, 1]")
    if np.ptp(y) < 1e-12:
        raise DegenerateDataError("y is constant; slope and midpoint are unidentifiable")
    if np.ptp(x) == 0:
        raise DegenerateDataError("x is constant; slope and midpoint are unidentifiable")
    top, k0, mid0 = _initial_guess(x, y, y_max)
    start = [k0, mid0] if y_max is not None else [top, k0, mid0]
    theta, iters = _lm(x, y, start, y_max)
    ymax = y_max if y_max is not None else theta[0]
    k, mid = theta[-2], theta[-1]
    rmse = float(np.sqrt(np.mean((y - logistic(x, ymax, k, mid)) ** 2)))
    return LogisticFit(float(ymax), float(k), float(mid), rmse, iters)


# ---------------------------------------------------------------- lowess


def lowess(x, y, frac=2.0 / 3.0, iterations=2):
    """Robust locally weighted linear regression.

    Each point is fit from its ``ceil(frac * n)`` nearest neighbours with
    tricube distance weights, then refit ``iterations`` times with bisquare
    robustness weights.  Returns smoothed values in input order.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = x.size
    if np.unique(x).size < 2:
        raise ValueError("need at least 2 distinct x values")
    if not 0 < frac <= 1:
        raise ValueError("frac must lie in (0, 1]")
    r = int(math.ceil(frac * n))
    if r < 2:
        raise ValueError(f"frac={frac} keeps fewer than 2 of {n} points per window")

    dist = np.abs(x[:, None] - x[None, :])
    h = np.sort(dist, axis=1)[:, r - 1]
    w = np.zeros_like(dist)
    for i in range(n):
        if h[i] > 0:
            u = np.clip(dist[i] / h[i], 0, 1)
            w[i] = (1 - u ** 3) ** 3
        else:
            w[i] = (dist[i] == 0).astype(float)

    robust = np.ones(n)
    fitted = np.empty(n)
    for it in range(iterations + 1):
        for i in range(n):
            wi = w[i] * robust
            sw = wi.sum()
            if sw <= 0:
                fitted[i] = y[i]
                continue
            xm = (wi @ x) / sw
            ym = (wi @ y) / sw
            sxx = wi @ (x - xm) ** 2
            slope = 0.0 if sxx <= 1e-12 * max(1.0, xm * xm) * sw else (wi @ ((x - xm) * (y - ym))) / sxx
            fitted[i] = ym + slope * (x[i] - xm)
        if it == iterations:
            break
        resid = y - fitted
        s = np.median(np.abs(resid))
        if s <= 1e-12 * max(1.0, np.abs(y).max()):
            break
        u = np.clip(resid / (6.0 * s), -1, 1)
        robust = (1 - u ** 2) ** 2
    return fitted


# ---------------------------------------------------------------- deciles and collapse


@dataclass(frozen=True)
class DecileCurves:
    """Mean Y/N per prestige decile (rows, most prestigious first) and p (columns)."""

    p: np.ndarray
    d: np.ndarray
    y: np.ndarray

    def rescaled(self):
        """Per-decile (p*, y) arrays for deciles with d < 1 and p > 0."""
        out = []
        for i, d in enumerate(self.d):
            if d >= 1:
                continue
            keep = self.p > 0
            out.append((effective_p(self.p[keep], d), self.y[i, keep]))
        return out

    def raw(self, only_rescalable=True):
        return [(self.p.copy(), self.y[i].copy()) for i, d in enumerate(self.d)
                if not (only_rescalable and d >= 1)]


def decile_curves(sweep, scores, q=None) -> DecileCurves:
    """Average mean Y/N over each prestige decile, per p.

    Decile i (0-based, most prestigious first) is labelled d = (i + 1) / 10.
    """
    mean_rank = np.asarray(getattr(scores, "mean_rank", scores), dtype=float)
    rows = sweep.rows if q is None else [r for r in sweep.rows if r.q == q]
    qs = {r.q for r in rows}
    if len(qs) > 1:
        raise ValueError(f"sweep mixes several q values {sorted(qs)}; pass q=")
    groups = decile_groups(mean_rank, N_DECILES)
    p_grid = np.array(sorted({r.p for r in rows}))
    table = {}
    for r in rows:
        table[(r.node, r.p)] = r.mean_size_frac
    y = np.empty((N_DECILES, p_grid.size))
    for j, p in enumerate(p_grid):
        for i, members in enumerate(groups):
            try:
                y[i, j] = np.mean([table[(int(v), p)] for v in members])
            except KeyError as exc:
                raise ValueError(f"sweep lacks node/p cell {exc.args[0]}") from None
    d = np.arange(1, N_DECILES + 1) / N_DECILES
    return DecileCurves(p_grid, d, y)


def effective_p(p, d):
    """p* = -p / log(1 - d)."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr <= 0) or np.any(d_arr >= 1):
        raise ValueError("decile d must lie strictly between 0 and 1")
    p_arr = np.asarray(p, dtype=float)
    if np.any(p_arr < 0):
        raise ValueError("p must be non-negative")
    out = -p_arr / np.log1p(-d_arr)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class CollapseFit:
    r: float
    k: float
    residual: float

    def __call__(self, p_star):
        p_star = np.asarray(p_star, dtype=float)
        return expit(-self.r * (self.k + np.log(p_star)))


def fit_collapse(points) -> CollapseFit:
    """Least-squares fit of ``y = 1 / (1 + exp(r (k + log p*)))``.

    This is a unit-plateau logistic in log p* with slope -r and midpoint -k.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 4:
        raise ValueError("need at least 4 (p*, y) points")
    if np.any(pts[:, 0] <= 0):
        raise ValueError("p* must be positive")
    lf = fit_logistic(np.column_stack([np.log(pts[:, 0]), pts[:, 1]]), y_max=1.0)
    return CollapseFit(r=-lf.k, k=-lf.pi_mid, residual=lf.residual)


def collapse_dispersion(raw_curves, rescaled_curves, grid_points=101):
    """RMS over a shared grid of the between-curve standard deviation.

    Each argument is a list of (x, y) curves; every list is linearly
    interpolated onto ``grid_points`` abscissae spanning the range all of
    its curves cover.  Returns (before, after).
    """
    return _dispersion(raw_curves, grid_points), _dispersion(rescaled_curves, grid_points)


def _dispersion(curves, grid_points):
    lo = max(np.min(x) for x, _ in curves)
    hi = min(np.max(x) for x, _ in curves)
    if not lo < hi:
        raise ValueError("curves share no overlapping abscissa range")
    grid = np.linspace(lo, hi, grid_points)
    ys = []
    for x, y in curves:
        order = np.argsort(x)
        ys.append(np.interp(grid, np.asarray(x)[order], np.asarray(y)[order]))
    sd = np.std(np.array(ys), axis=0)
    return float(np.sqrt(np.mean(sd ** 2)))


def collapse_points(curves: DecileCurves):
    """Pooled (p*, y) points from every rescalable decile curve."""
    pts = [np.column_stack([x, y]) for x, y in curves.rescaled()]
    return np.vstack(pts)


def raw_points(curves: DecileCurves, only_rescalable=True):
    """Pooled (p, y) points with p > 0, from the same deciles as :func:`collapse_points`."""
    pts = [np.column_stack([x[x > 0], y[x > 0]]) for x, y in curves.raw(only_rescalable)]
    return np.vstack(pts)
