"""Full-covariance Gaussian mixtures fitted by weighted EM."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

RIDGE = 1e-4


@dataclass
class GmmModel:
    weights: np.ndarray  # (K,)
    means: np.ndarray  # (K, d)
    covariances: np.ndarray  # (K, d, d)
    log_likelihood_trace: list = field(default_factory=list)

    @property
    def n_components(self) -> int:
        return len(self.weights)

    def component_log_densities(self, x: np.ndarray) -> np.ndarray:
        """``log pi_k + log N(x; mu_k, Sigma_k)`` as an ``(n, K)`` array."""
        x = np.atleast_2d(np.asarray(x, dtype=np.float64))
        d = x.shape[1]
        out = np.empty((len(x), self.n_components))
        for k in range(self.n_components):
            chol = np.linalg.cholesky(self.covariances[k])
            z = np.linalg.solve(chol, (x - self.means[k]).T)
            maha = np.sum(z * z, axis=0)
            log_det = 2.0 * np.sum(np.log(np.diag(chol)))
            out[:, k] = np.log(self.weights[k]) - 0.5 * (d * np.log(2 * np.pi) + log_det + maha)
        return out

    def neg_log_likelihood(self, x) -> np.ndarray | float:
        """``-log sum_k pi_k N(x; mu_k, Sigma_k)``, per row of ``x``."""
        x = np.asarray(x, dtype=np.float64)
        nll = -logsumexp(self.component_log_densities(x), axis=1)
        return float(nll[0]) if x.ndim == 1 else nll


def floor_eigenvalues(cov: np.ndarray, floor: float) -> np.ndarray:
    """Closest-in-likelihood covariance whose eigenvalues are all >= ``floor``.

    Clipping the eigenvalues of the weighted scatter matrix is the exact
    maximiser of the M-step objective under that constraint, which keeps EM
    monotone; adding a fixed ridge would not.
    """
    vals, vecs = np.linalg.eigh(0.5 * (cov + cov.T))
    return (vecs * np.maximum(vals, floor)) @ vecs.T


def kmeans_pp_centers(x: np.ndarray, k: int, rng: np.random.Generator, sample_weight=None) -> np.ndarray:
    n = len(x)
    w = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
    centers = [x[rng.choice(n, p=w / w.sum())]]
    d2 = np.sum((x - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        p = w * d2
        if p.sum() <= 0:
            idx = rng.choice(n, p=w / w.sum())
        else:
            idx = rng.choice(n, p=p / p.sum())
        centers.append(x[idx])
        d2 = np.minimum(d2, np.sum((x - x[idx]) ** 2, axis=1))
    return np.array(centers)


def _weighted_loglik(model: GmmModel, x, w) -> tuple[float, np.ndarray]:
    log_p = model.component_log_densities(x)
    log_norm = logsumexp(log_p, axis=1)
    return float(np.sum(w * log_norm)), np.exp(log_p - log_norm[:, None])


def fit_gmm(samples, K: int, seed: int = 0, sample_weight=None, max_iter: int = 100,
            tol: float = 1e-6, ridge: float = RIDGE) -> GmmModel:
    """Fit a K-component mixture by EM from a k-means++ start.

    Runs until the (weighted) log-likelihood improves by less than ``tol`` or
    ``max_iter`` iterations. Covariance eigenvalues are floored at ``ridge``. The trace of log-likelihoods, evaluated after each
    E-step, is kept on the returned model.
    """
    x = np.asarray(samples, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("samples must be an (n, d) array")
    n, d = x.shape
    if n < K or K < 1:
        raise ValueError(f"need at least K={K} samples, got {n}")
    w = np.ones(n) if sample_weight is None else np.asarray(sample_weight, dtype=np.float64)
    if w.shape != (n,) or np.any(w < 0) or w.sum() <= 0:
        raise ValueError("sample weights must be non-negative with a positive sum")
    w = w / w.sum() * n
    eye = np.eye(d) * ridge

    if np.all(np.ptp(x, axis=0) == 0):
        return GmmModel(np.ones(1), x[:1].copy(), eye[None].copy(), [])

    rng = np.random.default_rng(seed)
    mean_all = np.average(x, axis=0, weights=w)
    cov_all = floor_eigenvalues(np.cov(x.T, aweights=w, bias=True).reshape(d, d), ridge)
    model = GmmModel(np.full(K, 1.0 / K), kmeans_pp_centers(x, K, rng, w), np.repeat(cov_all[None], K, axis=0))
    if K == 1:
        model.means[0] = mean_all

    trace = []
    for _ in range(max_iter):
        ll, resp = _weighted_loglik(model, x, w)
        trace.append(ll)
        if len(trace) > 1 and trace[-1] - trace[-2] < tol:
            break
        rw = resp * w[:, None]
        nk = rw.sum(axis=0)
        alive = nk > 1e-10
        if not alive.all():
            rw, nk = rw[:, alive], nk[alive]
        means = (rw.T @ x) / nk[:, None]
        covs = np.empty((len(nk), d, d))
        for k in range(len(nk)):
            diff = x - means[k]
            covs[k] = floor_eigenvalues((rw[:, k, None] * diff).T @ diff / nk[k], ridge)
        model = GmmModel(nk / nk.sum(), means, covs)
    model.log_likelihood_trace = trace
    return model
