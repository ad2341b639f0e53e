from __future__ import annotations

import numpy as np

VAR_SMOOTHING = 1e-9


class NotFittedError(RuntimeError):
    pass


class IncrementalGaussianNB:
    """Gaussian Naive Bayes with exact one-pass (Chan et al.) moment merging."""

    def __init__(self, var_smoothing: float = VAR_SMOOTHING):
        self.var_smoothing = var_smoothing
        self.reset()

    def reset(self):
        self.classes_: np.ndarray | None = None
        self.counts_: np.ndarray | None = None
        self.means_: np.ndarray | None = None
        self.m2_: np.ndarray | None = None

    @property
    def fitted(self) -> bool:
        return self.classes_ is not None

    def _ensure_classes(self, labels: np.ndarray, n_features: int):
        new = np.setdiff1d(np.unique(labels), self.classes_ if self.fitted else [])
        if not len(new):
            return
        if not self.fitted:
            self.classes_ = np.sort(new)
            k = len(self.classes_)
            self.counts_ = np.zeros(k)
            self.means_ = np.zeros((k, n_features))
            self.m2_ = np.zeros((k, n_features))
            return
        classes = np.union1d(self.classes_, new)
        pos = np.searchsorted(classes, self.classes_)
        counts = np.zeros(len(classes))
        means = np.zeros((len(classes), n_features))
        m2 = np.zeros((len(classes), n_features))
        counts[pos], means[pos], m2[pos] = self.counts_, self.means_, self.m2_
        self.classes_, self.counts_, self.means_, self.m2_ = classes, counts, means, m2

    def partial_fit(self, X, y) -> "IncrementalGaussianNB":
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y)
        self._ensure_classes(y, X.shape[1])
        for ci, c in enumerate(self.classes_):
            Xc = X[y == c]
            n_b = Xc.shape[0]
            if n_b == 0:
                continue
            mean_b = Xc.mean(axis=0)
            m2_b = ((Xc - mean_b) ** 2).sum(axis=0)
            n_a = self.counts_[ci]
            n = n_a + n_b
            delta = mean_b - self.means_[ci]
            self.means_[ci] = self.means_[ci] + delta * (n_b / n)
            self.m2_[ci] = self.m2_[ci] + m2_b + delta ** 2 * (n_a * n_b / n)
            self.counts_[ci] = n
        return self

    @property
    def variances_(self) -> np.ndarray:
        return self.m2_ / self.counts_[:, None]

    def _joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        var = self.variances_
        var = var + self.var_smoothing * max(var.max(), 0.0)
        # a feature constant within every class would otherwise divide by zero
        var = np.where(var > 0, var, np.finfo(float).tiny)
        log_prior = np.log(self.counts_ / self.counts_.sum())
        out = np.empty((X.shape[0], len(self.classes_)))
        for ci in range(len(self.classes_)):
            ll = -0.5 * np.sum(np.log(2.0 * np.pi * var[ci]))
            with np.errstate(over="ignore"):
                ll = ll - 0.5 * np.sum((X - self.means_[ci]) ** 2 / var[ci], axis=1)
            out[:, ci] = log_prior[ci] + ll
        return out

    def predict(self, X) -> np.ndarray:
        if not self.fitted:
            raise NotFittedError("predict called before any partial_fit")
        X = np.asarray(X, dtype=np.float64)
        return self.classes_[np.argmax(self._joint_log_likelihood(X), axis=1)]
