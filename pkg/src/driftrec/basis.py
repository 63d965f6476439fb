"""Feature maps ``F(x)`` for linearly parametrized drifts ``F(x; theta) = theta F(x)``.

Each basis is a scikit-learn transformer: ``transform`` maps an ``(n, p_in)``
array of states to an ``(n, m)`` design matrix.  Column order is fixed and
documented per basis because signed-support comparisons index into it.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_array

BASIS_NAMES = ("linear", "monomial2", "mass-spring")


class BasisSet(TransformerMixin, BaseEstimator):
    """Base class; subclasses set ``n_inputs``, ``names`` and ``_eval``."""

    def fit(self, X=None, y=None):
        if X is not None:
            self._check(X)
        return self

    def transform(self, X):
        return self._eval(self._check(X))

    def __call__(self, x):
        """Evaluate on a single state vector."""
        x = np.asarray(x, dtype=float)
        return self.transform(x[None, :])[0]

    def get_feature_names_out(self, input_features=None):
        return np.asarray(self.names, dtype=object)

    @property
    def m(self) -> int:
        return len(self.names)

    def _check(self, X) -> np.ndarray:
        X = check_array(X, dtype=np.float64, ensure_min_samples=1)
        if X.shape[1] != self.n_inputs:
            raise ValueError(f"{type(self).__name__} expects {self.n_inputs} inputs, got {X.shape[1]}")
        return X

    def __sklearn_is_fitted__(self):
        return True


class LinearBasis(BasisSet):
    """Identity features ``f_j(x) = x_j``; names ``x1..xp``."""

    def __init__(self, p: int = 1):
        self.p = p

    @property
    def n_inputs(self):
        return self.p

    @property
    def names(self):
        return [f"x{j + 1}" for j in range(self.p)]

    def _eval(self, X):
        return X.copy()


class MonomialBasis(BasisSet):
    """Square-free monomials of degree <= 2.

    Columns: ``1``, then ``x_i`` for ``i = 1..p``, then ``x_i x_j`` for
    ``i < j`` in lexicographic order; ``m = 1 + p + p(p-1)/2``.
    """

    def __init__(self, p: int = 1):
        self.p = p

    @property
    def n_inputs(self):
        return self.p

    @property
    def pairs(self):
        return [(i, j) for i in range(self.p) for j in range(i + 1, self.p)]

    @property
    def names(self):
        return (["1"] + [f"x{i + 1}" for i in range(self.p)]
                + [f"x{i + 1}*x{j + 1}" for i, j in self.pairs])

    def _eval(self, X):
        iu, ju = np.triu_indices(self.p, 1)
        return np.hstack([np.ones((X.shape[0], 1)), X, X[:, iu] * X[:, ju]])


class MassSpringBasis(BasisSet):
    """Features of the damped mass-spring drift for ``p`` masses in ``d`` dims.

    Input rows are ``[q, v]`` with ``q`` and ``v`` flattened mass-major
    (``q[i*d + a]`` is coordinate ``a`` of mass ``i``).  Columns: every
    velocity coordinate; every coordinate of ``q_i - q_j`` for ``i < j``;
    every coordinate of ``(q_i - q_j) / |q_i - q_j|`` for ``i < j``.  A
    zero-length difference gives a zero normalized feature.
    """

    def __init__(self, p: int = 2, d: int = 1):
        self.p = p
        self.d = d

    @property
    def n_inputs(self):
        return 2 * self.p * self.d

    @property
    def pairs(self):
        return [(i, j) for i in range(self.p) for j in range(i + 1, self.p)]

    @property
    def names(self):
        d = self.d
        out = [f"v{i + 1}_{a + 1}" for i in range(self.p) for a in range(d)]
        out += [f"dq{i + 1}.{j + 1}_{a + 1}" for i, j in self.pairs for a in range(d)]
        out += [f"uq{i + 1}.{j + 1}_{a + 1}" for i, j in self.pairs for a in range(d)]
        return out

    def column(self, group: str, i: int, j: int | None = None, a: int = 0) -> int:
        """Column index of a feature: ``group`` is ``'v'``, ``'dq'`` or ``'uq'``."""
        d, npairs = self.d, len(self.pairs)
        if group == "v":
            return i * d + a
        if j is None:
            raise ValueError("pair features need j")
        k = self.pairs.index((min(i, j), max(i, j)))
        base = self.p * d + (0 if group == "dq" else npairs * d)
        return base + k * d + a

    def _eval(self, X):
        n, p, d = X.shape[0], self.p, self.d
        q = X[:, : p * d].reshape(n, p, d)
        v = X[:, p * d:]
        iu, ju = np.triu_indices(p, 1)
        delta = q[:, iu, :] - q[:, ju, :]
        norm = np.linalg.norm(delta, axis=2, keepdims=True)
        unit = np.divide(delta, norm, out=np.zeros_like(delta), where=norm > 0)
        return np.hstack([v, delta.reshape(n, -1), unit.reshape(n, -1)])


def linear_basis(p: int) -> LinearBasis:
    if p < 1:
        raise ValueError("p must be >= 1")
    return LinearBasis(p)


def monomial_basis_deg2(p: int) -> MonomialBasis:
    if p < 1:
        raise ValueError("p must be >= 1")
    return MonomialBasis(p)


def mass_spring_basis(p: int, d: int) -> MassSpringBasis:
    if p < 2 or d < 1:
        raise ValueError("mass-spring basis needs p >= 2 and d >= 1")
    return MassSpringBasis(p, d)


def get_basis(name: str, p: int, d: int = 2) -> BasisSet:
    """Basis by CLI name; for ``mass-spring`` ``p`` is the number of masses."""
    if name == "linear":
        return linear_basis(p)
    if name == "monomial2":
        return monomial_basis_deg2(p)
    if name == "mass-spring":
        return mass_spring_basis(p, d)
    raise ValueError(f"unknown basis {name!r}; choose from {BASIS_NAMES}")
