"""Random drift-matrix families and graph samplers.

Every generator is a pure function of its parameters and ``seed``.  Random
ensembles that can produce unstable matrices are redrawn from a derived seed
(``SeedSequence([seed, attempt])``) up to ``max_retries`` times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._validation import check_int, check_positive, check_square, rho_min

KINDS = ("sparse-shift", "dense", "dense-signed", "signed-regular", "laplacian", "custom")
GRAPH_MODES = ("uniform-regular", "bounded-degree-bernoulli")

DEFAULT_RETRIES = 100


class UnstableDrawError(RuntimeError):
    """Raised when no stable matrix was drawn within the retry budget."""


class GraphSamplingError(RuntimeError):
    """Raised when the graph rejection sampler exhausts its budget."""


@dataclass(frozen=True)
class DriftMatrix:
    """A drift coefficient matrix together with the ensemble it came from.

    ``theta_min`` is the smallest nonzero absolute entry of ``entries``.
    ``meta`` holds construction details (shift, gamma, adjacency, ...).
    """

    entries: np.ndarray
    kind: str = "custom"
    theta_min: float = 0.0
    seed: int | None = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown kind {self.kind!r}")

    @property
    def p(self) -> int:
        return self.entries.shape[0]

    @property
    def shape(self):
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)

    @classmethod
    def from_array(cls, A, kind: str = "custom", seed=None, **meta) -> "DriftMatrix":
        A = np.array(A, dtype=np.float64)
        if A.ndim != 2:
            raise ValueError("drift matrix must be 2-D")
        return cls(A, kind=kind, theta_min=_observed_theta_min(A), seed=seed, meta=meta)


@dataclass(frozen=True)
class GraphSpec:
    """Parameters of a random simple graph.

    ``edge_prob`` is only used by ``bounded-degree-bernoulli`` (default
    ``k / (2 (p - 1))``); ``connected`` additionally rejects disconnected
    draws.
    """

    p: int
    k: int
    mode: str = "uniform-regular"
    seed: int = 0
    edge_prob: float | None = None
    connected: bool = False
    max_tries: int = 100_000

    def __post_init__(self):
        check_int(self.p, "p", low=1)
        check_int(self.k, "k", low=0)
        if self.mode not in GRAPH_MODES:
            raise ValueError(f"unknown graph mode {self.mode!r}")
        if self.mode == "uniform-regular":
            if self.k >= self.p:
                raise ValueError("uniform-regular needs k < p")
            if (self.p * self.k) % 2:
                raise ValueError("uniform-regular needs p*k even")
        if self.edge_prob is not None and not 0.0 <= self.edge_prob <= 1.0:
            raise ValueError("edge_prob must lie in [0, 1]")


def _observed_theta_min(A: np.ndarray) -> float:
    nz = np.abs(A[A != 0])
    return float(nz.min()) if nz.size else 0.0


def _attempt_rng(seed: int, attempt: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), attempt]))


def is_stable(theta, margin: float = 0.0) -> bool:
    """True when lambda_min(-(theta + theta^T)/2) > margin."""
    return rho_min(np.asarray(theta, dtype=float)) > margin


def gen_sparse_shift(p: int, k: float, shift: float, seed: int,
                     max_retries: int = DEFAULT_RETRIES) -> DriftMatrix:
    """``-shift * I + B`` with ``B`` i.i.d. Bernoulli(k/p) in {0, 1}.

    The diagonal of ``B`` is drawn like every other entry, so self-edges
    shift the corresponding diagonal to ``-shift + 1``.
    """
    p = check_int(p, "p", low=1)
    if not 0 < k <= p:
        raise ValueError(f"need 0 < k <= p, got k={k}, p={p}")
    shift = check_positive(shift, "shift")
    prob = k / p
    for attempt in range(max_retries):
        rng = _attempt_rng(seed, attempt)
        B = (rng.random((p, p)) < prob).astype(np.float64)
        theta = -shift * np.eye(p) + B
        if is_stable(theta):
            return DriftMatrix(theta, "sparse-shift", _observed_theta_min(theta), seed,
                               {"k": k, "shift": shift, "attempt": attempt})
    raise UnstableDrawError(f"no stable sparse-shift draw in {max_retries} attempts")


def gen_dense(p: int, rho: float, seed: int, max_retries: int = DEFAULT_RETRIES) -> DriftMatrix:
    """``-(rho + sqrt 2) I + p^{-1/2} G`` with Gaussian ``G`` zeroed w.p. 1/2."""
    p = check_int(p, "p", low=1)
    rho = check_positive(rho, "rho")
    for attempt in range(max_retries):
        rng = _attempt_rng(seed, attempt)
        G = rng.standard_normal((p, p))
        G *= rng.random((p, p)) < 0.5
        theta = -(rho + math.sqrt(2.0)) * np.eye(p) + G / math.sqrt(p)
        if is_stable(theta):
            return DriftMatrix(theta, "dense", _observed_theta_min(theta), seed,
                               {"rho": rho, "attempt": attempt})
    raise UnstableDrawError(f"no stable dense draw in {max_retries} attempts")


def gen_dense_signed(p: int, theta_min: float, rho: float, seed: int, symmetric: bool = True,
                     shift: str = "adaptive", max_retries: int = DEFAULT_RETRIES) -> DriftMatrix:
    """Dense ensemble with off-diagonal entries in {0, +-theta_min/sqrt(p)}.

    Off-diagonal entries are +theta_min, -theta_min with probability 1/4
    each and 0 with probability 1/2 before the ``1/sqrt(p)`` scaling; the
    diagonal of the random part is zero.  The result is
    ``-(gamma + 2 sqrt(a)) I + R / sqrt(p)`` with ``a = theta_min**2 / 2``.

    ``shift="adaptive"`` takes the smallest ``gamma >= 0`` with
    ``lambda_min(-(theta + theta^T)/2) >= rho``; ``shift="fixed"`` uses
    ``gamma = rho`` and redraws unstable matrices.
    """
    p = check_int(p, "p", low=2)
    theta_min = check_positive(theta_min, "theta_min")
    rho = check_positive(rho, "rho")
    if shift not in ("adaptive", "fixed"):
        raise ValueError("shift must be 'adaptive' or 'fixed'")
    two_sqrt_a = 2.0 * math.sqrt(theta_min**2 / 2.0)
    for attempt in range(max_retries):
        rng = _attempt_rng(seed, attempt)
        u = rng.random((p, p))
        R = np.where(u < 0.25, theta_min, np.where(u < 0.5, -theta_min, 0.0))
        if symmetric:
            R = np.triu(R, 1)
            R = R + R.T
        else:
            np.fill_diagonal(R, 0.0)
        R /= math.sqrt(p)
        if shift == "adaptive":
            top = np.linalg.eigvalsh(0.5 * (R + R.T))[-1]
            gamma = max(0.0, rho + top - two_sqrt_a)
        else:
            gamma = rho
        theta = -(gamma + two_sqrt_a) * np.eye(p) + R
        if is_stable(theta):
            return DriftMatrix(theta, "dense-signed", theta_min / math.sqrt(p), seed,
                               {"gamma": gamma, "rho": rho, "symmetric": symmetric,
                                "shift": shift, "attempt": attempt})
    raise UnstableDrawError(f"no stable dense-signed draw in {max_retries} attempts")


def gen_graph(spec: GraphSpec) -> np.ndarray:
    """Adjacency matrix (0/1, symmetric, zero diagonal) of a random simple graph.

    ``uniform-regular`` pairs ``p*k`` stubs uniformly at random and rejects
    pairings with self-loops or repeated edges, which makes the accepted
    graph uniform over simple k-regular graphs.  ``bounded-degree-bernoulli``
    draws every edge independently and rejects if any degree exceeds ``k``.
    """
    p, k = spec.p, spec.k
    rng = np.random.default_rng(np.random.SeedSequence([int(spec.seed) & (2**64 - 1), 0x6A]))
    for _ in range(spec.max_tries):
        if spec.mode == "uniform-regular":
            A = _pairing_attempt(p, k, rng)
            if A is None:
                continue
        else:
            prob = spec.edge_prob if spec.edge_prob is not None else k / (2.0 * max(p - 1, 1))
            upper = np.triu(rng.random((p, p)) < prob, 1)
            A = (upper | upper.T).astype(np.float64)
            if A.sum(axis=1).max(initial=0) > k:
                continue
        if spec.connected and not is_connected(A):
            continue
        return A
    raise GraphSamplingError(f"graph sampler exhausted {spec.max_tries} attempts for {spec}")


def _pairing_attempt(p: int, k: int, rng: np.random.Generator) -> np.ndarray | None:
    if k == 0:
        return np.zeros((p, p))
    stubs = rng.permutation(np.repeat(np.arange(p), k)).reshape(-1, 2)
    a, b = stubs[:, 0], stubs[:, 1]
    if np.any(a == b):
        return None
    A = np.zeros((p, p))
    np.add.at(A, (a, b), 1.0)
    A = A + A.T
    if A.max() > 1.0:
        return None
    return A


def is_connected(A: np.ndarray) -> bool:
    p = A.shape[0]
    if p == 0:
        return True
    seen = np.zeros(p, dtype=bool)
    stack = [0]
    seen[0] = True
    while stack:
        i = stack.pop()
        for j in np.flatnonzero(A[i]):
            if not seen[j]:
                seen[j] = True
                stack.append(j)
    return bool(seen.all())


def gen_signed_regular(p: int, k: int, theta_min: float, rho: float, seed: int,
                       max_tries: int = 100_000, shift: str = "adaptive") -> DriftMatrix:
    """Signed random k-regular drift matrix.

    A uniformly random simple k-regular graph has each edge sign flipped
    independently with probability 1/2 (the matrix stays symmetric), is
    scaled by ``theta_min`` and shifted by ``-(gamma + 2 theta_min sqrt(k-1))``
    with ``gamma = max(0, rho + theta_min*lambda_max(S) - 2 theta_min sqrt(k-1))``
    so that ``lambda_max(theta) <= -rho``.  ``shift="fixed"`` takes
    ``gamma = rho`` instead (the matrix may then be unstable on rare draws).
    """
    p = check_int(p, "p", low=2)
    k = check_int(k, "k", low=3)
    if k >= p:
        raise ValueError("need k < p")
    if (p * k) % 2:
        raise ValueError("p*k must be even")
    theta_min = check_positive(theta_min, "theta_min")
    rho = check_positive(rho, "rho")
    if shift not in ("adaptive", "fixed"):
        raise ValueError("shift must be 'adaptive' or 'fixed'")
    A = gen_graph(GraphSpec(p, k, "uniform-regular", seed, max_tries=max_tries))
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & (2**64 - 1), 0x51]))
    signs = np.where(rng.random((p, p)) < 0.5, -1.0, 1.0)
    signs = np.triu(signs, 1)
    signs = signs + signs.T
    S = A * signs
    bulk_edge = 2.0 * theta_min * math.sqrt(k - 1)
    top = np.linalg.eigvalsh(S)[-1]
    gamma = max(0.0, rho + theta_min * top - bulk_edge) if shift == "adaptive" else rho
    theta = -(gamma + bulk_edge) * np.eye(p) + theta_min * S
    if shift == "fixed" and not is_stable(theta):
        raise UnstableDrawError("fixed-shift signed-regular draw is unstable")
    return DriftMatrix(theta, "signed-regular", theta_min, seed,
                       {"gamma": gamma, "k": k, "rho": rho, "adjacency": A, "shift": shift})


def laplacian(A: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    return A - np.diag(A.sum(axis=1))


def gen_laplacian(graph, m: float) -> DriftMatrix:
    """``-m I + Delta_G`` for a GraphSpec (sampled) or a given adjacency matrix."""
    m = check_positive(m, "m")
    if isinstance(graph, GraphSpec):
        A, seed = gen_graph(graph), graph.seed
    else:
        A, seed = check_square(graph, "adjacency"), None
        if not np.allclose(A, A.T) or np.any(np.diag(A) != 0) or not np.isin(A, (0, 1)).all():
            raise ValueError("adjacency must be symmetric 0/1 with zero diagonal")
    theta = -m * np.eye(A.shape[0]) + laplacian(A)
    return DriftMatrix(theta, "laplacian", _observed_theta_min(theta), seed,
                       {"m": m, "adjacency": A})


def adjacency_from_edges(p: int, edges) -> np.ndarray:
    A = np.zeros((p, p))
    for i, j in edges:
        if i == j:
            raise ValueError("self-loops are not allowed")
        A[i, j] = A[j, i] = 1.0
    return A


# --- matrix file format ---------------------------------------------------

MATRIX_HEADER = "# driftrec-matrix"


def format_matrix(theta) -> str:
    """``# driftrec-matrix p=<int>`` then one comma-separated row per line.

    Non-square matrices add ``m=<int>`` to the header.  Floats use Python's
    shortest round-trip repr.
    """
    A = np.asarray(theta, dtype=np.float64)
    p, m = A.shape
    header = f"{MATRIX_HEADER} p={p}" + (f" m={m}" if m != p else "")
    lines = [header] + [",".join(repr(float(v)) for v in row) for row in A]
    return "\n".join(lines) + "\n"


def save_matrix(path, theta) -> None:
    Path(path).write_text(format_matrix(theta))


def load_matrix(path) -> np.ndarray:
    text = Path(path).read_text().splitlines()
    if not text or not text[0].startswith(MATRIX_HEADER):
        raise ValueError(f"{path}: missing '{MATRIX_HEADER}' header")
    fields = dict(tok.split("=", 1) for tok in text[0][len(MATRIX_HEADER):].split())
    p = int(fields["p"])
    m = int(fields.get("m", p))
    rows = [line for line in text[1:] if line.strip()]
    if len(rows) != p:
        raise ValueError(f"{path}: expected {p} rows, found {len(rows)}")
    A = np.array([[float(v) for v in row.split(",")] for row in rows])
    if A.shape != (p, m):
        raise ValueError(f"{path}: expected shape {(p, m)}, found {A.shape}")
    return A
