"""Closed-loop simulation of periodic event-triggered control (PETC) loops.

A linear plant ``dx/dt = A x + B u`` runs under sample-and-hold state feedback
``u = K x_hat``.  Every checking period ``h`` a quadratic condition on the
stacked vector (current state, last transmitted state) decides whether a new
measurement is transmitted; a transmission is forced after ``kappa_bar``
periods (the heartbeat).  Because the plant is linear and the input is held,
the inter-sample time of a state ``x`` is decided by the signs of finitely
many quadratic forms ``x' N_k x``, which this module builds explicitly.  That
makes the state-to-IST map cheap to evaluate exactly, both for generating
training data and for serving as a ground-truth oracle.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateStateError

_SYM_RTOL = 1e-12


def matrix_exponential(M: np.ndarray, t: float = 1.0) -> np.ndarray:
    """exp(M*t) by scaling-and-squaring on a truncated Taylor series.

    The scaled norm is kept at or below 1/2, where a degree-20 Taylor
    polynomial is accurate to far beyond double precision.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got shape {M.shape}")
    if not np.isfinite(t):
        raise ValueError("time must be finite")
    n = M.shape[0]
    A = M * t
    norm = np.linalg.norm(A, 1)
    squarings = 0
    if norm > 0.5:
        squarings = int(np.ceil(np.log2(norm / 0.5)))
        A = A / (2.0 ** squarings)
    eye = np.eye(n)
    E = eye.copy()
    for j in range(20, 0, -1):
        E = eye + (A / j) @ E
    for _ in range(squarings):
        E = E @ E
    return E


def _sigma_trigger_matrix(n_x: int, sigma: float) -> np.ndarray:
    # |xi(kh) - xi(t_i)|^2 > sigma^2 |xi(kh)|^2 as a quadratic form in the
    # stacked vector [xi(kh); xi(t_i)].
    eye = np.eye(n_x)
    return np.block([[(1.0 - sigma ** 2) * eye, -eye], [-eye, eye]])


@dataclass
class LtiPetcSystem:
    """Plant, feedback gain and triggering rule of one PETC loop.

    Exactly one of ``sigma`` (relative threshold) and ``R`` (explicit
    symmetric triggering matrix over the stacked vector) must be given.
    ``h`` is the checking period in seconds and ``kappa_bar`` the heartbeat
    in units of ``h``.
    """

    A: np.ndarray
    B: np.ndarray
    K: np.ndarray
    h: float = 1.0
    kappa_bar: int = 1
    sigma: float | None = None
    R: np.ndarray | None = None

    def __post_init__(self):
        self.A = np.atleast_2d(np.asarray(self.A, dtype=float))
        self.B = np.atleast_2d(np.asarray(self.B, dtype=float))
        self.K = np.atleast_2d(np.asarray(self.K, dtype=float))
        n_x = self.A.shape[0]
        if self.A.shape != (n_x, n_x):
            raise ValueError("A must be square")
        if self.B.shape[0] != n_x:
            raise ValueError("B must have as many rows as A")
        n_u = self.B.shape[1]
        if self.K.shape != (n_u, n_x):
            raise ValueError(f"K must be {n_u}x{n_x} to close the loop, got {self.K.shape}")
        if not self.h > 0:
            raise ValueError("checking period h must be positive")
        if int(self.kappa_bar) != self.kappa_bar or self.kappa_bar < 1:
            raise ValueError("heartbeat kappa_bar must be a positive integer")
        self.kappa_bar = int(self.kappa_bar)
        if (self.sigma is None) == (self.R is None):
            raise ValueError("give exactly one of sigma or R")
        if self.sigma is not None:
            if not 0.0 < self.sigma < 1.0:
                raise ValueError("sigma must lie in (0, 1)")
        else:
            self.R = np.asarray(self.R, dtype=float)
            if self.R.shape != (2 * n_x, 2 * n_x):
                raise ValueError(f"R must be {2 * n_x}x{2 * n_x}")
            scale = max(np.abs(self.R).max(), 1.0)
            if np.abs(self.R - self.R.T).max() > _SYM_RTOL * scale:
                raise ValueError("R must be symmetric")

    @property
    def n_x(self) -> int:
        return self.A.shape[0]

    @property
    def n_u(self) -> int:
        return self.B.shape[1]

    def trigger_matrix(self) -> np.ndarray:
        """The quadratic-form matrix over [xi(kh); xi(t_i)], built from sigma if needed."""
        if self.R is not None:
            return np.array(self.R, dtype=float)
        return _sigma_trigger_matrix(self.n_x, self.sigma)

    def to_config(self) -> dict:
        cfg = {
            "A": self.A.tolist(),
            "B": self.B.tolist(),
            "K": self.K.tolist(),
            "h": self.h,
            "kappa_bar": self.kappa_bar,
        }
        if self.sigma is not None:
            cfg["trigger"] = {"type": "sigma", "sigma": self.sigma}
        else:
            cfg["trigger"] = {"type": "matrix", "R": self.R.tolist()}
        return cfg


def system_from_config(cfg: dict) -> LtiPetcSystem:
    """Build a system from the JSON config layout (keys A, B, K, h, kappa_bar, trigger)."""
    trig = cfg.get("trigger", {})
    kind = trig.get("type")
    if kind == "sigma":
        extra = {"sigma": float(trig["sigma"])}
    elif kind == "matrix":
        extra = {"R": np.asarray(trig["R"], dtype=float)}
    else:
        raise ValueError(f"unknown trigger type: {kind!r}")
    return LtiPetcSystem(
        A=np.asarray(cfg["A"], dtype=float),
        B=np.asarray(cfg["B"], dtype=float),
        K=np.asarray(cfg["K"], dtype=float),
        h=float(cfg.get("h", 1.0)),
        kappa_bar=int(cfg["kappa_bar"]),
        **extra,
    )


def load_system(path) -> LtiPetcSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return system_from_config(json.load(fh))


def system_fingerprint(sys: LtiPetcSystem) -> str:
    """Stable hash of the generating configuration, stored with datasets."""
    blob = json.dumps(sys.to_config(), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def hold_transition(sys: LtiPetcSystem, k: int) -> np.ndarray:
    """State map over k checking periods with the input held at K*x.

    Returns M(k) with  xi(t_i + k h) = M(k) xi(t_i),
    M(k) = e^{A k h} + (int_0^{k h} e^{A s} ds) B K,
    evaluated through the exponential of the augmented matrix [[A, BK], [0, 0]].
    """
    if not 1 <= k <= sys.kappa_bar:
        raise ValueError(f"k must lie in 1..{sys.kappa_bar}, got {k}")
    n = sys.n_x
    aug = np.zeros((2 * n, 2 * n))
    aug[:n, :n] = sys.A
    aug[:n, n:] = sys.B @ sys.K
    E = matrix_exponential(aug, k * sys.h)
    return E[:n, :n] + E[:n, n:]


@dataclass
class TriggerCones:
    """Quadratic forms deciding the inter-sample time of every state.

    ``N[k-1]`` is symmetric and positive on exactly the states whose
    triggering condition fires k periods after a transmission; ``M[k-1]``
    is the matching held-input state map.  The IST regions they induce are
    unions of diametrically opposite cones, so everything here is invariant
    to rescaling the state.
    """

    N: list = field(repr=False)
    M: list = field(repr=False)
    h: float
    kappa_bar: int

    @property
    def n_x(self) -> int:
        return self.N[0].shape[0]


def trigger_cones(sys: LtiPetcSystem) -> TriggerCones:
    """Build N_k = [M(k); I]' R [M(k); I] for k = 1..kappa_bar, symmetrized."""
    R = sys.trigger_matrix()
    n = sys.n_x
    eye = np.eye(n)
    Ms, Ns = [], []
    for k in range(1, sys.kappa_bar + 1):
        Mk = hold_transition(sys, k)
        S = np.vstack([Mk, eye])
        Nk = S.T @ R @ S
        Ns.append(0.5 * (Nk + Nk.T))
        Ms.append(Mk)
    return TriggerCones(N=Ns, M=Ms, h=sys.h, kappa_bar=sys.kappa_bar)


def _check_state(x) -> np.ndarray:
    x = np.asarray(x, dtype=float).ravel()
    if not np.any(x):
        raise ValueError("triggering is undefined on the zero state")
    return x


def exact_ist(cones: TriggerCones, x) -> int:
    """Inter-sample time of state x, in checking periods (1..kappa_bar).

    Smallest k with x' N_k x > 0; the heartbeat kappa_bar if no earlier
    condition fires.  Ties x' N_k x = 0 count as non-triggering.
    """
    x = _check_state(x)
    for k in range(1, cones.kappa_bar):
        if x @ cones.N[k - 1] @ x > 0.0:
            return k
    return cones.kappa_bar


def exact_ist_batch(cones: TriggerCones, X: np.ndarray) -> np.ndarray:
    """Vectorized exact_ist over the rows of X."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if not np.all(np.any(X != 0.0, axis=1)):
        raise ValueError("triggering is undefined on the zero state")
    kbar = cones.kappa_bar
    if kbar == 1:
        return np.ones(X.shape[0], dtype=int)
    fired = np.stack(
        [np.einsum("ij,jk,ik->i", X, cones.N[k - 1], X) > 0.0 for k in range(1, kbar)],
        axis=1,
    )
    return np.where(fired.any(axis=1), fired.argmax(axis=1) + 1, kbar)


def _advance(cones: TriggerCones, X: np.ndarray, taus: np.ndarray) -> np.ndarray:
    """Map each row of X through M(tau) and renormalize.

    Rescaling is exact on labels (the IST regions are cones), and keeps long
    simulations away from floating-point under/overflow.
    """
    out = np.empty_like(X)
    for k in np.unique(taus):
        rows = taus == k
        out[rows] = X[rows] @ cones.M[k - 1].T
    norms = np.linalg.norm(out, axis=1)
    if np.any(norms == 0.0):
        raise DegenerateStateError("a trajectory collapsed onto the origin")
    return out / norms[:, None]


def ist_sequence(cones: TriggerCones, x0, ell: int) -> tuple:
    """The first ell inter-sample times along the trajectory from x0."""
    if ell < 1:
        raise ValueError("sequence length must be at least 1")
    x = _check_state(x0)
    return tuple(int(v) for v in ist_sequence_batch(cones, x[None, :], ell)[0])


def ist_sequence_batch(cones: TriggerCones, X: np.ndarray, ell: int) -> np.ndarray:
    """Vectorized ist_sequence: (m, n_x) states -> (m, ell) integer array."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    labels = np.empty((X.shape[0], ell), dtype=int)
    for step in range(ell):
        taus = exact_ist_batch(cones, X)
        labels[:, step] = taus
        if step + 1 < ell:
            X = _advance(cones, X, taus)
    return labels


def empirical_aist(cones: TriggerCones, x0, n: int) -> float:
    """Finite-horizon average inter-sample time from x0, in seconds.

    Averages the first n+1 ISTs.  This estimates the long-run average (a
    liminf), it is not the limit itself.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    taus = ist_sequence(cones, x0, n + 1)
    return cones.h * float(np.mean(taus))


def calibrate_heartbeat(
    A,
    B,
    K,
    h: float,
    sigma: float | None = None,
    R=None,
    coverage: float = 0.999,
    samples: int = 4000,
    seed: int = 0,
    kbar_max: int = 64,
) -> int:
    """Smallest heartbeat at which triggering, not the heartbeat, decides the IST.

    Increases kappa_bar until at least ``coverage`` of uniformly drawn
    unit-sphere states trigger strictly before it.
    """
    rng = np.random.default_rng(seed)
    n_x = np.atleast_2d(np.asarray(A)).shape[0]
    X = rng.standard_normal((samples, n_x))
    X /= np.linalg.norm(X, axis=1)[:, None]
    for kbar in range(2, kbar_max + 1):
        sys = LtiPetcSystem(A=A, B=B, K=K, h=h, kappa_bar=kbar, sigma=sigma, R=R)
        taus = exact_ist_batch(trigger_cones(sys), X)
        if np.mean(taus < kbar) >= coverage:
            return kbar
    raise ValueError(f"no heartbeat up to {kbar_max} reaches coverage {coverage}")
