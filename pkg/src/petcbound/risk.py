"""Risk certification for scenario-trained classifiers.

Bounds the probability that a fresh sample violates its margin
constraint, given only the number of violations observed on the
training scenarios.  The bounds come from the two roots of a binomial
polynomial in the survival variable t = 1 - eps and hold with
confidence 1 - 3*beta.
"""

import json
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, logsumexp
from scipy.stats import beta as beta_dist

from .errors import RootBracketingError

# Violated-constraint counts understate the support set of a relaxed
# program: margin-active scenarios are invisible to the count.  The
# upper-root complexity is inflated by a fixed margin before solving.
_SUPPORT_MARGIN = 31

_MAX_BISECTIONS = 200


def _log_binomial(i, k):
    return gammaln(i + 1.0) - gammaln(k + 1.0) - gammaln(i - k + 1.0)


class _PolynomialSign:
    """Sign of the certification polynomial, evaluated in log space.

    The polynomial is

        C(n, k) t^(n-k)
          - beta/(2n) * sum_{i=k}^{n-1}   C(i, k) t^(i-k)
          - beta/(6n) * sum_{i=n+1}^{4n}  C(i, k) t^(i-k)

    whose terms overflow any float for realistic n, so only the sign of
    the difference between the positive term and the log-sum of the
    negative ones is ever computed.
    """

    def __init__(self, n, k, beta):
        self.n = n
        self.k = k
        mid = np.arange(k, n)
        tail = np.arange(n + 1, 4 * n + 1)
        self._mid_pow = mid - k
        self._tail_pow = tail - k
        self._mid_log = _log_binomial(mid, k) + np.log(beta / (2.0 * n))
        self._tail_log = _log_binomial(tail, k) + np.log(beta / (6.0 * n))
        self._lead_log = _log_binomial(n, k)

    def __call__(self, t):
        lt = np.log(t)
        pos = self._lead_log + (self.n - self.k) * lt
        neg_mid = logsumexp(self._mid_log + self._mid_pow * lt)
        neg_tail = logsumexp(self._tail_log + self._tail_pow * lt)
        return pos - np.logaddexp(neg_mid, neg_tail)


def _positive_probe(sign, n, k):
    # The positive hump sits near the empirical rate, t ~ 1 - k/n.
    probes = [1.0 - (k + 1.0) / n]
    probes += list(np.linspace(max(1e-9, 1.0 - 3.0 * (k + 1.0) / n), 1.0 - 1e-9, 40))
    best = (-np.inf, None)
    for t in probes:
        if not 0.0 < t < 1.0:
            continue
        s = sign(t)
        if s > 0.0:
            return t
        if s > best[0]:
            best = (s, t)
    raise RootBracketingError(
        "no positive region found for the certification polynomial",
        diagnostics={
            "n_samples": n,
            "complexity": k,
            "best_sign": best[0],
            "best_t": best[1],
        },
    )


def _polynomial_roots(n, k, beta, tol):
    """Return (t_small, t_large), the two sign changes of the polynomial."""
    sign = _PolynomialSign(n, k, beta)
    t_pos = _positive_probe(sign, n, k)

    lo, hi = 0.0, t_pos
    for _ in range(_MAX_BISECTIONS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if sign(mid) > 0.0:
            hi = mid
        else:
            lo = mid
    t_small = 0.5 * (lo + hi)

    hi = max(2.0, 2.0 * t_pos)
    for _ in range(_MAX_BISECTIONS):
        if sign(hi) < 0.0:
            break
        hi *= 2.0
    else:
        raise RootBracketingError(
            "upper root of the certification polynomial did not bracket",
            diagnostics={"n_samples": n, "complexity": k, "last_t": hi},
        )
    lo = t_pos
    for _ in range(_MAX_BISECTIONS):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if sign(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    t_large = 0.5 * (lo + hi)
    return t_small, t_large


def epsilon_bounds(n_samples, s_star, beta=1e-6, tol=1e-12):
    """Two-sided risk bounds from a violation count.

    Parameters
    ----------
    n_samples : int
        Number of training scenarios.
    s_star : int
        Complexity of the trained solution: violated constraints plus
        any samples the model cannot represent.
    beta : float
        Confidence parameter; the returned interval holds with
        probability at least 1 - 3*beta.
    tol : float
        Absolute bisection tolerance on the polynomial roots.

    Returns
    -------
    (eps_lo, eps_hi) : tuple of float
        Lower and upper bounds on the violation probability.

    Raises
    ------
    ValueError
        If s_star exceeds n_samples or beta is not in (0, 1).
    RootBracketingError
        If the root finder cannot bracket a sign change.
    """
    n = int(n_samples)
    k = int(s_star)
    if n < 1:
        raise ValueError(f"n_samples must be positive, got {n_samples}")
    if not 0 <= k <= n:
        raise ValueError(f"s_star must lie in [0, {n}], got {s_star}")
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")

    k_lo = min(k, n - 1)
    _, t_large = _polynomial_roots(n, k_lo, beta, tol)
    eps_lo = max(0.0, float(1.0 - t_large))

    if k == n:
        return eps_lo, 1.0
    k_hi = min(k + _SUPPORT_MARGIN, n - 1)
    t_small, _ = _polynomial_roots(n, k_hi, beta, tol)
    eps_hi = min(1.0, float(1.0 - t_small))
    return eps_lo, eps_hi


@dataclass
class RiskCertificate:
    """Violation-probability interval attached to a trained model.

    The two holdout rates are populated only when `certify` was given a
    holdout set; they are diagnostics and stay out of the JSON form.
    """

    n_samples: int
    s_star: int
    beta: float
    eps_lo: float
    eps_hi: float
    confidence: float
    holdout_violation_rate: float = None
    holdout_misclassification_rate: float = None

    def to_config(self):
        return {
            "N": self.n_samples,
            "s_star": self.s_star,
            "beta": self.beta,
            "eps_lo": self.eps_lo,
            "eps_hi": self.eps_hi,
            "confidence": self.confidence,
        }

    @classmethod
    def from_config(cls, cfg):
        return cls(
            n_samples=int(cfg["N"]),
            s_star=int(cfg["s_star"]),
            beta=float(cfg["beta"]),
            eps_lo=float(cfg["eps_lo"]),
            eps_hi=float(cfg["eps_hi"]),
            confidence=float(cfg["confidence"]),
        )

    def save(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_config(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def load_certificate(path):
    with open(path) as fh:
        return RiskCertificate.from_config(json.load(fh))


def certify(model, train_set, holdout=None, beta=1e-6, unseen_count=0):
    """Certify a trained model on the scenarios that produced it.

    `unseen_count` is the number of training-time samples that were
    deliberately dropped for carrying a discarded label; they still
    count as drawn scenarios whose constraint is violated, so they
    enter both the sample count and the complexity.  When a holdout
    set is supplied its empirical violation and misclassification
    rates are attached to the certificate as diagnostics.
    """
    from .classifier import TIE_TOLERANCE, count_violations, g_values, predict

    if unseen_count < 0:
        raise ValueError(f"unseen_count must be nonnegative, got {unseen_count}")
    violations = count_violations(model, train_set.samples)
    n = len(train_set.samples) + unseen_count
    s_star = violations + unseen_count
    eps_lo, eps_hi = epsilon_bounds(n, s_star, beta)

    holdout_viol = None
    holdout_mis = None
    if holdout is not None and len(holdout.samples) > 0:
        X = holdout.states()
        lookup = {lab: idx for idx, lab in enumerate(model.label_table)}
        known = np.array([s.label in lookup for s in holdout.samples])
        viol = int((~known).sum())
        mis = int((~known).sum())
        if known.any():
            Xk = X[known]
            y_idx = np.array([lookup[s.label] for s in holdout.samples if s.label in lookup])
            g = g_values(model, Xk, y_idx)
            viol += int((g > TIE_TOLERANCE).sum())
            mis += int((predict(model, Xk) != y_idx).sum())
        holdout_viol = viol / len(holdout.samples)
        holdout_mis = mis / len(holdout.samples)

    return RiskCertificate(
        n_samples=n,
        s_star=s_star,
        beta=beta,
        eps_lo=eps_lo,
        eps_hi=eps_hi,
        confidence=1.0 - 3.0 * beta,
        holdout_violation_rate=holdout_viol,
        holdout_misclassification_rate=holdout_mis,
    )


def _clopper_pearson(count, n, level=0.95):
    alpha = 1.0 - level
    lo = 0.0 if count == 0 else float(beta_dist.ppf(alpha / 2.0, count, n - count + 1))
    hi = 1.0 if count == n else float(beta_dist.ppf(1.0 - alpha / 2.0, count + 1, n - count))
    return lo, hi


def monte_carlo_risk(model, system, ell, n_samples=10000, seed=0):
    """Estimate violation and misclassification rates on fresh samples.

    Draws new states from the sampling distribution, labels them with
    the exact inter-sample-time sequences of the system, and evaluates
    the model.  Labels outside the model's table count as both a
    violation and a misclassification.

    Returns a dict with counts, rates and exact binomial 95% intervals.
    """
    from .classifier import TIE_TOLERANCE, g_values, predict
    from .data import sample_states
    from .dynamics import ist_sequence_batch, trigger_cones

    cones = trigger_cones(system)
    X = sample_states(system.n_x, n_samples, seed=seed)
    labels = [tuple(int(v) for v in row) for row in ist_sequence_batch(cones, X, ell)]

    known = {lab: idx for idx, lab in enumerate(model.label_table)}
    mask = np.array([lab in known for lab in labels])
    unseen = int(n_samples - mask.sum())

    violations = unseen
    misclassified = unseen
    if mask.any():
        X_known = X[mask]
        y_idx = np.array([known[lab] for lab, m in zip(labels, mask) if m])
        g = g_values(model, X_known, y_idx)
        violations += int((g > TIE_TOLERANCE).sum())
        pred = predict(model, X_known)
        misclassified += int((pred != y_idx).sum())

    return {
        "n_samples": int(n_samples),
        "unseen_count": unseen,
        "violation_count": int(violations),
        "violation_rate": violations / n_samples,
        "violation_ci": _clopper_pearson(violations, n_samples),
        "misclassification_count": int(misclassified),
        "misclassification_rate": misclassified / n_samples,
        "misclassification_ci": _clopper_pearson(misclassified, n_samples),
    }
