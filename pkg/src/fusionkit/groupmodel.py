"""Fourier analysis on the cyclic group Z_n: a fully computable model in
which quantum Fourier inequalities can be verified numerically.

Conventions (all chosen so the model matches the quantum normalization):
  * Fourier kernel  F(f)(k) = n^(-1/2) sum_j f(j) exp(+2 pi i jk / n),
    which is unitary (Plancherel holds exactly).
  * delta = sqrt(n) plays the role of the global dimension.
  * convolution is (x * y)(g) = delta^(-1) sum_h x(h) y(g - h), so that
    F(x * y) = F(x) F(y) pointwise with no extra constant and point masses
    convolve as delta_a * delta_b = delta^(-1) delta_(a+b).
  * entropy of a nonnegative vector is H(v) = -sum v_g log v_g (natural log,
    no normalization), matching von Neumann entropy of a diagonal positive
    operator; the natural mass normalizations are ||v||_1 = delta for
    convolution statements and ||x||_2 = 1 for entropic uncertainty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import xlogy

__all__ = [
    "delta",
    "qft",
    "inverse_qft",
    "convolve",
    "lp_norm",
    "entropy",
    "support_size",
    "smooth_support",
    "SmoothEntropyResult",
    "smooth_entropy",
    "SuiteConfig",
    "InequalityRecord",
    "SuiteResult",
    "inequality_suite",
]

SUPPORT_REL_TOL = 1e-12


def delta(n: int) -> float:
    """The global dimension of the model on Z_n: sqrt(n)."""
    if n < 1:
        raise ValueError("n must be a positive integer")
    return math.sqrt(n)


def qft(f: np.ndarray) -> np.ndarray:
    """Unitary Fourier transform with kernel exp(+2 pi i jk/n)/sqrt(n)."""
    f = np.asarray(f, dtype=complex)
    if f.ndim != 1 or f.size == 0:
        raise ValueError("expected a nonempty one-dimensional array")
    return math.sqrt(f.size) * np.fft.ifft(f)


def inverse_qft(g: np.ndarray) -> np.ndarray:
    g = np.asarray(g, dtype=complex)
    if g.ndim != 1 or g.size == 0:
        raise ValueError("expected a nonempty one-dimensional array")
    return np.fft.fft(g) / math.sqrt(g.size)


def convolve(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """delta-normalized cyclic convolution: F(x * y) = F(x) F(y)."""
    real_inputs = not (np.iscomplexobj(x) or np.iscomplexobj(y))
    x = np.asarray(x, dtype=complex)
    y = np.asarray(y, dtype=complex)
    if x.shape != y.shape or x.ndim != 1 or x.size == 0:
        raise ValueError("x and y must be nonempty one-dimensional arrays of equal length")
    out = np.fft.ifft(np.fft.fft(x) * np.fft.fft(y)) / math.sqrt(x.size)
    return out.real if real_inputs else out


def lp_norm(x: np.ndarray, p: float) -> float:
    """l^p (quasi)norm, 0 < p <= inf."""
    a = np.abs(np.asarray(x, dtype=complex))
    if p == np.inf:
        return float(a.max()) if a.size else 0.0
    if p <= 0:
        raise ValueError("p must be positive or inf")
    return float((a**p).sum() ** (1.0 / p))


def entropy(v: np.ndarray) -> float:
    """H(v) = -sum v_g log v_g for a nonnegative vector (0 log 0 = 0)."""
    v = np.asarray(v, dtype=float)
    if v.size and v.min() < -1e-12 * max(1.0, float(np.abs(v).max())):
        raise ValueError("entropy requires a nonnegative vector")
    v = np.clip(v, 0.0, None)
    return float(-xlogy(v, v).sum())


def support_size(v: np.ndarray, rel_tol: float = SUPPORT_REL_TOL) -> int:
    """Number of entries exceeding rel_tol times the largest magnitude."""
    a = np.abs(np.asarray(v, dtype=complex))
    if a.size == 0 or a.max() == 0.0:
        return 0
    return int((a > rel_tol * a.max()).sum())


def smooth_support(f: np.ndarray, eps: float, p: float = 2.0) -> float:
    """Relaxed support size after removing an eps-fraction of f in l^p.

    Solves  S(f) - max sum_g u_g  over u in [0,1]^supp(f) subject to
    ||u . f||_p <= eps ||f||_p  (u_g is the removed fraction of coordinate g;
    u_g = 1 deletes the coordinate, fractional u counts fractionally).  The
    maximization is exact: greedy fractional knapsack for p = 1, water-filling
    with a feasible-side bisection for p = 2, and the closed form
    u_g = min(1, eps ||f||_inf / |f_g|) for p = inf.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    a = np.abs(np.asarray(f, dtype=complex))
    if a.size == 0 or a.max() == 0.0:
        return 0.0
    vals = a[a > SUPPORT_REL_TOL * a.max()]
    S = float(vals.size)
    if eps == 0.0:
        return S
    if p == 1:
        budget = eps * float(vals.sum())
        removed = 0.0
        for c in np.sort(vals):
            if c <= budget:
                removed += 1.0
                budget -= c
            else:
                removed += budget / c
                break
        return S - min(removed, S)
    if p == 2:
        budget = (eps**2) * float(vals @ vals)
        sq = vals**2

        def used(theta_sq: float) -> Tuple[float, float]:
            u = np.minimum(1.0, theta_sq / sq)
            return float((u**2) @ sq), float(u.sum())

        hi = float(sq.max())
        cost_hi, tot_hi = used(hi)
        if cost_hi <= budget:
            return S - tot_hi
        lo = 0.0
        for _ in range(80):
            mid = (lo + hi) / 2.0
            if used(mid)[0] <= budget:
                lo = mid
            else:
                hi = mid
        # keep the feasible side so the relaxation never overshoots
        return S - used(lo)[1]
    if p == np.inf:
        u = np.minimum(1.0, eps * float(vals.max()) / vals)
        return S - float(u.sum())
    raise ValueError("p must be 1, 2, or inf")


@dataclass
class SmoothEntropyResult:
    """Entropy minimized over an l^2 ball of radius eps ||f||_2 around f
    (intersected with the nonnegative orthant).  ``upper`` is a certified
    value H(g) at a feasible g; ``lower`` is a rigorous grid lower bound
    (grid minimum over an inflated feasible set, minus a per-coordinate
    modulus-of-continuity correction), available only for n <= 3."""

    upper: float
    lower: Optional[float]
    minimizer: np.ndarray

    def __post_init__(self) -> None:
        if self.lower is not None and self.lower > self.upper + 1e-12:
            raise ArithmeticError("smooth-entropy bracket is inverted")


def smooth_entropy(
    f: np.ndarray,
    eps: float,
    grid_step: float = 0.05,
    descent_iters: int = 300,
) -> SmoothEntropyResult:
    f = np.asarray(f, dtype=float)
    if f.ndim != 1 or f.size == 0:
        raise ValueError("expected a nonempty one-dimensional array")
    if f.min() < 0:
        raise ValueError("smooth entropy is defined for nonnegative vectors")
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    n = f.size
    budget = eps * float(np.linalg.norm(f))

    def project(g: np.ndarray) -> np.ndarray:
        g = np.clip(g, 0.0, None)
        d = g - f
        norm = float(np.linalg.norm(d))
        if norm > budget and norm > 0:
            g = f + d * (budget / norm)
            g = np.clip(g, 0.0, None)
        return g

    candidates = [f.copy()]
    # hard thresholding: delete the smallest coordinates that fit the budget,
    # optionally spending the remainder on the largest coordinate
    order = np.argsort(f)
    g = f.copy()
    spent2 = 0.0
    for idx in order:
        c2 = f[idx] ** 2
        if spent2 + c2 <= budget**2:
            g[idx] = 0.0
            spent2 += c2
    candidates.append(g.copy())
    rem = math.sqrt(max(budget**2 - spent2, 0.0))
    g2 = g.copy()
    g2[int(np.argmax(f))] += rem
    candidates.append(project(g2))
    # projected gradient descent on H (gradient -(1 + log g))
    x = f.copy()
    step0 = 0.1 * (budget if budget > 0 else 1.0) / math.sqrt(n)
    for it in range(descent_iters):
        grad = -(1.0 + np.log(np.maximum(x, 1e-300)))
        x = project(x - step0 / (1.0 + it / 50.0) * grad)
    candidates.append(x)
    values = [entropy(project(c)) for c in candidates]
    best = int(np.argmin(values))
    upper = values[best]
    minimizer = project(candidates[best])
    lower = None
    if n <= 3:
        scale = float(f.max()) + budget
        axes = [
            np.arange(max(0.0, f[i] - budget), min(scale, f[i] + budget) + grid_step, grid_step)
            for i in range(n)
        ]
        mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, n)
        dist = np.linalg.norm(mesh - f, axis=1)
        # inflate the ball so every feasible point has a grid neighbor inside
        feas = mesh[dist <= budget + grid_step * math.sqrt(n)]
        if feas.size:
            vals = -xlogy(feas, feas).sum(axis=1)
            # modulus of continuity of -t log t over [0, M] at spacing s:
            # |h(a) - h(b)| <= s + int_0^s |log t| dt + s max(0, log M)
            s = grid_step / 2.0
            int_abs_log = s - s * math.log(s) if s <= 1.0 else s * math.log(s) - s + 2.0
            omega = s + int_abs_log + s * max(0.0, math.log(max(scale, 1e-300)))
            lower = float(vals.min()) - n * omega
    return SmoothEntropyResult(upper=upper, lower=lower, minimizer=minimizer)


# ---------------------------------------------------------------------------
# inequality suite
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SuiteConfig:
    """Configuration for the Z_n inequality suite.

    ``trials`` random vectors feed every inequality; the smooth-support
    inequalities use only the first ``smooth_trials`` of them (the exact
    relaxations dominate the runtime).  All randomness derives from ``seed``.
    """

    trials: int = 200
    smooth_trials: int = 40
    seed: int = 0xFA57
    eps_grid: Tuple[float, ...] = (0.0, 0.1, 0.3)
    slack_tol: float = 1e-9
    include_smooth_entropy: bool = True

    def __post_init__(self) -> None:
        if self.trials < 1 or self.smooth_trials < 0:
            raise ValueError("trial counts must be positive")
        if any(e < 0 for e in self.eps_grid):
            raise ValueError("eps grid must be nonnegative")


@dataclass
class InequalityRecord:
    """Result of exercising one inequality over all trials."""

    name: str
    trials: int
    min_slack: float
    equality_hit: bool
    asserted: bool
    passed: bool
    worst_case: str = ""
    note: str = ""

    def to_dict(self) -> Dict[str, object]:
        return {
            "name": self.name,
            "trials": int(self.trials),
            "min_slack": float(self.min_slack),
            "equality_hit": bool(self.equality_hit),
            "asserted": bool(self.asserted),
            "passed": bool(self.passed),
            "worst_case": self.worst_case,
            "note": self.note,
        }


@dataclass
class SuiteResult:
    n: int
    delta: float
    records: List[InequalityRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.records if r.asserted)

    def record(self, name: str) -> InequalityRecord:
        for r in self.records:
            if r.name == name:
                return r
        raise KeyError(name)

    def to_dict(self) -> Dict[str, object]:
        return {
            "n": int(self.n),
            "delta": float(self.delta),
            "passed": bool(self.passed),
            "records": [r.to_dict() for r in self.records],
        }


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in range(2, int(math.isqrt(n)) + 1):
        if n % p == 0:
            return False
    return True


class _Tracker:
    """Accumulates slacks for one inequality."""

    def __init__(self, name: str, asserted: bool, tol: float, note: str = ""):
        self.name = name
        self.asserted = asserted
        self.tol = tol
        self.note = note
        self.count = 0
        self.min_slack = math.inf
        self.equality_hit = False
        self.worst_case = ""

    def add(self, slack: float, label: str, structured: bool) -> None:
        self.count += 1
        if slack < self.min_slack:
            self.min_slack = slack
            self.worst_case = label
        if structured and abs(slack) <= self.tol:
            self.equality_hit = True

    def finish(self) -> InequalityRecord:
        passed = (not self.asserted) or (self.min_slack >= -self.tol)
        return InequalityRecord(
            name=self.name,
            trials=self.count,
            min_slack=self.min_slack if self.count else 0.0,
            equality_hit=self.equality_hit,
            asserted=self.asserted,
            passed=passed,
            worst_case=self.worst_case,
            note=self.note,
        )


def _structured_vectors(n: int) -> List[Tuple[str, np.ndarray]]:
    """Extremal candidates: point masses, subgroup indicators (with a coset
    shift and a character modulation), and the uniform vector."""
    out: List[Tuple[str, np.ndarray]] = []
    e0 = np.zeros(n, dtype=complex)
    e0[0] = 1.0
    out.append(("point mass at 0", e0))
    if n > 1:
        e1 = np.zeros(n, dtype=complex)
        e1[1] = 1.0
        out.append(("point mass at 1", e1))
    for d in range(1, n + 1):
        if n % d == 0:
            ind = np.zeros(n, dtype=complex)
            ind[::d] = 1.0
            out.append((f"subgroup indicator step {d}", ind))
    if n >= 4:
        d = next(d for d in range(2, n + 1) if n % d == 0)
        shifted = np.zeros(n, dtype=complex)
        shifted[1::d] = 1.0
        out.append((f"coset indicator step {d}", shifted[:n]))
        j = np.arange(n)
        modulated = np.exp(2j * np.pi * j / n)
        modulated[j % d != 0] = 0.0
        out.append((f"modulated subgroup step {d}", modulated))
    out.append(("uniform", np.ones(n, dtype=complex) / math.sqrt(n)))
    return out


def inequality_suite(n: int, config: Optional[SuiteConfig] = None) -> SuiteResult:
    """Exercise the quantum Fourier inequalities on Z_n over random and
    structured vectors, recording the minimum slack of each.

    Asserted inequalities (records with ``asserted=True``) are expected to
    hold with slack >= -slack_tol after the stated normalization; structured
    extremals are expected to achieve equality where the theory says they do
    (``equality_hit``).  Records with ``asserted=False`` are informational.
    """
    if n < 2:
        raise ValueError("the suite needs n >= 2")
    cfg = config or SuiteConfig()
    tol = cfg.slack_tol
    d = delta(n)
    rng = np.random.default_rng(cfg.seed)
    result = SuiteResult(n=n, delta=d)

    structured = _structured_vectors(n)
    random_trials: List[Tuple[str, np.ndarray]] = []
    for t in range(cfg.trials):
        kind = t % 3
        if kind == 0:
            x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        elif kind == 1:
            x = np.zeros(n, dtype=complex)
            k = int(rng.integers(1, n + 1))
            idx = rng.choice(n, size=k, replace=False)
            x[idx] = rng.standard_normal(k) + 1j * rng.standard_normal(k)
        else:
            x = np.abs(rng.standard_normal(n)).astype(complex)
        if not np.any(x):
            x[0] = 1.0
        random_trials.append((f"random trial {t}", x))
    everything = [(lbl, v, True) for lbl, v in structured] + [
        (lbl, v, False) for lbl, v in random_trials
    ]

    # --- calibration identities -------------------------------------------
    cal_plancherel = _Tracker("plancherel identity", True, tol,
                              "| ||F(x)||_2 - ||x||_2 | = 0")
    cal_inversion = _Tracker("fourier inversion", True, tol,
                             "|| F^-1(F(x)) - x ||_inf = 0")
    cal_convolution = _Tracker("convolution theorem", True, tol,
                               "|| F(x*y) - F(x)F(y) ||_inf = 0")
    for lbl, x, structured_flag in everything:
        cal_plancherel.add(-abs(lp_norm(qft(x), 2) - lp_norm(x, 2)), lbl, True)
        cal_inversion.add(-float(np.abs(inverse_qft(qft(x)) - x).max()), lbl, True)
    for t in range(min(cfg.trials, 50)):
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        y = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        defect = float(np.abs(qft(convolve(x, y)) - qft(x) * qft(y)).max())
        cal_convolution.add(-defect / (1.0 + lp_norm(x, 2) * lp_norm(y, 2)), f"pair {t}", True)

    # --- Hausdorff-Young and its reverse ----------------------------------
    hy_pairs = [(1.0, np.inf), (4.0 / 3.0, 4.0), (2.0, 2.0)]
    rhy_pairs = [(4.0, 4.0 / 3.0), (np.inf, 1.0)]
    hy = _Tracker("hausdorff-young", True, tol,
                  "||F(x)||_q <= delta^(2/q-1) ||x||_p, 1/p + 1/q = 1, p <= 2")
    rhy = _Tracker("reverse hausdorff-young", True, tol,
                   "||F(x)||_q >= delta^(2/q-1) ||x||_p, 1/p + 1/q = 1, p >= 2")
    for lbl, x, structured_flag in everything:
        xh = qft(x)
        scale = 1.0 + lp_norm(x, 2)
        for p, q in hy_pairs:
            c = d ** (2.0 / q - 1.0) if q != np.inf else d ** (-1.0)
            hy.add((c * lp_norm(x, p) - lp_norm(xh, q)) / scale, f"{lbl} (p={p:g})", structured_flag)
        for p, q in rhy_pairs:
            c = d ** (2.0 / q - 1.0)
            rhy.add((lp_norm(xh, q) - c * lp_norm(x, p)) / scale, f"{lbl} (p={p:g})", structured_flag)

    # --- support uncertainty ----------------------------------------------
    ds = _Tracker("donoho-stark support", True, 0.5,
                  "S(x) S(F(x)) >= n (integer counts; tolerance 1/2)")
    for lbl, x, structured_flag in everything:
        s = support_size(x) * support_size(qft(x))
        ds.add(float(s - n), lbl, structured_flag)
    tao = None
    if _is_prime(n):
        tao = _Tracker("tao support (prime n)", True, 0.5,
                       "S(x) + S(F(x)) >= n + 1 on prime cycles")
        for lbl, x, structured_flag in everything:
            s = support_size(x) + support_size(qft(x))
            tao.add(float(s - (n + 1)), lbl, structured_flag)

    # --- entropic uncertainty ----------------------------------------------
    hb = _Tracker("hirschman entropy", True, tol,
                  "H(|x|^2) + H(|F(x)|^2) >= log n for ||x||_2 = 1")
    for lbl, x, structured_flag in everything:
        xn = np.asarray(x, dtype=complex) / lp_norm(x, 2)
        slack = entropy(np.abs(xn) ** 2) + entropy(np.abs(qft(xn)) ** 2) - math.log(n)
        hb.add(slack, lbl, structured_flag)

    # --- smoothed support uncertainty --------------------------------------
    smooth_subset = [(lbl, v, True) for lbl, v in structured] + [
        (lbl, v, False) for lbl, v in random_trials[: cfg.smooth_trials]
    ]
    sds1 = _Tracker("smooth donoho-stark (l1)", True, tol,
                    "s_eps^1(x) s_eta^1(F(x)) >= n (1-eps)(1-eta)")
    sds2 = _Tracker("smooth donoho-stark (l2)", True, tol,
                    "s_eps^2(x) s_eta^2(F(x)) >= n (1-eps-eta)^2")
    sdsi = _Tracker("smooth donoho-stark (linf)", False, tol,
                    "informational: smallest ratio of s_eps^inf product to n")
    for lbl, x, structured_flag in smooth_subset:
        xh = qft(x)
        for eps in cfg.eps_grid:
            sx1 = smooth_support(x, eps, 1)
            sx2 = smooth_support(x, eps, 2)
            sxi = smooth_support(x, eps, np.inf)
            for eta in cfg.eps_grid:
                tag = f"{lbl} (eps={eps:g}, eta={eta:g})"
                sds1.add(sx1 * smooth_support(xh, eta, 1) - n * (1 - eps) * (1 - eta),
                         tag, structured_flag)
                sds2.add(sx2 * smooth_support(xh, eta, 2) - n * (1 - eps - eta) ** 2,
                         tag, structured_flag)
                sdsi.add(sxi * smooth_support(xh, eta, np.inf) / n - 1.0, tag, False)

    # --- convolution inequalities ------------------------------------------
    young = _Tracker("young convolution", True, tol,
                     "||x*y||_r <= delta^-1 ||x||_p ||y||_q, 1/p + 1/q = 1 + 1/r")
    ryoung = _Tracker("reverse young (quasi-norms)", True, tol,
                      "||x*y||_r >= delta^-1 ||x||_p ||y||_q for x, y >= 0, p, q <= 1")
    schur = _Tracker("positivity of convolution", True, tol,
                     "x, y >= 0 implies x*y >= 0 entrywise")
    entconv = _Tracker("entropic convolution", True, tol,
                       "H(x*y) >= max(H(x), H(y)) for x, y >= 0 with mass delta")
    suppconv = _Tracker("support of convolution", True, 0.5,
                        "S(x*y) >= max(S(x), S(y)) for x, y >= 0")
    fwd_triples = [(1.0, 1.0, 1.0), (2.0, 2.0, np.inf), (1.5, 1.5, 3.0), (1.0, 2.0, 2.0)]
    rev_triples = [(0.5, 0.5, 1.0 / 3.0), (2.0 / 3.0, 2.0 / 3.0, 0.5), (1.0, 1.0, 1.0)]
    pair_sources: List[Tuple[str, np.ndarray, np.ndarray, bool]] = []
    for (la, a), (lb, b) in zip(structured, structured[1:] + structured[:1]):
        pair_sources.append((f"{la} * {lb}", np.abs(a), np.abs(b), True))
    for t in range(cfg.trials):
        a = np.abs(rng.standard_normal(n))
        b = np.abs(rng.standard_normal(n))
        if t % 4 == 0:
            a = np.zeros(n)
            a[int(rng.integers(n))] = float(rng.random()) + 0.1
        pair_sources.append((f"random pair {t}", a, b, False))
    for lbl, a, b, structured_flag in pair_sources:
        if not a.any() or not b.any():
            continue
        c = convolve(a, b).real
        scale = 1.0 + lp_norm(a, 1) * lp_norm(b, 1)
        for p, q, r in fwd_triples:
            young.add((lp_norm(a, p) * lp_norm(b, q) / d - lp_norm(c, r)) / scale,
                      f"{lbl} (r={r:g})", structured_flag)
        for p, q, r in rev_triples:
            ryoung.add((lp_norm(c, r) - lp_norm(a, p) * lp_norm(b, q) / d) / scale,
                       f"{lbl} (r={r:g})", structured_flag)
        schur.add(float(c.min()) / scale, lbl, structured_flag)
        suppconv.add(float(support_size(c) - max(support_size(a), support_size(b))),
                     lbl, structured_flag)
        am = a * (d / a.sum())
        bm = b * (d / b.sum())
        cm = convolve(am, bm).real
        entconv.add(entropy(np.clip(cm, 0.0, None)) - max(entropy(am), entropy(bm)),
                    lbl, structured_flag)

    trackers = [cal_plancherel, cal_inversion, cal_convolution, hy, rhy, ds]
    if tao is not None:
        trackers.append(tao)
    trackers += [hb, sds1, sds2, sdsi, young, ryoung, schur, entconv, suppconv]

    # --- qualitative smoothed entropy (informational, tiny n only) ---------
    if cfg.include_smooth_entropy and n <= 3:
        se = _Tracker("smooth entropy uncertainty", False, tol,
                      "informational: fitted defect C in "
                      "H_eps(|x|^2) + H_eps(|F(x)|^2) >= log n - C")
        eps = 0.1
        for lbl, x, structured_flag in everything[: cfg.smooth_trials]:
            xn = np.asarray(x, dtype=complex) / lp_norm(x, 2)
            hx = smooth_entropy(np.abs(xn) ** 2, eps).upper
            hxh = smooth_entropy(np.abs(qft(xn)) ** 2, eps).upper
            se.add(hx + hxh - math.log(n), lbl, False)
        se.note += f"; fitted C = {max(0.0, -se.min_slack):.6f}"
        trackers.append(se)

    result.records = [t.finish() for t in trackers]
    return result
