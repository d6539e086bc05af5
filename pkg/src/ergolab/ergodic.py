"""Power growth, ergodic projections, and quotient-isometry experiments.

Growth sequences come with a log-log least-squares exponent fit over a
trailing window.  The ergodic projection is the spectral projection onto
the fixed space along the range of (T - I), computed from a sorted Schur
form; a nontrivial Jordan structure at 1 is rejected.

``gamma_quotient`` estimates the limsup seminorm
``gamma(x) = limsup_n || T_n (T - I)^m x ||`` by a window maximum, detects
its kernel from an averaged Gram, and builds the induced operator on the
quotient.  Under the regularity of the scheme that operator is an isometry;
the report carries the sampled isometry defect so the property can be
checked instead of assumed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg

from .linop import OperatorModel, geom, mat, op_norm, power
from .means import MeanScheme, VectorPowerCache, apply_mean, apply_mean_vector

_OVERFLOW_LIMIT = 1e300
_PROBE_SEED = 0x5EED


class NonSimplePole(ValueError):
    """Eigenvalue 1 carries a nontrivial Jordan block."""


class NonPositiveValues(ValueError):
    """Log-log fit requested on a window containing non-positive values."""


class WindowTooSmall(ValueError):
    """A window-based estimate needs more indices than were supplied."""


@dataclass
class GrowthReport:
    """A labeled sequence (n, value) with an optional fitted exponent."""

    label: str
    ns: np.ndarray
    values: np.ndarray
    fit_exponent: float | None = None
    fit_residual: float | None = None
    window: tuple | None = None
    overflow_at: int | None = None

    @property
    def points(self):
        return list(zip(self.ns.tolist(), self.values.tolist()))


def growth_exponent(report: GrowthReport, window_fraction: float = 0.5):
    """Least-squares slope of log(value) against log(n) over the trailing
    ``window_fraction`` of the points; the residual is the maximum absolute
    log deviation from the fit."""
    if not (0.0 < window_fraction <= 1.0):
        raise ValueError("window_fraction must lie in (0, 1]")
    count = len(report.ns)
    start = count - max(int(math.ceil(window_fraction * count)), 1)
    ns = np.asarray(report.ns[start:], dtype=float)
    vals = np.asarray(report.values[start:], dtype=float)
    if ns.size < 8:
        raise WindowTooSmall("exponent fit needs at least 8 points")
    if np.any(vals <= 0.0):
        raise NonPositiveValues("exponent fit needs positive values")
    x = np.log(ns)
    y = np.log(vals)
    design = np.vstack([x, np.ones_like(x)]).T
    (slope, intercept), *_ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.max(np.abs(design @ np.array([slope, intercept]) - y)))
    return float(slope), residual


def log_fit(ns, values):
    """Least-squares fit value ~ c*log(n) + d; returns (c, d, rel_residual)
    with rel_residual the max of |fit - value| / value."""
    ns = np.asarray(ns, dtype=float)
    vals = np.asarray(values, dtype=float)
    if np.any(vals <= 0.0):
        raise NonPositiveValues("log fit needs positive values")
    x = np.log(ns)
    design = np.vstack([x, np.ones_like(x)]).T
    (c, d), *_ = np.linalg.lstsq(design, vals, rcond=None)
    rel = float(np.max(np.abs(design @ np.array([c, d]) - vals) / vals))
    return float(c), float(d), rel


def fitted(report: GrowthReport, window_fraction: float = 0.5) -> GrowthReport:
    """Copy of the report with the trailing-window exponent fit filled in
    (left unfitted when the window is too small or has non-positive values)."""
    try:
        expo, res = growth_exponent(report, window_fraction)
    except (WindowTooSmall, NonPositiveValues):
        return report
    count = len(report.ns)
    start = count - max(int(math.ceil(window_fraction * count)), 1)
    return replace(report, fit_exponent=expo, fit_residual=res,
                   window=(int(report.ns[start]), int(report.ns[-1])))


def power_norm_sequence(t, nmax: int, mode: str = "spectral",
                        window_fraction: float = 0.5) -> GrowthReport:
    """(n, ||T^n||) for n = 1..nmax by incremental multiplication, with the
    default trailing-half exponent fit.  Stops early (and records where) if
    a norm exceeds 1e300."""
    if nmax < 2:
        raise ValueError("need nmax >= 2")
    a = mat(t)
    g = geom(t)
    ns, vals = [], []
    p = a.copy()
    overflow_at = None
    for n in range(1, nmax + 1):
        if n > 1:
            p = p @ a
        v = op_norm(p, g, g, mode=mode)
        if not np.isfinite(v) or v > _OVERFLOW_LIMIT:
            overflow_at = n
            break
        ns.append(n)
        vals.append(v)
    label = t.label if isinstance(t, OperatorModel) else "operator"
    report = GrowthReport(label=f"||{label}^n|| ({mode})",
                          ns=np.asarray(ns), values=np.asarray(vals),
                          overflow_at=overflow_at)
    return fitted(report, window_fraction)


def power_norm_samples(t, ns, mode: str = "spectral",
                       window_fraction: float = 0.5) -> GrowthReport:
    """||T^n|| at the given sample indices via memoized binary powering;
    cheap enough for large dimensions where a full sweep is not."""
    a = mat(t)
    g = geom(t)
    ns = sorted(int(n) for n in ns)
    if len(ns) < 2 or ns[0] < 1:
        raise ValueError("need at least two sample indices, all >= 1")
    squares = [a]
    while 1 << len(squares) <= ns[-1]:
        squares.append(squares[-1] @ squares[-1])
    vals = []
    kept = []
    overflow_at = None
    for n in ns:
        p = None
        k = n
        bit = 0
        while k:
            if k & 1:
                p = squares[bit] if p is None else p @ squares[bit]
            k >>= 1
            bit += 1
        v = op_norm(p, g, g, mode=mode)
        if not np.isfinite(v) or v > _OVERFLOW_LIMIT:
            overflow_at = n
            break
        kept.append(n)
        vals.append(v)
    label = t.label if isinstance(t, OperatorModel) else "operator"
    report = GrowthReport(label=f"||{label}^n|| ({mode}, sampled)",
                          ns=np.asarray(kept), values=np.asarray(vals),
                          overflow_at=overflow_at)
    return fitted(report, window_fraction)


def ergodic_projection(t, tol: float = 1e-9) -> np.ndarray:
    """Spectral projection onto N(T - I) along R(T - I).

    Schur-sorts the eigenvalue cluster within ``tol`` of 1 to the front; the
    restriction of T to that invariant subspace must be the identity up to
    1e-8 (otherwise 1 is a defective eigenvalue and NonSimplePole is
    raised).  Returns the zero matrix when 1 is not in the spectrum.
    """
    a = mat(t)
    d = a.shape[0]
    ts, z, sdim = scipy.linalg.schur(a, output="complex",
                                     sort=lambda lam: abs(lam - 1.0) <= tol)
    if sdim == 0:
        return np.zeros_like(a)
    a11 = ts[:sdim, :sdim]
    defect = a11 - np.eye(sdim, dtype=complex)
    # semisimple <=> the cluster block is the identity (rank of defect = 0)
    if np.linalg.norm(defect, 2) > 1e-8 * max(1.0, np.linalg.norm(a, 2)):
        raise NonSimplePole("eigenvalue 1 has a nontrivial Jordan block")
    if sdim == d:
        return np.eye(d, dtype=complex)
    a12 = ts[:sdim, sdim:]
    a22 = ts[sdim:, sdim:]
    x = scipy.linalg.solve_sylvester(a11, -a22, a12)
    proj = np.zeros((d, d), dtype=complex)
    proj[:sdim, :sdim] = np.eye(sdim)
    proj[:sdim, sdim:] = x
    return z @ proj @ z.conj().T


def mean_convergence_report(s: MeanScheme, t, nmax: int,
                            tail_eps: float = 1e-12) -> GrowthReport:
    """(n, || T_n - P ||) for n up to nmax, P the ergodic projection."""
    a = mat(t)
    g = geom(t)
    proj = ergodic_projection(t)
    ns, vals = [], []
    for n in range(max(s.min_n, 0), nmax + 1):
        mean = apply_mean(s, a, n, 1.0, tail_eps)
        ns.append(n)
        vals.append(op_norm(mean - proj, g, g))
    label = t.label if isinstance(t, OperatorModel) else "operator"
    return GrowthReport(label=f"||mean_n({label}) - P||",
                        ns=np.asarray(ns), values=np.asarray(vals))


def alternating_sum_residual(s: MeanScheme, t, k: int, m: int, n0: int,
                             x, n: int, tail_eps: float = 1e-12) -> float:
    """Residual of the repeated-regularity expansion
    (T - I)^{k-m} T_n x  ~  sum_{l} (-1)^l C(k-m, l) T_{n + (k-m-l) n0} x.

    Exact (zero) for the identity-powers scheme with n0 = 1; otherwise a
    defect sequence that decays when the scheme is (n0, m)-regular on x.
    """
    if k < m:
        raise ValueError("need k >= m")
    q = k - m
    a = mat(t)
    cache = VectorPowerCache(a, x)
    lhs = power(a - np.eye(a.shape[0], dtype=complex), q) @ \
        apply_mean_vector(s, t, n, x, 1.0, tail_eps, cache)
    rhs = np.zeros(a.shape[0], dtype=complex)
    for ell in range(q + 1):
        coeff = (-1.0) ** ell * math.comb(q, ell)
        rhs += coeff * apply_mean_vector(s, t, n + (q - ell) * n0, x, 1.0,
                                         tail_eps, cache)
    if isinstance(t, OperatorModel):
        return t.vector_norm(lhs - rhs)
    return float(np.linalg.norm(lhs - rhs))


@dataclass
class QuotientModel:
    """Kernel/quotient data for the estimated limsup seminorm."""

    kernel_basis: np.ndarray
    quotient_map: np.ndarray
    induced_op: np.ndarray
    gamma_values: dict
    isometry_defect: float
    threshold: float

    @property
    def quotient_dim(self) -> int:
        return self.quotient_map.shape[0]


def _probe_vectors(d: int) -> list:
    rng = np.random.default_rng(_PROBE_SEED)
    probes = [np.eye(d, dtype=complex)[:, i] for i in range(d)]
    for _ in range(8):
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        probes.append(v / np.linalg.norm(v))
    return probes


def gamma_quotient(t, s: MeanScheme, m: int, n_window, kernel_tol: float = 1e-8,
                   tail_eps: float = 1e-12) -> QuotientModel:
    """Window estimate of gamma(x) = limsup_n ||T_n (T - I)^m x|| and the
    operator induced on the quotient by its kernel.

    The limsup is approximated by the max over n in [lo, hi]; the kernel is
    read off the averaged Gram of the window maps (eigendirections whose
    scale falls below ``kernel_tol`` times the largest probed gamma).  The
    quotient coordinates are scaled so the Euclidean norm there matches the
    Gram-estimated seminorm, and the induced operator is expressed in those
    coordinates.  gamma_values records per-probe estimates on the full
    window and on its halves (window-sensitivity diagnostic).
    """
    lo, hi = int(n_window[0]), int(n_window[1])
    if hi - lo < 16:
        raise WindowTooSmall("gamma window needs hi - lo >= 16")
    lo = max(lo, s.min_n)
    a = mat(t)
    g = geom(t)
    d = a.shape[0]
    eye = np.eye(d, dtype=complex)
    b = power(a - eye, m)
    w_factor = None
    if g is not None:
        w_factor = g.factor() if not g.is_diagonal else np.diag(g.factor())
    maps = []
    for n in range(lo, hi + 1):
        c = apply_mean(s, a, n, 1.0, tail_eps) @ b
        if w_factor is not None:
            c = w_factor @ c
        maps.append(c)
    gram = np.zeros((d, d), dtype=complex)
    for c in maps:
        gram += c.conj().T @ c
    gram /= len(maps)

    def gamma_of(x, member=None):
        sel = maps if member is None else member
        return max(float(np.linalg.norm(c @ x)) for c in sel)

    half = len(maps) // 2
    probes = _probe_vectors(d)
    gamma_values = {
        "window": [gamma_of(x) for x in probes],
        "first_half": [gamma_of(x, maps[:half]) for x in probes],
        "second_half": [gamma_of(x, maps[half:]) for x in probes],
    }
    scale = max(gamma_values["window"], default=0.0)
    threshold = kernel_tol * scale
    eigvals, eigvecs = np.linalg.eigh(gram)
    sigma = np.sqrt(np.clip(eigvals, 0.0, None))
    if scale <= 0.0:
        kernel_mask = np.ones(d, dtype=bool)
    else:
        kernel_mask = sigma < threshold
    kernel_basis = eigvecs[:, kernel_mask]
    kept = eigvecs[:, ~kernel_mask]
    kept_sigma = sigma[~kernel_mask]
    quotient_map = kept_sigma[:, None] * kept.conj().T
    if kept.shape[1] == 0:
        induced = np.zeros((0, 0), dtype=complex)
        defect = 0.0
    else:
        pseudo_inverse = kept / kept_sigma[None, :]
        induced = quotient_map @ a @ pseudo_inverse
        defect = max(abs(gamma_of(a @ x) - gamma_of(x)) for x in probes)
    return QuotientModel(kernel_basis=kernel_basis, quotient_map=quotient_map,
                         induced_op=induced, gamma_values=gamma_values,
                         isometry_defect=float(defect), threshold=float(threshold))


def almost_convergence_defect(s: MeanScheme, t, p, k: int, n_sup: int, x,
                              tail_eps: float = 1e-12) -> float:
    """sup over n <= n_sup of || (1/(k+1)) sum_{j<=k} T_{n+j} x - P x ||.

    P is supplied (typically the ergodic projection); rows from the scheme's
    first valid index through n_sup + k are used.
    """
    a = mat(t)
    proj = mat(p) if np.ndim(p) == 2 else np.asarray(p, dtype=complex)
    target = proj @ np.asarray(x, dtype=complex)
    cache = VectorPowerCache(a, x)
    start = s.min_n
    means = [apply_mean_vector(s, t, n, x, 1.0, tail_eps, cache)
             for n in range(start, n_sup + k + 1)]
    prefix = np.cumsum(np.asarray(means), axis=0)

    def window_avg(n):
        i = n - start
        total = prefix[i + k] - (prefix[i - 1] if i > 0 else 0.0)
        return total / (k + 1)

    worst = 0.0
    for n in range(start, n_sup + 1):
        delta = window_avg(n) - target
        if isinstance(t, OperatorModel):
            val = t.vector_norm(delta)
        else:
            val = float(np.linalg.norm(delta))
        worst = max(worst, val)
    return worst
