"""Summability schemes {t_nj} and their action on operator powers.

A mean scheme is a nonnegative row-stochastic coefficient table: row n
applied to the power sequence {T^j} gives the operator mean
``T_n = sum_j t_nj T^j``.  Implemented families:

* ``cesaro(p)``   -- Cesaro means of integer order p >= 1; row weights come
  from the product form ``(p/(n+p)) * prod_{k=1}^{p-1} (1 - j/(n+k))`` which
  stays well-scaled for n up to 1e4.
* ``abel()``      -- discretized Abel means ``(1/n) sum_j (1-1/n)^j T^j``.
* ``zweier()``    -- ``(T^{n-1} + T^n)/2``.
* ``binomial()``  -- ``2^{-n} sum_k C(n,k) T^k = ((T+I)/2)^n``.
* ``power_series(coeffs, radii)`` -- ``F(r_n T)/F(r_n)`` for a generating
  function F with nonnegative Taylor coefficients; default radii 1 - 1/n.
* ``identity_powers()`` -- the powers themselves, ``T_n = T^n``.

Rows of the infinite families (Abel, power series) are truncated at a
geometric tail-mass bound below ``tail_eps`` and are *not* renormalized, so
the truncation defect stays visible in tests.

``backward_iterate`` produces the scheme with coefficients
``s_nk = (sum_{j>=k+1} t_nj) / (sum_{j>=1} j t_nj)``; closed forms are used
for the Cesaro / Abel / Zweier / power-series families and the defining
formula otherwise.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .linop import OperatorModel, geom, mat, op_norm, power

DEFAULT_TAIL_EPS = 1e-12


class RowOutOfRange(ValueError):
    """Row index below the scheme's first valid row."""


class DegenerateRow(ValueError):
    """Backward iterate undefined: the source row has t_n0 = 1."""


class SpectralRadiusTooLarge(ValueError):
    """Infinite-row scheme applied to an operator with spectral radius > 1."""


@dataclass(frozen=True)
class MeanRow:
    """One row of a scheme: sparse support (indices, weights) plus the
    geometric bound on the truncated tail mass (0 for finite rows)."""

    n: int
    indices: np.ndarray
    weights: np.ndarray
    tail_mass_bound: float = 0.0

    def total(self) -> float:
        return float(np.sum(self.weights))

    def dense(self) -> np.ndarray:
        out = np.zeros(int(self.indices[-1]) + 1)
        out[self.indices] = self.weights
        return out


def _check_tail_eps(tail_eps: float) -> None:
    if not (0.0 < tail_eps <= 1e-6):
        raise ValueError("tail_eps must lie in (0, 1e-6]")


class MeanScheme:
    """Base class: a row generator with kind/name metadata."""

    kind = "abstract"
    name = "abstract"
    min_n = 0
    finite_rows = True

    def row(self, n: int, tail_eps: float = DEFAULT_TAIL_EPS) -> MeanRow:
        _check_tail_eps(tail_eps)
        if n < self.min_n:
            raise RowOutOfRange(f"{self.name}: row {n} < min_n {self.min_n}")
        return self._row(int(n), float(tail_eps))

    def _row(self, n: int, tail_eps: float) -> MeanRow:
        raise NotImplementedError

    def __repr__(self):
        return f"<MeanScheme {self.name}>"


class _Cesaro(MeanScheme):
    def __init__(self, p: int):
        if p < 1:
            raise ValueError("cesaro order p must be >= 1")
        self.p = int(p)
        self.kind = "cesaro"
        self.name = f"cesaro(p={p})"
        self.min_n = 0
        self.finite_rows = True

    def _row(self, n, tail_eps):
        j = np.arange(n + 1, dtype=float)
        w = np.full(n + 1, self.p / (n + self.p))
        for k in range(1, self.p):
            w *= 1.0 - j / (n + k)
        return MeanRow(n, np.arange(n + 1), w)


class _Abel(MeanScheme):
    def __init__(self, min_n: int = 1):
        self.kind = "abel"
        self.name = "abel"
        self.min_n = min_n
        self.finite_rows = False

    def _row(self, n, tail_eps):
        if n == 1:
            return MeanRow(1, np.arange(1), np.array([1.0]))
        q = 1.0 - 1.0 / n
        # smallest J with q^{J+1} < tail_eps
        j_max = int(math.ceil(math.log(tail_eps) / math.log(q))) - 1
        j_max = max(j_max, 0)
        j = np.arange(j_max + 1)
        w = (1.0 / n) * q ** j.astype(float)
        return MeanRow(n, j, w, tail_mass_bound=q ** (j_max + 1))


class _Zweier(MeanScheme):
    def __init__(self):
        self.kind = "zweier"
        self.name = "zweier"
        self.min_n = 1
        self.finite_rows = True

    def _row(self, n, tail_eps):
        if n == 1:
            return MeanRow(1, np.arange(2), np.array([0.5, 0.5]))
        return MeanRow(n, np.array([n - 1, n]), np.array([0.5, 0.5]))


class _Binomial(MeanScheme):
    def __init__(self):
        self.kind = "binomial"
        self.name = "binomial"
        self.min_n = 0
        self.finite_rows = True

    def _row(self, n, tail_eps):
        j = np.arange(n + 1, dtype=float)
        logw = gammaln(n + 1) - gammaln(j + 1) - gammaln(n - j + 1) - n * math.log(2.0)
        return MeanRow(n, np.arange(n + 1), np.exp(logw))


class _PowerSeries(MeanScheme):
    """F(r_n T)/F(r_n) for F with nonnegative Taylor coefficients.

    ``coeffs`` is either a finite sequence (F a polynomial; rows exact) or a
    callable j -> f_j (rows truncated by an observed-ratio geometric bound).
    ``radii`` is a callable n -> r_n, defaulting to 1 - 1/n.
    """

    _MAX_TERMS = 2_000_000

    def __init__(self, coeffs, radii=None):
        self.kind = "power_series"
        self.name = "power_series"
        if callable(coeffs):
            self._coeff_fn = coeffs
            self._coeff_vec = None
            f0 = float(coeffs(0))
        else:
            vec = np.asarray(coeffs, dtype=float)
            if vec.ndim != 1 or vec.size == 0:
                raise ValueError("power_series coeffs must be a nonempty 1-D sequence")
            if np.any(vec < 0) or not np.any(vec > 0):
                raise ValueError("power_series coeffs must be >= 0 and not all zero")
            self._coeff_vec = vec
            self._coeff_fn = None
            f0 = float(vec[0])
        if radii is None:
            self._radius = lambda n: 1.0 - 1.0 / n
            # row 1 has radius 0: only defined when f_0 > 0
            self.min_n = 1 if f0 > 0 else 2
        else:
            if callable(radii):
                self._radius = radii
                self.min_n = 1
            else:
                rs = np.asarray(radii, dtype=float)
                if np.any(rs <= 0) or np.any(rs >= 1) or np.any(np.diff(rs) <= 0):
                    raise ValueError("radii must be strictly increasing in (0, 1)")
                self._radius = lambda n, rs=rs: float(rs[n - 1])
                self.min_n = 1
        self.finite_rows = self._coeff_vec is not None

    def _row(self, n, tail_eps):
        r = float(self._radius(n))
        if not (0.0 <= r < 1.0):
            raise ValueError(f"radius r_{n} = {r} outside [0, 1)")
        if self._coeff_vec is not None:
            u = self._coeff_vec * r ** np.arange(self._coeff_vec.size, dtype=float)
            total = float(np.sum(u))
            if total <= 0:
                raise RowOutOfRange(f"power_series row {n}: F(r_n) = 0")
            keep = u > 0
            return MeanRow(n, np.nonzero(keep)[0], u[keep] / total)
        if r == 0.0:
            # F(0*T)/F(0) = I; only defined when f_0 > 0 (guarded by min_n)
            return MeanRow(n, np.arange(1), np.array([1.0]))
        # infinite series: accumulate until the geometric majorant of the tail
        # (ratio test on the observed terms) is below tail_eps
        terms = []
        j = 0
        accum = 0.0
        window = []
        while True:
            u = float(self._coeff_fn(j)) * r ** j
            if u < 0:
                raise ValueError("power_series coefficients must be >= 0")
            terms.append(u)
            accum += u
            if terms[-1] > 0 and len(terms) >= 2 and terms[-2] > 0:
                window.append(terms[-1] / terms[-2])
                window = window[-8:]
            if j >= 8 and window:
                ratio = max(window)
                if ratio < 1.0 and accum > 0:
                    tail = terms[-1] * ratio / (1.0 - ratio)
                    if tail < tail_eps * accum:
                        total = accum + tail
                        u_arr = np.asarray(terms)
                        keep = u_arr > 0
                        return MeanRow(n, np.nonzero(keep)[0], u_arr[keep] / total,
                                       tail_mass_bound=tail / total)
            j += 1
            if j > self._MAX_TERMS:
                raise RuntimeError("power_series row truncation did not converge")


class _IdentityPowers(MeanScheme):
    def __init__(self):
        self.kind = "identity_powers"
        self.name = "powers"
        self.min_n = 0
        self.finite_rows = True

    def _row(self, n, tail_eps):
        return MeanRow(n, np.array([n]), np.array([1.0]))


class _CesaroBackward(MeanScheme):
    """Backward iterate of cesaro(p): row n equals row n-1 of cesaro(p+1)."""

    def __init__(self, p: int):
        self.kind = "cesaro"
        self.name = f"cesaro(p={p + 1})<<1"
        self.p = p
        self._inner = _Cesaro(p + 1)
        self.min_n = 1
        self.finite_rows = True

    def _row(self, n, tail_eps):
        inner = self._inner._row(n - 1, tail_eps)
        return MeanRow(n, inner.indices, inner.weights)


class _ZweierBackward(MeanScheme):
    """Closed form (2/(2n-1)) * (sum_{k<=n-2} T^k + T^{n-1}/2)."""

    def __init__(self):
        self.kind = "zweier_backward"
        self.name = "zweier^(-1)"
        self.min_n = 1
        self.finite_rows = True

    def _row(self, n, tail_eps):
        w = np.full(n, 2.0 / (2 * n - 1))
        w[-1] *= 0.5
        return MeanRow(n, np.arange(n), w)


class _PowerSeriesBackward(MeanScheme):
    """Backward iterate of a power-series scheme:
    s_nk = (sum_{j>=k+1} f_j r^j) / (sum_j j f_j r^j)."""

    def __init__(self, base: _PowerSeries):
        self.kind = "power_series"
        self.name = base.name + "^(-1)"
        self._base = base
        self.min_n = max(base.min_n, 2 if base._radius(1) == 0.0 else base.min_n)
        self.finite_rows = base.finite_rows

    def _row(self, n, tail_eps):
        base_row = self._base.row(n, _inner_eps(tail_eps))
        return _backward_row(base_row, tail_eps)


class _FormulaBackward(MeanScheme):
    """Backward iterate computed from the defining formula on the base row."""

    def __init__(self, base: MeanScheme, min_n: int):
        self.kind = base.kind + "_backward"
        self.name = base.name + "^(-1)"
        self._base = base
        self.min_n = min_n
        self.finite_rows = base.finite_rows

    def _row(self, n, tail_eps):
        return _backward_row(self._base.row(n, _inner_eps(tail_eps)), tail_eps)


def _inner_eps(tail_eps: float) -> float:
    # truncating the source row at tail mass delta perturbs the backward
    # coefficients by ~ delta * (J + n); a 1e-6 cushion keeps the result
    # accurate to tail_eps itself
    return max(tail_eps * 1e-6, 5e-324)


def _backward_row(row: MeanRow, tail_mass: float | None = None) -> MeanRow:
    t = row.dense()
    if t[0] >= 1.0 - 1e-15:
        raise DegenerateRow(f"row {row.n}: t_n0 = 1, backward iterate undefined")
    denom = float(np.sum(np.arange(t.size) * t))
    if denom <= 0.0:
        raise DegenerateRow(f"row {row.n}: sum_j j t_nj = 0")
    # s_k = sum_{j >= k+1} t_j / denom for k = 0..J-1
    tails = np.cumsum(t[::-1])[::-1]
    s = tails[1:] / denom
    keep = s > 0
    if row.tail_mass_bound == 0.0:
        bound = 0.0  # finite source row: the backward row is exact
    else:
        bound = row.tail_mass_bound if tail_mass is None else tail_mass
    return MeanRow(row.n, np.nonzero(keep)[0], s[keep], tail_mass_bound=bound)


def cesaro(p: int = 1) -> MeanScheme:
    return _Cesaro(p)


def abel() -> MeanScheme:
    return _Abel()


def zweier() -> MeanScheme:
    return _Zweier()


def binomial() -> MeanScheme:
    return _Binomial()


def power_series(coeffs, radii=None) -> MeanScheme:
    return _PowerSeries(coeffs, radii)


def identity_powers() -> MeanScheme:
    return _IdentityPowers()


def scheme_row(s: MeanScheme, n: int, tail_eps: float = DEFAULT_TAIL_EPS) -> MeanRow:
    """Row n of the scheme; finite-support kinds are exact, infinite kinds are
    truncated at geometric tail mass < tail_eps (recorded, never renormalized)."""
    return s.row(n, tail_eps)


def backward_row_from_definition(s: MeanScheme, n: int,
                                 tail_eps: float = DEFAULT_TAIL_EPS) -> MeanRow:
    """The defining formula s_nk = (sum_{j>=k+1} t_nj)/(sum_{j>=1} j t_nj),
    evaluated on the row of ``s`` (truncated well below tail_eps so the
    result itself is tail_eps-accurate).  Used to validate the closed-form
    backward schemes."""
    return _backward_row(s.row(n, _inner_eps(tail_eps)), tail_eps)


def backward_iterate(s: MeanScheme) -> MeanScheme:
    """Scheme of the backward-iterate coefficients of ``s``.

    Closed forms: cesaro(p) -> cesaro(p+1) shifted one row; abel -> abel
    (first valid row 2); zweier -> the two-level uniform rows; power series ->
    the difference-quotient generating function.  Other kinds fall back to the
    defining formula row by row.
    """
    if isinstance(s, _Cesaro):
        return _CesaroBackward(s.p)
    if isinstance(s, _Abel):
        return _Abel(min_n=2)
    if isinstance(s, _Zweier):
        return _ZweierBackward()
    if isinstance(s, _PowerSeries):
        return _PowerSeriesBackward(s)
    return _FormulaBackward(s, min_n=max(s.min_n, 1))


def _check_unimodular(lam: complex) -> complex:
    lam = complex(lam)
    if abs(abs(lam) - 1.0) > 1e-12:
        raise ValueError("rotation parameter must have modulus 1")
    return lam


def _check_radius_for(s: MeanScheme, t) -> None:
    if s.finite_rows:
        return
    if isinstance(t, OperatorModel):
        rho = t.spectral_radius()
    else:
        rho = float(np.max(np.abs(np.linalg.eigvals(mat(t)))))
    if rho > 1.0 + 1e-9:
        raise SpectralRadiusTooLarge(
            f"{s.name} needs spectral radius <= 1, got {rho:.6g}")


def _advance(p: np.ndarray, b: np.ndarray, gap: int) -> np.ndarray:
    if gap == 1:
        return p @ b
    return p @ power(b, gap)


def apply_mean(s: MeanScheme, t, n: int, lam: complex = 1.0,
               tail_eps: float = DEFAULT_TAIL_EPS) -> np.ndarray:
    """The mean ``sum_j t_nj (lam*T)^j`` over the row's support.

    Powers are accumulated incrementally along the support; ``lam = 1`` gives
    the plain mean.  Infinite-row kinds require spectral radius <= 1.
    """
    lam = _check_unimodular(lam)
    _check_radius_for(s, t)
    a = mat(t)
    row = s.row(n, tail_eps)
    b = lam * a
    acc = np.zeros_like(a)
    p = power(b, int(row.indices[0]))
    acc += row.weights[0] * p
    prev = int(row.indices[0])
    for idx, w in zip(row.indices[1:], row.weights[1:]):
        p = _advance(p, b, int(idx) - prev)
        prev = int(idx)
        acc += w * p
    return acc


class VectorPowerCache:
    """Incrementally extended list of B^j x for a fixed matrix and vector."""

    def __init__(self, b: np.ndarray, x: np.ndarray):
        self.b = b
        self.values = [np.asarray(x, dtype=complex)]

    def get(self, j: int) -> np.ndarray:
        while len(self.values) <= j:
            self.values.append(self.b @ self.values[-1])
        return self.values[j]


def apply_mean_vector(s: MeanScheme, t, n: int, x, lam: complex = 1.0,
                      tail_eps: float = DEFAULT_TAIL_EPS,
                      cache: VectorPowerCache | None = None) -> np.ndarray:
    """T_n x without forming the mean matrix (power-vector accumulation)."""
    lam = _check_unimodular(lam)
    _check_radius_for(s, t)
    a = mat(t)
    if cache is None:
        cache = VectorPowerCache(lam * a, x)
    row = s.row(n, tail_eps)
    acc = np.zeros(a.shape[0], dtype=complex)
    for idx, w in zip(row.indices, row.weights):
        acc += w * cache.get(int(idx))
    return acc


def scalar_mean(s: MeanScheme, n: int, mu: complex,
                tail_eps: float = DEFAULT_TAIL_EPS) -> complex:
    """The row's generating value sum_j t_nj mu^j (the mean of the 1x1
    operator [mu]); equals 1 at mu = 1 up to the truncated tail."""
    mu = _check_unimodular(mu)
    row = s.row(n, tail_eps)
    return complex(np.sum(row.weights * mu ** row.indices.astype(float)))


def backit_identity_residual(s: MeanScheme, t, n: int,
                             tail_eps: float = DEFAULT_TAIL_EPS) -> float:
    """Norm of  T_n^{(-1)}(T - I) - (sum_j j t_nj)^{-1} (T_n - I).

    An algebraic identity, so the residual is rounding-level for finite rows
    and tail_eps-level for truncated ones.
    """
    a = mat(t)
    g = geom(t)
    eye = np.eye(a.shape[0], dtype=complex)
    back = backward_iterate(s)
    lhs = apply_mean(back, t, n, 1.0, tail_eps) @ (a - eye)
    row = s.row(n, tail_eps)
    denom = float(np.sum(row.indices * row.weights))
    rhs = (apply_mean(s, t, n, 1.0, tail_eps) - eye) / denom
    return op_norm(lhs - rhs, g, g)


def block_mean_residual(a, b_col, mu: complex, s: MeanScheme, n: int,
                        tail_eps: float = DEFAULT_TAIL_EPS) -> float:
    """Two-route check of the triangular-block structure of a mean.

    Route 1 applies the mean to the assembled operator [[A, b], [0, mu]];
    route 2 assembles the block prediction from the mean of A, the row's
    generating value at mu, and the off-diagonal column computed by direct
    power sums.  Returns the operator norm of the difference.
    """
    mu = _check_unimodular(mu)
    a = mat(a)
    b_col = np.asarray(b_col, dtype=complex).reshape(-1)
    d = a.shape[0]
    if b_col.shape[0] != d:
        raise ValueError("column length must match A")
    big = np.zeros((d + 1, d + 1), dtype=complex)
    big[:d, :d] = a
    big[:d, d] = b_col
    big[d, d] = mu
    full = apply_mean(s, big, n, 1.0, tail_eps)

    row = s.row(n, tail_eps)
    # off-diagonal column of M^j: c_{j+1} = A c_j + mu^j b
    blockwise = np.zeros_like(big)
    blockwise[:d, :d] = apply_mean(s, a, n, 1.0, tail_eps)
    blockwise[d, d] = scalar_mean(s, n, mu, tail_eps)
    c = np.zeros(d, dtype=complex)
    col = np.zeros(d, dtype=complex)
    pos = 0
    mu_pow = 1.0 + 0.0j
    for idx, w in zip(row.indices, row.weights):
        while pos < int(idx):
            c = a @ c + mu_pow * b_col
            mu_pow *= mu
            pos += 1
        col += w * c
    blockwise[:d, d] = col
    return op_norm(full - blockwise)


def regularity_defect(s: MeanScheme, t, n0: int, x, n: int,
                      tail_eps: float = DEFAULT_TAIL_EPS) -> float:
    """|| T (T_n x) - T_{n+n0} x || in the operator's geometry.

    The probe x is expected to lie in the relevant range space already;
    callers apply (T - I)^m themselves.
    """
    a = mat(t)
    cache = VectorPowerCache(a, x)
    lhs = a @ apply_mean_vector(s, t, n, x, 1.0, tail_eps, cache)
    rhs = apply_mean_vector(s, t, n + n0, x, 1.0, tail_eps, cache)
    if isinstance(t, OperatorModel):
        return t.vector_norm(lhs - rhs)
    return float(np.linalg.norm(lhs - rhs))


def parse_scheme(spec: str) -> MeanScheme:
    """Parse a scheme spec string: "cesaro:p=2", "abel", "zweier",
    "binomial", "powers", "powseries:coeffs=1,0.5,0.25"."""
    parts = spec.strip().split(":")
    head = parts[0].lower()
    params = {}
    for piece in parts[1:]:
        if "=" in piece:
            key, val = piece.split("=", 1)
            params[key.strip()] = val.strip()
        else:
            params.setdefault("p", piece.strip())
    if head == "cesaro":
        return cesaro(int(params.get("p", 1)))
    if head == "abel":
        return abel()
    if head == "zweier":
        return zweier()
    if head == "binomial":
        return binomial()
    if head == "powers":
        return identity_powers()
    if head == "powseries":
        if "coeffs" not in params:
            raise ValueError("powseries spec needs coeffs=c0,c1,...")
        coeffs = [float(c) for c in params["coeffs"].split(",")]
        return power_series(coeffs)
    raise ValueError(f"unknown scheme spec {spec!r}")


def rows_to_csv(s: MeanScheme, ns, path, tail_eps: float = DEFAULT_TAIL_EPS) -> None:
    """Dump rows as CSV with columns n, j, t."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "j", "t"])
        for n in ns:
            row = s.row(int(n), tail_eps)
            for j, t in zip(row.indices, row.weights):
                writer.writerow([int(n), int(j), repr(float(t))])
