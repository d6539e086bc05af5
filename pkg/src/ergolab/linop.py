"""Dense complex operators with optional Gram-weighted geometry.

Everything downstream (summability means, resolvent functionals, growth
reports) works on plain numpy matrices; this module supplies the norm
engine, the JSON wire formats, and constructors for the standard test
operators: Jordan blocks, weighted Dirichlet shifts, and the discretized
Volterra operator.

With a Gram geometry ``G`` on the domain and ``H`` on the codomain, the
operator norm of ``A`` is the largest singular value of ``L_H A L_G^{-1}``,
where ``L`` is any factor with ``L* L = Gram`` (Cholesky for dense Grams,
elementwise square root for diagonal ones).  ``mode="colsum"`` and
``mode="rowsum"`` select the max-column-sum / max-row-sum norms instead,
i.e. the l1- and linf-induced operator norms.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg


class DimensionMismatch(ValueError):
    """Shapes of an operator and its geometry (or operand) do not agree."""


class NonPositiveDefiniteGram(ValueError):
    """A Gram matrix failed the Hermitian positive-definite check."""


class BadDimension(ValueError):
    """Requested operator size below the constructor's minimum."""


_HERMITIAN_TOL = 1e-12


def as_matrix(a) -> np.ndarray:
    """Validate and return ``a`` as a 2-D complex matrix with finite entries."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
        raise DimensionMismatch(f"expected a 2-D matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix entries must be finite")
    return m


class GramGeometry:
    """Positive-definite weighting under which vector/operator norms are taken.

    Holds either a diagonal weight vector (``diag``) or a dense Hermitian
    positive-definite matrix.  Vector norms are ``||L x||_2`` with
    ``L* L = gram``.
    """

    def __init__(self, dim, diag=None, dense=None):
        self.dim = int(dim)
        if self.dim < 1:
            raise BadDimension("geometry dimension must be >= 1")
        if (diag is None) == (dense is None):
            raise ValueError("provide exactly one of diag= or dense=")
        if diag is not None:
            w = np.asarray(diag, dtype=float)
            if w.shape != (self.dim,):
                raise DimensionMismatch("diagonal weight length != dim")
            if not np.all(w > 0.0):
                raise NonPositiveDefiniteGram("diagonal weights must be positive")
            self.diag = w
            self.dense = None
            self._factor = np.sqrt(w)
        else:
            g = as_matrix(dense)
            if g.shape != (self.dim, self.dim):
                raise DimensionMismatch("dense Gram shape != (dim, dim)")
            if np.max(np.abs(g - g.conj().T)) > _HERMITIAN_TOL * max(1.0, np.max(np.abs(g))):
                raise NonPositiveDefiniteGram("Gram matrix is not Hermitian")
            g = 0.5 * (g + g.conj().T)
            try:
                chol_lower = np.linalg.cholesky(g)
            except np.linalg.LinAlgError as exc:
                raise NonPositiveDefiniteGram("Gram matrix is not positive definite") from exc
            self.diag = None
            self.dense = g
            # upper-triangular L with L*L = G
            self._factor = chol_lower.conj().T

    @classmethod
    def diagonal(cls, weights) -> "GramGeometry":
        w = np.asarray(weights, dtype=float)
        return cls(w.shape[0], diag=w)

    @classmethod
    def hermitian(cls, gram) -> "GramGeometry":
        g = as_matrix(gram)
        return cls(g.shape[0], dense=g)

    @property
    def is_diagonal(self) -> bool:
        return self.diag is not None

    def matrix(self) -> np.ndarray:
        """The Gram matrix as a dense array."""
        if self.is_diagonal:
            return np.diag(self.diag).astype(complex)
        return self.dense

    def factor(self) -> np.ndarray:
        """A factor L with L* L = Gram (1-D array of square roots if diagonal)."""
        return self._factor

    def apply_factor(self, a: np.ndarray) -> np.ndarray:
        """Left-multiply by the factor: L @ a (columns of a are vectors)."""
        if self.is_diagonal:
            return self._factor[:, None] * a if a.ndim == 2 else self._factor * a
        return self._factor @ a

    def apply_factor_inverse_right(self, a: np.ndarray) -> np.ndarray:
        """Right-multiply a matrix by L^{-1}: a @ L^{-1}."""
        if self.is_diagonal:
            return a / self._factor[None, :]
        # solve X L = a  <=>  L^T X^T = a^T  (plain transpose; L upper triangular)
        return scipy.linalg.solve_triangular(self._factor.T, a.T, lower=True).T

    def vector_norm(self, x) -> float:
        x = np.asarray(x, dtype=complex)
        if x.shape[0] != self.dim:
            raise DimensionMismatch("vector length != geometry dim")
        return float(np.linalg.norm(self.apply_factor(x)))


@dataclass
class OperatorModel:
    """A square matrix together with the geometry its norms are measured in."""

    matrix: np.ndarray
    geometry: GramGeometry | None = None
    label: str = ""
    _eigvals: np.ndarray | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        self.matrix = as_matrix(self.matrix)
        if self.matrix.shape[0] != self.matrix.shape[1]:
            raise DimensionMismatch("OperatorModel matrix must be square")
        if self.geometry is not None and self.geometry.dim != self.matrix.shape[0]:
            raise DimensionMismatch("geometry dim != matrix size")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        if self._eigvals is None:
            self._eigvals = np.linalg.eigvals(self.matrix)
        return self._eigvals

    def spectral_radius(self) -> float:
        return float(np.max(np.abs(self.eigenvalues()))) if self.dim else 0.0

    def norm(self, a=None, mode="spectral") -> float:
        """Norm of ``a`` (default: the operator itself) in this geometry."""
        target = self.matrix if a is None else a
        return op_norm(target, self.geometry, self.geometry, mode=mode)

    def vector_norm(self, x) -> float:
        if self.geometry is None:
            return float(np.linalg.norm(np.asarray(x, dtype=complex)))
        return self.geometry.vector_norm(x)


def mat(t) -> np.ndarray:
    """Matrix of an OperatorModel, or ``t`` itself validated as a matrix."""
    if isinstance(t, OperatorModel):
        return t.matrix
    return as_matrix(t)


def geom(t) -> GramGeometry | None:
    return t.geometry if isinstance(t, OperatorModel) else None


def op_norm(a, dom: GramGeometry | None = None, cod: GramGeometry | None = None,
            mode: str = "spectral") -> float:
    """Gram-weighted operator norm of a dense matrix.

    Parameters
    ----------
    a : array_like
        Matrix, possibly rectangular.
    dom, cod : GramGeometry, optional
        Geometries on the domain (columns) and codomain (rows).  When absent
        the Euclidean geometry is used on that side.
    mode : str
        "spectral" (largest singular value, the default), "colsum"
        (max-column-sum, l1-induced) or "rowsum" (max-row-sum, linf-induced).
    """
    b = as_matrix(a)
    if dom is not None and dom.dim != b.shape[1]:
        raise DimensionMismatch("domain geometry dim != number of columns")
    if cod is not None and cod.dim != b.shape[0]:
        raise DimensionMismatch("codomain geometry dim != number of rows")
    if cod is not None:
        b = cod.apply_factor(b)
    if dom is not None:
        b = dom.apply_factor_inverse_right(b)
    if mode == "spectral":
        return float(np.linalg.svd(b, compute_uv=False)[0])
    if mode == "colsum":
        return float(np.max(np.sum(np.abs(b), axis=0)))
    if mode == "rowsum":
        return float(np.max(np.sum(np.abs(b), axis=1)))
    raise ValueError(f"unknown norm mode {mode!r}")


def identity_operator(d: int, label: str = "identity") -> OperatorModel:
    return OperatorModel(np.eye(d, dtype=complex), label=label)


def diag_operator(values, geometry=None, label: str = "diag") -> OperatorModel:
    v = np.asarray(values, dtype=complex)
    return OperatorModel(np.diag(v), geometry=geometry, label=label)


def jordan_block(d: int, eig: complex) -> OperatorModel:
    """d x d upper bidiagonal block: ``eig`` on the diagonal, ones above."""
    if d < 1:
        raise BadDimension("Jordan block needs d >= 1")
    m = np.eye(d, dtype=complex) * complex(eig)
    if d > 1:
        m += np.diag(np.ones(d - 1, dtype=complex), 1)
    return OperatorModel(m, label=f"jordan({d},{eig})")


def dirichlet_shift(alpha: float, n: int, direction: str = "forward") -> OperatorModel:
    """Truncated weighted shift in the orthonormal coordinates of the
    weighted Dirichlet space with coefficient weights ``(k+1)^(1-alpha)``.

    Forward: entry (k+1, k) = ((k+2)/(k+1))^((1-alpha)/2).  Backward is the
    transpose (the adjoint shift).  Expressed in orthonormal coordinates the
    geometry is Euclidean, so no Gram is attached.
    """
    if alpha <= -1:
        raise ValueError("alpha must exceed -1")
    if n < 2:
        raise BadDimension("dirichlet shift needs N >= 2")
    if direction not in ("forward", "backward"):
        raise ValueError("direction must be 'forward' or 'backward'")
    k = np.arange(n - 1, dtype=float)
    w = ((k + 2.0) / (k + 1.0)) ** ((1.0 - alpha) / 2.0)
    m = np.diag(w.astype(complex), -1)
    if direction == "backward":
        m = m.T.copy()
    return OperatorModel(m, label=f"dirichlet({alpha},{n},{direction})")


def volterra_operator(n: int) -> OperatorModel:
    """Composite-trapezoid discretization of cumulative integration on [0, 1].

    Nodes t_i = i/n for i = 0..n; row i carries weights h*(1/2, 1, ..., 1, 1/2)
    over columns 0..i with h = 1/n, so the result is the (n+1) x (n+1)
    lower-triangular matrix that is exact on linear integrands.
    """
    if n < 2:
        raise BadDimension("volterra discretization needs N >= 2")
    h = 1.0 / n
    m = np.zeros((n + 1, n + 1), dtype=complex)
    for i in range(1, n + 1):
        m[i, : i + 1] = h
        m[i, 0] = 0.5 * h
        m[i, i] = 0.5 * h
    return OperatorModel(m, label=f"volterra({n})")


def power(t, n: int) -> np.ndarray:
    """n-th power by repeated squaring; ``power(t, 0)`` is the identity."""
    if n < 0:
        raise ValueError("power exponent must be >= 0")
    a = mat(t)
    if a.shape[0] != a.shape[1]:
        raise DimensionMismatch("power needs a square matrix")
    result = np.eye(a.shape[0], dtype=complex)
    base = a
    k = n
    while k:
        if k & 1:
            result = result @ base
        k >>= 1
        if k:
            base = base @ base
    return result


def random_operator(dim: int, spectral_radius: float = 0.9,
                    seed: int = 0x5EED) -> OperatorModel:
    """Entrywise uniform-on-the-unit-disk matrix rescaled to a target
    spectral radius.  Deterministic for a given seed."""
    rng = np.random.default_rng(seed)
    r = np.sqrt(rng.uniform(0.0, 1.0, (dim, dim)))
    theta = rng.uniform(0.0, 2.0 * np.pi, (dim, dim))
    m = r * np.exp(1j * theta)
    rho = np.max(np.abs(np.linalg.eigvals(m)))
    if rho > 0:
        m *= spectral_radius / rho
    return OperatorModel(m, label=f"random({dim},{spectral_radius},{seed})")


# ---------------------------------------------------------------------------
# JSON wire formats.
# Matrix: {"rows": R, "cols": C, "re": [...], "im": [...]} row-major.
# Gram:   {"dim": D, "diag": [...]} or {"dim": D, "gram_re": [...], "gram_im": [...]}.
# ---------------------------------------------------------------------------

def matrix_to_obj(a) -> dict:
    m = as_matrix(a)
    return {
        "rows": m.shape[0],
        "cols": m.shape[1],
        "re": m.real.ravel().tolist(),
        "im": m.imag.ravel().tolist(),
    }


def matrix_from_obj(obj: dict) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    re = np.asarray(obj["re"], dtype=float)
    im = np.asarray(obj["im"], dtype=float)
    if re.size != rows * cols or im.size != rows * cols:
        raise DimensionMismatch("re/im length != rows*cols")
    return as_matrix((re + 1j * im).reshape(rows, cols))


def gram_to_obj(g: GramGeometry) -> dict:
    if g.is_diagonal:
        return {"dim": g.dim, "diag": g.diag.tolist()}
    return {
        "dim": g.dim,
        "gram_re": g.dense.real.ravel().tolist(),
        "gram_im": g.dense.imag.ravel().tolist(),
    }


def gram_from_obj(obj: dict) -> GramGeometry:
    dim = int(obj["dim"])
    if "diag" in obj:
        return GramGeometry(dim, diag=np.asarray(obj["diag"], dtype=float))
    re = np.asarray(obj["gram_re"], dtype=float).reshape(dim, dim)
    im = np.asarray(obj["gram_im"], dtype=float).reshape(dim, dim)
    return GramGeometry(dim, dense=re + 1j * im)


def save_matrix(a, path) -> None:
    with open(path, "w") as fh:
        json.dump(matrix_to_obj(a), fh)


def load_matrix(path) -> np.ndarray:
    with open(path) as fh:
        return matrix_from_obj(json.load(fh))


def save_gram(g: GramGeometry, path) -> None:
    with open(path, "w") as fh:
        json.dump(gram_to_obj(g), fh)


def load_gram(path) -> GramGeometry:
    with open(path) as fh:
        return gram_from_obj(json.load(fh))


def save_operator(t: OperatorModel, path) -> None:
    obj = {"matrix": matrix_to_obj(t.matrix), "label": t.label}
    if t.geometry is not None:
        obj["gram"] = gram_to_obj(t.geometry)
    with open(path, "w") as fh:
        json.dump(obj, fh)


def load_operator(path) -> OperatorModel:
    """Load an operator file: either a bare matrix object or
    {"matrix": ..., "gram": ...?, "label": ...?}."""
    with open(path) as fh:
        obj = json.load(fh)
    if "matrix" in obj:
        g = gram_from_obj(obj["gram"]) if "gram" in obj else None
        return OperatorModel(matrix_from_obj(obj["matrix"]), geometry=g,
                             label=obj.get("label", ""))
    return OperatorModel(matrix_from_obj(obj))
