"""Contact forms on a chart with the line bundle trivialised.

All vector-field constructions reduce to the pointwise linear system

    theta(V) = a,    i_V dtheta = w           (w(R) = 0 required)

which has ``dim + 1`` equations in ``dim`` unknowns and full column rank
exactly where ``theta ^ dtheta^n`` is nonzero.  It is solved over the field
of rational functions by picking ``dim`` independent rows and inverting
that block once per contact form; the left-over row is checked on every
solve.

Sign of ``b``: ``b(w)`` is the vector in ``H = ker theta`` with
``dtheta(W, b(w)) = w(W)`` for ``W`` in ``H``.  This is the orientation for
which ``R_f = f R + b(df)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache

from .extcalc import (
    DiffForm,
    MultiVector,
    apply_vf,
    d,
    form_on_vf,
    interior,
    vf_bracket,
    wedge,
)
from .jacobi import JacobiPair
from .symcore import Chart, Expr

__all__ = [
    "ContactForm",
    "ContactCheck",
    "VFDecomposition",
    "NotContactError",
    "SingularSystemError",
    "is_contact",
    "reeb_field",
    "reeb_field_of",
    "b_map",
    "reeb_bracket",
    "induced_jacobi_pair",
    "decompose_vf",
    "reconstruct_vf",
    "h_frame",
]


class NotContactError(ValueError):
    pass


class SingularSystemError(NotContactError):
    """The Reeb linear system is rank deficient (theta is not contact)."""


@dataclass(frozen=True)
class ContactForm:
    theta: DiffForm

    def __post_init__(self):
        if not isinstance(self.theta, DiffForm) or self.theta.grade != 1:
            raise TypeError("theta must be a 1-form")
        if self.theta.chart.dim % 2 == 0:
            raise NotContactError(f"contact forms need an odd-dimensional chart, got {self.theta.chart.dim}")

    @property
    def chart(self) -> Chart:
        return self.theta.chart

    @property
    def n(self) -> int:
        return (self.chart.dim - 1) // 2

    @cached_property
    def dtheta(self) -> DiffForm:
        return d(self.theta)


@dataclass(frozen=True)
class ContactCheck:
    is_contact: bool
    witness: Expr

    def __bool__(self):
        return self.is_contact


@dataclass(frozen=True)
class VFDecomposition:
    """``(theta(X), theta([., X]))``; only ``phi`` restricted to H is meaningful."""

    u: Expr
    phi: DiffForm

    def equals_on_h(self, other: "VFDecomposition", c: ContactForm) -> bool:
        if self.u != other.u:
            return False
        diff = self.phi - other.phi
        return all(form_on_vf(diff, w).is_zero for w in h_frame(c))


def is_contact(c: ContactForm) -> ContactCheck:
    """``theta ^ dtheta^n`` and whether its single component is nonzero."""
    if c.chart.dim % 2 == 0:
        raise NotContactError("even-dimensional chart")
    top = c.theta
    for _ in range(c.n):
        top = wedge(top, c.dtheta)
    w = top[tuple(range(c.chart.dim))]
    return ContactCheck(not w.is_zero, w)


def _require_contact(c: ContactForm):
    chk = is_contact(c)
    if not chk:
        raise NotContactError(f"theta = {c.theta} is not a contact form (theta^dtheta^n = 0)")


class _ReebSystem:
    """Cached exact solver for ``theta(V) = a, i_V dtheta = w``."""

    def __init__(self, c: ContactForm):
        chart = c.chart
        m = chart.dim
        zero = chart.zero()
        # row 0: theta_j ; row 1 + k: (i_V dtheta)_k = sum_j dtheta(d_j, d_k) V^j
        rows = [[c.theta[j] for j in range(m)]]
        for k in range(m):
            rows.append([c.dtheta[(j, k)] if j != k else zero for j in range(m)])
        self.chart = chart
        self.rows = rows
        sel = _independent_rows(rows, m)
        if sel is None:
            raise SingularSystemError(
                f"Reeb system for theta = {c.theta} is singular (not contact on this chart)"
            )
        self.sel = sel
        self.rest = [i for i in range(m + 1) if i not in sel][0]
        self.inv = _invert([rows[i] for i in sel])

    def solve(self, a: Expr, w: DiffForm) -> MultiVector:
        m = self.chart.dim
        rhs = [a] + [w[k] for k in range(m)]
        sub = [rhs[i] for i in self.sel]
        v = []
        for r in self.inv:
            acc = self.chart.zero()
            for coef, b in zip(r, sub):
                if not coef.is_zero and not b.is_zero:
                    acc = acc + coef * b
            v.append(acc)
        check = self.chart.zero()
        for coef, vj in zip(self.rows[self.rest], v):
            check = check + coef * vj
        if check != rhs[self.rest]:
            raise SingularSystemError("inconsistent Reeb system (right-hand side not admissible)")
        return MultiVector.vector(self.chart, v)


def _independent_rows(rows, m):
    """Indices of ``m`` rows of full rank, by Gaussian elimination."""
    work = [list(r) for r in rows]
    chosen = []
    basis = []  # (pivot col, reduced row)
    for idx, row in enumerate(work):
        r = list(row)
        for col, brow in basis:
            if not r[col].is_zero:
                factor = r[col] / brow[col]
                r = [x - factor * y for x, y in zip(r, brow)]
        piv = next((j for j, x in enumerate(r) if not x.is_zero), None)
        if piv is None:
            continue
        basis.append((piv, r))
        chosen.append(idx)
        if len(chosen) == m:
            return chosen
    return None


def _invert(mat):
    n = len(mat)
    chart = mat[0][0].chart
    aug = [list(r) + [chart.one() if i == j else chart.zero() for j in range(n)] for i, r in enumerate(mat)]
    for col in range(n):
        piv = next(i for i in range(col, n) if not aug[i][col].is_zero)
        aug[col], aug[piv] = aug[piv], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [x * inv for x in aug[col]]
        for i in range(n):
            if i != col and not aug[i][col].is_zero:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
    return [r[n:] for r in aug]


@lru_cache(maxsize=64)
def _system(c: ContactForm) -> _ReebSystem:
    _require_contact(c)
    return _ReebSystem(c)


@lru_cache(maxsize=64)
def reeb_field(c: ContactForm) -> MultiVector:
    """The R with ``theta(R) = 1`` and ``i_R dtheta = 0``."""
    return _system(c).solve(c.chart.one(), DiffForm.zero(c.chart, 1))


def reeb_field_of(c: ContactForm, f: Expr) -> MultiVector:
    """``R_f``: ``theta(R_f) = f`` and ``theta([R_f, W]) = 0`` for W in H.

    Solved as ``theta(R_f) = f, i_{R_f} dtheta = -df + R(f) theta``.
    """
    R = reeb_field(c)
    df = DiffForm.exact(f)
    w = -df + c.theta.scale(apply_vf(R, f))
    return _system(c).solve(f, w)


def b_map(c: ContactForm, omega: DiffForm) -> MultiVector:
    """The V in H with ``dtheta(W, V) = omega(W)`` for all W in H."""
    R = reeb_field(c)
    w = -omega + c.theta.scale(form_on_vf(omega, R))
    return _system(c).solve(c.chart.zero(), w)


def reeb_bracket(c: ContactForm, f: Expr, g: Expr) -> Expr:
    """``theta([R_f, R_g])``."""
    return form_on_vf(c.theta, vf_bracket(reeb_field_of(c, f), reeb_field_of(c, g)))


@lru_cache(maxsize=64)
def induced_jacobi_pair(c: ContactForm) -> JacobiPair:
    """``(L, R)`` with ``L(a, b) = b(b_map(a))`` so the two brackets agree."""
    chart = c.chart
    R = reeb_field(c)
    images = [b_map(c, DiffForm.basis(chart, name)) for name in chart.names]
    comps = {}
    for i in range(chart.dim):
        for j in range(i + 1, chart.dim):
            lij, lji = images[i][j], images[j][i]
            if lij != -lji:
                raise AssertionError(f"b-transport of dtheta not antisymmetric at {(i, j)}")
            comps[(i, j)] = lij
    return JacobiPair(MultiVector(chart, 2, comps), R)


def h_frame(c: ContactForm) -> list[MultiVector]:
    """A frame of ``H = ker theta`` (valid where the pivot component is nonzero)."""
    chart = c.chart
    k = next(i for i in reversed(range(chart.dim)) if not c.theta[i].is_zero)
    tk = c.theta[k]
    frame = []
    for j in range(chart.dim):
        if j == k:
            continue
        comps = {(j,): chart.one(), (k,): -(c.theta[j] / tk)}
        frame.append(MultiVector(chart, 1, comps))
    return frame


def decompose_vf(c: ContactForm, X: MultiVector) -> VFDecomposition:
    """``X -> (theta(X), i_X dtheta + d theta(X))``.

    The 1-form agrees with ``W -> theta([W, X])`` on H.
    """
    _require_contact(c)
    u = form_on_vf(c.theta, X)
    phi = interior(X, c.dtheta) + DiffForm.exact(u)
    return VFDecomposition(u, phi)


def reconstruct_vf(c: ContactForm, dec: VFDecomposition) -> MultiVector:
    """Inverse of :func:`decompose_vf`: ``R_u - b(phi)``."""
    return reeb_field_of(c, dec.u) - b_map(c, dec.phi)
