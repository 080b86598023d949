"""First jets of the trivial line bundle and the Lie algebroid of a Jacobi pair.

A section of ``J^1 L`` is stored in the Spencer decomposition as ``(u, w)``
with ``u`` the value and ``w`` a 1-form, module action

    f . (u, w) = (f u, f w + u df),

``j1(u) = (u, 0)`` and ``i(w) = (0, w)``.  The classical Spencer operator is
``D(u, w) = w`` and ``pr(u, w) = u``.

For a Jacobi pair ``(L, R)`` with ``rho1(u) = L#(du) + u R`` and
``rho2 = -L#``:

    rho(u, w)         = rho1(u) + rho2(w)
    [j1 u, j1 v]      = j1 {u, v}
    [j1 u, i(e)]      = i(Lie_{rho1 u} e - R(u) e)
    [i(w), i(e)]      = j1(-L(w, e)) + i(Lie_{rho2 w} e - Lie_{rho2 e} w + w(R) e - e(R) w)
    nabla_(u, w)(v)   = {u, v} - L(w, dv) + v w(R)

Each of these is also computed by expanding a section over holonomic
generators, ``i(sum v_k dx_k) = sum x_k j1(v_k) - j1(x_k v_k)``, and
applying only ``[j1 a, j1 b] = j1{a, b}`` plus the Leibniz rule; the
``*_expanded`` functions do that and the tests compare both routes.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .extcalc import (
    DiffForm,
    MultiVector,
    apply_vf,
    bivector_eval,
    form_on_vf,
    lie_derivative,
    sharp,
    vf_bracket,
)
from .jacobi import (
    JacobiPair,
    hamiltonian_symbol,
    jacobi_bracket,
    require_jacobi,
)
from .symcore import Chart, Expr, random_poly

__all__ = [
    "JetSection",
    "Residual",
    "SpencerAxiomReport",
    "j1",
    "i_incl",
    "pr",
    "spencer_D",
    "spencer_DX",
    "anchor",
    "rho2",
    "algebroid_bracket",
    "algebroid_bracket_expanded",
    "nabla",
    "nabla_expanded",
    "check_spencer_axioms",
    "bracket_from_algebroid",
    "random_jet_section",
    "random_vector_field",
    "algebroid_jacobiator",
    "nabla_curvature",
    "anchor_expanded",
    "holonomic_bracket",
    "pair_from_bracket",
]


@dataclass(frozen=True)
class JetSection:
    u: Expr
    omega: DiffForm

    def __post_init__(self):
        if self.omega.grade != 1:
            raise ValueError("omega must be a 1-form")
        if self.u.chart != self.omega.chart:
            raise ValueError("u and omega live on different charts")

    @property
    def chart(self) -> Chart:
        return self.u.chart

    @classmethod
    def zero(cls, chart: Chart) -> "JetSection":
        return cls(chart.zero(), DiffForm.zero(chart, 1))

    def __add__(self, other: "JetSection") -> "JetSection":
        return JetSection(self.u + other.u, self.omega + other.omega)

    def __sub__(self, other: "JetSection") -> "JetSection":
        return JetSection(self.u - other.u, self.omega - other.omega)

    def __neg__(self) -> "JetSection":
        return JetSection(-self.u, -self.omega)

    def scale(self, f: Expr) -> "JetSection":
        """Module action ``f . (u, w) = (f u, f w + u df)``."""
        if isinstance(f, int):
            f = self.chart.const(f)
        return JetSection(f * self.u, self.omega.scale(f) + DiffForm.exact(f).scale(self.u))

    def __rmul__(self, f):
        return self.scale(f)

    @property
    def is_zero(self) -> bool:
        return self.u.is_zero and self.omega.is_zero

    def __str__(self):
        return f"({self.u}, {self.omega})"


def j1(u: Expr) -> JetSection:
    return JetSection(u, DiffForm.zero(u.chart, 1))


def i_incl(omega: DiffForm) -> JetSection:
    return JetSection(omega.chart.zero(), omega)


def pr(alpha: JetSection) -> Expr:
    return alpha.u


def spencer_D(alpha: JetSection) -> DiffForm:
    return alpha.omega


def spencer_DX(X: MultiVector, alpha: JetSection) -> Expr:
    """``D_X(alpha) = D(alpha)(X)``."""
    return form_on_vf(alpha.omega, X)


# ----------------------------------------------------------- structure maps

def rho2(p: JacobiPair, omega: DiffForm) -> MultiVector:
    """Minus the symbol of ``rho1``: ``rho1(f u) = f rho1(u) - rho2(u df)``."""
    return -sharp(p.lam, omega)


def _anchor(p, alpha):
    return hamiltonian_symbol(p, alpha.u) + rho2(p, alpha.omega)


def _bracket(p: JacobiPair, a: JetSection, b: JetSection) -> JetSection:
    u, w, v, e = a.u, a.omega, b.u, b.omega
    chart = p.chart
    R = p.r
    out_u = jacobi_bracket(p, u, v)
    out_w = DiffForm.zero(chart, 1)
    if not e.is_zero:
        out_w = out_w + lie_derivative(hamiltonian_symbol(p, u), e) - e.scale(apply_vf(R, u))
    if not w.is_zero:
        out_w = out_w - lie_derivative(hamiltonian_symbol(p, v), w) + w.scale(apply_vf(R, v))
    if not w.is_zero and not e.is_zero:
        out_u = out_u - bivector_eval(p.lam, w, e)
        out_w = (
            out_w
            + lie_derivative(rho2(p, w), e)
            - lie_derivative(rho2(p, e), w)
            + e.scale(form_on_vf(w, R))
            - w.scale(form_on_vf(e, R))
        )
    return JetSection(out_u, out_w)


def _nabla(p: JacobiPair, a: JetSection, v: Expr) -> Expr:
    res = jacobi_bracket(p, a.u, v)
    if not a.omega.is_zero:
        res = res - bivector_eval(p.lam, a.omega, DiffForm.exact(v)) + v * form_on_vf(a.omega, p.r)
    return res


def anchor(p: JacobiPair, alpha: JetSection) -> MultiVector:
    """``rho(alpha) = rho1(pr alpha) + rho2(D alpha)``."""
    require_jacobi(p)
    return _anchor(p, alpha)


def algebroid_bracket(p: JacobiPair, alpha: JetSection, beta: JetSection) -> JetSection:
    require_jacobi(p)
    return _bracket(p, alpha, beta)


def nabla(p: JacobiPair, alpha: JetSection, v: Expr) -> Expr:
    """Flat action of ``J^1 L`` on ``L`` with ``nabla_{j1 u} v = {u, v}``."""
    require_jacobi(p)
    return _nabla(p, alpha, v)


# --------------------------------------------------- generator expansion

def _generators(alpha: JetSection) -> list[tuple[Expr, Expr]]:
    """``alpha = sum f . j1(a)`` as a list of ``(f, a)``."""
    chart = alpha.chart
    terms = [(chart.one(), alpha.u)] if not alpha.u.is_zero else []
    for (k,), vk in alpha.omega.items():
        xk = chart.coord(k)
        terms.append((xk, vk))
        terms.append((-chart.one(), xk * vk))
    return terms


def algebroid_bracket_expanded(p: JacobiPair, alpha: JetSection, beta: JetSection) -> JetSection:
    """``[f j1 a, g j1 b] = f g j1{a,b} + f rho1(a)(g) j1 b - g rho1(b)(f) j1 a``."""
    chart = p.chart
    out = JetSection.zero(chart)
    for f, a in _generators(alpha):
        ra = hamiltonian_symbol(p, a)
        for g, b in _generators(beta):
            rb = hamiltonian_symbol(p, b)
            out = out + j1(jacobi_bracket(p, a, b)).scale(f * g)
            out = out + j1(b).scale(f * apply_vf(ra, g))
            out = out - j1(a).scale(g * apply_vf(rb, f))
    return out


def nabla_expanded(p: JacobiPair, alpha: JetSection, v: Expr) -> Expr:
    acc = p.chart.zero()
    for f, a in _generators(alpha):
        acc = acc + f * jacobi_bracket(p, a, v)
    return acc


def anchor_expanded(p: JacobiPair, alpha: JetSection) -> MultiVector:
    acc = MultiVector.zero(p.chart, 1)
    for f, a in _generators(alpha):
        acc = acc + hamiltonian_symbol(p, a).scale(f)
    return acc


def holonomic_bracket(p: JacobiPair, u: Expr, v: Expr) -> JetSection:
    """``[j1 u, j1 v]`` through the non-holonomic split ``j1 u = u.j1(1) - i(du)``.

    Every piece goes through the closed-form bracket on general sections, so
    this exercises the whole algebroid rather than the holonomic shortcut.
    """
    one = j1(p.chart.one())
    a = [(one.scale(u), 1), (i_incl(DiffForm.exact(u)), -1)]
    b = [(one.scale(v), 1), (i_incl(DiffForm.exact(v)), -1)]
    out = JetSection.zero(p.chart)
    for sa, ka in a:
        for sb, kb in b:
            term = _bracket(p, sa, sb)
            out = out + term if ka * kb > 0 else out - term
    return out


def bracket_from_algebroid(p: JacobiPair, u: Expr, v: Expr) -> Expr:
    """``{u, v} := pr([j1 u, j1 v])``."""
    require_jacobi(p)
    return pr(holonomic_bracket(p, u, v))


def pair_from_bracket(chart: Chart, bracket) -> JacobiPair:
    """Recover ``(L, R)`` from a bracket of the form <df^dg, L> + f R(g) - g R(f).

    ``R(f) = {1, f}`` and ``L^{ij} = {x_i, x_j} - x_i R^j + x_j R^i``.
    """
    one = chart.one()
    xs = chart.coords()
    R = MultiVector.vector(chart, [bracket(one, x) for x in xs])
    comps = {}
    for i in range(chart.dim):
        for j in range(i + 1, chart.dim):
            comps[(i, j)] = bracket(xs[i], xs[j]) - xs[i] * R[j] + xs[j] * R[i]
    return JacobiPair(MultiVector(chart, 2, comps), R)


# -------------------------------------------------------- Spencer axioms

def random_jet_section(chart: Chart, degree: int, seed: int) -> JetSection:
    u = random_poly(chart, degree, seed * 7919 + 1)
    w = DiffForm.one_form(chart, [random_poly(chart, degree, seed * 7919 + 2 + k) for k in range(chart.dim)])
    return JetSection(u, w)


def random_vector_field(chart: Chart, degree: int, seed: int) -> MultiVector:
    return MultiVector.vector(chart, [random_poly(chart, degree, seed * 104729 + 5 + k) for k in range(chart.dim)])


@dataclass(frozen=True)
class Residual:
    """One residual (an ``Expr`` or a ``JetSection``) and the seed behind it."""

    seed: int
    value: object
    label: str = ""

    @property
    def is_zero(self) -> bool:
        return self.value.is_zero


@dataclass(frozen=True)
class SpencerAxiomReport:
    """Residuals of the Spencer-operator conditions for ``D`` on ``J^1 L``.

    ``structure_residuals`` hold the algebroid Jacobiator and the curvature of
    ``nabla``: the three Spencer equations hold for the Leibniz-extended
    bracket of *any* pair, so a broken pair shows up only there.
    """

    leibniz_residuals: list[Residual] = field(default_factory=list)
    horizontal_residuals: list[Residual] = field(default_factory=list)
    vertical_residuals: list[Residual] = field(default_factory=list)
    structure_residuals: list[Residual] = field(default_factory=list)

    FAMILIES = ("leibniz", "horizontal", "vertical", "structure")

    @property
    def all_zero(self) -> bool:
        return all(r.is_zero for name in self.FAMILIES for r in self.family(name))

    def family(self, name: str) -> list[Residual]:
        return getattr(self, f"{name}_residuals")

    def witness(self) -> Optional[tuple[str, Residual]]:
        """First nonzero residual, as ``(family, residual)``."""
        for name in self.FAMILIES:
            for r in self.family(name):
                if not r.is_zero:
                    return name, r
        return None


def spencer_residuals(p: JacobiPair, alpha, alpha2, X, f, trial_seed):
    """Leibniz, horizontal and vertical residuals for one sample."""
    DX = spencer_DX
    leib = DX(X, alpha.scale(f)) - f * DX(X, alpha) - apply_vf(X, f) * pr(alpha)
    br = _bracket(p, alpha, alpha2)
    ra, ra2 = _anchor(p, alpha), _anchor(p, alpha2)
    horiz = DX(ra, alpha2) - _nabla(p, alpha2, pr(alpha)) - pr(br)
    vert = (
        DX(X, br)
        - _nabla(p, alpha, DX(X, alpha2))
        + DX(vf_bracket(ra, X), alpha2)
        + _nabla(p, alpha2, DX(X, alpha))
        - DX(vf_bracket(ra2, X), alpha)
    )
    return (
        Residual(trial_seed, leib, "leibniz"),
        Residual(trial_seed, horiz, "horizontal"),
        Residual(trial_seed, vert, "vertical"),
    )


def algebroid_jacobiator(p: JacobiPair, a: JetSection, b: JetSection, c: JetSection) -> JetSection:
    br = lambda s, t: _bracket(p, s, t)  # noqa: E731
    return br(br(a, b), c) + br(br(b, c), a) + br(br(c, a), b)


def nabla_curvature(p: JacobiPair, a: JetSection, b: JetSection, v: Expr) -> Expr:
    """``nabla_[a,b] v - nabla_a nabla_b v + nabla_b nabla_a v``."""
    return (
        _nabla(p, _bracket(p, a, b), v)
        - _nabla(p, a, _nabla(p, b, v))
        + _nabla(p, b, _nabla(p, a, v))
    )


def check_spencer_axioms(p: JacobiPair, trials: int = 20, seed: int = 0, degree: int = 2) -> SpencerAxiomReport:
    """Residuals of the Spencer-operator conditions over random samples.

    Works on any pair; broken pairs leave nonzero structure residuals.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    chart = p.chart
    rep = SpencerAxiomReport()
    for t in range(trials):
        s = seed * 1_000_003 + t
        alpha = random_jet_section(chart, degree, 6 * s)
        alpha2 = random_jet_section(chart, degree, 6 * s + 1)
        alpha3 = random_jet_section(chart, degree, 6 * s + 2)
        X = random_vector_field(chart, degree, 6 * s + 3)
        f = random_poly(chart, degree, 6 * s + 4)
        v = random_poly(chart, degree, 6 * s + 5)
        leib, hor, ver = spencer_residuals(p, alpha, alpha2, X, f, s)
        rep.leibniz_residuals.append(leib)
        rep.horizontal_residuals.append(hor)
        rep.vertical_residuals.append(ver)
        rep.structure_residuals.append(
            Residual(s, algebroid_jacobiator(p, alpha, alpha2, alpha3), "jacobi identity of [,]")
        )
        rep.structure_residuals.append(Residual(s, nabla_curvature(p, alpha, alpha2, v), "flatness of nabla"))
    return rep
