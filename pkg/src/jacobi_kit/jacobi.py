"""Jacobi pairs ``(L, R)`` on a chart and the bracket they induce.

The bracket on functions is

    {f, g} = <df ^ dg, L> + f R(g) - g R(f)

and a pair is Jacobi when ``[L, R] = 0`` and ``[L, L] = 2 R ^ L``.  Broken
pairs are ordinary values: Jacobi-ness is a report, never a constructor
check.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Optional

from .extcalc import (
    DiffForm,
    MultiVector,
    apply_vf,
    bivector_eval,
    lie_derivative,
    schouten,
    sharp,
    wedge,
)
from .symcore import Chart, Expr, random_poly

__all__ = [
    "JacobiPair",
    "PairReport",
    "NotJacobiError",
    "check_jacobi_pair",
    "jacobi_bracket",
    "jacobiator",
    "hamiltonian_symbol",
    "poissonization",
    "find_jacobiator_witness",
    "sample_jacobiator",
]


class NotJacobiError(ValueError):
    """Raised when an operation needs a genuine Jacobi pair."""


@dataclass(frozen=True)
class JacobiPair:
    lam: MultiVector
    r: MultiVector

    def __post_init__(self):
        if not isinstance(self.lam, MultiVector) or self.lam.grade != 2:
            raise TypeError("lam must be a bivector")
        if not isinstance(self.r, MultiVector) or self.r.grade != 1:
            raise TypeError("r must be a vector field")
        if self.lam.chart != self.r.chart:
            raise ValueError("lam and r live on different charts")

    @property
    def chart(self) -> Chart:
        return self.lam.chart

    @classmethod
    def zero(cls, chart: Chart) -> "JacobiPair":
        return cls(MultiVector.zero(chart, 2), MultiVector.zero(chart, 1))


@dataclass(frozen=True)
class PairReport:
    is_jacobi: bool
    residual_lr: MultiVector
    residual_ll: MultiVector


@lru_cache(maxsize=256)
def check_jacobi_pair(p: JacobiPair) -> PairReport:
    """Residuals ``[L, R]`` and ``[L, L] - 2 R^L``."""
    res_lr = schouten(p.lam, p.r)
    res_ll = schouten(p.lam, p.lam) - wedge(p.r, p.lam).scale(2)
    return PairReport(res_lr.is_zero and res_ll.is_zero, res_lr, res_ll)


def require_jacobi(p: JacobiPair) -> None:
    rep = check_jacobi_pair(p)
    if not rep.is_jacobi:
        raise NotJacobiError(
            f"not a Jacobi pair: [L,R] = {rep.residual_lr}, [L,L] - 2R^L = {rep.residual_ll}"
        )


def _check_chart(p: JacobiPair, *fs: Expr):
    for f in fs:
        if f.chart != p.chart:
            raise ValueError(f"chart mismatch: {f.chart} vs {p.chart}")


def jacobi_bracket(p: JacobiPair, f: Expr, g: Expr) -> Expr:
    _check_chart(p, f, g)
    pair = bivector_eval(p.lam, DiffForm.exact(f), DiffForm.exact(g))
    return pair + f * apply_vf(p.r, g) - g * apply_vf(p.r, f)


def jacobiator(p: JacobiPair, f: Expr, g: Expr, h: Expr) -> Expr:
    """``{{f,g},h} + {{g,h},f} + {{h,f},g}`` by nested brackets."""
    br = lambda a, b: jacobi_bracket(p, a, b)  # noqa: E731
    return br(br(f, g), h) + br(br(g, h), f) + br(br(h, f), g)


def hamiltonian_symbol(p: JacobiPair, u: Expr) -> MultiVector:
    """Symbol of ``{u, .}``: ``{u, fv} = f{u,v} + rho1(u)(f) v``.

    Closed form ``rho1(u) = L^#(du) + u R``.
    """
    _check_chart(p, u)
    return sharp(p.lam, DiffForm.exact(u)) + p.r.scale(u)


def poissonization(p: JacobiPair, new_coord: str = "t") -> MultiVector:
    """``t^-1 L + d_t ^ R`` on the chart extended by ``t`` (read on t > 0)."""
    chart = p.chart.extend(new_coord)
    t = chart.coord(new_coord)
    lam = p.lam.subs_chart(chart)
    r = p.r.subs_chart(chart)
    return lam.scale(t.inverse()) + wedge(MultiVector.basis(chart, new_coord), r)


def euler_field(chart: Chart, coord: str) -> MultiVector:
    """``t d_t``."""
    return MultiVector.vector(chart, {coord: chart.coord(coord)})


def homogeneity_residual(pi: MultiVector, coord: str) -> MultiVector:
    """``L_{t d_t} Pi + Pi``; zero iff Pi is homogeneous of degree -1."""
    return lie_derivative(euler_field(pi.chart, coord), pi) + pi


def _monomials(chart: Chart, max_degree: int) -> list[Expr]:
    out = []
    xs = chart.coords()
    for deg in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(range(chart.dim), deg):
            m = chart.one()
            for i in combo:
                m = m * xs[i]
            out.append(m)
    return out


def find_jacobiator_witness(
    p: JacobiPair, max_degree: int = 2
) -> Optional[tuple[Expr, Expr, Expr, Expr]]:
    """First monomial triple with nonzero Jacobiator, as ``(f, g, h, J)``."""
    monos = _monomials(p.chart, max_degree)
    for f, g, h in itertools.combinations(monos, 3):
        j = jacobiator(p, f, g, h)
        if not j.is_zero:
            return f, g, h, j
    return None


def sample_jacobiator(
    p: JacobiPair, trials: int, degree: int, seed: int
) -> Iterable[tuple[int, Expr]]:
    """Yield ``(trial_seed, jacobiator)`` over random polynomial triples."""
    for t in range(trials):
        s = seed * 1_000_003 + t
        f = random_poly(p.chart, degree, 3 * s)
        g = random_poly(p.chart, degree, 3 * s + 1)
        h = random_poly(p.chart, degree, 3 * s + 2)
        yield s, jacobiator(p, f, g, h)
