"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run under pytest (the lines are collected into the terminal summary) or
directly with ``python3 tests/test_acceptance.py``.  Every verdict is exact;
there are no numerical tolerances.
"""
import functools
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from conftest import ACCEPTANCE_LINES, random_form, random_mv  # noqa: E402
from oracles import lie_form_oracle, sgn  # noqa: E402

from jacobi_kit.contact import (  # noqa: E402
    b_map,
    induced_jacobi_pair,
    reeb_bracket,
    reeb_field,
    reeb_field_of,
)
from jacobi_kit.extcalc import (  # noqa: E402
    DiffForm,
    MultiVector,
    d,
    form_on_vf,
    interior,
    lie_derivative,
    schouten,
    vf_bracket,
)
from jacobi_kit.jacobi import (  # noqa: E402
    JacobiPair,
    check_jacobi_pair,
    find_jacobiator_witness,
    homogeneity_residual,
    jacobi_bracket,
    poissonization,
    sample_jacobiator,
)
from jacobi_kit.jetalg import (  # noqa: E402
    algebroid_bracket,
    algebroid_jacobiator,
    anchor,
    bracket_from_algebroid,
    check_spencer_axioms,
    holonomic_bracket,
    j1,
    nabla,
    nabla_curvature,
    random_jet_section,
    spencer_D,
)
from jacobi_kit.structfile import bundled_names, resolve  # noqa: E402
from jacobi_kit.symcore import Chart, random_poly  # noqa: E402


def bundled_jacobi_pairs():
    """Every bundled example expected to pass, as a Jacobi pair."""
    out = {}
    for name in bundled_names():
        sf = resolve(name)
        if sf.meta.get("expect") != "pass":
            continue
        out[name] = sf.jacobi_pair() if sf.kind == "jacobi_pair" else induced_jacobi_pair(sf.contact_form())
    return out


PAIRS = bundled_jacobi_pairs()
BROKEN = resolve("broken_r3").jacobi_pair()
STD3 = resolve("std_contact_r3").contact_form()
STD5 = resolve("std_contact_r5").contact_form()
CONTACT = [resolve(n).contact_form() for n in ("std_contact_r3", "std_contact_r5", "twisted_contact_r3")]


def criterion(number, title):
    def wrap(fn):
        @functools.wraps(fn)
        def run():
            try:
                fn()
            except Exception:
                line = f"criterion {number} FAIL  {title}"
                ACCEPTANCE_LINES.append(line)
                print(line)
                raise
            line = f"criterion {number} PASS  {title}"
            ACCEPTANCE_LINES.append(line)
            print(line)

        return run

    return wrap


@criterion(1, "pair residuals vanish iff the Jacobiator does")
def test_criterion_1_jacobi_pair_equivalence():
    C = STD3.chart
    good = [induced_jacobi_pair(STD3), JacobiPair(MultiVector.basis(C, "x", "y"), MultiVector.zero(C, 1))]
    for p in good:
        assert check_jacobi_pair(p).is_jacobi
        samples = list(sample_jacobiator(p, trials=20, degree=3, seed=1))
        assert len(samples) >= 20 and all(j.is_zero for _, j in samples)
    assert not check_jacobi_pair(BROKEN).is_jacobi
    witness = find_jacobiator_witness(BROKEN, max_degree=2)
    assert witness is not None and not witness[3].is_zero


@criterion(2, "Reeb bracket equals the induced Jacobi bracket (R^3 and R^5)")
def test_criterion_2_contact_jacobi_bridge():
    for c, degree in ((STD3, 3), (STD5, 2)):
        p = induced_jacobi_pair(c)
        for s in range(20):
            f, g = random_poly(c.chart, degree, 2 * s), random_poly(c.chart, degree, 2 * s + 1)
            assert reeb_bracket(c, f, g) == jacobi_bracket(p, f, g)


@criterion(3, "Reeb laws: defining equations, R_fu = f R_u + b(u df), [R_f, R_g] = R_{f,g}")
def test_criterion_3_reeb_laws():
    for c in CONTACT:
        R = reeb_field(c)
        assert form_on_vf(c.theta, R) == c.chart.one()
        assert interior(R, c.dtheta).is_zero
        u = random_poly(c.chart, 2, 1000)
        Ru = reeb_field_of(c, u)
        for s in range(20):
            f = random_poly(c.chart, 2, s)
            rhs = Ru.scale(f) + b_map(c, DiffForm.exact(f).scale(u))
            assert reeb_field_of(c, f * u) == rhs
        for s in range(10):
            f, g = random_poly(c.chart, 2, 3 * s + 500), random_poly(c.chart, 2, 3 * s + 501)
            lhs = vf_bracket(reeb_field_of(c, f), reeb_field_of(c, g))
            assert lhs == reeb_field_of(c, reeb_bracket(c, f, g))


@criterion(4, "Spencer axioms hold on every bundled Jacobi pair and fail on broken_r3")
def test_criterion_4_spencer_axioms():
    for name, p in PAIRS.items():
        rep = check_spencer_axioms(p, trials=20, seed=0)
        for fam in ("leibniz", "horizontal", "vertical"):
            assert len(rep.family(fam)) >= 20
        assert rep.all_zero, (name, rep.witness())
    assert not check_spencer_axioms(BROKEN, trials=20, seed=0).all_zero


@criterion(5, "bracket recovered from the algebroid; D[j1 u, j1 v] = 0")
def test_criterion_5_round_trip():
    for name, p in PAIRS.items():
        for s in range(20):
            u, v = random_poly(p.chart, 2, 2 * s + 7), random_poly(p.chart, 2, 2 * s + 8)
            assert bracket_from_algebroid(p, u, v) == jacobi_bracket(p, u, v), name
            assert spencer_D(holonomic_bracket(p, u, v)).is_zero, name


@criterion(6, "algebroid Leibniz, anchor morphism, Jacobi identity and flat nabla")
def test_criterion_6_algebroid_laws():
    for name, p in PAIRS.items():
        C = p.chart
        for s in range(10):
            a, b, c = (random_jet_section(C, 2, 30 * s + k) for k in range(3))
            f, v = random_poly(C, 2, 30 * s + 4), random_poly(C, 2, 30 * s + 5)
            leib = algebroid_bracket(p, a, b.scale(f)) - algebroid_bracket(p, a, b).scale(f)
            assert leib == b.scale(anchor(p, a)(f)), name
            assert anchor(p, algebroid_bracket(p, a, b)) == vf_bracket(anchor(p, a), anchor(p, b)), name
            assert algebroid_jacobiator(p, a, b, c).is_zero, name
            assert nabla_curvature(p, a, b, v).is_zero, name


@criterion(7, "nabla_{j1 f}(1) = -R(f) on every bundled pair with R != 0")
def test_criterion_7_nabla_of_one():
    checked = 0
    for name, p in PAIRS.items():
        if p.r.is_zero:
            continue
        checked += 1
        for s in range(10):
            f = random_poly(p.chart, 3, s)
            assert nabla(p, j1(f), p.chart.one()) == -p.r(f), name
    assert checked >= 3


@criterion(8, "Poissonization is Poisson exactly for Jacobi pairs and always homogeneous")
def test_criterion_8_poissonization():
    for name, p in PAIRS.items():
        pi = poissonization(p)
        assert schouten(pi, pi).is_zero, name
        assert homogeneity_residual(pi, "t").is_zero, name
    pi = poissonization(BROKEN)
    assert not schouten(pi, pi).is_zero
    assert homogeneity_residual(pi, "t").is_zero


@criterion(9, "calculus substrate: d^2 = 0, Cartan, Schouten antisymmetry and graded Jacobi")
def test_criterion_9_calculus_substrate():
    C = Chart(["x", "y", "z", "w"])
    for s in range(20):
        for g in (0, 1, 2):
            w = random_form(C, g, 3, 10 * s + g)
            assert d(d(w)).is_zero
            X = random_mv(C, 1, 2, 10 * s + g + 5)
            cartan = interior(X, d(w)) + (d(interior(X, w)) if g else DiffForm.zero(C, 0))
            assert cartan == lie_form_oracle(X, w)
            assert lie_derivative(X, w) == cartan
    C3 = Chart(["x", "y", "z"])
    for p, q, r in [(1, 1, 1), (2, 1, 1), (1, 2, 1), (2, 2, 1), (1, 1, 2), (2, 1, 2), (1, 2, 2), (2, 2, 2)]:
        for s in range(20):
            P = random_mv(C3, p, 1, 100 * s + 1)
            Q = random_mv(C3, q, 1, 100 * s + 2)
            S = random_mv(C3, r, 2, 100 * s + 3)
            assert schouten(P, Q) == -schouten(Q, P) * sgn((p - 1) * (q - 1))
            lhs = schouten(P, schouten(Q, S))
            rhs = schouten(schouten(P, Q), S) + schouten(Q, schouten(P, S)) * sgn((p - 1) * (q - 1))
            assert lhs == rhs


if __name__ == "__main__":
    tests = [v for k, v in sorted(globals().items()) if k.startswith("test_criterion_")]
    failed = 0
    for t in tests:
        try:
            t()
        except Exception as exc:  # the FAIL line is already printed
            failed += 1
            print(f"    {type(exc).__name__}: {exc}")
    sys.exit(1 if failed else 0)
