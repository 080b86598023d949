import pytest

from jacobi_kit.contact import ContactForm, induced_jacobi_pair
from jacobi_kit.extcalc import DiffForm, MultiVector, apply_vf, form_on_vf, vf_bracket
from jacobi_kit.jacobi import JacobiPair, NotJacobiError, hamiltonian_symbol, jacobi_bracket
from jacobi_kit.jetalg import (
    JetSection,
    algebroid_bracket,
    algebroid_bracket_expanded,
    algebroid_jacobiator,
    anchor,
    anchor_expanded,
    bracket_from_algebroid,
    check_spencer_axioms,
    holonomic_bracket,
    i_incl,
    j1,
    nabla,
    nabla_curvature,
    nabla_expanded,
    pair_from_bracket,
    pr,
    random_jet_section,
    random_vector_field,
    rho2,
    spencer_D,
    spencer_DX,
)
from jacobi_kit.symcore import Chart, random_poly

C = Chart(["x", "y", "z"])
x, y, z = C.coords()
DXY = MultiVector.basis(C, "x", "y")
DZ = MultiVector.basis(C, "z")

POISSON = JacobiPair(DXY, MultiVector.zero(C, 1))
BROKEN = JacobiPair(DXY, DZ)
ZERO = JacobiPair.zero(C)
STD = induced_jacobi_pair(ContactForm(DiffForm.one_form(C, {"z": 1, "x": -y})))
TWISTED = induced_jacobi_pair(ContactForm(DiffForm.one_form(C, {"z": 1 + x * x, "x": -y})))
SO3 = JacobiPair(MultiVector(C, 2, {"12": z, "23": x, "31": y}), MultiVector.zero(C, 1))
REEB_ONLY = JacobiPair(MultiVector.zero(C, 2), DZ)
PAIRS = {"poisson": POISSON, "zero": ZERO, "std": STD, "twisted": TWISTED, "so3": SO3, "reeb": REEB_ONLY}


def sections(n, seed, degree=2):
    return [random_jet_section(C, degree, seed * 10 + k) for k in range(n)]


class TestSections:
    def test_module_action(self):
        assert j1(C.zero()).is_zero and i_incl(DiffForm.zero(C, 1)).is_zero
        for s in range(10):
            f, u = random_poly(C, 2, s), random_poly(C, 2, s + 5)
            assert j1(u).scale(f) == j1(f * u) + i_incl(DiffForm.exact(f).scale(u))
            assert spencer_D(j1(u)).is_zero
            assert spencer_D(j1(u).scale(f)) == DiffForm.exact(f).scale(u)
            a = random_jet_section(C, 2, s)
            assert pr(a.scale(f)) == f * pr(a)
            g = random_poly(C, 2, s + 9)
            assert a.scale(f).scale(g) == a.scale(f * g)

    def test_generator_identity(self):
        assert j1(y).scale(x) - j1(x * y) == i_incl(DiffForm.basis(C, "x").scale(y))
        assert pr(i_incl(DiffForm.basis(C, "z"))).is_zero

    def test_spencer_dx(self):
        X = random_vector_field(C, 2, 1)
        a = random_jet_section(C, 2, 2)
        assert spencer_DX(X, a) == form_on_vf(a.omega, X)

    def test_chart_mismatch(self):
        with pytest.raises(ValueError):
            JetSection(x, DiffForm.zero(Chart(["a"]), 1))


@pytest.mark.parametrize("name", sorted(PAIRS))
class TestAlgebroid:
    def test_anchor(self, name):
        p = PAIRS[name]
        for s in range(5):
            u = random_poly(C, 2, s)
            assert anchor(p, j1(u)) == hamiltonian_symbol(p, u)
            a = random_jet_section(C, 2, s)
            f = random_poly(C, 2, s + 3)
            assert anchor(p, a.scale(f)) == anchor(p, a).scale(f)
            assert anchor(p, a) == anchor_expanded(p, a)

    def test_rho2_is_minus_symbol(self, name):
        p = PAIRS[name]
        for s in range(5):
            f, u = random_poly(C, 2, s), random_poly(C, 2, s + 1)
            lhs = hamiltonian_symbol(p, f * u)
            assert lhs == hamiltonian_symbol(p, u).scale(f) - rho2(p, DiffForm.exact(f).scale(u))

    def test_bracket_on_holonomic(self, name):
        p = PAIRS[name]
        for s in range(5):
            u, v = random_poly(C, 3, s), random_poly(C, 3, s + 1)
            assert algebroid_bracket(p, j1(u), j1(v)) == j1(jacobi_bracket(p, u, v))

    def test_closed_form_matches_expansion(self, name):
        p = PAIRS[name]
        for s in range(4):
            a, b = sections(2, s)
            assert algebroid_bracket(p, a, b) == algebroid_bracket_expanded(p, a, b)
            v = random_poly(C, 2, s + 77)
            assert nabla(p, a, v) == nabla_expanded(p, a, v)

    def test_antisymmetry_and_leibniz(self, name):
        p = PAIRS[name]
        for s in range(6):
            a, b = sections(2, s)
            f = random_poly(C, 2, s + 20)
            assert algebroid_bracket(p, a, b) == -algebroid_bracket(p, b, a)
            lhs = algebroid_bracket(p, a, b.scale(f))
            rhs = algebroid_bracket(p, a, b).scale(f) + b.scale(apply_vf(anchor(p, a), f))
            assert lhs == rhs

    def test_jacobi_and_anchor_morphism(self, name):
        p = PAIRS[name]
        for s in range(4):
            a, b, c = sections(3, s)
            assert algebroid_jacobiator(p, a, b, c).is_zero
            assert anchor(p, algebroid_bracket(p, a, b)) == vf_bracket(anchor(p, a), anchor(p, b))

    def test_nabla(self, name):
        p = PAIRS[name]
        for s in range(5):
            u, v, f = (random_poly(C, 2, 3 * s + k) for k in range(3))
            assert nabla(p, j1(u), v) == jacobi_bracket(p, u, v)
            assert nabla(p, j1(f), C.one()) == -apply_vf(p.r, f)
            a, b = sections(2, s)
            assert nabla_curvature(p, a, b, v).is_zero
            # nabla is a representation: C-linear in the section, derivation in v
            assert nabla(p, a.scale(f), v) == f * nabla(p, a, v)
            assert nabla(p, a, f * v) == f * nabla(p, a, v) + apply_vf(anchor(p, a), f) * v

    def test_round_trip(self, name):
        p = PAIRS[name]
        for s in range(5):
            u, v = random_poly(C, 2, s), random_poly(C, 2, s + 40)
            h = holonomic_bracket(p, u, v)
            assert spencer_D(h).is_zero
            assert bracket_from_algebroid(p, u, v) == jacobi_bracket(p, u, v)
            assert bracket_from_algebroid(p, u, u).is_zero
        back = pair_from_bracket(C, lambda f, g: bracket_from_algebroid(p, f, g))
        assert back == p


class TestBroken:
    def test_wrappers_refuse(self):
        a, b = sections(2, 0)
        for call in (
            lambda: anchor(BROKEN, a),
            lambda: algebroid_bracket(BROKEN, a, b),
            lambda: nabla(BROKEN, a, x),
            lambda: bracket_from_algebroid(BROKEN, x, y),
        ):
            with pytest.raises(NotJacobiError):
                call()

    def test_structure_identities_fail(self):
        a, b, c = sections(3, 1)
        assert not algebroid_jacobiator(BROKEN, a, b, c).is_zero
        assert not nabla_curvature(BROKEN, j1(x), j1(y), z).is_zero

    def test_holonomic_bracket_still_agrees(self):
        for s in range(3):
            u, v = random_poly(C, 2, s), random_poly(C, 2, s + 1)
            h = holonomic_bracket(BROKEN, u, v)
            assert spencer_D(h).is_zero and pr(h) == jacobi_bracket(BROKEN, u, v)


class TestSpencerAxioms:
    @pytest.mark.parametrize("name", ["zero", "std", "poisson"])
    def test_all_zero(self, name):
        rep = check_spencer_axioms(PAIRS[name], trials=5, seed=3)
        assert rep.all_zero and rep.witness() is None
        for fam in rep.FAMILIES:
            assert len(rep.family(fam)) >= 5

    def test_broken_has_witness(self):
        rep = check_spencer_axioms(BROKEN, trials=3)
        assert not rep.all_zero
        fam, res = rep.witness()
        assert fam == "structure" and not res.is_zero and res.seed == 0
        # the Spencer equations proper do not see the broken pair
        for fam in ("leibniz", "horizontal", "vertical"):
            assert all(r.is_zero for r in rep.family(fam))

    def test_deterministic(self):
        a = check_spencer_axioms(BROKEN, trials=2, seed=9)
        b = check_spencer_axioms(BROKEN, trials=2, seed=9)
        assert [str(r.value) for r in a.structure_residuals] == [str(r.value) for r in b.structure_residuals]

    def test_bad_trials(self):
        with pytest.raises(ValueError):
            check_spencer_axioms(STD, trials=0)
