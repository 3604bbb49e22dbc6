import pytest

import conslaw

HEAT = "indep t x\ndep u\nfn h(t, x) rule h_t -> -h_xx\neq u_t = u_xx\ncv F0 = u ; -u_x\n"
B0 = (
    "indep t x\ndep u\nfn A(w)\nfn IntA(w) d/w = A(w)\neq u_t = D_x(A(u)*u_x)\n"
    "cv F0 = u ; -A(u)*u_x\npotential 2d v = F0\ncv F = v ; -IntA(u)\n"
)


def test_heat_laws():
    s = conslaw.load(HEAT)
    assert s.conserved_vectors() == ["F0"]
    assert s.is_conserved("F0")
    assert not s.is_conserved("u ; u_x")
    assert s.characteristic("h*u ; h_x*u - h*u_x") == ["h(t, x)"]
    assert s.is_cosymmetry("h")
    assert not s.is_cosymmetry("t")
    assert s.equivalent("F0", "u + u_t - u_xx ; -u_x")


def test_potential_system():
    s = conslaw.load(B0)
    assert s.levels == 1
    assert s.reduce("v_tx") == s.reduce("D_x(A(u)*u_x)")
    assert s.purity("F") == "Induced"
    assert s.equivalent(" ; ".join(s.localize("F")), "-x*u ; x*A(u)*u_x - IntA(u)", 0)
    assert s.phi("1 ; 0") == "x"
    assert conslaw.load(s.to_text()).equations() == s.equations()


def test_constants_and_errors():
    s = conslaw.load("indep t x\nconst eps\ndep u\neq u_t = u_xx + eps*u_x\n", {"eps": 0})
    assert s.equations(0) == ["u_{t:1} = u_{x:2}"]
    with pytest.raises(conslaw.ConslawError, match="line 3"):
        conslaw.load("indep t x\ndep u\neq u_t = q\n")
    with pytest.raises(ValueError):
        conslaw.load(HEAT).purity("F0")


def test_euler_annihilates_divergence():
    assert conslaw.euler("D_x(u*u_x) + D_t(x*u^2)") == "0"
    assert conslaw.euler("u_x^2") == "-2*u_{x:2}"


def test_builtin_corpus():
    assert "heat3d" in conslaw.corpus_names()
    results = conslaw.run_corpus()
    assert len(results) > 100
    assert all(r["pass"] for r in results), [r for r in results if not r["pass"]]
