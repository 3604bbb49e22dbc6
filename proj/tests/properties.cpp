// Randomized invariants over seeded expression generators.
#include <doctest.h>

#include <random>
#include <sstream>

#include "conslaw/conslaw.hpp"
#include "conslaw/variational.hpp"
#include "helpers.hpp"

using namespace conslaw;

namespace {

constexpr int kCases = 250;

class Gen {
 public:
  Gen(std::uint32_t seed, std::vector<std::string> atoms) : rng_(seed), atoms_(std::move(atoms)) {}

  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  std::string coeff() {
    int n = uniform(-4, 4);
    if (n == 0) n = 1;
    int d = uniform(1, 3);
    return "(" + std::to_string(n) + "/" + std::to_string(d) + ")";
  }

  std::string monomial(int max_degree) {
    std::string s = coeff();
    int deg = uniform(0, max_degree);
    for (int i = 0; i < deg; ++i) s += "*" + atoms_[static_cast<std::size_t>(uniform(0, static_cast<int>(atoms_.size()) - 1))];
    return s;
  }

  std::string poly(int terms = 4, int max_degree = 3) {
    std::string s = monomial(max_degree);
    int k = uniform(1, terms);
    for (int i = 1; i < k; ++i) s += " + " + monomial(max_degree);
    return s;
  }

 private:
  std::mt19937 rng_;
  std::vector<std::string> atoms_;
};

const char* kPoly = "indep t x\ndep u v\n";
const char* kRich =
    "indep t x\ndep u v\nfn A(w)\nfn IntA(w) d/w = A(w)\nfn h(t, x) rule h_t -> -h_xx\n";
const char* kCovered =
    "indep t x\ndep u\nfn A(w)\nfn h(t, x) rule h_t -> -h_xx\neq u_t = u_xx + 2*u*u_x\n"
    "potential 2d v = u ; -u_x - u^2\n";

const std::vector<std::string> kPolyAtoms{"x", "t", "u", "u_x", "u_xx", "u_t", "v", "v_x", "v_tx"};
const std::vector<std::string> kRichAtoms{"x", "u", "u_x", "u_t", "v_x", "A(u)", "IntA(u)", "exp(x)", "h", "h_x", "u^-1"};

}  // namespace

TEST_CASE("Euler operators annihilate total divergences") {
  auto f = testing::load(kRich);
  const Context& ctx = *f.ctx;
  Gen g(11, kRichAtoms);
  for (int i = 0; i < kCases; ++i) {
    VectorFunction F{f.parse(g.poly()), f.parse(g.poly())};
    Expr H = divergence(F, ctx);
    INFO(to_string(F, ctx));
    CHECK(is_zero(euler(H, "u", ctx)));
    CHECK(is_zero(euler(H, "v", ctx)));
    CHECK(is_total_divergence(H, ctx));
  }
}

TEST_CASE("homotopy inverts the divergence") {
  auto f = testing::load(kPoly);
  const Context& ctx = *f.ctx;
  Gen g(12, kPolyAtoms);
  for (int i = 0; i < kCases; ++i) {
    VectorFunction F{f.parse(g.poly(3, 3)), f.parse(g.poly(3, 3))};
    Expr H = divergence(F, ctx);
    INFO(to_string(H, ctx));
    CHECK(divergence(homotopy_divergence(H, ctx), ctx) == H);
  }
}

TEST_CASE("total derivatives commute and obey Leibniz") {
  auto f = testing::load(kRich);
  const Context& ctx = *f.ctx;
  Gen g(13, kRichAtoms);
  for (int i = 0; i < kCases; ++i) {
    Expr a = f.parse(g.poly()), b = f.parse(g.poly());
    INFO(to_string(a, ctx) << " | " << to_string(b, ctx));
    CHECK(total_derivative(total_derivative(a, 0, ctx), 1, ctx) ==
          total_derivative(total_derivative(a, 1, ctx), 0, ctx));
    CHECK(total_derivative(a * b, 1, ctx) == total_derivative(a, 1, ctx) * b + a * total_derivative(b, 1, ctx));
    CHECK(total_derivative(a, Multiindex{1, 1}, ctx) == total_derivative(total_derivative(a, 0, ctx), 1, ctx));
  }
}

TEST_CASE("higher Euler operator of order zero is the Euler operator") {
  auto f = testing::load(kRich);
  const Context& ctx = *f.ctx;
  Gen g(14, kRichAtoms);
  for (int i = 0; i < kCases; ++i) {
    Expr e = f.parse(g.poly());
    CHECK(higher_euler(e, "u", {0, 0}, ctx) == euler(e, "u", ctx));
  }
}

TEST_CASE("reduction is idempotent and exact") {
  auto f = testing::load(kCovered);
  const auto& S = f.system();
  const Context& ctx = S.ctx();
  Gen g(15, {"u_t", "u_tx", "u_xxx", "v_t", "v_xx", "v_tt", "h_t", "h", "exp(v)", "A(u)", "x"});
  for (int i = 0; i < kCases; ++i) {
    Expr e = f.parse(g.poly());
    Expr r = S.reduce(e);
    INFO(to_string(e, ctx));
    CHECK(S.reduce(r) == r);
    auto tr = S.reduce_tracked(e);
    CHECK(tr.remainder == r);
    Expr sum = tr.remainder;
    for (const auto& st : tr.steps)
      sum += st.multiplier * total_derivative(S.equations()[static_cast<std::size_t>(st.eq)].residual, st.gamma, ctx);
    CHECK(equal(sum, e));
  }
}

TEST_CASE("null divergence potentials round-trip") {
  auto f = testing::load("indep t x\ndep u\neq u_t = u_xx + 2*u*u_x\n");
  const auto& S = f.base;
  const Context& ctx = S.ctx();
  Gen g(16, {"x", "u", "u_x", "u_xx"});
  for (int i = 0; i < kCases; ++i) {
    Expr phi = f.parse(g.poly(3, 3));
    Expr alpha = S.reduce(total_derivative(phi, 1, ctx));
    Expr beta = -S.reduce(total_derivative(phi, 0, ctx));
    INFO(to_string(phi, ctx));
    Expr got = solve_null_divergence_2d(alpha, beta, S);
    Expr diff = got - phi;
    CHECK((is_zero(diff) || diff.is_constant()));
  }
}

TEST_CASE("adjoint Frechet derivative pairs to a divergence") {
  auto f = testing::load("indep t x\ndep u p q\n");
  const Context& ctx = *f.ctx;
  Gen g(17, {"x", "u", "u_x", "u_xx", "u_t"});
  for (int i = 0; i < kCases; ++i) {
    std::vector<Expr> L{f.parse(g.poly())};
    Expr p = f.parse("p"), q = f.parse("q");
    // Only u-slots carry the direction: w = (q, 0, 0) over deps (u, p, q).
    Expr direct = frechet(L, {q, Expr(0), Expr(0)}, false, ctx)[0];
    Expr adj = frechet(L, {p}, true, ctx)[0];
    Expr pairing = p * direct - q * adj;
    INFO(to_string(L[0], ctx));
    CHECK(is_total_divergence(pairing, ctx));
  }
}

TEST_CASE("printing and parsing round-trip") {
  auto f = testing::load(kRich);
  const Context& ctx = *f.ctx;
  Gen g(18, kRichAtoms);
  for (int i = 0; i < kCases; ++i) {
    Expr e = f.parse(g.poly());
    CHECK(parse_expression(to_string(e, ctx), ctx) == e);
  }
}

TEST_CASE("evaluation is a ring homomorphism") {
  auto f = testing::load(kPoly);
  Gen g(19, kPolyAtoms);
  std::mt19937 rng(20);
  for (int i = 0; i < kCases; ++i) {
    Expr a = f.parse(g.poly()), b = f.parse(g.poly());
    std::map<Atom, Rational> pt;
    auto atoms = all_atoms(a);
    atoms.merge(all_atoms(b));
    for (const auto& at : atoms)
      pt[at] = frac(std::uniform_int_distribution<long>(-5, 5)(rng), std::uniform_int_distribution<long>(1, 4)(rng));
    CHECK(eval_rational(a * b, pt) == eval_rational(a, pt) * eval_rational(b, pt));
    CHECK(eval_rational(a + b, pt) == eval_rational(a, pt) + eval_rational(b, pt));
  }
}

TEST_CASE("characteristics of random trivial-plus-known laws") {
  auto f = testing::load("indep t x\ndep u\neq u_t = u_xx\n");
  const auto& S = f.base;
  const Context& ctx = S.ctx();
  Gen g(21, {"x", "u", "u_x", "u_xx"});
  VectorFunction F0 = f.parse_tuple("x*u ; u - x*u_x");
  for (int i = 0; i < kCases; ++i) {
    // Add a null divergence (D_x P, -D_t P) to a law with characteristic x.
    Expr P = f.parse(g.poly(3, 2));
    VectorFunction F{F0[0] + total_derivative(P, 1, ctx), F0[1] - total_derivative(P, 0, ctx)};
    INFO(to_string(P, ctx));
    CHECK(verify_conserved_vector(F, S));
    auto ex = extract_characteristic(F, S);
    CHECK(S.vanishes_on_solutions(ex.lambda.components[0] - f.parse("x")));
    CHECK(equivalent_conserved_vectors(F, F0, S));
  }
}
