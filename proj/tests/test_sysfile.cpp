#include <doctest.h>

#include <string>

#include "conslaw/corpus.hpp"
#include "helpers.hpp"

using namespace conslaw;

namespace {

const char* kFile = R"(# comment line
indep t x
const eps
dep u weight 0
fn A(w)
fn IntA(w) d/w = A(w)
eq u_t = D_x(A(u)*u_x) + eps*A(u)*u_x
cv F0 = u ; -A(u)*u_x - eps*IntA(u)
potential 2d v = F0   # trailing comment
nprime u_t v
level
potential 2d w = F0
cv G = w - v ; 0
claim conserved F0
)";

ErrorCode code_of(const std::string& text, std::string* msg = nullptr) {
  try {
    parse_system_file(text);
  } catch (const Error& e) {
    if (msg) *msg = e.what();
    return e.code();
  }
  return ErrorCode::Internal;
}

bool same_structure(const SystemFile& a, const SystemFile& b) {
  if (a.indep != b.indep || a.consts != b.consts || a.deps != b.deps || a.funcs != b.funcs) return false;
  if (a.base.size() != b.base.size() || a.levels.size() != b.levels.size() || a.cvs.size() != b.cvs.size())
    return false;
  for (std::size_t i = 0; i < a.cvs.size(); ++i)
    if (a.cvs[i].first != b.cvs[i].first || !testing::same(a.cvs[i].second, b.cvs[i].second)) return false;
  for (std::size_t l = 0; l < a.levels.size(); ++l) {
    const auto& ea = a.levels[l].system.equations();
    const auto& eb = b.levels[l].system.equations();
    if (ea.size() != eb.size() || a.levels[l].nprime != b.levels[l].nprime) return false;
    for (std::size_t i = 0; i < ea.size(); ++i)
      if (!(ea[i].lead == eb[i].lead) || !equal(ea[i].residual, eb[i].residual) || ea[i].label != eb[i].label)
        return false;
  }
  return a.claims.size() == b.claims.size();
}

}  // namespace

TEST_CASE("system files load") {
  auto f = parse_system_file(kFile);
  CHECK(f.indep == std::vector<std::string>{"t", "x"});
  CHECK(f.consts == std::vector<std::string>{"eps"});
  REQUIRE(f.levels.size() == 2);
  CHECK(f.levels[0].nprime == std::vector<int>{0});
  CHECK(f.system().size() == 5);
  CHECK(f.has_cv("G"));
  CHECK_FALSE(f.has_cv("H"));
  REQUIRE(f.claims.size() == 1);
  CHECK(f.claims[0].level == 2);
  CHECK(f.claims[0].kind == "conserved");
  CHECK(find_equation(f.base, "u_t") == 0);
  CHECK(find_equation(f.system(), "v_x") == 2);
  CHECK_THROWS_AS(find_equation(f.base, "v_t"), Error);
  CHECK_THROWS_AS(f.cv("H"), Error);
}

TEST_CASE("constant bindings") {
  LoadOptions o;
  o.constants["eps"] = Rational(0);
  auto f = parse_system_file(kFile, o);
  CHECK(f.base.equations()[0].rhs == f.parse("D_x(A(u)*u_x)"));
  CHECK(f.parse("eps*u") == Expr(0));
}

TEST_CASE("printing round-trips") {
  auto f = parse_system_file(kFile);
  std::string once = print_system_file(f);
  auto g = parse_system_file(once);
  CHECK(same_structure(f, g));
  CHECK(print_system_file(g) == once);
  for (const auto& file : builtin_corpus()) {
    INFO(file.name);
    auto a = parse_system_file(file.text);
    auto p = print_system_file(a);
    auto b = parse_system_file(p);
    CHECK(same_structure(a, b));
    CHECK(print_system_file(b) == p);
  }
}

TEST_CASE("load errors carry codes and line numbers") {
  std::string msg;
  CHECK(code_of("indep t x\ndep u\neq u_t = u_xx +\n", &msg) == ErrorCode::Parse);
  CHECK(msg.rfind("line 3: ", 0) == 0);
  CHECK(code_of("indep t x\ndep u\neq u_t = q\n") == ErrorCode::UnknownSymbol);
  CHECK(code_of("indep t x\ndep u\neq u_t = u_xx\ncv F = u\n", &msg) == ErrorCode::ArityMismatch);
  CHECK(msg.rfind("line 4: ", 0) == 0);
  CHECK(code_of("indep t x\ndep u\neq u_t = u_xx\ndep w\n") == ErrorCode::Parse);
  CHECK(code_of("indep t x\ndep u\nfrobnicate\n") == ErrorCode::Parse);
  CHECK(code_of("indep t x\ndep u u\n") == ErrorCode::InvalidSystem);
  CHECK(code_of("indep t x\ndep u\neq u_t = u_xx\nnprime u_t v\n") == ErrorCode::Parse);
  CHECK(code_of("indep t x\ndep u\neq u_t = u_xx\npotential 2d v = u ; -u_x\npotential abelian w = u_x ; u\n") ==
        ErrorCode::InvalidSystem);
  CHECK(code_of("indep t x\ndep u\neq u_t = u_xx\npotential 2d v = u ; u_x\n", &msg) == ErrorCode::NotConserved);
  CHECK(code_of("indep t x\ndep u\neq u_t = u_xx\npotential magic v = u ; -u_x\n") == ErrorCode::Parse);
  CHECK(code_of("indep t x\ndep u\neq u_t = u_xx\nclaim\n") == ErrorCode::Parse);
  CHECK_THROWS_AS(load_system_file("/nonexistent/file.sys"), Error);
}
