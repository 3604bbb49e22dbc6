#include "conslaw/conslaw.hpp"

#include <algorithm>
#include <map>
#include <tuple>

namespace conslaw {

namespace {

void require_arity(const VectorFunction& F, const DiffSystem& S) {
  if (static_cast<int>(F.size()) != S.ctx().n())
    fail(ErrorCode::ArityMismatch, "conserved vector needs " + std::to_string(S.ctx().n()) + " components");
}

constexpr int kMaxWork = 100000;

}  // namespace

bool verify_conserved_vector(const VectorFunction& F, const DiffSystem& S) {
  require_arity(F, S);
  return S.vanishes_on_solutions(divergence(F, S.ctx()));
}

Expr characteristic_defect(const std::vector<Expr>& lambda, const std::vector<int>& eqs,
                           const VectorFunction& F, const DiffSystem& S) {
  require_arity(F, S);
  if (lambda.size() != eqs.size())
    fail(ErrorCode::ArityMismatch, "characteristic has " + std::to_string(lambda.size()) + " components, expected " +
                                       std::to_string(eqs.size()));
  Expr d = divergence(F, S.ctx());
  for (std::size_t k = 0; k < eqs.size(); ++k)
    d -= lambda[k] * S.equations().at(static_cast<std::size_t>(eqs[k])).residual;
  return d;
}

bool verify_characteristic(const std::vector<Expr>& lambda, const VectorFunction& F, const DiffSystem& S) {
  return is_zero(characteristic_defect(lambda, S.minimal_set(), F, S));
}

bool verify_characteristic(const Characteristic& lambda, const VectorFunction& F, const DiffSystem& S) {
  return is_zero(characteristic_defect(lambda.components, lambda.equations, F, S));
}

Extraction extract_characteristic(const VectorFunction& F, const DiffSystem& S) {
  return extract_characteristic(F, S, S.minimal_set());
}

Extraction extract_characteristic(const VectorFunction& F, const DiffSystem& S, const std::vector<int>& allowed) {
  require_arity(F, S);
  const Context& ctx = S.ctx();
  const int n = ctx.n();
  auto tracked = S.reduce_tracked(divergence(F, ctx));
  if (!is_zero(tracked.remainder))
    fail(ErrorCode::NotConserved, "the divergence does not vanish on solutions");

  // Pending multipliers Q of D^gamma(L^eq), processed from the highest order down.
  using Key = std::tuple<int, int, Multiindex>;  // (-|gamma|, eq, gamma)
  std::map<Key, Expr> work;
  auto push = [&](int eq, const Multiindex& g, const Expr& q) {
    if (q.is_zero_form()) return;
    work[Key(-multi_order(g), eq, g)] += q;
  };
  for (const auto& st : tracked.steps) push(st.eq, st.gamma, st.multiplier);

  std::map<int, Expr> lambda;
  VectorFunction H(static_cast<std::size_t>(n));
  for (int guard = 0; !work.empty(); ++guard) {
    if (guard > kMaxWork) fail(ErrorCode::NonTermination, "integration by parts did not terminate");
    auto it = work.begin();
    auto [neg, eq, g] = it->first;
    Expr q = it->second;
    work.erase(it);
    if (q.is_zero_form()) continue;
    if (neg < 0) {
      int i = 0;
      while (g[static_cast<std::size_t>(i)] == 0) ++i;
      Multiindex rest = g;
      rest[static_cast<std::size_t>(i)] -= 1;
      // Q D_i R = D_i(Q R) - (D_i Q) R
      H[static_cast<std::size_t>(i)] += q * S.prolonged_residual(eq, rest);
      push(eq, rest, -total_derivative(q, i, ctx));
      continue;
    }
    if (std::find(allowed.begin(), allowed.end(), eq) != allowed.end()) {
      lambda[eq] += q;
      continue;
    }
    const auto& syz = S.equations().at(static_cast<std::size_t>(eq)).syzygy;
    if (!syz)
      fail(ErrorCode::Unsupported, "equation " + S.equations()[static_cast<std::size_t>(eq)].label +
                                       " is outside the requested set and has no known syzygy");
    for (const auto& term : *syz) {
      Multiindex d = ctx.zero_index();
      if (term.dir >= 0) d[static_cast<std::size_t>(term.dir)] = 1;
      push(term.eq, d, q * term.mult);
    }
  }

  Extraction out;
  out.lambda.equations = allowed;
  for (int eq : allowed) {
    auto it = lambda.find(eq);
    out.lambda.components.push_back(it == lambda.end() ? Expr() : it->second);
  }
  out.correction = H;
  out.F_tilde = F;
  for (int i = 0; i < n; ++i) out.F_tilde[static_cast<std::size_t>(i)] -= H[static_cast<std::size_t>(i)];
  if (!verify_characteristic(out.lambda, out.F_tilde, S))
    fail(ErrorCode::Internal, "extracted characteristic failed its identity check");
  return out;
}

bool cosymmetry_test(const std::vector<Expr>& lambda, const DiffSystem& S) {
  std::vector<Expr> L;
  for (int k : S.minimal_set()) L.push_back(S.equations()[static_cast<std::size_t>(k)].residual);
  for (const auto& r : frechet(L, lambda, true, S.ctx()))
    if (!S.vanishes_on_solutions(r)) return false;
  return true;
}

bool is_trivial_characteristic(const std::vector<Expr>& lambda, const DiffSystem& S) {
  return std::all_of(lambda.begin(), lambda.end(), [&](const Expr& e) { return S.vanishes_on_solutions(e); });
}

bool equivalent_conserved_vectors(const VectorFunction& F1, const VectorFunction& F2, const DiffSystem& S) {
  require_arity(F1, S);
  require_arity(F2, S);
  VectorFunction d(F1.size());
  for (std::size_t i = 0; i < F1.size(); ++i) d[i] = F1[i] - F2[i];
  if (!verify_conserved_vector(d, S)) return false;
  return is_trivial_characteristic(extract_characteristic(d, S).lambda.components, S);
}

}  // namespace conslaw
