#include "conslaw/variational.hpp"

#include <algorithm>

namespace conslaw {

namespace {

Rational binomial(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return Rational(r);
}

Rational multi_binomial(const Multiindex& beta, const Multiindex& alpha) {
  Rational r = 1;
  for (std::size_t i = 0; i < beta.size(); ++i) r *= binomial(beta[i], alpha[i]);
  return r;
}

Rational factorial(int n) {
  mpz_class r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return Rational(r);
}

bool is_jet_term(const Monomial& m) {
  for (const auto& f : m.factors)
    if (f.first.is_jet()) return true;
  return false;
}

int jet_degree(const Monomial& m) {
  int d = 0;
  for (const auto& f : m.factors)
    if (f.first.is_jet()) d += f.second;
  return d;
}

// Rejects anything that is not a polynomial in the jet variables.
void require_jet_polynomial(const Expr& e, const char* what) {
  for (const auto& [m, c] : e.terms()) {
    for (const auto& [a, k] : m.factors) {
      if (a.is_jet() && k < 0)
        fail(ErrorCode::Unsupported, std::string(what) + " needs polynomial dependence on jet variables (negative power)");
      if (a.composite() && has_jets(Expr(a)))
        fail(ErrorCode::Unsupported, std::string(what) + " needs polynomial dependence on jet variables (function of a jet)");
    }
  }
}

void split_jet_free(const Expr& e, Expr& jet_free, Expr& jet_part) {
  std::vector<Expr::Term> a, b;
  for (const auto& t : e.terms()) (is_jet_term(t.first) ? b : a).push_back(t);
  jet_free = Expr::from_terms(std::move(a));
  jet_part = Expr::from_terms(std::move(b));
}

// Integral over kappa in [0, 1] of e with every jet scaled by kappa.
Expr kappa_integral(const Expr& e) {
  std::vector<Expr::Term> out;
  for (const auto& [m, c] : e.terms()) out.emplace_back(m, c / (jet_degree(m) + 1));
  return Expr::from_terms(std::move(out));
}

Expr neg_derivative_power(const Expr& e, int i, int k, const Context& ctx) {
  Expr r = e;
  for (int j = 0; j < k; ++j) r = -total_derivative(r, i, ctx);
  return r;
}

// Homotopy in the single direction i: jets u^a_{gamma + k delta_i} with gamma_i = 0 form
// one family per (a, gamma). Assumes e is a jet polynomial without jet-free terms.
Expr homotopy_1d(const Expr& e, int i, const Context& ctx) {
  Expr out;
  for (const auto& dep : ctx.deps) {
    std::map<Multiindex, int> families;
    for (const auto& m : jets_of(e, dep)) {
      Multiindex g = m;
      int k = g[static_cast<std::size_t>(i)];
      g[static_cast<std::size_t>(i)] = 0;
      auto& top = families[g];
      top = std::max(top, k);
    }
    for (const auto& [g, K] : families) {
      auto w = [&](int k) {
        Multiindex m = g;
        m[static_cast<std::size_t>(i)] = k;
        return ctx.jet(dep, m);
      };
      std::vector<Expr> partials;
      for (int k = 0; k <= K; ++k) partials.push_back(partial_diff(e, w(k), ctx));
      for (int j = 0; j < K; ++j) {
        int m = j + 1;
        Expr E;
        for (int k = m; k <= K; ++k) {
          if (partials[static_cast<std::size_t>(k)].is_zero_form()) continue;
          E += scale(neg_derivative_power(partials[static_cast<std::size_t>(k)], i, k - m, ctx), binomial(k, m));
        }
        if (E.is_zero_form()) continue;
        Expr piece = Expr(w(0)) * kappa_integral(E);
        for (int r = 0; r < j; ++r) piece = total_derivative(piece, i, ctx);
        out += piece;
      }
    }
  }
  return out;
}

bool free_of(const Expr& e, int i, const Context& ctx) { return total_derivative(e, i, ctx).is_zero_form(); }

// Returns c with R = c * d when c is a single term free of x_i.
std::optional<Expr> proportional(const Expr& R, const Expr& d, int i, const Context& ctx) {
  if (R.is_zero_form() || d.is_zero_form()) return std::nullopt;
  Expr c;
  try {
    c = divide(Expr(R.terms().front().first, R.terms().front().second),
               Expr(d.terms().front().first, d.terms().front().second));
  } catch (const Error&) {
    return std::nullopt;
  }
  if (!free_of(c, i, ctx)) return std::nullopt;
  if (!equal(R, c * d)) return std::nullopt;
  return c;
}

[[noreturn]] void no_rule(const Expr& e) {
  (void)e;
  fail(ErrorCode::NoRuleApplies, "no antiderivative rule applies");
}

Expr integrate_jet_free(const Expr& e, int i, const Context& ctx) {
  Expr out;
  std::vector<Expr::Term> rest = e.terms();
  const Atom xi = Atom::indep(i);

  // f' f^n through reciprocal atoms and f' exp(f) for non-linear exponents.
  for (const auto& a : top_atoms(e)) {
    if (a.kind() != AtomKind::Inv && a.kind() != AtomKind::Exp) continue;
    if (free_of(Expr(a), i, ctx)) continue;
    Expr exponent_slope;
    if (a.kind() == AtomKind::Exp) {
      exponent_slope = scale(partial_diff(a.prim(), xi, ctx), frac(1, a.den()));
      if (exponent_slope.is_constant()) continue;  // handled by the x^k exp(lambda x) rule
    }
    std::map<int, std::vector<Expr::Term>> blocks;
    for (const auto& t : rest) {
      int k = t.first.power_of(a);
      if (k != 0) blocks[k].emplace_back(t.first.with_power(a, 0), t.second);
    }
    for (auto& [k, ts] : blocks) {
      Expr R = Expr::from_terms(ts);
      std::optional<Expr> c;
      Expr antideriv;
      if (a.kind() == AtomKind::Inv) {
        if (k < 2) continue;
        c = proportional(R, total_derivative(a.inner(), i, ctx), i, ctx);
        if (c) antideriv = scale(*c * Expr(a, k - 1), frac(1, 1 - k));
      } else {
        c = proportional(R, scale(total_derivative(a.prim(), i, ctx), frac(k, a.den())), i, ctx);
        if (c) antideriv = *c * Expr(a, k);
      }
      if (!c) continue;
      out += antideriv;
      std::vector<Expr::Term> keep;
      for (const auto& t : rest)
        if (t.first.power_of(a) != k) keep.push_back(t);
      rest = std::move(keep);
    }
  }

  for (const auto& [m, c] : rest) {
    int p = m.power_of(xi);
    Rational lambda = 0;
    for (const auto& [a, k] : m.factors) {
      if (a == xi) continue;
      if (a.kind() == AtomKind::Exp) {
        Expr slope = scale(partial_diff(a.prim(), xi, ctx), frac(k, a.den()));
        auto s = slope.constant_value();
        if (!s) no_rule(Expr(m, c));
        lambda += *s;
        continue;
      }
      if (!free_of(Expr(a), i, ctx)) no_rule(Expr(m, c));
    }
    Expr base(m.with_power(xi, 0), c);
    if (lambda == 0) {
      if (p == -1) no_rule(Expr(m, c));
      out += scale(base * pow(Expr(xi), p + 1), frac(1, p + 1));
      continue;
    }
    if (p < 0) no_rule(Expr(m, c));
    // x^p e^(lambda x) integrates to e^(lambda x) sum_j (-1)^j p!/(p-j)! x^(p-j) / lambda^(j+1).
    Expr poly;
    Rational lp = lambda;
    for (int j = 0; j <= p; ++j) {
      Rational coeff = factorial(p) / factorial(p - j) / lp;
      if (j % 2) coeff = -coeff;
      poly += scale(pow(Expr(xi), p - j), coeff);
      lp *= lambda;
    }
    out += base * poly;
  }
  return out;
}

}  // namespace

std::set<Multiindex> jets_of(const Expr& e, const std::string& dep) {
  std::set<Multiindex> out;
  for (const auto& a : all_atoms(e))
    if (a.is_jet() && a.name() == dep) out.insert(a.multi());
  return out;
}

Expr euler(const Expr& e, const std::string& dep, const Context& ctx) {
  Expr out;
  for (const auto& alpha : jets_of(e, dep)) {
    Expr p = partial_diff(e, ctx.jet(dep, alpha), ctx);
    if (!p.is_zero_form()) out += signed_total_derivative(p, alpha, ctx);
  }
  return out;
}

Expr higher_euler(const Expr& e, const std::string& dep, const Multiindex& alpha, const Context& ctx) {
  Expr out;
  for (const auto& beta : jets_of(e, dep)) {
    if (!multi_leq(alpha, beta)) continue;
    Expr p = partial_diff(e, ctx.jet(dep, beta), ctx);
    if (p.is_zero_form()) continue;
    out += scale(signed_total_derivative(p, multi_sub(beta, alpha), ctx), multi_binomial(beta, alpha));
  }
  return out;
}

std::vector<Expr> frechet(const std::vector<Expr>& L, const std::vector<Expr>& w, bool adjoint,
                          const Context& ctx) {
  if (adjoint) {
    if (w.size() != L.size())
      fail(ErrorCode::ArityMismatch, "adjoint linearization needs one multiplier per equation");
    std::vector<Expr> out;
    for (const auto& dep : ctx.deps) {
      Expr r;
      for (std::size_t mu = 0; mu < L.size(); ++mu)
        for (const auto& alpha : jets_of(L[mu], dep)) {
          Expr p = partial_diff(L[mu], ctx.jet(dep, alpha), ctx);
          if (!p.is_zero_form()) r += signed_total_derivative(p * w[mu], alpha, ctx);
        }
      out.push_back(r);
    }
    return out;
  }
  if (w.size() != ctx.deps.size())
    fail(ErrorCode::ArityMismatch, "linearization needs one component per dependent variable");
  std::vector<Expr> out;
  for (const auto& Lmu : L) {
    Expr r;
    for (std::size_t a = 0; a < ctx.deps.size(); ++a)
      for (const auto& alpha : jets_of(Lmu, ctx.deps[a])) {
        Expr p = partial_diff(Lmu, ctx.jet(ctx.deps[a], alpha), ctx);
        if (!p.is_zero_form()) r += p * total_derivative(w[a], alpha, ctx);
      }
    out.push_back(r);
  }
  return out;
}

bool is_total_divergence(const Expr& e, const Context& ctx) {
  for (const auto& dep : ctx.deps)
    if (!is_zero(euler(e, dep, ctx))) return false;
  return true;
}

VectorFunction homotopy_divergence(const Expr& H, const Context& ctx) {
  const int n = ctx.n();
  VectorFunction F(static_cast<std::size_t>(n));
  if (H.is_zero_form()) return F;
  require_jet_polynomial(H, "homotopy inversion");
  if (!is_total_divergence(H, ctx)) fail(ErrorCode::NotADivergence, "expression is not a total divergence");

  Expr H0, Hj;
  split_jet_free(H, H0, Hj);
  for (const auto& dep : ctx.deps) {
    auto js = jets_of(Hj, dep);
    if (js.empty()) continue;
    Multiindex bound = ctx.zero_index();
    for (const auto& m : js)
      for (int i = 0; i < n; ++i) bound[static_cast<std::size_t>(i)] = std::max(bound[static_cast<std::size_t>(i)], m[static_cast<std::size_t>(i)]);
    const Expr u(ctx.jet(dep));
    for (int i = 0; i < n; ++i) {
      for (const auto& alpha : multi_box(bound)) {
        Multiindex gamma = multi_add(alpha, ctx.delta(i));
        if (!multi_leq(gamma, bound)) continue;
        Expr K = higher_euler(Hj, dep, gamma, ctx);
        if (K.is_zero_form()) continue;
        Rational w = frac(alpha[static_cast<std::size_t>(i)] + 1, multi_order(alpha) + 1);
        F[static_cast<std::size_t>(i)] += scale(total_derivative(u * kappa_integral(K), alpha, ctx), w);
      }
    }
  }

  for (const auto& [m, c] : H0.terms()) {
    bool laurent = true;
    int deg = 0;
    for (const auto& [a, k] : m.factors) {
      if (a.kind() == AtomKind::Indep) deg += k;
      else if (a.kind() != AtomKind::Const) laurent = false;
    }
    Expr term(m, c);
    if (laurent && deg + n != 0) {
      for (int i = 0; i < n; ++i)
        F[static_cast<std::size_t>(i)] += scale(term * Expr(Atom::indep(i)), frac(1, deg + n));
      continue;
    }
    bool done = false;
    for (int i = n - 1; i >= 0 && !done; --i) {
      try {
        F[static_cast<std::size_t>(i)] += integrate_jet_free(term, i, ctx);
        done = true;
      } catch (const Error& err) {
        if (err.code() != ErrorCode::NoRuleApplies) throw;
      }
    }
    if (!done) fail(ErrorCode::NoRuleApplies, "no antiderivative rule applies to a jet-free term");
  }
  if (!equal(divergence(F, ctx), H)) fail(ErrorCode::Internal, "homotopy result failed its divergence check");
  return F;
}

Expr integrate_x(const Expr& e, int i, const Context& ctx) {
  if (i < 0 || i >= ctx.n()) fail(ErrorCode::ArityMismatch, "direction out of range");
  require_jet_polynomial(e, "integration");
  Expr e0, ej;
  split_jet_free(e, e0, ej);
  Expr P;
  if (!ej.is_zero_form()) P += homotopy_1d(ej, i, ctx);
  if (!e0.is_zero_form()) P += integrate_jet_free(e0, i, ctx);
  if (!equal(total_derivative(P, i, ctx), e))
    fail(ErrorCode::NoRuleApplies, "expression is not an exact derivative in direction " + ctx.indep[static_cast<std::size_t>(i)]);
  return P;
}

Expr solve_null_divergence_2d(const Expr& alpha, const Expr& beta, const DiffSystem& S) {
  const Context& ctx = S.ctx();
  if (ctx.n() != 2) fail(ErrorCode::Unsupported, "null-divergence potentials are implemented for two independent variables");
  if (!S.vanishes_on_solutions(total_derivative(alpha, 0, ctx) + total_derivative(beta, 1, ctx)))
    fail(ErrorCode::NotNullDivergence, "D_t alpha + D_x beta does not vanish on solutions");
  Expr phi = integrate_x(alpha, 1, ctx);
  Expr r = S.reduce(beta + total_derivative(phi, 0, ctx));
  if (r.is_zero_form()) return phi;
  if (has_jets(r) || !free_of(r, 1, ctx))
    fail(ErrorCode::NoRuleApplies, "the t-remainder of the potential is not a function of t alone");
  return phi - integrate_x(r, 0, ctx);
}

}  // namespace conslaw
