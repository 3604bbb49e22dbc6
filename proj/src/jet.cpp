#include "conslaw/jet.hpp"

#include <algorithm>

namespace conslaw {

Expr total_derivative(const Expr& e, int i, const Context& ctx) {
  return derive(
      e,
      [&](const Atom& a) -> std::optional<Expr> {
        switch (a.kind()) {
          case AtomKind::Indep: return a.index() == i ? Expr(1) : Expr();
          case AtomKind::Jet: {
            Multiindex m = a.multi();
            m.at(static_cast<std::size_t>(i)) += 1;
            return Expr(Atom::jet(a.name(), m));
          }
          case AtomKind::Const:
          case AtomKind::Param: return Expr();
          default: return std::nullopt;
        }
      },
      ctx);
}

Expr total_derivative(const Expr& e, const Multiindex& alpha, const Context& ctx) {
  Expr r = e;
  for (std::size_t i = 0; i < alpha.size(); ++i)
    for (int k = 0; k < alpha[i]; ++k) r = total_derivative(r, static_cast<int>(i), ctx);
  return r;
}

Expr signed_total_derivative(const Expr& e, const Multiindex& alpha, const Context& ctx) {
  Expr r = total_derivative(e, alpha, ctx);
  return multi_order(alpha) % 2 ? -r : r;
}

Expr covering_total_derivative(const Expr& e, int i, const Context& ctx,
                               const std::map<std::string, VectorFunction>& fluxes) {
  return derive(
      e,
      [&](const Atom& a) -> std::optional<Expr> {
        switch (a.kind()) {
          case AtomKind::Indep: return a.index() == i ? Expr(1) : Expr();
          case AtomKind::Jet: {
            auto f = fluxes.find(a.name());
            if (f != fluxes.end()) {
              if (a.order() != 0)
                fail(ErrorCode::Unsupported, "prolonged derivative needs pseudo-potentials at order 0; reduce first");
              return f->second.at(static_cast<std::size_t>(i));
            }
            Multiindex m = a.multi();
            m.at(static_cast<std::size_t>(i)) += 1;
            return Expr(Atom::jet(a.name(), m));
          }
          case AtomKind::Const:
          case AtomKind::Param: return Expr();
          default: return std::nullopt;
        }
      },
      ctx);
}

int weight_of(const Expr& e, const Weighting& w) {
  int best = 0;
  for (const auto& a : all_atoms(e)) {
    if (a.kind() != AtomKind::Jet) continue;
    auto it = w.find(a.name());
    if (it == w.end()) fail(ErrorCode::UnknownSymbol, "no weight for dependent variable '" + a.name() + "'");
    best = std::max(best, it->second + a.order());
  }
  return best;
}

Expr divergence(const VectorFunction& F, const Context& ctx) {
  if (static_cast<int>(F.size()) != ctx.n())
    fail(ErrorCode::ArityMismatch, "vector function has " + std::to_string(F.size()) + " components, expected " +
                                       std::to_string(ctx.n()));
  Expr d;
  for (int i = 0; i < ctx.n(); ++i) d += total_derivative(F[static_cast<std::size_t>(i)], i, ctx);
  return d;
}

bool multi_leq(const Multiindex& a, const Multiindex& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] > b[i]) return false;
  return true;
}

Multiindex multi_sub(const Multiindex& a, const Multiindex& b) {
  Multiindex r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

Multiindex multi_add(const Multiindex& a, const Multiindex& b) {
  Multiindex r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

int multi_order(const Multiindex& a) {
  int s = 0;
  for (int x : a) s += x;
  return s;
}

std::vector<Multiindex> multi_box(const Multiindex& bound) {
  std::vector<Multiindex> out{Multiindex(bound.size(), 0)};
  for (std::size_t i = 0; i < bound.size(); ++i) {
    std::vector<Multiindex> next;
    for (const auto& m : out)
      for (int k = 0; k <= bound[i]; ++k) {
        Multiindex x = m;
        x[i] = k;
        next.push_back(x);
      }
    out = std::move(next);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Multiindex& a, const Multiindex& b) { return multi_order(a) < multi_order(b); });
  return out;
}

}  // namespace conslaw
