#pragma once

#include <memory>
#include <string>

#include "conslaw/diffsys.hpp"
#include "conslaw/expr.hpp"
#include "conslaw/sysfile.hpp"
#include "conslaw/text.hpp"

namespace testing {

// t, x; u, v; eps; A(w), IntA(w) with d/w = A(w); h(t, x) with h_t -> -h_xx.
inline std::shared_ptr<conslaw::Context> basic_context() {
  using namespace conslaw;
  auto ctx = std::make_shared<Context>();
  ctx->indep = {"t", "x"};
  ctx->deps = {"u", "v"};
  ctx->consts = {"eps"};
  FuncDecl a{"A", {"w"}, {std::nullopt}, {}, false};
  ctx->funcs["A"] = a;
  FuncDecl ia{"IntA", {"w"}, {Expr(Atom::func("A", {0}, {Expr(Atom::param(0))}))}, {}, false};
  ctx->funcs["IntA"] = ia;
  FuncDecl h{"h", {"t", "x"}, {std::nullopt, std::nullopt}, {}, false};
  ctx->funcs["h"] = h;
  ctx->funcs["h"].constraints.push_back(
      {{1, 0}, -Expr(Atom::func("h", {0, 2}, {Expr(Atom::param(0)), Expr(Atom::param(1))}))});
  return ctx;
}

inline conslaw::Expr P(const std::string& s, const conslaw::Context& ctx) { return conslaw::parse_expression(s, ctx); }

// Single evolution equation u_t = rhs over ctx.
inline conslaw::DiffSystem evolution(const std::shared_ptr<conslaw::Context>& ctx, const std::string& rhs) {
  using namespace conslaw;
  DiffSystem S(ctx, {{"u", 0}, {"v", 0}});
  Equation eq;
  eq.lhs = P("u_t", *ctx);
  eq.rhs = P(rhs, *ctx);
  eq.lead = ctx->jet("u", {1, 0});
  eq.label = "u_t";
  S.add_equation(eq);
  return S;
}

inline conslaw::SystemFile load(const std::string& text) { return conslaw::parse_system_file(text); }

// Componentwise exact equality.
inline bool same(const conslaw::VectorFunction& a, const conslaw::VectorFunction& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!conslaw::equal(a[i], b[i])) return false;
  return true;
}

}  // namespace testing
