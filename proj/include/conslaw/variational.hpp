#pragma once

#include <set>
#include <string>
#include <vector>

#include "conslaw/diffsys.hpp"
#include "conslaw/expr.hpp"
#include "conslaw/jet.hpp"

namespace conslaw {

// Multiindices of the jets of `dep` occurring anywhere in e.
std::set<Multiindex> jets_of(const Expr& e, const std::string& dep);

// E_a(e) = sum over alpha of (-D)^alpha (de / du^a_alpha).
Expr euler(const Expr& e, const std::string& dep, const Context& ctx);

// E_a^alpha(e) = sum over beta >= alpha of C(beta, alpha) (-D)^(beta - alpha) (de / du^a_beta).
Expr higher_euler(const Expr& e, const std::string& dep, const Multiindex& alpha, const Context& ctx);

// Direct mode: D_L(w)^mu = sum dL^mu/du^a_alpha D^alpha w^a, w indexed by dependent variable.
// Adjoint mode: D_L^*(w)_a = sum (-D)^alpha (dL^mu/du^a_alpha w^mu), w indexed by equation.
std::vector<Expr> frechet(const std::vector<Expr>& L, const std::vector<Expr>& w, bool adjoint,
                          const Context& ctx);

bool is_total_divergence(const Expr& e, const Context& ctx);

// F with Div F = H exactly. H must be polynomial in the jet variables.
VectorFunction homotopy_divergence(const Expr& H, const Context& ctx);

// P with D_i P = e exactly. Jet-free parts use a rule table (x^k exp(lambda x),
// f' f^n through reciprocal atoms, f' exp(f)); jet parts use the one-dimensional homotopy.
Expr integrate_x(const Expr& e, int i, const Context& ctx);

// Phi with D_x Phi = alpha and D_t Phi = -beta on solutions of S (t is the first
// independent variable, x the second). The additive constant is 0.
Expr solve_null_divergence_2d(const Expr& alpha, const Expr& beta, const DiffSystem& S);

}  // namespace conslaw
