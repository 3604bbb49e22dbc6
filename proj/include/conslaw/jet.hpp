#pragma once

#include <map>
#include <string>
#include <vector>

#include "conslaw/expr.hpp"

namespace conslaw {

using Weighting = std::map<std::string, int>;
using VectorFunction = std::vector<Expr>;

Expr total_derivative(const Expr& e, int i, const Context& ctx);
// D^alpha, composed in ascending direction order.
Expr total_derivative(const Expr& e, const Multiindex& alpha, const Context& ctx);
// (-D)^alpha.
Expr signed_total_derivative(const Expr& e, const Multiindex& alpha, const Context& ctx);

// Prolonged derivative of a covering: order-0 jets of a pseudo-potential v^s
// differentiate to fluxes.at(v^s)[i]. Higher-order pseudo-potential jets are rejected.
Expr covering_total_derivative(const Expr& e, int i, const Context& ctx,
                               const std::map<std::string, VectorFunction>& fluxes);

int weight_of(const Expr& e, const Weighting& w);

Expr divergence(const VectorFunction& F, const Context& ctx);

bool multi_leq(const Multiindex& a, const Multiindex& b);
Multiindex multi_sub(const Multiindex& a, const Multiindex& b);
Multiindex multi_add(const Multiindex& a, const Multiindex& b);
int multi_order(const Multiindex& a);
// Every multiindex gamma with 0 <= gamma <= bound, in graded order.
std::vector<Multiindex> multi_box(const Multiindex& bound);

}  // namespace conslaw
