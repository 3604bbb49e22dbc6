#pragma once

#include <string>
#include <vector>

#include "conslaw/expr.hpp"
#include "conslaw/jet.hpp"

namespace conslaw {

// Parses an expression. `params` names the Param atoms in scope (function rule bodies).
//   jets:       u, u_t, u_xx, u_{x:2,t:1}
//   functions:  A(u), A_w(u), h (declared defaults), h_{x:2}(t, x)
//   builtins:   exp(e), D_x(e) (total derivative)
//   operators:  + - * / ^ with integer exponents
Expr parse_expression(const std::string& text, const Context& ctx,
                      const std::vector<std::string>& params = {});

// Parses a ';'-separated tuple of expressions.
VectorFunction parse_tuple(const std::string& text, const Context& ctx);

std::string to_string(const Expr& e, const Context& ctx, const std::vector<std::string>& params = {});
std::string to_string(const Atom& a, const Context& ctx, const std::vector<std::string>& params = {});
std::string to_string(const VectorFunction& v, const Context& ctx);

}  // namespace conslaw
