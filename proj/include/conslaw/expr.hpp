#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "conslaw/errors.hpp"

namespace conslaw {

using Rational = mpq_class;
using Multiindex = std::vector<int>;

// Canonical n/d; mpq_class(n, d) alone does not normalize.
inline Rational frac(long n, long d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

class Expr;
class Context;
struct AtomNode;

// Order of the enumerators is part of the canonical term order.
enum class AtomKind : std::uint8_t { Indep, Const, Param, Jet, Func, Exp, Inv };

class Atom {
 public:
  static Atom indep(int i);
  static Atom constant(const std::string& name);
  static Atom param(int k);
  static Atom jet(const std::string& dep, const Multiindex& alpha);
  // Raw function atom; Context::make_func applies derivative and constraint rules.
  static Atom func(const std::string& name, const Multiindex& derivs, const std::vector<Expr>& args);
  // Exponential with exponent prim/den, prim primitive (see exp_expr).
  static Atom exp_atom(const Expr& prim, long den);
  // Reciprocal of a jet-free sum with primitive content.
  static Atom inv_atom(const Expr& base);

  AtomKind kind() const;
  int index() const;
  const std::string& name() const;
  const Multiindex& multi() const;
  const std::vector<Expr>& args() const;
  const Expr& inner() const;
  const Expr& prim() const;
  long den() const;
  int order() const;
  bool composite() const { return kind() >= AtomKind::Func; }
  bool is_jet() const { return kind() == AtomKind::Jet; }

  friend int compare(const Atom& a, const Atom& b);
  friend bool operator==(const Atom& a, const Atom& b) { return compare(a, b) == 0; }
  friend bool operator!=(const Atom& a, const Atom& b) { return compare(a, b) != 0; }
  friend bool operator<(const Atom& a, const Atom& b) { return compare(a, b) < 0; }

 private:
  explicit Atom(std::shared_ptr<const AtomNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const AtomNode> node_;
};

using Factor = std::pair<Atom, int>;

struct Monomial {
  std::vector<Factor> factors;  // sorted by atom, nonzero exponents, no repeats

  int degree() const;
  int power_of(const Atom& a) const;
  Monomial with_power(const Atom& a, int power) const;
  bool empty() const { return factors.empty(); }
};

int compare(const Monomial& a, const Monomial& b);
inline bool operator<(const Monomial& a, const Monomial& b) { return compare(a, b) < 0; }
inline bool operator==(const Monomial& a, const Monomial& b) { return compare(a, b) == 0; }

Monomial mul(const Monomial& a, const Monomial& b);

class Expr {
 public:
  using Term = std::pair<Monomial, Rational>;

  Expr() = default;
  Expr(int v);  // NOLINT(google-explicit-constructor)
  Expr(long v);  // NOLINT(google-explicit-constructor)
  Expr(const Rational& v);  // NOLINT(google-explicit-constructor)
  explicit Expr(const Atom& a, int power = 1);
  Expr(const Monomial& m, const Rational& c);

  // Sorts and merges like terms; drops zero coefficients. Does not cancel reciprocals.
  static Expr from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero_form() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  std::optional<Rational> constant_value() const;
  bool is_constant() const { return constant_value().has_value(); }

 private:
  std::vector<Term> terms_;
};

int compare(const Expr& a, const Expr& b);
inline bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }
inline bool operator!=(const Expr& a, const Expr& b) { return compare(a, b) != 0; }
inline bool operator<(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr operator*(const Expr& a, const Expr& b);
Expr& operator+=(Expr& a, const Expr& b);
Expr& operator-=(Expr& a, const Expr& b);
Expr& operator*=(Expr& a, const Expr& b);
Expr scale(const Expr& e, const Rational& c);
Expr pow(const Expr& e, long k);
Expr exp_expr(const Expr& exponent);
// Exact quotient by a rational constant or an invertible expression.
Expr divide(const Expr& a, const Expr& b);

// Identity test: clears composite reciprocals before comparing with zero.
bool is_zero(const Expr& e);
inline bool equal(const Expr& a, const Expr& b) { return is_zero(a - b); }

// Atoms appearing at the top level of terms.
std::set<Atom> top_atoms(const Expr& e);
// Atoms appearing anywhere, including inside function arguments, exponents and bases.
std::set<Atom> all_atoms(const Expr& e);
bool has_jets(const Expr& e);
bool depends_on_dep(const Expr& e, const std::string& dep);

Expr substitute(const Expr& e, const std::map<Atom, Expr>& bindings);
// Replaces a function symbol f by an expression in its parameters (Param atoms).
Expr substitute_function(const Expr& e, const std::string& name, const Expr& replacement,
                         const Context& ctx);

// Generic derivation: leaf returns the derivative of an atom, or nullopt to recurse
// into composite atoms by the chain rule.
using LeafRule = std::function<std::optional<Expr>(const Atom&)>;
Expr derive(const Expr& e, const LeafRule& leaf, const Context& ctx);

Expr partial_diff(const Expr& e, const Atom& a, const Context& ctx);

Rational eval_rational(const Expr& e, const std::map<Atom, Rational>& point);

// Content c (sign of the first term) with e = c * primitive.
Rational content(const Expr& e);

struct FuncConstraint {
  Multiindex pattern;
  Expr replacement;  // in Param atoms
};

struct FuncDecl {
  std::string name;
  std::vector<std::string> params;
  std::vector<std::optional<Expr>> slot_rules;  // d f / d param_k, in Param atoms
  std::vector<FuncConstraint> constraints;
  bool generic = false;
};

class Context {
 public:
  std::vector<std::string> indep;
  std::vector<std::string> deps;
  std::vector<std::string> consts;
  std::map<std::string, FuncDecl> funcs;

  int n() const { return static_cast<int>(indep.size()); }
  int indep_index(const std::string& name) const;
  bool has_dep(const std::string& name) const;
  bool has_const(const std::string& name) const;
  bool has_func(const std::string& name) const { return funcs.count(name) != 0; }
  const FuncDecl& func(const std::string& name) const;

  Expr make_func(const std::string& name, const Multiindex& derivs, const std::vector<Expr>& args) const;
  Expr slot_derivative(const Atom& f, int k) const;

  Atom jet(const std::string& dep, const Multiindex& alpha) const { return Atom::jet(dep, alpha); }
  Atom jet(const std::string& dep) const { return Atom::jet(dep, Multiindex(indep.size(), 0)); }
  Multiindex delta(int i) const;
  Multiindex zero_index() const { return Multiindex(indep.size(), 0); }
};

using ContextPtr = std::shared_ptr<const Context>;

struct AtomNode {
  AtomKind kind = AtomKind::Indep;
  int index = 0;
  std::string name;
  Multiindex multi;
  std::vector<Expr> args;
  Expr inner;
  Expr prim;
  long den = 1;
  int order = 0;
};

}  // namespace conslaw
