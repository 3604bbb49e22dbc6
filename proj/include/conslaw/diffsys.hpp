#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "conslaw/expr.hpp"
#include "conslaw/jet.hpp"

namespace conslaw {

enum class EqRole { Base, Potential };

// mult * D_dir(L^eq); dir < 0 means no derivative.
struct SyzygyTerm {
  Expr mult;
  int dir = -1;
  int eq = 0;
};
using Syzygy = std::vector<SyzygyTerm>;

struct Equation {
  Expr lhs;
  Expr rhs;
  Atom lead = Atom::indep(0);
  std::string label;
  EqRole role = EqRole::Base;
  // Among equations whose leading jets both divide a jet, the lower priority is used.
  int priority = 0;
  int level = 0;
  std::string potential;
  int direction = -1;

  // Filled in by DiffSystem::add_equation.
  Expr residual;         // lhs - rhs
  Rational lead_coeff;   // residual = lead_coeff * (lead - solved)
  Expr solved;
  bool minimal = true;
  std::optional<Syzygy> syzygy;  // identity L^this = sum of terms, for dropped equations
};

struct TrackedStep {
  Expr multiplier;
  int eq = 0;
  Multiindex gamma;
};

// e = sum multiplier * D^gamma(L^eq) + remainder, exactly.
struct TrackedReduction {
  std::vector<TrackedStep> steps;
  Expr remainder;
};

class DiffSystem {
 public:
  DiffSystem() = default;
  DiffSystem(ContextPtr ctx, Weighting w);

  const Context& ctx() const { return *ctx_; }
  ContextPtr ctx_ptr() const { return ctx_; }
  void set_context(ContextPtr ctx);
  const Weighting& weights() const { return weights_; }
  void set_weight(const std::string& dep, int w) { weights_[dep] = w; }

  // Validates orientation (lead linear with a rational coefficient) and appends.
  int add_equation(Equation eq);
  const std::vector<Equation>& equations() const { return eqs_; }
  std::size_t size() const { return eqs_.size(); }
  void set_minimal(int i, bool minimal, std::optional<Syzygy> syz = std::nullopt);

  std::vector<int> minimal_set() const;
  std::vector<std::string> dependents() const { return ctx_->deps; }

  std::optional<std::pair<int, Multiindex>> rule_for(const Atom& jet) const;
  bool reducible(const Atom& jet) const { return rule_for(jet).has_value(); }

  Expr reduce(const Expr& e) const;
  bool vanishes_on_solutions(const Expr& e) const { return is_zero(reduce(e)); }
  TrackedReduction reduce_tracked(const Expr& e) const;

  // Raw prolongations D^gamma(solved) and D^gamma(residual), cached.
  Expr prolonged_solved(int eq, const Multiindex& gamma) const;
  Expr prolonged_residual(int eq, const Multiindex& gamma) const;

 private:
  struct Cache {
    std::mutex mu;
    std::map<std::pair<int, Multiindex>, Expr> normal;
    std::map<std::pair<int, Multiindex>, Expr> solved;
    std::map<std::pair<int, Multiindex>, Expr> residual;
  };

  Expr normal_form(int eq, const Multiindex& gamma, int depth) const;
  Expr reduce_depth(const Expr& e, int depth) const;
  void reset_cache() { cache_ = std::make_shared<Cache>(); }

  ContextPtr ctx_;
  Weighting weights_;
  std::vector<Equation> eqs_;
  std::map<std::string, std::vector<int>> by_dep_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

}  // namespace conslaw
