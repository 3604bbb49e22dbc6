#include "conslaw/diffsys.hpp"

#include <algorithm>

namespace conslaw {

namespace {

constexpr int kMaxDepth = 400;
constexpr int kMaxSteps = 20000;

}  // namespace

DiffSystem::DiffSystem(ContextPtr ctx, Weighting w) : ctx_(std::move(ctx)), weights_(std::move(w)) {}

void DiffSystem::set_context(ContextPtr ctx) {
  ctx_ = std::move(ctx);
  reset_cache();
}

int DiffSystem::add_equation(Equation eq) {
  if (eq.lead.kind() != AtomKind::Jet) fail(ErrorCode::InvalidSystem, "leading term must be a jet variable");
  if (!ctx_->has_dep(eq.lead.name()))
    fail(ErrorCode::InvalidSystem, "unknown dependent variable '" + eq.lead.name() + "'");
  eq.residual = eq.lhs - eq.rhs;
  Expr coeff = partial_diff(eq.residual, eq.lead, *ctx_);
  auto c = coeff.constant_value();
  if (!c || *c == 0)
    fail(ErrorCode::InvalidSystem, "equation " + eq.label + " is not linear in its leading derivative with a constant coefficient");
  eq.lead_coeff = *c;
  eq.solved = Expr(eq.lead) - scale(eq.residual, 1 / *c);
  if (!partial_diff(eq.solved, eq.lead, *ctx_).is_zero_form())
    fail(ErrorCode::InvalidSystem, "leading derivative of " + eq.label + " occurs inside a function argument");
  for (std::size_t i = 0; i < eqs_.size(); ++i)
    if (eqs_[i].lead == eq.lead)
      fail(ErrorCode::InvalidSystem, "two equations share the leading derivative of " + eq.label);
  int idx = static_cast<int>(eqs_.size());
  by_dep_[eq.lead.name()].push_back(idx);
  eqs_.push_back(std::move(eq));
  reset_cache();
  return idx;
}

void DiffSystem::set_minimal(int i, bool minimal, std::optional<Syzygy> syz) {
  eqs_.at(static_cast<std::size_t>(i)).minimal = minimal;
  eqs_.at(static_cast<std::size_t>(i)).syzygy = std::move(syz);
}

std::vector<int> DiffSystem::minimal_set() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < eqs_.size(); ++i)
    if (eqs_[i].minimal) out.push_back(static_cast<int>(i));
  return out;
}

std::optional<std::pair<int, Multiindex>> DiffSystem::rule_for(const Atom& jet) const {
  if (jet.kind() != AtomKind::Jet) return std::nullopt;
  auto it = by_dep_.find(jet.name());
  if (it == by_dep_.end()) return std::nullopt;
  int best = -1;
  for (int i : it->second) {
    const Equation& e = eqs_[static_cast<std::size_t>(i)];
    if (!multi_leq(e.lead.multi(), jet.multi())) continue;
    if (best < 0 || e.priority < eqs_[static_cast<std::size_t>(best)].priority) best = i;
  }
  if (best < 0) return std::nullopt;
  return std::make_pair(best, multi_sub(jet.multi(), eqs_[static_cast<std::size_t>(best)].lead.multi()));
}

Expr DiffSystem::normal_form(int eq, const Multiindex& gamma, int depth) const {
  if (depth > kMaxDepth) fail(ErrorCode::NonTermination, "reduction does not terminate; check the orientation of the system");
  auto key = std::make_pair(eq, gamma);
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->normal.find(key);
    if (it != cache_->normal.end()) return it->second;
  }
  Expr r;
  int k = -1;
  for (int i = static_cast<int>(gamma.size()) - 1; i >= 0; --i)
    if (gamma[static_cast<std::size_t>(i)] > 0) {
      k = i;
      break;
    }
  if (k < 0) {
    r = reduce_depth(eqs_[static_cast<std::size_t>(eq)].solved, depth + 1);
  } else {
    Multiindex g = gamma;
    g[static_cast<std::size_t>(k)] -= 1;
    r = reduce_depth(total_derivative(normal_form(eq, g, depth + 1), k, *ctx_), depth + 1);
  }
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->normal.emplace(key, r);
  return r;
}

Expr DiffSystem::reduce_depth(const Expr& e, int depth) const {
  Expr cur = e;
  for (int guard = 0; guard < kMaxDepth; ++guard) {
    std::map<Atom, Expr> bindings;
    for (const auto& a : all_atoms(cur)) {
      auto rule = rule_for(a);
      if (rule) bindings.emplace(a, normal_form(rule->first, rule->second, depth));
    }
    if (bindings.empty()) return cur;
    cur = substitute(cur, bindings);
  }
  fail(ErrorCode::NonTermination, "reduction does not reach a fixpoint");
}

Expr DiffSystem::reduce(const Expr& e) const { return reduce_depth(e, 0); }

Expr DiffSystem::prolonged_solved(int eq, const Multiindex& gamma) const {
  auto key = std::make_pair(eq, gamma);
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->solved.find(key);
    if (it != cache_->solved.end()) return it->second;
  }
  Expr r = total_derivative(eqs_[static_cast<std::size_t>(eq)].solved, gamma, *ctx_);
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->solved.emplace(key, r);
  return r;
}

Expr DiffSystem::prolonged_residual(int eq, const Multiindex& gamma) const {
  auto key = std::make_pair(eq, gamma);
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache_->residual.find(key);
    if (it != cache_->residual.end()) return it->second;
  }
  Expr r;
  int k = -1;
  for (int i = static_cast<int>(gamma.size()) - 1; i >= 0; --i)
    if (gamma[static_cast<std::size_t>(i)] > 0) {
      k = i;
      break;
    }
  if (k < 0) {
    r = eqs_[static_cast<std::size_t>(eq)].residual;
  } else {
    Multiindex g = gamma;
    g[static_cast<std::size_t>(k)] -= 1;
    r = total_derivative(prolonged_residual(eq, g), k, *ctx_);
  }
  std::lock_guard<std::mutex> lock(cache_->mu);
  cache_->residual.emplace(key, r);
  return r;
}

TrackedReduction DiffSystem::reduce_tracked(const Expr& e) const {
  TrackedReduction out;
  Expr cur = e;
  for (int step = 0; step < kMaxSteps; ++step) {
    std::optional<Atom> pick;
    for (const auto& a : top_atoms(cur)) {
      if (!reducible(a)) continue;
      if (!pick || a.order() >= pick->order()) pick = a;
    }
    if (!pick) {
      for (const auto& a : all_atoms(cur))
        if (reducible(a))
          fail(ErrorCode::Unsupported, "a reducible derivative occurs inside a function argument; tracked reduction needs polynomial dependence");
      out.remainder = cur;
      return out;
    }
    const Atom y = *pick;
    auto [eq, gamma] = *rule_for(y);
    Expr z = prolonged_solved(eq, gamma);

    std::map<int, std::vector<Expr::Term>> blocks;
    for (const auto& t : cur.terms()) blocks[t.first.power_of(y)].emplace_back(t.first.with_power(y, 0), t.second);
    if (blocks.begin()->first < 0)
      fail(ErrorCode::Unsupported, "negative power of a reducible derivative");
    Expr next, q;
    Expr ye(y);
    for (auto& [k, ts] : blocks) {
      Expr c = Expr::from_terms(std::move(ts));
      if (k == 0) {
        next += c;
        continue;
      }
      next += c * pow(z, k);
      Expr sum;
      for (int j = 0; j < k; ++j) sum += pow(ye, j) * pow(z, k - 1 - j);
      q += c * sum;
    }
    const Equation& E = eqs_[static_cast<std::size_t>(eq)];
    out.steps.push_back({scale(q, 1 / E.lead_coeff), eq, gamma});
    cur = next;
  }
  fail(ErrorCode::NonTermination, "tracked reduction exceeded its step budget");
}

}  // namespace conslaw
