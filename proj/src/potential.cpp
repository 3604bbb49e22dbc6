#include "conslaw/potential.hpp"

#include <algorithm>
#include <set>

#include "conslaw/text.hpp"

namespace conslaw {

const char* kind_name(PotentialKind k) {
  switch (k) {
    case PotentialKind::TwoDim: return "2d";
    case PotentialKind::Abelian: return "abelian";
    case PotentialKind::Standard: return "standard";
    case PotentialKind::Covering: return "covering";
  }
  return "?";
}

const char* verdict_name(Verdict v) { return v == Verdict::Induced ? "Induced" : "PurelyPotential"; }

std::vector<std::string> PotentialStructure::potential_deps() const {
  std::vector<std::string> out;
  for (const auto& f : potentials) out.insert(out.end(), f.components.begin(), f.components.end());
  return out;
}

std::vector<int> PotentialStructure::potential_equations() const {
  std::vector<int> out;
  for (const auto& f : potentials) out.insert(out.end(), f.equations.begin(), f.equations.end());
  return out;
}

std::vector<int> PotentialStructure::extended_equations() const {
  std::vector<int> out = base.minimal_set();
  auto pot = potential_equations();
  out.insert(out.end(), pot.begin(), pot.end());
  return out;
}

int PotentialStructure::family_index(const std::string& name) const {
  for (std::size_t s = 0; s < potentials.size(); ++s) {
    const auto& f = potentials[s];
    if (f.name == name || std::find(f.components.begin(), f.components.end(), name) != f.components.end())
      return static_cast<int>(s);
  }
  fail(ErrorCode::UnknownSymbol, "'" + name + "' is not a potential of this structure");
}

namespace {

std::vector<std::string> family_names(const BuildOptions& opt, std::size_t count) {
  if (!opt.names.empty()) {
    if (opt.names.size() != count) fail(ErrorCode::ArityMismatch, "one potential name per family is required");
    return opt.names;
  }
  std::vector<std::string> out;
  for (std::size_t s = 0; s < count; ++s) out.push_back("v" + std::to_string(s + 1));
  return out;
}

ContextPtr extended_context(const Context& base, const std::vector<std::string>& deps) {
  auto c = std::make_shared<Context>(base);
  for (const auto& d : deps)
    if (!c->has_dep(d)) {
      if (c->indep_index(d) >= 0 || c->has_const(d) || c->has_func(d))
        fail(ErrorCode::InvalidSystem, "potential name '" + d + "' is already in use");
      c->deps.push_back(d);
    }
  return c;
}

void require_arity(const VectorFunction& v, int n, const char* what) {
  if (static_cast<int>(v.size()) != n)
    fail(ErrorCode::ArityMismatch, std::string(what) + " needs " + std::to_string(n) + " components");
}

bool mentions(const Expr& e, const std::set<std::string>& deps, bool any_order) {
  for (const auto& a : all_atoms(e))
    if (a.is_jet() && deps.count(a.name()) && (any_order || a.order() > 0)) return true;
  return false;
}

PotentialStructure start(PotentialKind kind, const DiffSystem& S, const BuildOptions& opt,
                         const std::vector<std::string>& deps) {
  PotentialStructure P;
  P.kind = kind;
  P.level = opt.level;
  P.base = S;
  P.system = S;
  P.system.set_context(extended_context(S.ctx(), deps));
  return P;
}

Equation potential_equation(const Expr& lhs, const Expr& rhs, const Atom& lead, const std::string& label,
                            const std::string& family, int direction, int level) {
  Equation eq;
  eq.lhs = lhs;
  eq.rhs = rhs;
  eq.lead = lead;
  eq.label = label;
  eq.role = EqRole::Potential;
  eq.priority = direction;
  eq.direction = direction;
  eq.potential = family;
  eq.level = level;
  return eq;
}

// Compatibility expression C^s; every syzygy below reads L = M * C^s.
Expr compat_expression(const PotentialStructure& P, int s) {
  const Context& ctx = P.system.ctx();
  const auto& f = P.potentials[static_cast<std::size_t>(s)];
  if (P.kind == PotentialKind::Standard) return divergence(f.fluxes, ctx);
  return total_derivative(f.fluxes[1], 0, ctx) - total_derivative(f.fluxes[0], 1, ctx);
}

Syzygy syzygy_for(const PotentialStructure& P, int s, const Expr& M) {
  const auto& f = P.potentials[static_cast<std::size_t>(s)];
  Syzygy syz;
  if (P.kind == PotentialKind::Standard) {
    // Sum_i D_i E^i = -Div G^s.
    for (std::size_t i = 0; i < f.equations.size(); ++i) syz.push_back({-M, static_cast<int>(i), f.equations[i]});
  } else {
    // D_x E^t - D_t E^x = D_t G^x - D_x G^t.
    syz.push_back({M, 1, f.equations[0]});
    syz.push_back({-M, 0, f.equations[1]});
  }
  return syz;
}

bool syzygy_holds(const DiffSystem& S, int eq, const Syzygy& syz) {
  const Context& ctx = S.ctx();
  Expr sum;
  for (const auto& t : syz) {
    Expr r = S.equations()[static_cast<std::size_t>(t.eq)].residual;
    sum += t.mult * (t.dir >= 0 ? total_derivative(r, t.dir, ctx) : r);
  }
  return is_zero(S.equations()[static_cast<std::size_t>(eq)].residual - sum);
}

bool try_nprime(PotentialStructure& P, int eq, int s, const std::optional<Expr>& given) {
  const Equation& E = P.system.equations().at(static_cast<std::size_t>(eq));
  Expr M;
  if (given) {
    M = *given;
  } else {
    Expr C = compat_expression(P, s);
    Expr lambda = scale(partial_diff(C, E.lead, P.system.ctx()), 1 / E.lead_coeff);
    if (lambda.is_zero_form()) return false;
    if (lambda.size() != 1 && has_jets(lambda)) return false;
    if (!is_zero(C - lambda * E.residual)) return false;
    try {
      M = divide(Expr(1), lambda);
    } catch (const Error&) {
      return false;
    }
  }
  Syzygy syz = syzygy_for(P, s, M);
  if (!syzygy_holds(P.system, eq, syz)) return false;
  P.system.set_minimal(eq, false, syz);
  P.nprime.push_back(eq);
  return true;
}

void detect_nprime(PotentialStructure& P) {
  if (P.kind == PotentialKind::Covering) return;
  if (P.kind == PotentialKind::Abelian && P.system.ctx().n() != 2) return;
  std::set<int> used;
  for (int eq : P.base.minimal_set()) {
    for (int s = 0; s < static_cast<int>(P.potentials.size()); ++s) {
      if (used.count(s)) continue;
      if (try_nprime(P, eq, s, std::nullopt)) {
        used.insert(s);
        break;
      }
    }
  }
}

void finish(PotentialStructure& P, const BuildOptions& opt) {
  Weighting w = extend_weighting(P);
  for (const auto& [d, k] : w) P.system.set_weight(d, k);
  for (int eq : P.potential_equations()) {
    const Equation& E = P.system.equations()[static_cast<std::size_t>(eq)];
    if (weight_of(E.lhs, P.system.weights()) < weight_of(E.rhs, P.system.weights()))
      fail(ErrorCode::InvalidSystem, "potential equation " + E.label + " is not weight admissible");
  }
  if (opt.detect_nprime) detect_nprime(P);
}

std::string describe_residual(const Expr& r, const Context& ctx) { return to_string(r, ctx); }

PotentialStructure flux_structure(PotentialKind kind, const DiffSystem& S, const std::vector<VectorFunction>& fluxes,
                                  const BuildOptions& opt) {
  const int n = S.ctx().n();
  auto names = family_names(opt, fluxes.size());
  for (const auto& G : fluxes) require_arity(G, n, "flux tuple");
  std::set<std::string> nameset(names.begin(), names.end());
  bool covering = kind == PotentialKind::Covering;
  for (const auto& G : fluxes)
    for (const auto& g : G)
      if (mentions(g, nameset, !covering))
        fail(ErrorCode::InvalidSystem, covering ? "covering fluxes may depend on pseudo-potentials only at order 0"
                                                : "fluxes of an Abelian covering must be free of its potentials");
  if (kind != PotentialKind::TwoDim) {
    auto res = compatibility_residuals(S, fluxes, names, covering);
    auto ctx = extended_context(S.ctx(), names);
    for (const auto& r : res)
      if (!is_zero(r)) fail(ErrorCode::IncompatibleFluxes, "compatibility residual " + describe_residual(r, *ctx));
  }
  PotentialStructure P = start(kind, S, opt, names);
  const Context& ctx = P.system.ctx();
  for (std::size_t s = 0; s < fluxes.size(); ++s) {
    PotentialFamily f;
    f.name = names[s];
    f.components = {names[s]};
    f.fluxes = fluxes[s];
    for (int i = 0; i < n; ++i) {
      Atom lead = ctx.jet(names[s], ctx.delta(i));
      f.equations.push_back(P.system.add_equation(potential_equation(
          Expr(lead), fluxes[s][static_cast<std::size_t>(i)], lead, names[s] + "_" + ctx.indep[static_cast<std::size_t>(i)],
          names[s], i, opt.level)));
    }
    P.potentials.push_back(std::move(f));
  }
  finish(P, opt);
  return P;
}

}  // namespace

std::vector<Expr> compatibility_residuals(const DiffSystem& S, const std::vector<VectorFunction>& fluxes,
                                          const std::vector<std::string>& names, bool covering) {
  auto ctx = extended_context(S.ctx(), names);
  const int n = ctx->n();
  std::map<std::string, VectorFunction> fl;
  for (std::size_t s = 0; s < fluxes.size(); ++s) fl[names.at(s)] = fluxes[s];
  auto D = [&](const Expr& e, int i) {
    return covering ? covering_total_derivative(e, i, *ctx, fl) : total_derivative(e, i, *ctx);
  };
  std::vector<Expr> out;
  for (const auto& G : fluxes)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        out.push_back(S.reduce(D(G[static_cast<std::size_t>(j)], i) - D(G[static_cast<std::size_t>(i)], j)));
  return out;
}

PotentialStructure build_potential_system_2d(const DiffSystem& S, const std::vector<VectorFunction>& cvs,
                                             const BuildOptions& opt) {
  if (S.ctx().n() != 2) fail(ErrorCode::InvalidSystem, "two-dimensional potential systems need exactly two independent variables");
  std::vector<VectorFunction> fluxes;
  for (const auto& cv : cvs) {
    require_arity(cv, 2, "conserved vector");
    if (!verify_conserved_vector(cv, S))
      fail(ErrorCode::NotConserved, "tuple " + to_string(cv, S.ctx()) + " is not a conserved vector");
    fluxes.push_back({-cv[1], cv[0]});
  }
  return flux_structure(PotentialKind::TwoDim, S, fluxes, opt);
}

PotentialStructure build_abelian_covering(const DiffSystem& S, const std::vector<VectorFunction>& fluxes,
                                          const BuildOptions& opt) {
  return flux_structure(PotentialKind::Abelian, S, fluxes, opt);
}

PotentialStructure build_general_covering(const DiffSystem& S, const std::vector<VectorFunction>& fluxes,
                                          const BuildOptions& opt) {
  return flux_structure(PotentialKind::Covering, S, fluxes, opt);
}

PotentialStructure build_standard_potential_system(const DiffSystem& S, const std::vector<VectorFunction>& cvs,
                                                   const BuildOptions& opt) {
  const int n = S.ctx().n();
  if (n <= 2) fail(ErrorCode::InvalidSystem, "standard potential systems need more than two independent variables");
  auto names = family_names(opt, cvs.size());
  for (const auto& cv : cvs) {
    require_arity(cv, n, "conserved vector");
    if (!verify_conserved_vector(cv, S))
      fail(ErrorCode::NotConserved, "tuple " + to_string(cv, S.ctx()) + " is not a conserved vector");
  }
  const auto& indep = S.ctx().indep;
  auto comp = [&](const std::string& v, int i, int j) {
    return v + indep[static_cast<std::size_t>(i)] + indep[static_cast<std::size_t>(j)];
  };
  std::vector<std::string> deps;
  for (const auto& v : names)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) deps.push_back(comp(v, i, j));
  PotentialStructure P = start(PotentialKind::Standard, S, opt, deps);
  const Context& ctx = P.system.ctx();
  for (std::size_t s = 0; s < cvs.size(); ++s) {
    PotentialFamily f;
    f.name = names[s];
    f.fluxes = cvs[s];
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) f.components.push_back(comp(names[s], i, j));
    // Sum_j D_j v^{ij}, with v^{ji} = -v^{ij} expressed through i < j components.
    for (int i = 0; i < n; ++i) {
      Expr lhs;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        Atom a = i < j ? ctx.jet(comp(names[s], i, j), ctx.delta(j)) : ctx.jet(comp(names[s], j, i), ctx.delta(j));
        lhs += i < j ? Expr(a) : -Expr(a);
      }
      Atom lead = i < n - 1 ? ctx.jet(comp(names[s], i, n - 1), ctx.delta(n - 1))
                            : ctx.jet(comp(names[s], n - 2, n - 1), ctx.delta(n - 2));
      f.equations.push_back(P.system.add_equation(potential_equation(
          lhs, cvs[s][static_cast<std::size_t>(i)], lead, names[s] + "[" + indep[static_cast<std::size_t>(i)] + "]",
          names[s], i, opt.level)));
    }
    P.potentials.push_back(std::move(f));
  }
  finish(P, opt);
  return P;
}

Weighting extend_weighting(const PotentialStructure& P) {
  Weighting w = P.base.weights();
  for (const auto& d : P.base.ctx().deps) w.emplace(d, 0);
  if (P.kind == PotentialKind::Covering) {
    Weighting probe = w;
    for (const auto& d : P.potential_deps()) probe[d] = 0;
    int rho = 0;
    for (const auto& f : P.potentials)
      for (const auto& g : f.fluxes) rho = std::max(rho, weight_of(g, probe) - 1);
    for (const auto& d : P.potential_deps()) w[d] = rho;
    return w;
  }
  for (const auto& f : P.potentials) {
    int rho = 0;
    for (const auto& g : f.fluxes) rho = std::max(rho, weight_of(g, w) - 1);
    for (const auto& d : f.components) w[d] = rho;
  }
  return w;
}

void declare_nprime(PotentialStructure& P, int eq, int family, const std::optional<Expr>& M) {
  if (P.kind == PotentialKind::Covering || (P.kind == PotentialKind::Abelian && P.system.ctx().n() != 2))
    fail(ErrorCode::Unsupported, "dropped equations are supported for 2D, two-variable Abelian and standard potential systems");
  auto base_min = P.base.minimal_set();
  if (std::find(base_min.begin(), base_min.end(), eq) == base_min.end())
    fail(ErrorCode::InvalidSystem, "only minimal base equations can be dropped");
  if (family < 0 || family >= static_cast<int>(P.potentials.size()))
    fail(ErrorCode::InvalidSystem, "unknown potential family");
  if (std::find(P.nprime.begin(), P.nprime.end(), eq) != P.nprime.end()) return;
  if (!try_nprime(P, eq, family, M))
    fail(ErrorCode::InvalidSystem, "equation " + P.system.equations()[static_cast<std::size_t>(eq)].label +
                                       " is not the stated multiple of the potential compatibility condition");
}

Characteristic completely_reduce_characteristic(const Characteristic& lambda, const PotentialStructure& P) {
  Characteristic out = lambda;
  for (auto& c : out.components) c = P.system.reduce(c);
  out.completely_reduced = true;
  return out;
}

Characteristic pad_to_extended(const Characteristic& lambda, const PotentialStructure& P) {
  Characteristic out;
  out.equations = P.extended_equations();
  out.extended = true;
  out.components.assign(out.equations.size(), Expr());
  for (std::size_t k = 0; k < lambda.equations.size(); ++k) {
    auto it = std::find(out.equations.begin(), out.equations.end(), lambda.equations[k]);
    if (it == out.equations.end())
      fail(ErrorCode::ArityMismatch, "characteristic refers to an equation outside the extended list");
    out.components[static_cast<std::size_t>(it - out.equations.begin())] += lambda.components[k];
  }
  return out;
}

bool verify_extended_characteristic(const Characteristic& lambda, const VectorFunction& F, const PotentialStructure& P) {
  auto eqs = P.extended_equations();
  if (!lambda.equations.empty() && lambda.equations != eqs)
    fail(ErrorCode::ArityMismatch, "extended characteristic must follow the extended equation list");
  return is_zero(characteristic_defect(lambda.components, eqs, F, P.system));
}

namespace {

struct Dependence {
  std::vector<Atom> atoms;
  std::vector<std::string> non_generic;
};

Dependence potential_dependence(const std::vector<Expr>& comps, const PotentialStructure& P) {
  const Context& ctx = P.system.ctx();
  auto deps = P.potential_deps();
  std::set<std::string> depset(deps.begin(), deps.end());
  std::set<Atom> atoms;
  std::set<std::string> funcs;
  for (const auto& c : comps) {
    bool depends = false;
    for (const auto& d : deps)
      if (!is_zero(partial_diff(c, ctx.jet(d), ctx))) depends = true;
    for (const auto& a : all_atoms(c)) {
      if (a.is_jet() && depset.count(a.name())) {
        if (a.order() > 0 || depends) atoms.insert(a);
        if (a.order() > 0) depends = true;
      }
      if (depends && a.kind() == AtomKind::Func && mentions(Expr(a), depset, true) && !ctx.func(a.name()).generic)
        funcs.insert(a.name());
    }
  }
  return {std::vector<Atom>(atoms.begin(), atoms.end()), std::vector<std::string>(funcs.begin(), funcs.end())};
}

}  // namespace

PurityResult purity_test(const Characteristic& lambda, const PotentialStructure& P, const std::optional<VectorFunction>& F) {
  if (P.kind == PotentialKind::Covering)
    fail(ErrorCode::Unsupported, "purity through characteristics is not a valid criterion for general coverings");
  PurityResult out;
  out.reduced = completely_reduce_characteristic(lambda, P);
  out.trivial = std::all_of(out.reduced.components.begin(), out.reduced.components.end(),
                            [](const Expr& e) { return is_zero(e); });
  auto dep = potential_dependence(out.reduced.components, P);
  out.potential_atoms = dep.atoms;
  if (!dep.atoms.empty()) {
    out.verdict = Verdict::PurelyPotential;
    out.assumptions = dep.non_generic;
    out.label = "purely potential";
    return out;
  }
  out.verdict = Verdict::Induced;
  if (out.trivial) {
    out.label = "trivial (zero conservation law)";
    return out;
  }
  if (P.kind == PotentialKind::Standard) {
    out.label = "potential-free characteristic (sufficient condition only)";
    return out;
  }
  out.label = "induced";
  if (F) out.local = localize_conserved_vector(*F, P);
  return out;
}

VectorFunction localize_conserved_vector(const VectorFunction& F, const PotentialStructure& P) {
  const auto all_deps = P.potential_deps();
  const std::set<std::string> all_depset(all_deps.begin(), all_deps.end());
  require_arity(F, P.system.ctx().n(), "conserved vector");
  VectorFunction direct;
  for (const auto& c : F) direct.push_back(P.system.reduce(c));
  // Already potential-free after reduction: only the base law needs checking.
  if (std::none_of(direct.begin(), direct.end(), [&](const Expr& c) { return mentions(c, all_depset, true); })) {
    for (auto& c : direct) c = P.base.reduce(c);
    if (!verify_conserved_vector(direct, P.base)) fail(ErrorCode::NotConserved, "tuple is not conserved on the base system");
    return direct;
  }
  if (P.kind != PotentialKind::TwoDim && P.kind != PotentialKind::Abelian)
    fail(ErrorCode::Unsupported, "localization is implemented for 2D potential systems and Abelian coverings");
  const Context& ctx = P.system.ctx();
  if (ctx.n() != 2) fail(ErrorCode::Unsupported, "localization is implemented for two independent variables");
  require_arity(F, 2, "conserved vector");
  auto deps = P.potential_deps();
  std::set<std::string> depset(deps.begin(), deps.end());
  VectorFunction R{P.system.reduce(F[0]), P.system.reduce(F[1])};
  for (const auto& f : P.potentials) {
    Expr v(ctx.jet(f.name));
    Expr alpha = partial_diff(R[0], ctx.jet(f.name), ctx);
    Expr beta = partial_diff(R[1], ctx.jet(f.name), ctx);
    if (mentions(alpha, depset, true) || mentions(beta, depset, true))
      fail(ErrorCode::Unsupported, "conserved vector is not affine in the potentials with potential-free coefficients");
    Expr phi = solve_null_divergence_2d(alpha, beta, P.base);
    // F - (alpha v + Phi G^x, beta v - Phi G^t): F-hat minus the null divergence of Phi v.
    R[0] -= alpha * v + phi * f.fluxes[1];
    R[1] -= beta * v - phi * f.fluxes[0];
  }
  VectorFunction out{P.base.reduce(R[0]), P.base.reduce(R[1])};
  if (mentions(out[0], depset, true) || mentions(out[1], depset, true))
    fail(ErrorCode::Internal, "localized conserved vector still depends on potentials");
  if (!verify_conserved_vector(out, P.base))
    fail(ErrorCode::Internal, "localized tuple is not conserved on the base system");
  if (!equivalent_conserved_vectors(F, out, P.system))
    fail(ErrorCode::Internal, "localized conserved vector is not equivalent to the input");
  return out;
}

DerivedLaw potential_derivative_cv(const VectorFunction& F, const std::string& potential, const PotentialStructure& P,
                                   const std::optional<Characteristic>& lambda) {
  P.family_index(potential);
  const Context& ctx = P.system.ctx();
  const Atom v = ctx.jet(potential);
  DerivedLaw out;
  VectorFunction R;
  for (const auto& c : F) R.push_back(P.system.reduce(c));
  for (const auto& c : R) out.cv.push_back(partial_diff(c, v, ctx));
  out.conserved = verify_conserved_vector(out.cv, P.system);
  Characteristic lam = lambda ? *lambda : extract_characteristic(R, P.system).lambda;
  out.characteristic = lam;
  for (auto& c : out.characteristic.components) c = P.system.reduce(partial_diff(c, v, ctx));
  if (out.conserved) {
    auto got = extract_characteristic(out.cv, P.system, out.characteristic.equations).lambda;
    std::vector<Expr> diff;
    for (std::size_t k = 0; k < got.components.size(); ++k)
      diff.push_back(got.components[k] - out.characteristic.components[k]);
    out.characteristic_holds = is_trivial_characteristic(diff, P.system);
  }
  return out;
}

DerivedLaw char_components_as_cv(const Characteristic& lambda, const std::string& potential,
                                 const PotentialStructure& P) {
  if (P.kind != PotentialKind::TwoDim && P.kind != PotentialKind::Abelian)
    fail(ErrorCode::Unsupported, "characteristic components form conserved vectors for 2D and Abelian structures");
  const auto& f = P.potentials[static_cast<std::size_t>(P.family_index(potential))];
  const Context& ctx = P.system.ctx();
  Characteristic red = completely_reduce_characteristic(lambda, P);
  DerivedLaw out;
  for (int eq : f.equations) {
    auto it = std::find(red.equations.begin(), red.equations.end(), eq);
    if (it == red.equations.end())
      fail(ErrorCode::ArityMismatch, "characteristic has no component for equation " +
                                         P.system.equations()[static_cast<std::size_t>(eq)].label);
    out.cv.push_back(red.components[static_cast<std::size_t>(it - red.equations.begin())]);
  }
  out.conserved = verify_conserved_vector(out.cv, P.system);
  out.characteristic = red;
  for (auto& c : out.characteristic.components) c = P.system.reduce(partial_diff(c, ctx.jet(potential), ctx));
  if (out.conserved) {
    auto got = extract_characteristic(out.cv, P.system, red.equations).lambda;
    std::vector<Expr> diff;
    for (std::size_t k = 0; k < got.components.size(); ++k)
      diff.push_back(got.components[k] - out.characteristic.components[k]);
    out.characteristic_holds = is_trivial_characteristic(diff, P.system);
  }
  return out;
}

Extraction linear_cv_to_extended_char(const VectorFunction& F, const PotentialStructure& P) {
  const Context& ctx = P.system.ctx();
  require_arity(F, ctx.n(), "conserved vector");
  auto deps = P.potential_deps();
  std::set<std::string> depset(deps.begin(), deps.end());
  VectorFunction R;
  for (const auto& c : F) R.push_back(P.system.reduce(c));
  for (const auto& c : R)
    for (const auto& d : deps)
      if (mentions(partial_diff(c, ctx.jet(d), ctx), depset, true))
        fail(ErrorCode::Unsupported, "conserved vector is not affine in the pseudo-potentials");
  Extraction ex = extract_characteristic(R, P.system, P.extended_equations());
  ex.lambda.extended = true;
  if (P.kind != PotentialKind::Standard) {
    for (const auto& f : P.potentials)
      for (std::size_t i = 0; i < f.equations.size(); ++i) {
        auto it = std::find(ex.lambda.equations.begin(), ex.lambda.equations.end(), f.equations[i]);
        const Expr& got = ex.lambda.components[static_cast<std::size_t>(it - ex.lambda.equations.begin())];
        if (!equal(got, partial_diff(R[i], ctx.jet(f.name), ctx)))
          fail(ErrorCode::Internal, "covering components differ from the potential coefficients");
      }
  }
  return ex;
}

CoherenceReport induction_coherence(const VectorFunction& F, const PotentialStructure& P) {
  CoherenceReport out;
  auto deps = P.potential_deps();
  std::set<std::string> depset(deps.begin(), deps.end());
  try {
    VectorFunction local = localize_conserved_vector(F, P);
    out.local = local;
    out.induced = verify_conserved_vector(local, P.base) && equivalent_conserved_vectors(F, local, P.system);
    out.potential_free_cv =
        std::none_of(local.begin(), local.end(), [&](const Expr& c) { return mentions(c, depset, true); }) &&
        verify_conserved_vector(local, P.system);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::Internal) throw;
  }
  Characteristic ext = extract_characteristic(F, P.system, P.extended_equations()).lambda;
  out.induced_extended_char = potential_dependence(completely_reduce_characteristic(ext, P).components, P).atoms.empty();
  auto usual = extract_characteristic(F, P.system).lambda;
  out.potential_free_char = purity_test(usual, P).verdict == Verdict::Induced;
  return out;
}

}  // namespace conslaw
