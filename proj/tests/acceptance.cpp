// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "conslaw/corpus.hpp"
#include "conslaw/text.hpp"
#include "conslaw/variational.hpp"

using namespace conslaw;

namespace {

struct Check {
  bool pass = true;
  std::ostringstream notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes << " [failed: " << what << "]";
    }
  }
};

SystemFile corpus(const std::string& stem, const LoadOptions& opt = {}) {
  for (const auto& f : builtin_corpus())
    if (f.name == stem) return parse_system_file(f.text, opt);
  fail(ErrorCode::InvalidSystem, "no corpus file " + stem);
}

LoadOptions eps(int v) {
  LoadOptions o;
  o.constants["eps"] = Rational(v);
  return o;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void report(int n, const std::string& title, const std::function<void(Check&)>& body) {
  Check c;
  try {
    body(c);
  } catch (const Error& e) {
    c.pass = false;
    c.notes << " [error " << error_code_name(e.code()) << ": " << e.what() << "]";
  }
  if (!c.pass) ++failures;
  std::cout << "criterion " << n << ": " << (c.pass ? "PASS" : "FAIL") << "  " << title << c.notes.str() << std::endl;
}

void table_rows(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  struct Row {
    const char* file;
    const char* cv;
    const char* lambda;
  };
  for (const Row& r : {Row{"table", "F0", "1"}, Row{"table_b0", "F1", "x"}, Row{"table_ba", "F2", "exp(x)"},
                       Row{"table_heat", "F3", "h"}}) {
    auto f = corpus(r.file);
    const auto& F = f.cv(r.cv);
    auto lam = f.parse_tuple(r.lambda);
    std::string id = std::string(r.file) + "/" + r.cv;
    c.expect(verify_conserved_vector(F, f.base), id + " conserved");
    c.expect(verify_characteristic(lam, F, f.base), id + " characteristic identity");
    c.expect(cosymmetry_test(lam, f.base), id + " cosymmetry");
  }
  double s = seconds_since(t0);
  c.expect(s < 5.0, "runtime under 5 s");
  c.notes << " (" << s << " s)";
}

bool phi_matches(const SystemFile& f, const std::string& ab, const std::string& want) {
  auto t = f.parse_tuple(ab);
  Expr diff = solve_null_divergence_2d(t[0], t[1], f.base) - f.parse(want);
  return is_zero(diff) || diff.is_constant();
}

void phi_values(Check& c) {
  c.expect(phi_matches(corpus("pot_b0_gen"), "1 ; 0", "x"), "B = 0 general");
  c.expect(phi_matches(corpus("pot_b0_special"), "x^-2 ; 0", "-x^-1"), "B = 0 special");
  c.expect(phi_matches(corpus("pot_ba_gen"), "exp(x) ; 0", "exp(x)"), "B = A general");
  c.expect(phi_matches(corpus("pot_ba_special"), "exp(x)*(exp(x) + eps)^-2 ; 0", "-(exp(x) + eps)^-1"),
           "B = A special");
  for (int e : {0, 1, -1})
    c.expect(phi_matches(corpus("pot_ba_special", eps(e)), "exp(x)*(exp(x) + eps)^-2 ; 0", "-(exp(x) + eps)^-1"),
             "B = A special, eps = " + std::to_string(e));
}

bool localizes_to(const SystemFile& f, const std::string& want) {
  const auto& P = *f.top();
  return equivalent_conserved_vectors(localize_conserved_vector(f.cv("F"), P), f.parse_tuple(want), P.base);
}

void localizations(Check& c) {
  c.expect(localizes_to(corpus("pot_b0_gen"), "-x*u ; x*A(u)*u_x - IntA(u)"), "B = 0 general");
  c.expect(localizes_to(corpus("pot_b0_special"), "u ; -A(u)*u_x"), "B = 0 special");
  c.expect(localizes_to(corpus("pot_ba_gen"), "-exp(x)*u ; exp(x)*A(u)*u_x"), "B = A general");
  c.expect(localizes_to(corpus("pot_ba_special"), "u ; -A(u)*u_x - IntA(u)"), "B = A special");
  for (int e : {0, 1, -1})
    c.expect(localizes_to(corpus("pot_ba_special", eps(e)), "u ; -A(u)*u_x - IntA(u)"),
             "B = A special, eps = " + std::to_string(e));
}

PurityResult purity_of(const SystemFile& f, const std::string& cv, bool with_cv = false) {
  const auto& P = *f.top();
  const auto& F = f.cv(cv);
  auto lam = extract_characteristic(F, P.system).lambda;
  return with_cv ? purity_test(lam, P, F) : purity_test(lam, P);
}

void purity_verdicts(Check& c) {
  auto bintaua = corpus("pot_bintaua");
  auto diffusion = corpus("u2_diffusion");
  auto convection = corpus("u2_convection");
  auto burgers = corpus("burgers");
  c.expect(purity_of(bintaua, "F4").verdict == Verdict::PurelyPotential, "F4");
  c.expect(purity_of(diffusion, "F5").verdict == Verdict::PurelyPotential, "F5 with sigma generic");
  c.expect(purity_of(convection, "F6").verdict == Verdict::PurelyPotential, "F6 with sigma generic");
  c.expect(purity_of(burgers, "F7").verdict == Verdict::PurelyPotential, "F7");

  // At sigma = v the witness is the x-moment law of the base equation, sign reversed.
  auto r = purity_of(diffusion, "F5v", true);
  c.expect(r.verdict == Verdict::Induced && !r.trivial && r.local.has_value(), "F5 at sigma = v induced");
  if (r.local) {
    const auto& P = *diffusion.top();
    c.expect(equivalent_conserved_vectors(*r.local, diffusion.parse_tuple("-x*u ; u^-1 + x*u^-2*u_x"), P.base),
             "F5 at sigma = v witness");
    c.expect(!verify_conserved_vector(diffusion.cv("F2"), P.base), "exponential moment is not a law here");
  }
  c.expect(purity_of(diffusion, "F5one", true).trivial, "F5 at sigma = 1 trivial");

  auto r6 = purity_of(convection, "F6v", true);
  c.expect(r6.verdict == Verdict::Induced && r6.local.has_value(), "F6 at sigma = v induced");
  if (r6.local)
    c.expect(equivalent_conserved_vectors(*r6.local, convection.parse_tuple("-exp(x)*u ; exp(x)*u^-2*u_x"),
                                          convection.top()->base),
             "F6 at sigma = v witness");
  c.notes << " (F5 at sigma = v: witness equals minus the x-moment law)";
}

// d/dv of a family member and the characteristic-component construction.
void derived_laws(Check& c) {
  struct Case {
    const char* file;
    const char* cv;
    const char* derivative;  // predicted family member
  };
  for (const Case& k : {Case{"u2_diffusion", "F5", "sigma_v ; sigma_vv*u^-1"},
                        Case{"u2_convection", "F6", "sigma_v*exp(x) ; sigma_vv*u^-1*exp(x)"},
                        Case{"burgers", "F7", "h*exp(v) ; h_x*exp(v) - h*u*exp(v)"}}) {
    auto f = corpus(k.file);
    const auto& P = *f.top();
    const auto& F = f.cv(k.cv);
    auto want = f.parse_tuple(k.derivative);
    std::string id = std::string(k.file) + "/" + k.cv;

    auto d = potential_derivative_cv(F, "v", P);
    c.expect(d.conserved, id + " d/dv conserved");
    c.expect(d.characteristic_holds, id + " d/dv characteristic");
    c.expect(equivalent_conserved_vectors(d.cv, want, P.system), id + " d/dv in family");

    auto lam = extract_characteristic(F, P.system).lambda;
    auto cc = char_components_as_cv(lam, "v", P);
    c.expect(cc.conserved, id + " components conserved");
    c.expect(cc.characteristic_holds, id + " components paired with +d lambda/dv");
    c.expect(equivalent_conserved_vectors(cc.cv, want, P.system), id + " components in family");

    // The opposite sign pairing fails.
    auto got = extract_characteristic(cc.cv, P.system, cc.characteristic.equations).lambda;
    std::vector<Expr> diff;
    for (std::size_t i = 0; i < got.components.size(); ++i)
      diff.push_back(got.components[i] + cc.characteristic.components[i]);
    c.expect(!is_trivial_characteristic(diff, P.system), id + " -d lambda/dv rejected");
  }
  c.notes << " (components pair with +d lambda/dv)";
}

void covering_compatibility(Check& c) {
  const std::string burgers = "indep t x\ndep u\neq u_t = u_xx + 2*u*u_x\npotential 2d v = u ; -u_x - u^2\n";
  const std::string flux = "h*u*exp(v) - h_x*exp(v) ; h*exp(v)";
  auto with_w = [](const DiffSystem& S, const std::string& text) {
    Context ctx = S.ctx();
    ctx.deps.push_back("w");
    return parse_tuple(text, ctx);
  };

  auto free = parse_system_file("indep t x\ndep u\nfn h(t, x)\n" + burgers.substr(burgers.find("eq")));
  auto r = compatibility_residuals(free.system(), {with_w(free.system(), flux)}, {"w"}, true);
  c.expect(r.size() == 1 && r[0] == with_w(free.system(), "(h_t + h_xx)*exp(v)")[0], "unconstrained residual");

  auto tied = parse_system_file("indep t x\ndep u\nfn h(t, x) rule h_t -> -h_xx\n" + burgers.substr(burgers.find("eq")));
  auto z = compatibility_residuals(tied.system(), {with_w(tied.system(), flux)}, {"w"}, true);
  c.expect(z.size() == 1 && is_zero(z[0]), "constrained residual vanishes");

  auto heat = parse_system_file("indep t x\ndep u\neq u_t = u_xx\n");
  auto bad = compatibility_residuals(heat.base, {with_w(heat.base, "w ; u*w")}, {"w"}, true);
  c.expect(bad.size() == 1 && bad[0] == with_w(heat.base, "u_xx*w")[0], "incompatible residual u_xx*w");
  bool rejected = false;
  try {
    build_general_covering(heat.base, {with_w(heat.base, "w ; u*w")}, {{"w"}});
  } catch (const Error& e) {
    rejected = e.code() == ErrorCode::IncompatibleFluxes && std::string(e.what()).find("u_") != std::string::npos;
  }
  c.expect(rejected, "incompatible covering rejected with its residual");
}

void coherence(Check& c) {
  int checked = 0, skipped = 0;
  for (const auto& file : builtin_corpus()) {
    std::vector<LoadOptions> instances{{}};
    if (file.text.find("const eps") != std::string::npos)
      for (int e : {0, 1, -1}) instances.push_back(eps(e));
    for (const auto& opt : instances) {
      auto f = parse_system_file(file.text, opt);
      for (std::size_t l = 0; l < f.levels.size(); ++l) {
        const auto& P = f.levels[l];
        if (P.kind == PotentialKind::Covering) {
          skipped += static_cast<int>(f.cvs.size());
          continue;
        }
        for (const auto& [name, F] : f.cvs) {
          // Laws of this level: conserved on P and expressible in its variables.
          bool law = false;
          try {
            law = verify_conserved_vector(F, P.system);
          } catch (const Error&) {
          }
          if (!law) continue;
          auto rep = induction_coherence(F, P);
          ++checked;
          c.expect(rep.consistent(), file.name + "/" + name);
        }
      }
    }
  }
  c.expect(checked > 0, "no laws checked");
  c.notes << " (" << checked << " law/level pairs; " << skipped << " on general coverings, where the characteristic criterion does not apply)";
}

void property_suite(Check& c) {
  auto t0 = std::chrono::steady_clock::now();
  int rc = std::system(PROPERTY_TESTS " --minimal > /dev/null 2>&1");
  double s = seconds_since(t0);
  c.expect(rc == 0, "property_tests exit status");
  c.expect(s < 120.0, "runtime under 2 min");
  c.notes << " (" << s << " s)";
}

}  // namespace

int main() {
  report(1, "conservation law table rows", table_rows);
  report(2, "null divergence potentials", phi_values);
  report(3, "localizations", localizations);
  report(4, "purity verdicts", purity_verdicts);
  report(5, "randomized property suite", property_suite);
  report(6, "potential derivatives and characteristic components", derived_laws);
  report(7, "covering compatibility", covering_compatibility);
  report(8, "coherence of the four induction statements", coherence);
  return failures == 0 ? 0 : 1;
}
