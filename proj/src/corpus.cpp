#include "conslaw/corpus.hpp"

#include <algorithm>
#include <future>
#include <sstream>

#include "conslaw/text.hpp"

namespace conslaw {

std::size_t CorpusReport::failures() const {
  return static_cast<std::size_t>(std::count_if(results.begin(), results.end(), [](const auto& r) { return !r.pass; }));
}

namespace {

std::string trim(const std::string& s) {
  auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::pair<std::string, std::string> split_at_eq(const std::string& s) {
  auto k = s.find('=');
  if (k == std::string::npos) fail(ErrorCode::Parse, "claim needs '='");
  return {trim(s.substr(0, k)), trim(s.substr(k + 1))};
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

const PotentialStructure& need_top(const SystemFile& f, const Claim& c) {
  if (!f.top_at(c.level)) fail(ErrorCode::InvalidSystem, "claim needs a potential structure");
  return *f.top_at(c.level);
}

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome ok(bool pass, const std::string& detail = "") { return {pass, detail}; }

std::string show(const VectorFunction& v, const Context& ctx) { return to_string(v, ctx); }

Outcome check(const SystemFile& f, const Claim& c) {
  const Context& ctx = *f.ctx;
  const DiffSystem& S = f.system_at(c.level);
  const std::string& k = c.kind;

  if (k == "conserved" || k == "not-conserved") {
    bool cons = verify_conserved_vector(f.cv(trim(c.text)), S);
    return ok(cons == (k == "conserved"),
              "divergence on solutions: " + to_string(S.reduce(divergence(f.cv(trim(c.text)), ctx)), ctx));
  }
  if (k == "characteristic") {
    auto [name, body] = split_at_eq(c.text);
    const VectorFunction& F = f.cv(name);
    std::vector<Expr> lam = f.parse_tuple(body);
    if (!verify_characteristic(lam, F, S))
      return ok(false, "identity defect " + to_string(characteristic_defect(lam, S.minimal_set(), F, S), ctx));
    if (!cosymmetry_test(lam, S)) return ok(false, "not a cosymmetry");
    auto got = extract_characteristic(F, S).lambda.components;
    for (std::size_t i = 0; i < lam.size(); ++i) got[i] -= lam[i];
    return ok(is_trivial_characteristic(got, S), "extracted characteristic differs");
  }
  if (k == "cosymmetry" || k == "not-cosymmetry") {
    bool cs = cosymmetry_test(f.parse_tuple(c.text), S);
    return ok(cs == (k == "cosymmetry"));
  }
  if (k == "equivalent" || k == "inequivalent") {
    auto [name, body] = split_at_eq(c.text);
    bool eq = equivalent_conserved_vectors(f.cv(name), f.parse_tuple(body), S);
    return ok(eq == (k == "equivalent"));
  }
  if (k == "nprime") {
    const auto& P = need_top(f, c);
    int eq = find_equation(P.base, trim(c.text));
    return ok(std::find(P.nprime.begin(), P.nprime.end(), eq) != P.nprime.end(), "equation kept in the minimal set");
  }
  if (k == "weight") {
    auto [dep, val] = split_at_eq(c.text);
    auto it = S.weights().find(dep);
    if (it == S.weights().end()) return ok(false, "no weight for " + dep);
    return ok(std::to_string(it->second) == val, "weight " + std::to_string(it->second));
  }
  if (k == "reduces") {
    auto [lhs, rhs] = split_at_eq(c.text);
    Expr got = S.reduce(f.parse(lhs));
    return ok(equal(got, f.parse(rhs)), "got " + to_string(got, ctx));
  }
  if (k == "phi") {
    auto [lhs, rhs] = split_at_eq(c.text);
    auto ab = f.parse_tuple(lhs);
    if (ab.size() != 2) fail(ErrorCode::ArityMismatch, "phi needs alpha ; beta");
    Expr phi = solve_null_divergence_2d(ab[0], ab[1], f.base);
    Expr diff = phi - f.parse(rhs);
    return ok(is_zero(diff) || diff.is_constant(), "got " + to_string(phi, ctx));
  }
  if (k == "localize") {
    const auto& P = need_top(f, c);
    auto [name, body] = split_at_eq(c.text);
    VectorFunction local = localize_conserved_vector(f.cv(name), P);
    return ok(equivalent_conserved_vectors(local, f.parse_tuple(body), P.base), "got " + show(local, ctx));
  }
  if (k == "purity" || k == "induced-by") {
    const auto& P = need_top(f, c);
    auto [name, body] = split_at_eq(c.text);
    const VectorFunction& F = f.cv(name);
    auto lam = extract_characteristic(F, P.system).lambda;
    PurityResult r;
    try {
      r = purity_test(lam, P, F);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::Unsupported && k == "purity") return ok(body == "Unsupported", e.what());
      throw;
    }
    std::string verdict = r.trivial ? "trivial" : verdict_name(r.verdict);
    if (k == "purity") return ok(verdict == body, "verdict " + verdict);
    if (r.verdict != Verdict::Induced || !r.local) return ok(false, "verdict " + verdict);
    return ok(equivalent_conserved_vectors(*r.local, f.parse_tuple(body), P.base), "witness " + show(*r.local, ctx));
  }
  if (k == "coherent") {
    auto rep = induction_coherence(f.cv(trim(c.text)), need_top(f, c));
    std::ostringstream d;
    d << "induced=" << rep.induced << " potential_free_cv=" << rep.potential_free_cv
      << " induced_extended_char=" << rep.induced_extended_char << " potential_free_char=" << rep.potential_free_char;
    return ok(rep.consistent(), d.str());
  }
  if (k == "derivative" || k == "char-cv") {
    const auto& P = need_top(f, c);
    auto [head, body] = split_at_eq(c.text);
    auto hw = words(head);
    if (hw.size() != 2) fail(ErrorCode::Parse, "use '<cv> <potential> = <tuple>'");
    const VectorFunction& F = f.cv(hw[0]);
    DerivedLaw d = k == "derivative"
                       ? potential_derivative_cv(F, hw[1], P)
                       : char_components_as_cv(extract_characteristic(F, P.system).lambda, hw[1], P);
    if (!d.conserved) return ok(false, "not conserved: " + show(d.cv, ctx));
    if (!d.characteristic_holds) return ok(false, "derived characteristic does not match");
    return ok(equivalent_conserved_vectors(d.cv, f.parse_tuple(body), P.system), "got " + show(d.cv, ctx));
  }
  if (k == "extended-char") {
    const auto& P = need_top(f, c);
    auto [name, body] = split_at_eq(c.text);
    Extraction ex = linear_cv_to_extended_char(f.cv(name), P);
    auto want = f.parse_tuple(body);
    if (want.size() != ex.lambda.components.size())
      return ok(false, "extended characteristic has " + std::to_string(ex.lambda.components.size()) + " components");
    if (!verify_extended_characteristic(ex.lambda, ex.F_tilde, P)) return ok(false, "identity check failed");
    for (std::size_t i = 0; i < want.size(); ++i)
      if (!P.system.vanishes_on_solutions(ex.lambda.components[i] - want[i]))
        return ok(false, "component " + std::to_string(i) + " is " + to_string(ex.lambda.components[i], ctx));
    return ok(true);
  }
  fail(ErrorCode::Parse, "unknown claim kind '" + k + "'");
}

std::string claim_id(const std::string& file, const Claim& c) {
  std::string subject;
  auto ws = words(c.text);
  if (!ws.empty()) subject = ws[0];
  if (auto eq = subject.find('='); eq != std::string::npos) subject.resize(eq);
  return file + "/" + c.kind + (subject.empty() ? "" : ":" + subject);
}

}  // namespace

ClaimResult check_claim(const SystemFile& f, const Claim& c, const std::string& file) {
  ClaimResult r;
  r.id = claim_id(file, c);
  try {
    auto o = check(f, c);
    r.pass = o.pass;
    if (!o.pass) r.detail = o.detail;
  } catch (const Error& e) {
    r.pass = false;
    r.detail = std::string(error_code_name(e.code())) + ": " + e.what();
  }
  return r;
}

std::vector<ClaimResult> run_file(const CorpusFile& file, const std::string& filter) {
  std::vector<ClaimResult> out;
  std::vector<std::pair<std::string, LoadOptions>> instances{{"symbolic", {}}};
  bool has_eps = false;
  {
    std::istringstream in(file.text);
    for (std::string line; std::getline(in, line);) {
      auto ws = words(line.substr(0, line.find('#')));
      if (ws.size() >= 2 && ws[0] == "const" && std::find(ws.begin() + 1, ws.end(), "eps") != ws.end()) has_eps = true;
    }
  }
  if (has_eps)
    for (int v : {0, 1, -1}) {
      LoadOptions o;
      o.constants["eps"] = Rational(v);
      instances.emplace_back("eps=" + std::to_string(v), o);
    }
  for (const auto& [label, opt] : instances) {
    SystemFile f;
    try {
      f = parse_system_file(file.text, opt);
    } catch (const Error& e) {
      out.push_back({file.name + "/load", label, false, std::string(error_code_name(e.code())) + ": " + e.what()});
      continue;
    }
    for (const auto& c : f.claims) {
      if (!filter.empty() && claim_id(file.name, c).find(filter) == std::string::npos) continue;
      ClaimResult r = check_claim(f, c, file.name);
      r.instance = label;
      out.push_back(std::move(r));
    }
  }
  return out;
}

CorpusReport run_corpus(const std::string& filter) {
  std::vector<std::future<std::vector<ClaimResult>>> jobs;
  for (const auto& file : builtin_corpus())
    jobs.push_back(std::async(std::launch::async, [&file, &filter] { return run_file(file, filter); }));
  CorpusReport rep;
  for (auto& j : jobs) {
    auto r = j.get();
    rep.results.insert(rep.results.end(), r.begin(), r.end());
  }
  return rep;
}

}  // namespace conslaw
