// Command-line front end for the conslaw library.
#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "conslaw/corpus.hpp"
#include "conslaw/sysfile.hpp"
#include "conslaw/text.hpp"

using namespace conslaw;
using nlohmann::json;

namespace {

struct Outcome {
  bool ok = true;
  json result = json::object();
  std::string text;
};

struct Globals {
  bool json_out = false;
  std::string weights;
};

int exit_code_for(ErrorCode c) {
  switch (c) {
    case ErrorCode::Parse:
    case ErrorCode::UnknownSymbol:
    case ErrorCode::ArityMismatch:
    case ErrorCode::InvalidSystem:
    case ErrorCode::DivisionByZero:
    case ErrorCode::UnboundAtom:
      return 2;
    case ErrorCode::Unsupported:
    case ErrorCode::NoRuleApplies:
    case ErrorCode::NonTermination:
      return 3;
    default:
      return 1;
  }
}

LoadOptions load_options(const Globals& g) {
  LoadOptions o;
  std::stringstream ss(g.weights);
  for (std::string item; std::getline(ss, item, ',');) {
    auto eq = item.find('=');
    if (eq == std::string::npos) fail(ErrorCode::Parse, "--weights expects name=k pairs");
    try {
      o.weights[item.substr(0, eq)] = std::stoi(item.substr(eq + 1));
    } catch (const std::exception&) {
      fail(ErrorCode::Parse, "--weights expects integer weights");
    }
  }
  return o;
}

const char* kDefaultSystem = "indep t x\ndep u v\n";

SystemFile load(const std::string& path, const Globals& g) {
  if (path.empty()) return parse_system_file(kDefaultSystem, load_options(g));
  return load_system_file(path, load_options(g));
}

// A tuple given as one ';'-separated string, a conserved vector name, or one argument per component.
VectorFunction tuple_arg(const SystemFile& f, const std::vector<std::string>& args) {
  if (args.size() == 1 && f.has_cv(args[0])) return f.cv(args[0]);
  if (args.size() == 1) return parse_tuple(args[0], *f.ctx);
  VectorFunction out;
  for (const auto& a : args) out.push_back(parse_expression(a, *f.ctx));
  return out;
}

json expr_json(const Expr& e, const Context& ctx) { return to_string(e, ctx); }

json tuple_json(const VectorFunction& v, const Context& ctx) {
  json a = json::array();
  for (const auto& e : v) a.push_back(to_string(e, ctx));
  return a;
}

std::string show(const VectorFunction& v, const Context& ctx) { return to_string(v, ctx); }

json labels(const DiffSystem& S, const std::vector<int>& eqs) {
  json a = json::array();
  for (int i : eqs) a.push_back(S.equations()[static_cast<std::size_t>(i)].label);
  return a;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact conservation-law computations for systems of differential equations"};
  app.require_subcommand(1);
  Globals g;
  app.add_flag("--json", g.json_out, "Machine-readable output");
  app.add_option("--weights", g.weights, "Base weights, e.g. u=0,v=1");

  std::string sys, expr_text, alpha, beta, filter, kind = "2d", cv_arg;
  std::vector<std::string> items, names;
  std::function<Outcome()> run;
  std::string command;

  auto sub = [&](const std::string& name, const std::string& help) {
    auto* s = app.add_subcommand(name, help);
    s->callback([&command, name] { command = name; });
    return s;
  };

  auto* c_check = sub("check-cv", "Check that a tuple is a conserved vector");
  c_check->add_option("system", sys, "System file")->required();
  c_check->add_option("components", items, "Tuple, conserved vector name or components")->required();

  auto* c_char = sub("char", "Extract the characteristic of a conserved vector");
  c_char->add_option("system", sys)->required();
  c_char->add_option("components", items)->required();

  auto* c_vchar = sub("verify-char", "Verify a characteristic of a conserved vector exactly");
  c_vchar->add_option("system", sys)->required();
  c_vchar->add_option("cv", cv_arg, "Conserved vector (tuple or name)")->required();
  c_vchar->add_option("components", items, "Characteristic components")->required();

  auto* c_euler = sub("euler", "Euler operator of an expression");
  c_euler->add_option("system", sys)->required();
  c_euler->add_option("expr", expr_text)->required();

  auto* c_div = sub("div-test", "Decide whether an expression is a total divergence");
  c_div->add_option("expr", expr_text)->required();
  c_div->add_option("--sys", sys, "System file declaring the variables (default: t, x; u, v)");

  auto* c_hom = sub("homotopy", "Invert a total divergence with the homotopy formula");
  c_hom->add_option("expr", expr_text)->required();
  c_hom->add_option("--sys", sys, "System file declaring the variables (default: t, x; u, v)");

  auto* c_phi = sub("phi", "Solve D_x Phi = alpha, D_t Phi = -beta");
  c_phi->add_option("system", sys)->required();
  c_phi->add_option("alpha", alpha)->required();
  c_phi->add_option("beta", beta)->required();

  auto* c_pot = sub("potentialize", "Build a potential structure over the system");
  c_pot->add_option("system", sys)->required();
  c_pot->add_option("--kind", kind)->check(CLI::IsMember({"2d", "abelian", "standard", "covering"}));
  c_pot->add_option("--name", names, "Potential names, one per tuple");
  c_pot->add_option("tuples", items, "Conserved vectors or flux tuples (';'-separated or names)")->required();

  auto* c_red = sub("reduce", "Reduce an expression modulo the system");
  c_red->add_option("system", sys)->required();
  c_red->add_option("expr", expr_text)->required();

  auto* c_pur = sub("purity", "Purity test of a characteristic on a potential system");
  c_pur->add_option("system", sys)->required();
  c_pur->add_option("components", items)->required();
  c_pur->add_option("--cv", cv_arg, "Conserved vector to localize when induced");

  auto* c_cos = sub("cosym", "Cosymmetry test of a characteristic");
  c_cos->add_option("system", sys)->required();
  c_cos->add_option("components", items)->required();

  auto* c_corpus = sub("corpus", "Run the built-in verification corpus");
  c_corpus->add_option("--filter", filter, "Substring of the claim ids to run");

  auto* c_check_file = sub("check", "Run the claims of a system file");
  c_check_file->add_option("system", sys)->required();

  auto* c_print = sub("print", "Print a system file in canonical form");
  c_print->add_option("system", sys)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  Outcome out;
  try {
    if (command == "check-cv") {
      auto f = load(sys, g);
      auto F = tuple_arg(f, items);
      out.ok = verify_conserved_vector(F, f.system());
      Expr d = f.system().reduce(divergence(F, *f.ctx));
      out.result = {{"conserved", out.ok}, {"divergence_on_solutions", expr_json(d, *f.ctx)}};
      out.text = out.ok ? "conserved" : "not conserved: divergence reduces to " + to_string(d, *f.ctx);
    } else if (command == "char") {
      auto f = load(sys, g);
      auto ex = extract_characteristic(tuple_arg(f, items), f.system());
      out.result = {{"characteristic", tuple_json(ex.lambda.components, *f.ctx)},
                    {"equations", labels(f.system(), ex.lambda.equations)},
                    {"F_tilde", tuple_json(ex.F_tilde, *f.ctx)}};
      out.text = "characteristic " + show(ex.lambda.components, *f.ctx) + "\nF~ " + show(ex.F_tilde, *f.ctx);
    } else if (command == "verify-char") {
      auto f = load(sys, g);
      auto F = tuple_arg(f, {cv_arg});
      auto lam = tuple_arg(f, items);
      Expr d = characteristic_defect(lam, f.system().minimal_set(), F, f.system());
      out.ok = is_zero(d);
      out.result = {{"holds", out.ok}, {"defect", expr_json(d, *f.ctx)}};
      out.text = out.ok ? "characteristic identity holds" : "defect " + to_string(d, *f.ctx);
    } else if (command == "euler") {
      auto f = load(sys, g);
      Expr e = parse_expression(expr_text, *f.ctx);
      json r = json::object();
      for (const auto& d : f.ctx->deps) {
        Expr E = euler(e, d, *f.ctx);
        r[d] = to_string(E, *f.ctx);
        out.text += "E_" + d + " = " + to_string(E, *f.ctx) + "\n";
      }
      out.result = {{"euler", r}};
      if (!out.text.empty()) out.text.pop_back();
    } else if (command == "div-test") {
      auto f = load(sys, g);
      out.ok = is_total_divergence(parse_expression(expr_text, *f.ctx), *f.ctx);
      out.result = {{"divergence", out.ok}};
      out.text = out.ok ? "true" : "false";
    } else if (command == "homotopy") {
      auto f = load(sys, g);
      auto F = homotopy_divergence(parse_expression(expr_text, *f.ctx), *f.ctx);
      out.result = {{"F", tuple_json(F, *f.ctx)}};
      out.text = show(F, *f.ctx);
    } else if (command == "phi") {
      auto f = load(sys, g);
      Expr phi = solve_null_divergence_2d(parse_expression(alpha, *f.ctx), parse_expression(beta, *f.ctx), f.base);
      out.result = {{"phi", expr_json(phi, *f.ctx)}};
      out.text = to_string(phi, *f.ctx);
    } else if (command == "potentialize") {
      auto f = load(sys, g);
      std::vector<VectorFunction> tuples;
      for (const auto& t : items) tuples.push_back(tuple_arg(f, {t}));
      BuildOptions bo;
      bo.names = names;
      bo.level = static_cast<int>(f.levels.size()) + 1;
      PotentialStructure P;
      if (kind == "2d") P = build_potential_system_2d(f.system(), tuples, bo);
      else if (kind == "abelian") P = build_abelian_covering(f.system(), tuples, bo);
      else if (kind == "standard") P = build_standard_potential_system(f.system(), tuples, bo);
      else P = build_general_covering(f.system(), tuples, bo);
      const Context& c = P.system.ctx();
      json eqs = json::array();
      for (int i : P.potential_equations()) {
        const auto& e = P.system.equations()[static_cast<std::size_t>(i)];
        eqs.push_back({{"label", e.label}, {"lhs", to_string(e.lhs, c)}, {"rhs", to_string(e.rhs, c)}});
        out.text += to_string(e.lhs, c) + " = " + to_string(e.rhs, c) + "\n";
      }
      json w = json::object();
      for (const auto& d : P.potential_deps()) w[d] = P.system.weights().at(d);
      out.result = {{"kind", kind_name(P.kind)},
                    {"potentials", P.potential_deps()},
                    {"equations", eqs},
                    {"weights", w},
                    {"nprime", labels(P.system, P.nprime)},
                    {"minimal", labels(P.system, P.system.minimal_set())}};
      out.text += "dropped from the minimal set: " + labels(P.system, P.nprime).dump();
    } else if (command == "reduce") {
      auto f = load(sys, g);
      Expr r = f.system().reduce(parse_expression(expr_text, *f.ctx));
      out.result = {{"reduced", expr_json(r, *f.ctx)}};
      out.text = to_string(r, *f.ctx);
    } else if (command == "purity") {
      auto f = load(sys, g);
      if (!f.top()) fail(ErrorCode::InvalidSystem, "purity needs a system file with a potential structure");
      Characteristic lam;
      lam.components = tuple_arg(f, items);
      lam.equations = f.system().minimal_set();
      std::optional<VectorFunction> F;
      if (!cv_arg.empty()) F = tuple_arg(f, {cv_arg});
      auto r = purity_test(lam, *f.top(), F);
      json atoms = json::array();
      for (const auto& a : r.potential_atoms) atoms.push_back(to_string(a, *f.ctx));
      out.result = {{"verdict", verdict_name(r.verdict)},
                    {"trivial", r.trivial},
                    {"label", r.label},
                    {"reduced", tuple_json(r.reduced.components, *f.ctx)},
                    {"witness_atoms", atoms},
                    {"assumptions", r.assumptions}};
      if (r.local) out.result["local_cv"] = tuple_json(*r.local, *f.ctx);
      out.text = std::string(verdict_name(r.verdict)) + " (" + r.label + ")";
      if (!atoms.empty()) out.text += "\npotential atoms: " + atoms.dump();
      if (r.local) out.text += "\nlocal conserved vector: " + show(*r.local, *f.ctx);
    } else if (command == "cosym") {
      auto f = load(sys, g);
      out.ok = cosymmetry_test(tuple_arg(f, items), f.system());
      out.result = {{"cosymmetry", out.ok}};
      out.text = out.ok ? "true" : "false";
    } else if (command == "corpus" || command == "check") {
      CorpusReport rep;
      if (command == "corpus") {
        rep = run_corpus(filter);
      } else {
        std::ifstream in(sys);
        if (!in) fail(ErrorCode::Parse, "cannot open '" + sys + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        std::string stem = sys.substr(sys.find_last_of('/') + 1);
        stem = stem.substr(0, stem.find('.'));
        rep.results = run_file({stem, ss.str()});
      }
      json arr = json::array();
      for (const auto& r : rep.results) {
        arr.push_back({{"id", r.id}, {"instance", r.instance}, {"pass", r.pass}, {"detail", r.detail}});
        out.text += std::string(r.pass ? "PASS " : "FAIL ") + r.id + " [" + r.instance + "]" +
                    (r.detail.empty() ? "" : "  " + r.detail) + "\n";
      }
      out.ok = rep.ok();
      out.result = {{"claims", arr}, {"failures", rep.failures()}};
      out.text += std::to_string(rep.results.size() - rep.failures()) + "/" + std::to_string(rep.results.size()) +
                  " claims passed";
    } else if (command == "print") {
      auto f = load(sys, g);
      out.text = print_system_file(f);
      out.result = {{"text", out.text}};
      if (!out.text.empty() && out.text.back() == '\n') out.text.pop_back();
    }
  } catch (const Error& e) {
    if (g.json_out) {
      json j = {{"command", command},
                {"ok", false},
                {"result", nullptr},
                {"error", {{"code", error_code_name(e.code())}, {"message", e.what()}}}};
      std::cout << j.dump(2) << '\n';
    } else {
      std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << '\n';
    }
    return exit_code_for(e.code());
  }

  if (g.json_out) {
    json j = {{"command", command}, {"ok", out.ok}, {"result", out.result}, {"error", nullptr}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << out.text << '\n';
  }
  return out.ok ? 0 : 1;
}
