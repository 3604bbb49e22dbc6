#include "conslaw/sysfile.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "conslaw/text.hpp"

namespace conslaw {

const VectorFunction& SystemFile::cv(const std::string& name) const {
  for (const auto& [n, F] : cvs)
    if (n == name) return F;
  fail(ErrorCode::UnknownSymbol, "no conserved vector named '" + name + "'");
}

namespace {

Expr bind_values(const Expr& e, const std::map<std::string, Rational>& constants) {
  if (constants.empty()) return e;
  std::map<Atom, Expr> b;
  for (const auto& [name, v] : constants) b.emplace(Atom::constant(name), Expr(v));
  return substitute(e, b);
}

}  // namespace

Expr SystemFile::parse(const std::string& text) const { return bind_values(parse_expression(text, *ctx), constants); }

VectorFunction SystemFile::parse_tuple(const std::string& text) const {
  VectorFunction v = conslaw::parse_tuple(text, *ctx);
  for (auto& c : v) c = bind_values(c, constants);
  return v;
}

bool SystemFile::has_cv(const std::string& name) const {
  return std::any_of(cvs.begin(), cvs.end(), [&](const auto& p) { return p.first == name; });
}

int find_equation(const DiffSystem& S, const std::string& label) {
  const auto& eqs = S.equations();
  for (std::size_t i = 0; i < eqs.size(); ++i)
    if (eqs[i].label == label) return static_cast<int>(i);
  try {
    Expr e = parse_expression(label, S.ctx());
    for (std::size_t i = 0; i < eqs.size(); ++i)
      if (e == Expr(eqs[i].lead)) return static_cast<int>(i);
  } catch (const Error&) {
  }
  fail(ErrorCode::UnknownSymbol, "no equation labelled '" + label + "'");
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

bool is_ident(const std::string& s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; });
}

// Splits "lhs = rhs" at the first '=' outside parentheses.
std::pair<std::string, std::string> split_eq(const std::string& s, const std::string& what) {
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(' || s[i] == '{') ++depth;
    if (s[i] == ')' || s[i] == '}') --depth;
    if (s[i] == '=' && depth == 0) return {trim(s.substr(0, i)), trim(s.substr(i + 1))};
  }
  fail(ErrorCode::Parse, what + " needs '='");
}

std::string join_tuple(const VectorFunction& v, const Context& ctx) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += " ; ";
    out += to_string(v[i], ctx);
  }
  return out;
}

class Loader {
 public:
  explicit Loader(const LoadOptions& opt) : opt_(opt), ctx_(std::make_shared<Context>()) {}

  SystemFile run(const std::string& text) {
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      std::string line = raw;
      if (auto h = line.find('#'); h != std::string::npos) line.resize(h);
      line = trim(line);
      if (line.empty()) continue;
      try {
        directive(line, lineno);
      } catch (const Error& e) {
        fail(e.code(), "line " + std::to_string(lineno) + ": " + e.what());
      }
    }
    try {
      finish_level();
    } catch (const Error& e) {
      fail(e.code(), "line " + std::to_string(level_line_) + ": " + e.what());
    }
    ensure_base();
    f_.ctx = current_ctx();
    f_.constants = opt_.constants;
    return std::move(f_);
  }

 private:
  const LoadOptions& opt_;
  std::shared_ptr<Context> ctx_;
  SystemFile f_;
  bool header_done_ = false;
  bool have_base_ = false;
  bool pending_level_ = false;
  int level_line_ = 0;

  ContextPtr current_ctx() const { return f_.levels.empty() ? ContextPtr(ctx_) : f_.levels.back().system.ctx_ptr(); }

  Expr expr(const std::string& s, const std::vector<std::string>& params = {}) {
    Expr e = parse_expression(s, *current_ctx(), params);
    return bind_constants(e);
  }

  Expr bind_constants(const Expr& e) const { return bind_values(e, opt_.constants); }

  VectorFunction tuple(const std::string& s, const std::vector<std::string>& extra = {}) {
    Context c = *current_ctx();
    for (const auto& d : extra)
      if (!c.has_dep(d)) c.deps.push_back(d);
    VectorFunction v = parse_tuple(s, c);
    for (auto& c : v) c = bind_constants(c);
    return v;
  }

  void header_only(const std::string& what) {
    if (header_done_) fail(ErrorCode::Parse, "'" + what + "' must precede equations, conserved vectors and potentials");
  }

  void ensure_base() {
    if (have_base_) return;
    header_done_ = true;
    have_base_ = true;
    if (ctx_->indep.empty()) fail(ErrorCode::InvalidSystem, "no independent variables declared");
    Weighting w;
    for (const auto& [d, k] : f_.deps) w[d] = k;
    for (const auto& [d, k] : opt_.weights) {
      if (!ctx_->has_dep(d)) fail(ErrorCode::UnknownSymbol, "weight given for unknown dependent variable '" + d + "'");
      w[d] = k;
    }
    f_.base = DiffSystem(ctx_, w);
  }

  void check_fresh(const std::string& name) const {
    if (!is_ident(name)) fail(ErrorCode::Parse, "'" + name + "' is not a valid name");
    if (ctx_->indep_index(name) >= 0 || ctx_->has_dep(name) || ctx_->has_const(name) || ctx_->has_func(name))
      fail(ErrorCode::InvalidSystem, "'" + name + "' is declared twice");
    if (name == "exp" || name == "D") fail(ErrorCode::InvalidSystem, "'" + name + "' is reserved");
  }

  void directive(const std::string& line, int lineno) {
    auto sp = line.find_first_of(" \t");
    std::string kw = line.substr(0, sp);
    std::string rest = sp == std::string::npos ? "" : trim(line.substr(sp));
    if (kw != "potential" && kw != "nprime") {
      try {
        finish_level();
      } catch (const Error& e) {
        fail(e.code(), "line " + std::to_string(level_line_) + ": " + e.what());
      }
    }
    if (kw == "indep") {
      header_only(kw);
      for (const auto& w : words(rest)) {
        check_fresh(w);
        ctx_->indep.push_back(w);
        f_.indep.push_back(w);
      }
    } else if (kw == "const") {
      header_only(kw);
      for (const auto& w : words(rest)) {
        check_fresh(w);
        ctx_->consts.push_back(w);
        f_.consts.push_back(w);
      }
    } else if (kw == "dep") {
      header_only(kw);
      auto ws = words(rest);
      if (ws.size() == 3 && ws[1] == "weight") {
        check_fresh(ws[0]);
        int k = 0;
        try {
          k = std::stoi(ws[2]);
        } catch (const std::exception&) {
          fail(ErrorCode::Parse, "weight must be an integer");
        }
        if (k < 0) fail(ErrorCode::Parse, "weights are non-negative");
        ctx_->deps.push_back(ws[0]);
        f_.deps.emplace_back(ws[0], k);
        return;
      }
      if (std::find(ws.begin(), ws.end(), "weight") != ws.end())
        fail(ErrorCode::Parse, "use 'dep <name> weight <k>'");
      for (const auto& w : ws) {
        check_fresh(w);
        ctx_->deps.push_back(w);
        f_.deps.emplace_back(w, 0);
      }
    } else if (kw == "fn") {
      header_only(kw);
      function(rest);
    } else if (kw == "eq") {
      if (!f_.levels.empty() || !f_.layout.empty())
        fail(ErrorCode::Parse, "base equations must precede conserved vectors and potentials");
      ensure_base();
      equation(rest);
    } else if (kw == "cv") {
      ensure_base();
      auto [name, body] = split_eq(rest, "cv");
      if (!is_ident(name)) fail(ErrorCode::Parse, "'" + name + "' is not a valid name");
      if (f_.has_cv(name)) fail(ErrorCode::InvalidSystem, "conserved vector '" + name + "' is defined twice");
      VectorFunction F = tuple(body);
      if (static_cast<int>(F.size()) != ctx_->n())
        fail(ErrorCode::ArityMismatch, "conserved vector needs " + std::to_string(ctx_->n()) + " components");
      f_.cvs.emplace_back(name, F);
      f_.layout += 'c';
    } else if (kw == "potential") {
      ensure_base();
      potential(rest, lineno);
    } else if (kw == "nprime") {
      if (!pending_level_) fail(ErrorCode::Parse, "'nprime' must follow the potentials of its level");
      nprime(rest);
    } else if (kw == "level") {
      if (!rest.empty()) fail(ErrorCode::Parse, "'level' takes no arguments");
    } else if (kw == "claim") {
      ensure_base();
      auto ws = words(rest);
      if (ws.empty()) fail(ErrorCode::Parse, "claim needs a kind");
      std::string text = trim(rest.substr(ws[0].size()));
      f_.claims.push_back({ws[0], text, lineno, static_cast<int>(f_.levels.size())});
      f_.layout += 'k';
    } else {
      fail(ErrorCode::Parse, "unknown directive '" + kw + "'");
    }
  }

  // fn NAME(p1, ...) [generic] [d/p = expr]* [rule pattern -> expr]*
  void function(const std::string& rest) {
    auto open = rest.find('(');
    auto close = rest.find(')');
    if (open == std::string::npos || close == std::string::npos || close < open)
      fail(ErrorCode::Parse, "function declaration needs a parameter list");
    std::string name = trim(rest.substr(0, open));
    check_fresh(name);
    FuncDecl d;
    d.name = name;
    std::string plist = rest.substr(open + 1, close - open - 1);
    std::replace(plist.begin(), plist.end(), ',', ' ');
    d.params = words(plist);
    if (d.params.empty()) fail(ErrorCode::Parse, "functions need at least one parameter");
    for (const auto& p : d.params)
      if (!is_ident(p)) fail(ErrorCode::Parse, "'" + p + "' is not a valid parameter name");
    d.slot_rules.assign(d.params.size(), std::nullopt);
    ctx_->funcs[name] = d;
    f_.funcs.push_back(name);

    // Clauses start at the keywords generic, rule and d/<param>.
    std::string tail = rest.substr(close + 1);
    std::vector<std::string> clauses;
    std::string cur;
    std::istringstream in(tail);
    for (std::string w; in >> w;) {
      bool kwd = w == "generic" || w == "rule" || w.rfind("d/", 0) == 0;
      if (kwd && !trim(cur).empty()) {
        clauses.push_back(trim(cur));
        cur.clear();
      }
      cur += w + " ";
    }
    if (!trim(cur).empty()) clauses.push_back(trim(cur));

    for (const auto& c : clauses) {
      FuncDecl& decl = ctx_->funcs[name];
      if (c == "generic") {
        decl.generic = true;
      } else if (c.rfind("d/", 0) == 0) {
        auto [lhs, body] = split_eq(c, "derivative rule");
        std::string p = lhs.substr(2);
        auto it = std::find(decl.params.begin(), decl.params.end(), p);
        if (it == decl.params.end()) fail(ErrorCode::UnknownSymbol, "'" + p + "' is not a parameter of " + name);
        decl.slot_rules[static_cast<std::size_t>(it - decl.params.begin())] = expr(body, decl.params);
      } else if (c.rfind("rule", 0) == 0) {
        std::string body = trim(c.substr(4));
        auto arrow = body.find("->");
        if (arrow == std::string::npos) fail(ErrorCode::Parse, "rule needs '->'");
        Expr pat = parse_expression(trim(body.substr(0, arrow)), *ctx_, decl.params);
        if (pat.size() != 1 || pat.terms().begin()->second != 1 ||
            pat.terms().begin()->first.factors.size() != 1 ||
            pat.terms().begin()->first.factors.begin()->first.kind() != AtomKind::Func ||
            pat.terms().begin()->first.factors.begin()->second != 1)
          fail(ErrorCode::Parse, "rule pattern must be a derivative of " + name);
        const Atom& a = pat.terms().begin()->first.factors.begin()->first;
        if (a.name() != name || a.order() == 0) fail(ErrorCode::Parse, "rule pattern must be a derivative of " + name);
        Expr rhs = expr(trim(body.substr(arrow + 2)), decl.params);
        decl.constraints.push_back({a.multi(), rhs});
      } else {
        fail(ErrorCode::Parse, "unexpected '" + c + "' in function declaration");
      }
    }
  }

  void equation(const std::string& rest) {
    auto [lhs_text, rhs_text] = split_eq(rest, "equation");
    Expr lhs = expr(lhs_text);
    if (lhs.size() != 1 || lhs.terms().begin()->second != 1 || lhs.terms().begin()->first.factors.size() != 1 ||
        !lhs.terms().begin()->first.factors.begin()->first.is_jet() ||
        lhs.terms().begin()->first.factors.begin()->second != 1)
      fail(ErrorCode::Parse, "the left-hand side must be a single derivative");
    Equation eq;
    eq.lead = lhs.terms().begin()->first.factors.begin()->first;
    eq.lhs = lhs;
    eq.rhs = expr(rhs_text);
    eq.label = lhs_text;
    eq.priority = static_cast<int>(f_.base.size());
    f_.base.add_equation(eq);
  }

  void potential(const std::string& rest, int lineno) {
    auto ws = words(rest);
    if (ws.empty()) fail(ErrorCode::Parse, "potential needs a kind");
    PotentialDecl d;
    if (ws[0] == "2d") d.kind = PotentialKind::TwoDim;
    else if (ws[0] == "abelian") d.kind = PotentialKind::Abelian;
    else if (ws[0] == "standard") d.kind = PotentialKind::Standard;
    else if (ws[0] == "covering") d.kind = PotentialKind::Covering;
    else fail(ErrorCode::Parse, "unknown potential kind '" + ws[0] + "' (2d, abelian, standard, covering)");
    if (!pending_level_) {
      f_.level_decls.emplace_back();
      pending_level_ = true;
      level_line_ = lineno;
      f_.layout += 'l';
    }
    LevelDecl& L = f_.level_decls.back();
    if (!L.potentials.empty() && L.potentials.front().kind != d.kind)
      fail(ErrorCode::InvalidSystem, "all potentials of one level must have the same kind");
    auto [head, body] = split_eq(trim(rest.substr(ws[0].size())), "potential");
    d.name = head;
    if (!is_ident(d.name)) fail(ErrorCode::Parse, "'" + d.name + "' is not a valid potential name");
    if (is_ident(body) && f_.has_cv(body)) {
      d.cv_ref = body;
      d.tuple = f_.cv(body);
    } else if (d.kind == PotentialKind::Covering) {
      // Covering fluxes may mention the pseudo-potentials of their own level.
      std::vector<std::string> names{d.name};
      for (const auto& p : L.potentials) names.push_back(p.name);
      d.tuple = tuple(body, names);
    } else {
      d.tuple = tuple(body);
    }
    L.potentials.push_back(std::move(d));
  }

  // nprime <equation> <family> [= multiplier] | nprime none
  void nprime(const std::string& rest) {
    LevelDecl& L = f_.level_decls.back();
    if (rest == "none") {
      L.detect_nprime = false;
      return;
    }
    std::string head = rest;
    std::optional<std::string> mult;
    if (rest.find('=') != std::string::npos) {
      auto [h, m] = split_eq(rest, "nprime");
      head = h;
      mult = m;
    }
    auto ws = words(head);
    if (ws.size() != 2) fail(ErrorCode::Parse, "use 'nprime <equation> <potential> [= <multiplier>]'");
    NprimeDecl d{ws[0], ws[1], std::nullopt};
    if (mult) {
      // Parsed once the level's potentials exist.
      d.multiplier = Expr();
      pending_mult_.emplace_back(L.nprime.size(), *mult);
    }
    L.detect_nprime = false;
    L.nprime.push_back(d);
  }

  std::vector<std::pair<std::size_t, std::string>> pending_mult_;

  void finish_level() {
    if (!pending_level_) return;
    pending_level_ = false;
    LevelDecl& L = f_.level_decls.back();
    const DiffSystem& below = f_.levels.empty() ? f_.base : f_.levels.back().system;
    BuildOptions bo;
    bo.level = static_cast<int>(f_.levels.size()) + 1;
    bo.detect_nprime = L.detect_nprime;
    std::vector<VectorFunction> tuples;
    for (const auto& p : L.potentials) {
      bo.names.push_back(p.name);
      tuples.push_back(p.tuple);
    }
    PotentialStructure P;
    switch (L.potentials.front().kind) {
      case PotentialKind::TwoDim: P = build_potential_system_2d(below, tuples, bo); break;
      case PotentialKind::Abelian: P = build_abelian_covering(below, tuples, bo); break;
      case PotentialKind::Standard: P = build_standard_potential_system(below, tuples, bo); break;
      case PotentialKind::Covering: P = build_general_covering(below, tuples, bo); break;
    }
    for (const auto& [k, text] : pending_mult_)
      L.nprime[k].multiplier = bind_constants(parse_expression(text, P.system.ctx()));
    pending_mult_.clear();
    for (const auto& d : L.nprime)
      declare_nprime(P, find_equation(below, d.equation), P.family_index(d.family), d.multiplier);
    f_.levels.push_back(std::move(P));
  }
};

}  // namespace

SystemFile parse_system_file(const std::string& text, const LoadOptions& opt) {
  Loader l(opt);
  return l.run(text);
}

SystemFile load_system_file(const std::string& path, const LoadOptions& opt) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Parse, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_system_file(ss.str(), opt);
}

std::string print_system_file(const SystemFile& f) {
  std::ostringstream out;
  const Context& base = f.base.ctx();
  out << "indep";
  for (const auto& x : f.indep) out << ' ' << x;
  out << '\n';
  for (const auto& c : f.consts) out << "const " << c << '\n';
  for (const auto& [d, k] : f.deps) {
    out << "dep " << d;
    if (k != 0) out << " weight " << k;
    out << '\n';
  }
  for (const auto& name : f.funcs) {
    const FuncDecl& d = base.func(name);
    out << "fn " << name << '(';
    for (std::size_t i = 0; i < d.params.size(); ++i) out << (i ? ", " : "") << d.params[i];
    out << ')';
    if (d.generic) out << " generic";
    for (std::size_t i = 0; i < d.slot_rules.size(); ++i)
      if (d.slot_rules[i]) out << " d/" << d.params[i] << " = " << to_string(*d.slot_rules[i], base, d.params);
    for (const auto& c : d.constraints) {
      std::vector<Expr> args;
      for (std::size_t i = 0; i < d.params.size(); ++i) args.emplace_back(Atom::param(static_cast<int>(i)));
      out << " rule " << to_string(Atom::func(name, c.pattern, args), base, d.params) << " -> "
          << to_string(c.replacement, base, d.params);
    }
    out << '\n';
  }
  for (const auto& e : f.base.equations())
    out << "eq " << e.label << " = " << to_string(e.rhs, base) << '\n';

  std::size_t ci = 0, li = 0, ki = 0;
  char prev = 0;
  for (char b : f.layout) {
    if (b == 'c') {
      const auto& [name, F] = f.cvs[ci++];
      out << "cv " << name << " = " << join_tuple(F, *f.ctx) << '\n';
    } else if (b == 'l') {
      if (prev == 'l') out << "level\n";
      const LevelDecl& L = f.level_decls[li];
      const Context& lc = f.levels[li].system.ctx();
      const Context& below = li == 0 ? base : f.levels[li - 1].system.ctx();
      ++li;
      for (const auto& p : L.potentials) {
        out << "potential " << kind_name(p.kind) << ' ' << p.name << " = ";
        out << (p.cv_ref.empty() ? join_tuple(p.tuple, below) : p.cv_ref) << '\n';
      }
      if (!L.detect_nprime && L.nprime.empty()) out << "nprime none\n";
      for (const auto& d : L.nprime) {
        out << "nprime " << d.equation << ' ' << d.family;
        if (d.multiplier) out << " = " << to_string(*d.multiplier, lc);
        out << '\n';
      }
    } else {
      const Claim& c = f.claims[ki++];
      out << "claim " << c.kind;
      if (!c.text.empty()) out << ' ' << c.text;
      out << '\n';
    }
    prev = b;
  }
  return out.str();
}

}  // namespace conslaw
