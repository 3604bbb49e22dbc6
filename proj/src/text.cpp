#include "conslaw/text.hpp"

#include <cctype>
#include <sstream>

namespace conslaw {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

class Parser {
 public:
  Parser(const std::string& text, const Context& ctx, const std::vector<std::string>& params)
      : s_(text), ctx_(ctx), params_(params) {}

  Expr parse_all() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

  std::vector<Expr> parse_list(char sep) {
    std::vector<Expr> out{expr()};
    skip();
    while (pos_ < s_.size() && s_[pos_] == sep) {
      ++pos_;
      out.push_back(expr());
      skip();
    }
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return out;
  }

 private:
  const std::string& s_;
  const Context& ctx_;
  const std::vector<std::string>& params_;
  std::size_t pos_ = 0;

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::Parse, "column " + std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) error(std::string("expected '") + c + "'");
  }

  Expr expr() {
    Expr e;
    skip();
    if (accept('-')) e = -term();
    else {
      accept('+');
      e = term();
    }
    for (;;) {
      if (accept('+')) e = e + term();
      else if (accept('-')) e = e - term();
      else return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) e = e * unary();
      else if (accept('/')) {
        std::size_t at = pos_;
        Expr d = unary();
        if (d.is_zero_form()) {
          pos_ = at;
          error("division by zero");
        }
        e = divide(e, d);
      } else return e;
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  long integer_literal() {
    skip();
    bool neg = false;
    if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
      neg = s_[pos_] == '-';
      ++pos_;
    }
    skip();
    if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_]))) error("expected integer exponent");
    long v = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      v = v * 10 + (s_[pos_] - '0');
      if (v > 1000000) error("exponent too large");
      ++pos_;
    }
    return neg ? -v : v;
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      long k;
      if (accept('(')) {
        k = integer_literal();
        expect(')');
      } else {
        k = integer_literal();
      }
      std::size_t at = pos_;
      try {
        return pow(base, k);
      } catch (const Error& err) {
        pos_ = at;
        if (err.code() == ErrorCode::DivisionByZero) error("negative power of zero");
        throw;
      }
    }
    return base;
  }

  std::string ident() {
    skip();
    std::size_t start = pos_;
    if (pos_ >= s_.size() || !ident_start(s_[pos_])) error("expected identifier");
    while (pos_ < s_.size() && ident_char(s_[pos_])) ++pos_;
    return s_.substr(start, pos_ - start);
  }

  // Parses a subscript after '_' over the given names; returns orders per name.
  Multiindex subscript(const std::vector<std::string>& names) {
    Multiindex m(names.size(), 0);
    auto find = [&](const std::string& n) -> int {
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == n) return static_cast<int>(i);
      return -1;
    };
    if (pos_ < s_.size() && s_[pos_] == '{') {
      ++pos_;
      for (;;) {
        std::string n = ident();
        int i = find(n);
        if (i < 0) error("unknown derivative direction '" + n + "'");
        long k = 1;
        if (accept(':')) k = integer_literal();
        if (k < 0) error("negative derivative order");
        m[static_cast<std::size_t>(i)] += static_cast<int>(k);
        if (accept(',')) continue;
        expect('}');
        return m;
      }
    }
    std::size_t start = pos_;
    while (pos_ < s_.size() && ident_char(s_[pos_])) {
      std::size_t best = 0;
      int which = -1;
      for (std::size_t i = 0; i < names.size(); ++i) {
        const auto& n = names[i];
        if (n.size() > best && s_.compare(pos_, n.size(), n) == 0) {
          best = n.size();
          which = static_cast<int>(i);
        }
      }
      if (which < 0) error("cannot split derivative subscript");
      m[static_cast<std::size_t>(which)] += 1;
      pos_ += best;
    }
    if (pos_ == start) error("empty derivative subscript");
    return m;
  }

  int param_index(const std::string& name) const {
    for (std::size_t i = 0; i < params_.size(); ++i)
      if (params_[i] == name) return static_cast<int>(i);
    return -1;
  }

  // Resolves a bare name (no subscript, no call) in the current scope.
  std::optional<Expr> resolve_simple(const std::string& name) const {
    if (int p = param_index(name); p >= 0) return Expr(Atom::param(p));
    if (int i = ctx_.indep_index(name); i >= 0) return Expr(Atom::indep(i));
    if (ctx_.has_dep(name)) return Expr(ctx_.jet(name));
    if (ctx_.has_const(name)) return Expr(Atom::constant(name));
    return std::nullopt;
  }

  std::vector<Expr> call_args() {
    std::vector<Expr> args;
    if (accept(')')) return args;
    for (;;) {
      args.push_back(expr());
      if (accept(',')) continue;
      expect(')');
      return args;
    }
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return Expr(Rational(mpz_class(s_.substr(start, pos_ - start))));
    }
    std::size_t at = pos_;
    std::string name = ident();
    bool sub = pos_ < s_.size() && s_[pos_] == '_';
    if (sub) ++pos_;

    if (name == "exp" && !sub) {
      expect('(');
      Expr arg = expr();
      expect(')');
      return exp_expr(arg);
    }
    if (name == "D") {
      if (!sub) error("total derivative needs a direction subscript, e.g. D_x(...)");
      Multiindex m = subscript(ctx_.indep);
      expect('(');
      Expr arg = expr();
      expect(')');
      return total_derivative(arg, m, ctx_);
    }
    if (param_index(name) < 0 && ctx_.has_func(name)) {
      const FuncDecl& d = ctx_.func(name);
      Multiindex m(d.params.size(), 0);
      if (sub) m = subscript(d.params);
      std::vector<Expr> args;
      skip();
      if (pos_ < s_.size() && s_[pos_] == '(') {
        ++pos_;
        args = call_args();
        if (args.size() != d.params.size())
          error("function '" + name + "' expects " + std::to_string(d.params.size()) + " arguments");
      } else {
        for (const auto& p : d.params) {
          auto r = resolve_simple(p);
          if (!r) {
            pos_ = at;
            error("function '" + name + "' needs explicit arguments ('" + p + "' is not in scope)");
          }
          args.push_back(*r);
        }
      }
      return ctx_.make_func(name, m, args);
    }
    if (ctx_.has_dep(name) && param_index(name) < 0) {
      Multiindex m = ctx_.zero_index();
      if (sub) m = subscript(ctx_.indep);
      return Expr(ctx_.jet(name, m));
    }
    if (sub) {
      pos_ = at;
      error("'" + name + "' is not a dependent variable or function");
    }
    if (auto r = resolve_simple(name)) return *r;
    pos_ = at;
    fail(ErrorCode::UnknownSymbol, "column " + std::to_string(at + 1) + ": unknown symbol '" + name + "'");
  }
};

std::string multi_str(const Multiindex& m, const std::vector<std::string>& names) {
  std::string out = "_{";
  bool first = true;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (m[i] == 0) continue;
    if (!first) out += ",";
    first = false;
    out += (i < names.size() ? names[i] : "#" + std::to_string(i)) + ":" + std::to_string(m[i]);
  }
  return out + "}";
}

}  // namespace

Expr parse_expression(const std::string& text, const Context& ctx, const std::vector<std::string>& params) {
  Parser p(text, ctx, params);
  return p.parse_all();
}

VectorFunction parse_tuple(const std::string& text, const Context& ctx) {
  static const std::vector<std::string> none;
  Parser p(text, ctx, none);
  return p.parse_list(';');
}

std::string to_string(const Atom& a, const Context& ctx, const std::vector<std::string>& params) {
  switch (a.kind()) {
    case AtomKind::Indep:
      return static_cast<std::size_t>(a.index()) < ctx.indep.size() ? ctx.indep[static_cast<std::size_t>(a.index())]
                                                                     : "#x" + std::to_string(a.index());
    case AtomKind::Const: return a.name();
    case AtomKind::Param:
      return static_cast<std::size_t>(a.index()) < params.size() ? params[static_cast<std::size_t>(a.index())]
                                                                 : "#" + std::to_string(a.index());
    case AtomKind::Jet:
      return a.order() == 0 ? a.name() : a.name() + multi_str(a.multi(), ctx.indep);
    case AtomKind::Func: {
      std::string out = a.name();
      if (a.order() > 0) {
        auto it = ctx.funcs.find(a.name());
        std::vector<std::string> pn = it != ctx.funcs.end() ? it->second.params : std::vector<std::string>{};
        out += multi_str(a.multi(), pn);
      }
      out += "(";
      for (std::size_t i = 0; i < a.args().size(); ++i) {
        if (i) out += ", ";
        out += to_string(a.args()[i], ctx, params);
      }
      return out + ")";
    }
    case AtomKind::Exp: return "exp(" + to_string(a.inner(), ctx, params) + ")";
    case AtomKind::Inv: return "(" + to_string(a.inner(), ctx, params) + ")";
  }
  return "?";
}

std::string to_string(const Expr& e, const Context& ctx, const std::vector<std::string>& params) {
  if (e.is_zero_form()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : e.terms()) {
    std::string body;
    for (const auto& [a, k] : m.factors) {
      if (!body.empty()) body += "*";
      std::string s = to_string(a, ctx, params);
      if (a.kind() == AtomKind::Inv) body += s + "^-" + std::to_string(k);
      else if (k == 1) body += s;
      else body += s + "^" + std::to_string(k);
    }
    Rational mag = abs(c);
    std::string term;
    if (body.empty()) term = mag.get_str();
    else if (mag == 1) term = body;
    else term = mag.get_str() + "*" + body;
    if (first) out = (c < 0 ? "-" : "") + term;
    else out += (c < 0 ? " - " : " + ") + term;
    first = false;
  }
  return out;
}

std::string to_string(const VectorFunction& v, const Context& ctx) {
  std::string out = "(";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += "; ";
    out += to_string(v[i], ctx);
  }
  return out + ")";
}

}  // namespace conslaw
