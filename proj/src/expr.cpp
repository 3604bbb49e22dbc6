#include "conslaw/expr.hpp"

#include <algorithm>
#include <numeric>

namespace conslaw {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::Unsupported: return "UnsupportedExpressionClass";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::UnboundAtom: return "UnboundAtom";
    case ErrorCode::NotADivergence: return "NotADivergence";
    case ErrorCode::NotNullDivergence: return "NotNullDivergence";
    case ErrorCode::NoRuleApplies: return "NoRuleApplies";
    case ErrorCode::IncompatibleFluxes: return "IncompatibleFluxes";
    case ErrorCode::InvalidSystem: return "InvalidSystem";
    case ErrorCode::NotConserved: return "NotConserved";
    case ErrorCode::NonTermination: return "NonTermination";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

// ---------------------------------------------------------------- atoms

namespace {

std::shared_ptr<AtomNode> new_node(AtomKind k) {
  auto n = std::make_shared<AtomNode>();
  n->kind = k;
  return n;
}

int cmp_multi(const Multiindex& a, const Multiindex& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return a[i] < b[i] ? -1 : 1;
  return 0;
}

int cmp_exprs(const std::vector<Expr>& a, const std::vector<Expr>& b) {
  if (a.size() != b.size()) return a.size() < b.size() ? -1 : 1;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (int c = compare(a[i], b[i])) return c;
  return 0;
}

}  // namespace

Atom Atom::indep(int i) {
  auto n = new_node(AtomKind::Indep);
  n->index = i;
  return Atom(n);
}

Atom Atom::constant(const std::string& name) {
  auto n = new_node(AtomKind::Const);
  n->name = name;
  return Atom(n);
}

Atom Atom::param(int k) {
  auto n = new_node(AtomKind::Param);
  n->index = k;
  return Atom(n);
}

Atom Atom::jet(const std::string& dep, const Multiindex& alpha) {
  auto n = new_node(AtomKind::Jet);
  n->name = dep;
  n->multi = alpha;
  for (int a : alpha) {
    if (a < 0) fail(ErrorCode::Internal, "negative multiindex entry");
    n->order += a;
  }
  return Atom(n);
}

Atom Atom::func(const std::string& name, const Multiindex& derivs, const std::vector<Expr>& args) {
  auto n = new_node(AtomKind::Func);
  n->name = name;
  n->multi = derivs;
  n->args = args;
  for (int a : derivs) n->order += a;
  return Atom(n);
}

Atom Atom::exp_atom(const Expr& prim, long den) {
  auto n = new_node(AtomKind::Exp);
  n->prim = prim;
  n->den = den;
  n->inner = den == 1 ? prim : scale(prim, frac(1, den));
  return Atom(n);
}

Atom Atom::inv_atom(const Expr& base) {
  auto n = new_node(AtomKind::Inv);
  n->inner = base;
  return Atom(n);
}

AtomKind Atom::kind() const { return node_->kind; }
int Atom::index() const { return node_->index; }
const std::string& Atom::name() const { return node_->name; }
const Multiindex& Atom::multi() const { return node_->multi; }
const std::vector<Expr>& Atom::args() const { return node_->args; }
const Expr& Atom::inner() const { return node_->inner; }
const Expr& Atom::prim() const { return node_->prim; }
long Atom::den() const { return node_->den; }
int Atom::order() const { return node_->order; }

int compare(const Atom& a, const Atom& b) {
  if (a.node_ == b.node_) return 0;
  const AtomNode& x = *a.node_;
  const AtomNode& y = *b.node_;
  if (x.kind != y.kind) return x.kind < y.kind ? -1 : 1;
  switch (x.kind) {
    case AtomKind::Indep:
    case AtomKind::Param:
      return x.index == y.index ? 0 : (x.index < y.index ? -1 : 1);
    case AtomKind::Const:
      return x.name.compare(y.name) < 0 ? -1 : (x.name == y.name ? 0 : 1);
    case AtomKind::Jet: {
      if (int c = x.name.compare(y.name)) return c < 0 ? -1 : 1;
      if (x.order != y.order) return x.order < y.order ? -1 : 1;
      return cmp_multi(x.multi, y.multi);
    }
    case AtomKind::Func: {
      if (int c = x.name.compare(y.name)) return c < 0 ? -1 : 1;
      if (x.order != y.order) return x.order < y.order ? -1 : 1;
      if (int c = cmp_multi(x.multi, y.multi)) return c;
      return cmp_exprs(x.args, y.args);
    }
    case AtomKind::Exp:
    case AtomKind::Inv:
      return compare(x.inner, y.inner);
  }
  return 0;
}

// ---------------------------------------------------------------- monomials

int Monomial::degree() const {
  int d = 0;
  for (const auto& f : factors) d += f.second;
  return d;
}

int Monomial::power_of(const Atom& a) const {
  for (const auto& f : factors)
    if (f.first == a) return f.second;
  return 0;
}

Monomial Monomial::with_power(const Atom& a, int power) const {
  Monomial m;
  m.factors.reserve(factors.size() + 1);
  bool placed = false;
  for (const auto& f : factors) {
    int c = placed ? 1 : compare(f.first, a);
    if (c == 0) {
      placed = true;
      if (power != 0) m.factors.emplace_back(a, power);
      continue;
    }
    if (c > 0 && !placed) {
      placed = true;
      if (power != 0) m.factors.emplace_back(a, power);
    }
    m.factors.push_back(f);
  }
  if (!placed && power != 0) m.factors.emplace_back(a, power);
  return m;
}

int compare(const Monomial& a, const Monomial& b) {
  int da = a.degree(), db = b.degree();
  if (da != db) return da < db ? -1 : 1;
  std::size_t n = std::min(a.factors.size(), b.factors.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(a.factors[i].first, b.factors[i].first)) return c;
    if (a.factors[i].second != b.factors[i].second) return a.factors[i].second < b.factors[i].second ? -1 : 1;
  }
  if (a.factors.size() != b.factors.size()) return a.factors.size() < b.factors.size() ? -1 : 1;
  return 0;
}

namespace {

long checked_long(const mpz_class& z) {
  if (!z.fits_slong_p()) fail(ErrorCode::Unsupported, "exponent too large");
  return z.get_si();
}

// Merges exponential factors whose exponents are rational multiples of the same primitive.
void normalize_exp_factors(Monomial& m) {
  int count = 0;
  bool need = false;
  for (const auto& f : m.factors) {
    if (f.first.kind() == AtomKind::Exp) {
      ++count;
      if (f.first.den() != 1) need = true;
    }
  }
  if (count == 0 || (count == 1 && !need)) return;
  std::map<Expr, Rational> groups;
  std::vector<Factor> rest;
  for (const auto& f : m.factors) {
    if (f.first.kind() == AtomKind::Exp)
      groups[f.first.prim()] += frac(f.second, f.first.den());
    else
      rest.push_back(f);
  }
  if (static_cast<int>(groups.size()) == count && !need) return;
  Monomial out;
  out.factors = std::move(rest);
  for (auto& [prim, q] : groups) {
    q.canonicalize();
    if (q == 0) continue;
    long den = checked_long(q.get_den());
    long num = checked_long(q.get_num());
    out = out.with_power(Atom::exp_atom(prim, den), static_cast<int>(num));
  }
  m = std::move(out);
}

}  // namespace

Monomial mul(const Monomial& a, const Monomial& b) {
  Monomial m;
  m.factors.reserve(a.factors.size() + b.factors.size());
  std::size_t i = 0, j = 0;
  bool has_exp = false;
  while (i < a.factors.size() || j < b.factors.size()) {
    int c;
    if (i == a.factors.size()) c = 1;
    else if (j == b.factors.size()) c = -1;
    else c = compare(a.factors[i].first, b.factors[j].first);
    if (c < 0) {
      m.factors.push_back(a.factors[i++]);
    } else if (c > 0) {
      m.factors.push_back(b.factors[j++]);
    } else {
      int e = a.factors[i].second + b.factors[j].second;
      if (e != 0) m.factors.emplace_back(a.factors[i].first, e);
      ++i;
      ++j;
    }
    if (!m.factors.empty() && m.factors.back().first.kind() == AtomKind::Exp) has_exp = true;
  }
  if (has_exp) normalize_exp_factors(m);
  return m;
}

// ---------------------------------------------------------------- expressions

Expr::Expr(int v) {
  if (v != 0) terms_.emplace_back(Monomial{}, Rational(v));
}

Expr::Expr(long v) {
  if (v != 0) terms_.emplace_back(Monomial{}, Rational(v));
}

Expr::Expr(const Rational& v) {
  if (v != 0) terms_.emplace_back(Monomial{}, v);
}

Expr::Expr(const Atom& a, int power) {
  Monomial m;
  if (power != 0) m.factors.emplace_back(a, power);
  if (a.kind() == AtomKind::Exp) normalize_exp_factors(m);
  terms_.emplace_back(std::move(m), Rational(1));
}

Expr::Expr(const Monomial& m, const Rational& c) {
  if (c != 0) terms_.emplace_back(m, c);
}

Expr Expr::from_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& a, const Term& b) { return compare(a.first, b.first) < 0; });
  Expr out;
  for (auto& t : terms) {
    if (!out.terms_.empty() && out.terms_.back().first == t.first) {
      out.terms_.back().second += t.second;
    } else {
      if (!out.terms_.empty() && out.terms_.back().second == 0) out.terms_.pop_back();
      out.terms_.push_back(std::move(t));
    }
  }
  if (!out.terms_.empty() && out.terms_.back().second == 0) out.terms_.pop_back();
  return out;
}

std::optional<Rational> Expr::constant_value() const {
  if (terms_.empty()) return Rational(0);
  if (terms_.size() == 1 && terms_[0].first.empty()) return terms_[0].second;
  return std::nullopt;
}

int compare(const Expr& a, const Expr& b) {
  const auto& x = a.terms();
  const auto& y = b.terms();
  std::size_t n = std::min(x.size(), y.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(x[i].first, y[i].first)) return c;
    if (int c = cmp(x[i].second, y[i].second)) return c < 0 ? -1 : 1;
  }
  if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
  return 0;
}

namespace {

bool has_top_inv(const Expr& e) {
  for (const auto& t : e.terms())
    for (const auto& f : t.first.factors)
      if (f.first.kind() == AtomKind::Inv) return true;
  return false;
}

Expr add_raw(const Expr& a, const Expr& b) {
  std::vector<Expr::Term> out;
  const auto& x = a.terms();
  const auto& y = b.terms();
  out.reserve(x.size() + y.size());
  std::size_t i = 0, j = 0;
  while (i < x.size() || j < y.size()) {
    int c;
    if (i == x.size()) c = 1;
    else if (j == y.size()) c = -1;
    else c = compare(x[i].first, y[j].first);
    if (c < 0) out.push_back(x[i++]);
    else if (c > 0) out.push_back(y[j++]);
    else {
      Rational s = x[i].second + y[j].second;
      if (s != 0) out.emplace_back(x[i].first, s);
      ++i;
      ++j;
    }
  }
  return Expr::from_terms(std::move(out));
}

Expr mul_raw(const Expr& a, const Expr& b) {
  if (a.is_zero_form() || b.is_zero_form()) return Expr();
  std::vector<Expr::Term> out;
  out.reserve(a.size() * b.size());
  for (const auto& s : a.terms())
    for (const auto& t : b.terms()) out.emplace_back(mul(s.first, t.first), s.second * t.second);
  return Expr::from_terms(std::move(out));
}

Expr scale_raw(const Expr& e, const Rational& c) {
  if (c == 0) return Expr();
  std::vector<Expr::Term> out;
  out.reserve(e.size());
  for (const auto& t : e.terms()) out.emplace_back(t.first, t.second * c);
  return Expr::from_terms(std::move(out));
}

Expr pow_raw(const Expr& e, long k) {
  Expr result(1);
  Expr base = e;
  while (k > 0) {
    if (k & 1) result = mul_raw(result, base);
    k >>= 1;
    if (k) base = mul_raw(base, base);
  }
  return result;
}

// Exact division of c by b, where b's last term is taken as the leading monomial.
std::optional<Expr> divide_exact(const Expr& c, const Expr& b) {
  const auto& lead = b.terms().back();
  Expr rem = c;
  Expr quot;
  for (int guard = 0; guard < 256; ++guard) {
    if (rem.is_zero_form()) return quot;
    const Expr::Term* pick = nullptr;
    for (const auto& t : rem.terms()) {
      bool ok = true;
      for (const auto& f : lead.first.factors) {
        int p = t.first.power_of(f.first);
        if ((f.second > 0 && p < f.second) || (f.second < 0 && p > f.second)) {
          ok = false;
          break;
        }
      }
      if (ok) {
        pick = &t;
        break;
      }
    }
    if (!pick) return std::nullopt;
    Monomial q = pick->first;
    for (const auto& f : lead.first.factors) q = q.with_power(f.first, q.power_of(f.first) - f.second);
    Expr qt(q, pick->second / lead.second);
    quot = add_raw(quot, qt);
    rem = add_raw(rem, scale_raw(mul_raw(qt, b), Rational(-1)));
  }
  return std::nullopt;
}

Expr normalize_inverses(Expr e) {
  for (int guard = 0; guard < 64; ++guard) {
    std::set<Atom> invs;
    for (const auto& t : e.terms())
      for (const auto& f : t.first.factors)
        if (f.first.kind() == AtomKind::Inv) invs.insert(f.first);
    bool changed = false;
    for (const Atom& y : invs) {
      std::map<int, std::vector<Expr::Term>> groups;
      for (const auto& t : e.terms()) {
        int p = t.first.power_of(y);
        groups[p].emplace_back(t.first.with_power(y, 0), t.second);
      }
      std::map<int, Expr> blocks;
      for (auto& [p, ts] : groups) blocks[p] = Expr::from_terms(std::move(ts));
      for (auto it = blocks.rbegin(); it != blocks.rend(); ++it) {
        if (it->first <= 0 || it->second.is_zero_form()) continue;
        auto q = divide_exact(it->second, y.inner());
        if (!q) continue;
        blocks[it->first - 1] = add_raw(blocks[it->first - 1], *q);
        it->second = Expr();
        changed = true;
      }
      if (!changed) continue;
      std::vector<Expr::Term> out;
      for (const auto& [p, block] : blocks)
        for (const auto& t : block.terms()) {
          Monomial m = t.first;
          if (p != 0) m = mul(m, Monomial{{{y, p}}});
          out.emplace_back(std::move(m), t.second);
        }
      e = Expr::from_terms(std::move(out));
      break;
    }
    if (!changed) return e;
  }
  return e;
}

Expr finish(Expr e) {
  if (has_top_inv(e)) return normalize_inverses(std::move(e));
  return e;
}

Expr invert(const Expr& e) {
  if (e.is_zero_form()) fail(ErrorCode::DivisionByZero, "division by zero");
  if (e.size() == 1) {
    const auto& [m, c] = e.terms()[0];
    Monomial inv;
    Expr extra(1);
    for (const auto& f : m.factors) {
      if (f.first.kind() == AtomKind::Inv)
        extra = mul_raw(extra, pow_raw(f.first.inner(), f.second));
      else
        inv.factors.emplace_back(f.first, -f.second);
    }
    Monomial norm;
    for (const auto& f : inv.factors) norm = mul(norm, Monomial{{f}});
    return mul_raw(Expr(norm, 1 / c), extra);
  }
  if (has_jets(e))
    fail(ErrorCode::Unsupported, "reciprocal of a sum that depends on jet variables");
  Rational c = content(e);
  Expr base = scale_raw(e, 1 / c);
  return Expr(Monomial{{{Atom::inv_atom(base), 1}}}, 1 / c);
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) { return finish(add_raw(a, b)); }
Expr operator-(const Expr& a, const Expr& b) { return finish(add_raw(a, scale_raw(b, Rational(-1)))); }
Expr operator-(const Expr& a) { return scale_raw(a, Rational(-1)); }
Expr operator*(const Expr& a, const Expr& b) { return finish(mul_raw(a, b)); }
Expr& operator+=(Expr& a, const Expr& b) { return a = a + b; }
Expr& operator-=(Expr& a, const Expr& b) { return a = a - b; }
Expr& operator*=(Expr& a, const Expr& b) { return a = a * b; }
Expr scale(const Expr& e, const Rational& c) { return scale_raw(e, c); }

Expr pow(const Expr& e, long k) {
  if (k >= 0) return finish(pow_raw(e, k));
  return finish(pow_raw(invert(e), -k));
}

Expr divide(const Expr& a, const Expr& b) {
  if (auto c = b.constant_value()) {
    if (*c == 0) fail(ErrorCode::DivisionByZero, "division by zero");
    return scale(a, 1 / *c);
  }
  return a * pow(b, -1);
}

Rational content(const Expr& e) {
  if (e.is_zero_form()) return Rational(1);
  mpz_class g = 0, l = 1;
  for (const auto& t : e.terms()) {
    mpz_class num = t.second.get_num();
    mpz_class den = t.second.get_den();
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), num.get_mpz_t());
    mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), den.get_mpz_t());
  }
  Rational c(g, l);
  c.canonicalize();
  if (e.terms().front().second < 0) c = -c;
  return c;
}

Expr exp_expr(const Expr& exponent) {
  if (exponent.is_zero_form()) return Expr(1);
  if (exponent.is_constant()) fail(ErrorCode::Unsupported, "exp of a nonzero rational constant");
  Rational c = content(exponent);
  Expr prim = scale_raw(exponent, 1 / c);
  long den = checked_long(c.get_den());
  long num = checked_long(c.get_num());
  return Expr(Monomial{{{Atom::exp_atom(prim, den), static_cast<int>(num)}}}, Rational(1));
}

bool is_zero(const Expr& e) {
  if (!has_top_inv(e)) return e.is_zero_form();
  std::map<Atom, int> maxp;
  for (const auto& t : e.terms())
    for (const auto& f : t.first.factors)
      if (f.first.kind() == AtomKind::Inv) maxp[f.first] = std::max(maxp[f.first], f.second);
  Expr cleared;
  for (const auto& t : e.terms()) {
    Monomial m;
    Expr mult(1);
    for (const auto& f : t.first.factors)
      if (f.first.kind() != AtomKind::Inv) m.factors.push_back(f);
    for (const auto& [y, k] : maxp) {
      int p = t.first.power_of(y);
      if (k - p > 0) mult = mul_raw(mult, pow_raw(y.inner(), k - p));
    }
    cleared = add_raw(cleared, mul_raw(Expr(m, t.second), mult));
  }
  return is_zero(cleared);
}

// ---------------------------------------------------------------- traversal

std::set<Atom> top_atoms(const Expr& e) {
  std::set<Atom> out;
  for (const auto& t : e.terms())
    for (const auto& f : t.first.factors) out.insert(f.first);
  return out;
}

namespace {

void collect_all(const Expr& e, std::set<Atom>& out) {
  for (const auto& t : e.terms())
    for (const auto& f : t.first.factors) {
      const Atom& a = f.first;
      if (!out.insert(a).second) continue;
      if (a.kind() == AtomKind::Func)
        for (const auto& arg : a.args()) collect_all(arg, out);
      else if (a.kind() == AtomKind::Exp || a.kind() == AtomKind::Inv)
        collect_all(a.inner(), out);
    }
}

}  // namespace

std::set<Atom> all_atoms(const Expr& e) {
  std::set<Atom> out;
  collect_all(e, out);
  return out;
}

bool has_jets(const Expr& e) {
  for (const auto& a : all_atoms(e))
    if (a.kind() == AtomKind::Jet) return true;
  return false;
}

bool depends_on_dep(const Expr& e, const std::string& dep) {
  for (const auto& a : all_atoms(e))
    if (a.kind() == AtomKind::Jet && a.name() == dep) return true;
  return false;
}

// ---------------------------------------------------------------- substitution

namespace {

struct Substituter {
  const std::map<Atom, Expr>& bindings;
  std::map<Atom, Expr> memo;

  Expr atom(const Atom& a) {
    auto b = bindings.find(a);
    if (b != bindings.end()) return b->second;
    auto m = memo.find(a);
    if (m != memo.end()) return m->second;
    Expr r;
    switch (a.kind()) {
      case AtomKind::Func: {
        std::vector<Expr> args;
        bool changed = false;
        for (const auto& x : a.args()) {
          args.push_back(expr(x));
          if (args.back() != x) changed = true;
        }
        r = changed ? Expr(Atom::func(a.name(), a.multi(), args)) : Expr(a);
        break;
      }
      case AtomKind::Exp: {
        Expr in = expr(a.inner());
        r = in == a.inner() ? Expr(a) : exp_expr(in);
        break;
      }
      case AtomKind::Inv: {
        Expr in = expr(a.inner());
        r = in == a.inner() ? Expr(a) : pow(in, -1);
        break;
      }
      default:
        r = Expr(a);
    }
    memo.emplace(a, r);
    return r;
  }

  Expr expr(const Expr& e) {
    Expr out;
    for (const auto& t : e.terms()) {
      Expr prod(t.second);
      Monomial kept;
      for (const auto& f : t.first.factors) {
        Expr v = atom(f.first);
        if (v.size() == 1 && v.terms()[0].second == 1 && v.terms()[0].first.factors.size() == 1 &&
            v.terms()[0].first.factors[0].first == f.first) {
          kept = mul(kept, Monomial{{f}});
        } else {
          prod = prod * pow(v, f.second);
        }
      }
      out = out + prod * Expr(kept, 1);
    }
    return out;
  }
};

}  // namespace

Expr substitute(const Expr& e, const std::map<Atom, Expr>& bindings) {
  if (bindings.empty()) return e;
  for (const auto& [k, v] : bindings) {
    if (k.kind() != AtomKind::Func) continue;
    for (const auto& a : all_atoms(e))
      if (a.kind() == AtomKind::Func && a.name() == k.name() && a != k)
        fail(ErrorCode::Unsupported, "binding function symbol '" + k.name() +
                                         "' would leave other derivatives of it dangling");
  }
  Substituter s{bindings, {}};
  return s.expr(e);
}

namespace {

Expr param_derivatives(Expr r, const Multiindex& rest, const Context& ctx) {
  for (std::size_t j = 0; j < rest.size(); ++j)
    for (int k = 0; k < rest[j]; ++k) r = partial_diff(r, Atom::param(static_cast<int>(j)), ctx);
  return r;
}

Expr bind_params(const Expr& r, const std::vector<Expr>& args) {
  std::map<Atom, Expr> b;
  for (std::size_t j = 0; j < args.size(); ++j) b.emplace(Atom::param(static_cast<int>(j)), args[j]);
  Substituter s{b, {}};
  return s.expr(r);
}

struct FunctionSubstituter {
  const std::string& name;
  const Expr& replacement;
  const Context& ctx;
  std::map<Atom, Expr> memo;

  Expr atom(const Atom& a) {
    auto m = memo.find(a);
    if (m != memo.end()) return m->second;
    Expr r;
    switch (a.kind()) {
      case AtomKind::Func: {
        std::vector<Expr> args;
        for (const auto& x : a.args()) args.push_back(expr(x));
        if (a.name() == name)
          r = bind_params(param_derivatives(replacement, a.multi(), ctx), args);
        else
          r = Expr(Atom::func(a.name(), a.multi(), args));
        break;
      }
      case AtomKind::Exp: r = exp_expr(expr(a.inner())); break;
      case AtomKind::Inv: r = pow(expr(a.inner()), -1); break;
      default: r = Expr(a);
    }
    memo.emplace(a, r);
    return r;
  }

  Expr expr(const Expr& e) {
    Expr out;
    for (const auto& t : e.terms()) {
      Expr prod(t.second);
      for (const auto& f : t.first.factors) prod = prod * pow(atom(f.first), f.second);
      out = out + prod;
    }
    return out;
  }
};

}  // namespace

Expr substitute_function(const Expr& e, const std::string& name, const Expr& replacement,
                         const Context& ctx) {
  FunctionSubstituter s{name, replacement, ctx, {}};
  return s.expr(e);
}

// ---------------------------------------------------------------- derivation

Expr derive(const Expr& e, const LeafRule& leaf, const Context& ctx) {
  std::map<Atom, Expr> memo;
  std::function<Expr(const Atom&)> datom;
  std::function<Expr(const Expr&)> dexpr;

  datom = [&](const Atom& a) -> Expr {
    auto m = memo.find(a);
    if (m != memo.end()) return m->second;
    Expr r;
    if (auto l = leaf(a)) {
      r = *l;
    } else {
      switch (a.kind()) {
        case AtomKind::Func:
          for (std::size_t k = 0; k < a.args().size(); ++k) {
            Expr da = dexpr(a.args()[k]);
            if (da.is_zero_form()) continue;
            r = r + ctx.slot_derivative(a, static_cast<int>(k)) * da;
          }
          break;
        case AtomKind::Exp: {
          Expr di = dexpr(a.inner());
          if (!di.is_zero_form()) r = Expr(a) * di;
          break;
        }
        case AtomKind::Inv: {
          Expr di = dexpr(a.inner());
          if (!di.is_zero_form()) r = -(Expr(a, 2) * di);
          break;
        }
        default:
          break;
      }
    }
    memo.emplace(a, r);
    return r;
  };

  dexpr = [&](const Expr& x) -> Expr {
    std::vector<Expr::Term> raw;
    bool inv = false;
    for (const auto& t : x.terms()) {
      const auto& fs = t.first.factors;
      for (std::size_t j = 0; j < fs.size(); ++j) {
        Expr d = datom(fs[j].first);
        if (d.is_zero_form()) continue;
        Monomial rest = t.first.with_power(fs[j].first, fs[j].second - 1);
        Rational c = t.second * fs[j].second;
        for (const auto& s : d.terms()) {
          Monomial m = mul(rest, s.first);
          for (const auto& f : m.factors)
            if (f.first.kind() == AtomKind::Inv) inv = true;
          raw.emplace_back(std::move(m), c * s.second);
        }
      }
    }
    Expr out = Expr::from_terms(std::move(raw));
    return inv ? out * Expr(1) : out;
  };

  return dexpr(e);
}

Expr partial_diff(const Expr& e, const Atom& a, const Context& ctx) {
  return derive(
      e,
      [&](const Atom& x) -> std::optional<Expr> {
        if (x == a) return Expr(1);
        if (!x.composite()) return Expr();
        return std::nullopt;
      },
      ctx);
}

// ---------------------------------------------------------------- evaluation

Rational eval_rational(const Expr& e, const std::map<Atom, Rational>& point) {
  std::function<Rational(const Expr&)> ev;
  std::function<Rational(const Atom&)> ea = [&](const Atom& a) -> Rational {
    auto it = point.find(a);
    if (it != point.end()) return it->second;
    if (a.kind() == AtomKind::Exp) {
      if (ev(a.inner()) != 0) fail(ErrorCode::Unsupported, "exp with a nonzero exponent cannot be evaluated exactly");
      return Rational(1);
    }
    if (a.kind() == AtomKind::Inv) {
      Rational b = ev(a.inner());
      if (b == 0) fail(ErrorCode::DivisionByZero, "reciprocal of zero");
      return 1 / b;
    }
    fail(ErrorCode::UnboundAtom, "unbound atom in evaluation");
  };
  ev = [&](const Expr& x) -> Rational {
    Rational sum = 0;
    for (const auto& t : x.terms()) {
      Rational p = t.second;
      for (const auto& f : t.first.factors) {
        Rational v = ea(f.first);
        if (f.second < 0) {
          if (v == 0) fail(ErrorCode::DivisionByZero, "negative power of zero");
          v = 1 / v;
        }
        for (int k = 0; k < std::abs(f.second); ++k) p *= v;
      }
      sum += p;
    }
    return sum;
  };
  return ev(e);
}

// ---------------------------------------------------------------- context

int Context::indep_index(const std::string& name) const {
  for (std::size_t i = 0; i < indep.size(); ++i)
    if (indep[i] == name) return static_cast<int>(i);
  return -1;
}

bool Context::has_dep(const std::string& name) const {
  return std::find(deps.begin(), deps.end(), name) != deps.end();
}

bool Context::has_const(const std::string& name) const {
  return std::find(consts.begin(), consts.end(), name) != consts.end();
}

const FuncDecl& Context::func(const std::string& name) const {
  auto it = funcs.find(name);
  if (it == funcs.end()) fail(ErrorCode::UnknownSymbol, "unknown function symbol '" + name + "'");
  return it->second;
}

Multiindex Context::delta(int i) const {
  Multiindex d(indep.size(), 0);
  d.at(static_cast<std::size_t>(i)) = 1;
  return d;
}

Expr Context::make_func(const std::string& name, const Multiindex& derivs,
                        const std::vector<Expr>& args) const {
  const FuncDecl& d = func(name);
  if (args.size() != d.params.size())
    fail(ErrorCode::ArityMismatch, "function '" + name + "' expects " + std::to_string(d.params.size()) + " arguments");
  for (std::size_t k = 0; k < derivs.size(); ++k) {
    if (derivs[k] > 0 && k < d.slot_rules.size() && d.slot_rules[k]) {
      Multiindex rest = derivs;
      rest[k] -= 1;
      return bind_params(param_derivatives(*d.slot_rules[k], rest, *this), args);
    }
  }
  for (const auto& c : d.constraints) {
    bool applies = true;
    for (std::size_t k = 0; k < derivs.size(); ++k)
      if (derivs[k] < c.pattern[k]) applies = false;
    if (!applies) continue;
    Multiindex rest = derivs;
    for (std::size_t k = 0; k < derivs.size(); ++k) rest[k] -= c.pattern[k];
    return bind_params(param_derivatives(c.replacement, rest, *this), args);
  }
  return Expr(Atom::func(name, derivs, args));
}

Expr Context::slot_derivative(const Atom& f, int k) const {
  Multiindex d = f.multi();
  d.at(static_cast<std::size_t>(k)) += 1;
  return make_func(f.name(), d, f.args());
}

}  // namespace conslaw
