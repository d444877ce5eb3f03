#include "desing/poly.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace desing {

int grevlex_cmp(const Exponents& a, const Exponents& b) {
  unsigned long da = 0, db = 0;
  for (unsigned e : a) da += e;
  for (unsigned e : b) db += e;
  if (da != db) return da < db ? -1 : 1;
  // Equal degree: a > b iff the last nonzero entry of a - b is negative.
  for (size_t i = a.size(); i-- > 0;) {
    if (a[i] != b[i]) return a[i] < b[i] ? 1 : -1;
  }
  return 0;
}

Poly Poly::constant(const VarList& vars, const Rational& c) {
  Poly p(vars);
  if (c != 0) p.terms_[Exponents(vars.size(), 0)] = c;
  return p;
}

Poly Poly::variable(const VarList& vars, size_t index) {
  if (index >= vars.size())
    throw std::invalid_argument("Poly::variable: index out of range");
  Poly p(vars);
  Exponents e(vars.size(), 0);
  e[index] = 1;
  p.terms_[e] = 1;
  return p;
}

bool Poly::is_constant() const {
  if (terms_.empty()) return true;
  if (terms_.size() > 1) return false;
  const Exponents& e = terms_.begin()->first;
  return std::all_of(e.begin(), e.end(), [](unsigned x) { return x == 0; });
}

long Poly::total_degree() const {
  if (terms_.empty()) return -1;
  // Leading term has maximal degree under grevlex.
  unsigned long d = 0;
  for (unsigned e : terms_.begin()->first) d += e;
  return static_cast<long>(d);
}

const Exponents& Poly::leading_exponents() const {
  if (terms_.empty()) throw std::logic_error("leading term of zero");
  return terms_.begin()->first;
}

const Rational& Poly::leading_coefficient() const {
  if (terms_.empty()) throw std::logic_error("leading term of zero");
  return terms_.begin()->second;
}

void Poly::set_term(const Exponents& e, const Rational& c) {
  if (e.size() != vars_.size())
    throw std::invalid_argument("set_term: exponent length mismatch");
  if (c == 0)
    terms_.erase(e);
  else
    terms_[e] = c;
}

Rational Poly::coefficient(const Exponents& e) const {
  auto it = terms_.find(e);
  return it == terms_.end() ? Rational(0) : it->second;
}

void Poly::check_same_vars(const Poly& o) const {
  if (vars_ != o.vars_)
    throw std::invalid_argument("polynomials over different variable lists");
}

Poly Poly::operator-() const {
  Poly r(vars_);
  for (auto& [e, c] : terms_) r.terms_[e] = -c;
  return r;
}

Poly Poly::operator+(const Poly& o) const {
  check_same_vars(o);
  Poly r = *this;
  for (auto& [e, c] : o.terms_) {
    auto it = r.terms_.find(e);
    if (it == r.terms_.end()) {
      r.terms_[e] = c;
    } else {
      it->second += c;
      if (it->second == 0) r.terms_.erase(it);
    }
  }
  return r;
}

Poly Poly::operator-(const Poly& o) const { return *this + (-o); }

Poly Poly::operator*(const Poly& o) const {
  check_same_vars(o);
  Poly r(vars_);
  for (auto& [e1, c1] : terms_) {
    for (auto& [e2, c2] : o.terms_) {
      Exponents e(e1.size());
      for (size_t i = 0; i < e.size(); ++i) e[i] = e1[i] + e2[i];
      auto it = r.terms_.find(e);
      if (it == r.terms_.end()) {
        r.terms_[e] = c1 * c2;
      } else {
        it->second += c1 * c2;
        if (it->second == 0) r.terms_.erase(it);
      }
    }
  }
  return r;
}

Poly Poly::operator*(const Rational& c) const {
  Poly r(vars_);
  if (c == 0) return r;
  for (auto& [e, k] : terms_) r.terms_[e] = k * c;
  return r;
}

Poly Poly::pow(unsigned k) const {
  Poly r = Poly::constant(vars_, 1);
  Poly base = *this;
  while (k > 0) {
    if (k & 1u) r = r * base;
    base = (k >>= 1) ? base * base : base;
  }
  return r;
}

Rational Poly::eval(const PointQ& a) const {
  if (a.size() != vars_.size())
    throw std::invalid_argument("eval: dimension mismatch");
  Rational total = 0;
  for (auto& [e, c] : terms_) {
    Rational t = c;
    for (size_t i = 0; i < e.size(); ++i) {
      for (unsigned j = 0; j < e[i]; ++j) t *= a[i];
    }
    total += t;
  }
  return total;
}

std::string Poly::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& [e, c] : terms_) {
    Rational v = c;
    if (first) {
      if (v < 0) {
        os << "-";
        v = -v;
      }
    } else {
      os << (v < 0 ? " - " : " + ");
      if (v < 0) v = -v;
    }
    first = false;
    bool any_var = std::any_of(e.begin(), e.end(), [](unsigned x) { return x; });
    bool coef_shown = !any_var || v != 1;
    if (coef_shown) os << rational_str(v);
    bool need_star = coef_shown;
    for (size_t i = 0; i < e.size(); ++i) {
      if (!e[i]) continue;
      if (need_star) os << "*";
      os << vars_[i];
      if (e[i] > 1) os << "^" << e[i];
      need_star = true;
    }
  }
  return os.str();
}

Poly partial_derivative(const Poly& p, size_t var_index, unsigned order) {
  if (var_index >= p.nvars())
    throw std::invalid_argument("partial_derivative: var index out of range");
  Poly cur = p;
  for (unsigned k = 0; k < order; ++k) {
    Poly next(p.vars());
    for (auto& [e, c] : cur.terms()) {
      if (e[var_index] == 0) continue;
      Exponents f = e;
      f[var_index] -= 1;
      next.set_term(f, next.coefficient(f) + c * Rational(e[var_index]));
    }
    cur = next;
  }
  return cur;
}

Poly substitute(const Poly& p, const std::vector<Poly>& image) {
  if (image.size() != p.nvars())
    throw std::invalid_argument("substitute: image size mismatch");
  VarList tvars = image.empty() ? p.vars() : image[0].vars();
  for (auto& q : image)
    if (q.vars() != tvars)
      throw std::invalid_argument("substitute: images over different vars");
  // Cache powers of each image polynomial.
  std::vector<std::vector<Poly>> powers(image.size());
  for (size_t i = 0; i < image.size(); ++i)
    powers[i].push_back(Poly::constant(tvars, 1));
  auto power = [&](size_t i, unsigned k) -> const Poly& {
    while (powers[i].size() <= k)
      powers[i].push_back(powers[i].back() * image[i]);
    return powers[i][k];
  };
  Poly r(tvars);
  for (auto& [e, c] : p.terms()) {
    Poly t = Poly::constant(tvars, c);
    for (size_t i = 0; i < e.size(); ++i)
      if (e[i]) t = t * power(i, e[i]);
    r = r + t;
  }
  return r;
}

Poly substitute_named(const Poly& p, const VarList& target_vars,
                      const std::map<std::string, Poly>& image) {
  std::vector<Poly> img;
  img.reserve(p.nvars());
  for (auto& name : p.vars()) {
    auto it = image.find(name);
    if (it != image.end()) {
      if (it->second.vars() != target_vars)
        throw std::invalid_argument("substitute_named: image var mismatch");
      img.push_back(it->second);
    } else {
      auto pos = std::find(target_vars.begin(), target_vars.end(), name);
      if (pos == target_vars.end())
        throw std::invalid_argument("substitute_named: unmapped variable " +
                                    name);
      img.push_back(Poly::variable(
          target_vars, static_cast<size_t>(pos - target_vars.begin())));
    }
  }
  return substitute(p, img);
}

Poly taylor_shift(const Poly& p, const PointQ& a) {
  if (a.size() != p.nvars())
    throw std::invalid_argument("taylor_shift: dimension mismatch");
  std::vector<Poly> image;
  image.reserve(a.size());
  for (size_t i = 0; i < a.size(); ++i)
    image.push_back(Poly::variable(p.vars(), i) +
                    Poly::constant(p.vars(), a[i]));
  return substitute(p, image);
}

ExtNat order_at_point(const Poly& p, const PointQ& a) {
  if (p.is_zero()) return ExtNat::infinity();
  Poly q = taylor_shift(p, a);
  long best = -1;
  for (auto& [e, c] : q.terms()) {
    long d = 0;
    for (unsigned x : e) d += x;
    if (best < 0 || d < best) best = d;
  }
  return ExtNat(best);
}

namespace {

Rational det(std::vector<std::vector<Rational>> m) {
  size_t n = m.size();
  Rational d = 1;
  for (size_t col = 0; col < n; ++col) {
    size_t piv = col;
    while (piv < n && m[piv][col] == 0) ++piv;
    if (piv == n) return 0;
    if (piv != col) {
      std::swap(m[piv], m[col]);
      d = -d;
    }
    d *= m[col][col];
    for (size_t r = col + 1; r < n; ++r) {
      if (m[r][col] == 0) continue;
      Rational f = m[r][col] / m[col][col];
      for (size_t c = col; c < n; ++c) m[r][c] -= f * m[col][c];
    }
  }
  return d;
}

}  // namespace

Poly linear_change(const Poly& p,
                   const std::vector<std::vector<Rational>>& U) {
  size_t n = p.nvars();
  if (U.size() != n)
    throw std::invalid_argument("linear_change: matrix size mismatch");
  for (auto& row : U)
    if (row.size() != n)
      throw std::invalid_argument("linear_change: matrix not square");
  if (det(U) == 0) throw std::invalid_argument("linear_change: singular U");
  std::vector<Poly> image;
  image.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    Poly q(p.vars());
    for (size_t j = 0; j < n; ++j)
      q = q + Poly::variable(p.vars(), j) * U[i][j];
    image.push_back(q);
  }
  return substitute(p, image);
}

namespace {

bool exps_divide(const Exponents& d, const Exponents& e) {
  for (size_t i = 0; i < d.size(); ++i)
    if (d[i] > e[i]) return false;
  return true;
}

}  // namespace

std::optional<Poly> exact_divide(const Poly& p, const Poly& d) {
  if (d.is_zero()) throw std::invalid_argument("exact_divide: zero divisor");
  if (p.vars() != d.vars())
    throw std::invalid_argument("exact_divide: variable mismatch");
  Poly q(p.vars());
  Poly r = p;
  const Exponents& lt = d.leading_exponents();
  while (!r.is_zero()) {
    const Exponents& re = r.leading_exponents();
    if (!exps_divide(lt, re)) return std::nullopt;
    Exponents qe(re.size());
    for (size_t i = 0; i < re.size(); ++i) qe[i] = re[i] - lt[i];
    Rational qc = r.leading_coefficient() / d.leading_coefficient();
    Poly m(p.vars());
    m.set_term(qe, qc);
    q = q + m;
    r = r - m * d;
  }
  return q;
}

ExtNat divisibility_order(const Poly& p, const Poly& theta) {
  if (theta.is_constant())
    throw std::invalid_argument("divisibility_order: constant divisor");
  if (p.is_zero()) return ExtNat::infinity();
  long k = 0;
  Poly cur = p;
  while (true) {
    auto q = exact_divide(cur, theta);
    if (!q) return ExtNat(k);
    cur = *q;
    ++k;
  }
}

namespace {

long deg_in(const Poly& p, size_t v) {
  long d = -1;
  for (auto& [e, c] : p.terms()) d = std::max(d, static_cast<long>(e[v]));
  return d;
}

// Coefficient of v^k in p, as a polynomial with v-exponent zero.
Poly coeff_in(const Poly& p, size_t v, unsigned k) {
  Poly r(p.vars());
  for (auto& [e, c] : p.terms()) {
    if (e[v] != k) continue;
    Exponents f = e;
    f[v] = 0;
    r.set_term(f, c);
  }
  return r;
}

Poly monic(const Poly& p) {
  if (p.is_zero()) return p;
  return p * (Rational(1) / p.leading_coefficient());
}

Poly gcd_rec(const Poly& a, const Poly& b);

// Content of p with respect to variable v: gcd of the v-coefficients.
Poly content_in(const Poly& p, size_t v) {
  Poly g(p.vars());
  long d = deg_in(p, v);
  for (long k = 0; k <= d; ++k) {
    Poly c = coeff_in(p, v, static_cast<unsigned>(k));
    if (!c.is_zero()) g = gcd_rec(g, c);
    if (g.is_unit()) break;
  }
  return g;
}

Poly primitive_in(const Poly& p, size_t v, Poly* content_out = nullptr) {
  Poly c = content_in(p, v);
  if (content_out) *content_out = c;
  auto q = exact_divide(p, c);
  if (!q) throw std::logic_error("primitive_in: content does not divide");
  return *q;
}

Poly gcd_rec(const Poly& a, const Poly& b) {
  if (a.is_zero()) return monic(b);
  if (b.is_zero()) return monic(a);
  if (a.is_constant() || b.is_constant())
    return Poly::constant(a.vars(), 1);
  // Pick the last variable occurring in either polynomial.
  size_t v = 0;
  bool found = false;
  for (size_t i = a.nvars(); i-- > 0;) {
    if (deg_in(a, i) > 0 || deg_in(b, i) > 0) {
      v = i;
      found = true;
      break;
    }
  }
  if (!found) return Poly::constant(a.vars(), 1);
  long da = deg_in(a, v), db = deg_in(b, v);
  if (da == 0 || db == 0) {
    // One of them is free of v: gcd divides the content of the other.
    if (da == 0) return gcd_rec(a, content_in(b, v));
    return gcd_rec(content_in(a, v), b);
  }
  Poly ca, cb;
  Poly pa = primitive_in(a, v, &ca);
  Poly pb = primitive_in(b, v, &cb);
  Poly cg = gcd_rec(ca, cb);
  if (deg_in(pa, v) < deg_in(pb, v)) std::swap(pa, pb);
  // Primitive pseudo-remainder sequence.
  while (true) {
    long dr = deg_in(pa, v), ds = deg_in(pb, v);
    // Pseudo-remainder of pa by pb in v.
    Poly r = pa;
    Poly lcb = coeff_in(pb, v, static_cast<unsigned>(ds));
    while (!r.is_zero() && deg_in(r, v) >= ds) {
      long d = deg_in(r, v);
      Poly lcr = coeff_in(r, v, static_cast<unsigned>(d));
      Poly vpow(r.vars());
      Exponents e(r.nvars(), 0);
      e[v] = static_cast<unsigned>(d - ds);
      vpow.set_term(e, 1);
      r = r * lcb - pb * (lcr * vpow);
    }
    if (r.is_zero()) {
      return monic(cg * primitive_in(pb, v));
    }
    if (deg_in(r, v) == 0) return monic(cg);
    pa = pb;
    pb = primitive_in(r, v);
    (void)dr;
  }
}

}  // namespace

Poly poly_gcd(const Poly& a, const Poly& b) {
  if (a.vars() != b.vars())
    throw std::invalid_argument("poly_gcd: variable mismatch");
  return gcd_rec(a, b);
}

Poly squarefree_part(const Poly& p) {
  if (p.is_zero()) return p;
  if (p.is_constant()) return Poly::constant(p.vars(), 1);
  Poly g(p.vars());
  for (size_t i = 0; i < p.nvars(); ++i) {
    Poly d = partial_derivative(p, i);
    if (!d.is_zero()) g = g.is_zero() ? d : poly_gcd(g, d);
    if (g.is_unit()) break;
  }
  if (g.is_zero()) return monic(p);  // constant-in-all-vars edge case
  Poly full = poly_gcd(p, g);
  auto q = exact_divide(p, full);
  if (!q) throw std::logic_error("squarefree_part: inexact division");
  return monic(*q);
}

namespace {

struct Parser {
  const std::string& s;
  size_t i = 0;
  const VarList& vars;

  explicit Parser(const std::string& text, const VarList& v)
      : s(text), vars(v) {}

  void skip() {
    while (i < s.size() && isspace(static_cast<unsigned char>(s[i]))) ++i;
  }
  bool eof() {
    skip();
    return i >= s.size();
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw std::invalid_argument("parse_poly: " + msg + " at position " +
                                std::to_string(i) + " in '" + s + "'");
  }

  Rational parse_number() {
    skip();
    size_t start = i;
    while (i < s.size() && isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == start) fail("expected number");
    std::string numstr = s.substr(start, i - start);
    skip();
    if (i < s.size() && s[i] == '/') {
      size_t save = i;
      ++i;
      skip();
      size_t dstart = i;
      while (i < s.size() && isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i == dstart) {
        i = save;  // not a fraction after all
      } else {
        return parse_rational(numstr + "/" + s.substr(dstart, i - dstart));
      }
    }
    return parse_rational(numstr);
  }

  Poly parse_factor() {
    skip();
    if (i >= s.size()) fail("expected factor");
    if (isdigit(static_cast<unsigned char>(s[i]))) {
      return Poly::constant(vars, parse_number());
    }
    // Variable name: longest match against the variable list.
    size_t best = 0;
    size_t which = vars.size();
    for (size_t v = 0; v < vars.size(); ++v) {
      const std::string& name = vars[v];
      if (name.size() > best && s.compare(i, name.size(), name) == 0) {
        best = name.size();
        which = v;
      }
    }
    if (which == vars.size()) fail("unknown variable");
    i += best;
    Poly p = Poly::variable(vars, which);
    skip();
    if (i < s.size() && s[i] == '^') {
      ++i;
      skip();
      size_t start = i;
      while (i < s.size() && isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i == start) fail("expected exponent");
      unsigned k = static_cast<unsigned>(std::stoul(s.substr(start, i - start)));
      p = p.pow(k);
    }
    return p;
  }

  Poly parse_term() {
    Poly p = parse_factor();
    while (true) {
      skip();
      if (i < s.size() && s[i] == '*') {
        ++i;
        p = p * parse_factor();
      } else {
        break;
      }
    }
    return p;
  }

  Poly parse() {
    Poly total(vars);
    bool first = true;
    while (!eof()) {
      int sign = 1;
      skip();
      if (s[i] == '+' || s[i] == '-') {
        sign = s[i] == '-' ? -1 : 1;
        ++i;
      } else if (!first) {
        fail("expected + or -");
      }
      Poly t = parse_term();
      total = sign > 0 ? total + t : total - t;
      first = false;
    }
    return total;
  }
};

}  // namespace

Poly parse_poly(const std::string& text, const VarList& vars) {
  return Parser(text, vars).parse();
}

}  // namespace desing
