#include "desing/rational.hpp"

#include <sstream>

namespace desing {

std::string ExtRat::str() const {
  if (inf_) return "inf";
  return rational_str(v_);
}

std::string rational_str(const Rational& r) {
  std::ostringstream os;
  os << num(r);
  if (den(r) != 1) os << "/" << den(r);
  return os.str();
}

Rational parse_rational(const std::string& s) {
  auto bad = [&]() {
    throw std::invalid_argument("malformed rational: '" + s + "'");
  };
  std::string t;
  for (char c : s)
    if (!isspace(static_cast<unsigned char>(c))) t += c;
  if (t.empty()) bad();
  auto slash = t.find('/');
  auto parse_int = [&](const std::string& u) -> Int {
    if (u.empty()) bad();
    size_t i = (u[0] == '-' || u[0] == '+') ? 1 : 0;
    if (i == u.size()) bad();
    for (; i < u.size(); ++i)
      if (!isdigit(static_cast<unsigned char>(u[i]))) bad();
    return Int(u);
  };
  if (slash == std::string::npos) return Rational(parse_int(t));
  Int n = parse_int(t.substr(0, slash));
  Int d = parse_int(t.substr(slash + 1));
  if (d == 0) bad();
  return Rational(n) / Rational(d);
}

namespace {

bool is_prime(const Int& p) {
  if (p < 2) return false;
  for (Int d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

long count_factors(Int n, const Int& p) {
  long k = 0;
  if (n < 0) n = -n;
  while (n % p == 0) {
    n /= p;
    ++k;
  }
  return k;
}

}  // namespace

Valuation vp(const Rational& r, const Int& p) {
  if (!is_prime(p)) throw std::invalid_argument("vp: argument is not prime");
  if (r == 0) return {true, 0};
  return {false, count_factors(num(r), p) - count_factors(den(r), p)};
}

bool domain_member(const std::vector<Rational>& a, int k, int l,
                   const Int& p) {
  if (k < 0 || l < 0 || static_cast<size_t>(k + l) != a.size())
    throw std::invalid_argument("domain_member: dimension mismatch");
  for (int i = 0; i < k; ++i) {
    Valuation v = vp(a[i], p);
    if (!v.infinite && v.v < 0) return false;
  }
  for (int i = k; i < k + l; ++i) {
    Valuation v = vp(a[i], p);
    if (!v.infinite && v.v < 1) return false;
  }
  return true;
}

}  // namespace desing
