#ifndef DESING_RATIONAL_HPP
#define DESING_RATIONAL_HPP

// Exact arbitrary-precision arithmetic used throughout the library.
// All core computations are exact; no floating point anywhere.

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace desing {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Int num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Int den(const Rational& r) { return boost::multiprecision::denominator(r); }

// Extended natural number: a value in {0,1,2,...} or +infinity.
// Used for orders of vanishing (order of the zero polynomial is infinite).
class ExtNat {
 public:
  ExtNat() : inf_(false), v_(0) {}
  explicit ExtNat(long v) : inf_(false), v_(v) {
    if (v < 0) throw std::invalid_argument("ExtNat: negative value");
  }
  static ExtNat infinity() {
    ExtNat e;
    e.inf_ = true;
    return e;
  }
  bool is_infinite() const { return inf_; }
  long value() const {
    if (inf_) throw std::logic_error("ExtNat: value() of infinity");
    return v_;
  }
  bool operator==(const ExtNat& o) const {
    return inf_ == o.inf_ && (inf_ || v_ == o.v_);
  }
  bool operator!=(const ExtNat& o) const { return !(*this == o); }
  bool operator<(const ExtNat& o) const {
    if (inf_) return false;
    if (o.inf_) return true;
    return v_ < o.v_;
  }
  bool operator<=(const ExtNat& o) const { return *this < o || *this == o; }
  bool operator>(const ExtNat& o) const { return o < *this; }
  bool operator>=(const ExtNat& o) const { return o <= *this; }
  std::string str() const { return inf_ ? "inf" : std::to_string(v_); }

 private:
  bool inf_;
  long v_;
};

// Extended rational: a rational number or +infinity.  Used for the
// entries of invariant words (the nu-values may be infinite).
class ExtRat {
 public:
  ExtRat() : inf_(false), v_(0) {}
  ExtRat(const Rational& v) : inf_(false), v_(v) {}  // NOLINT: implicit by design
  explicit ExtRat(const ExtNat& n)
      : inf_(n.is_infinite()), v_(n.is_infinite() ? 0 : n.value()) {}
  static ExtRat infinity() {
    ExtRat e;
    e.inf_ = true;
    return e;
  }
  bool is_infinite() const { return inf_; }
  const Rational& value() const {
    if (inf_) throw std::logic_error("ExtRat: value() of infinity");
    return v_;
  }
  bool operator==(const ExtRat& o) const {
    return inf_ == o.inf_ && (inf_ || v_ == o.v_);
  }
  bool operator!=(const ExtRat& o) const { return !(*this == o); }
  bool operator<(const ExtRat& o) const {
    if (inf_) return false;
    if (o.inf_) return true;
    return v_ < o.v_;
  }
  bool operator<=(const ExtRat& o) const { return *this < o || *this == o; }
  bool operator>(const ExtRat& o) const { return o < *this; }
  bool operator>=(const ExtRat& o) const { return o <= *this; }
  std::string str() const;

 private:
  bool inf_;
  Rational v_;
};

// Renders a rational as "a" or "a/b" in lowest terms.
std::string rational_str(const Rational& r);

// Parses "a" or "a/b"; throws std::invalid_argument on malformed input
// (including a zero denominator).
Rational parse_rational(const std::string& s);

// p-adic valuation of a nonzero rational; vp(0) is +infinity, reported
// via the infinite ExtNat-like flag below.  For nonzero r = p^k * u with
// u a p-adic unit, returns k (which may be negative).
struct Valuation {
  bool infinite;
  long v;  // meaningful only when !infinite
};
Valuation vp(const Rational& r, const Int& p);

// Unit-ball membership filter: true when the first k coordinates have
// vp >= 0 and the remaining l coordinates have vp >= 1.  The prime p
// must be >= 2; k + l must equal the number of coordinates.
bool domain_member(const std::vector<Rational>& a, int k, int l, const Int& p);

}  // namespace desing

#endif  // DESING_RATIONAL_HPP
