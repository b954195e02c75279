#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tpv {

// All probabilities and divergence bounds in this library are exact
// rationals; no floating point appears in any verdict-bearing value.
using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Int pow_int(Int base, unsigned long e) {
  Int r = 1;
  while (e) {
    if (e & 1) r *= base;
    base *= base;
    e >>= 1;
  }
  return r;
}

// (num/den)^e for integer e (negative exponents flip the fraction).
inline Rat pow_rat(const Rat& q, long e) {
  if (e == 0) return Rat(1);
  Rat base = q;
  bool neg = e < 0;
  unsigned long k = neg ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
  if (neg) {
    if (boost::multiprecision::numerator(base) == 0)
      throw std::domain_error("pow_rat: zero base with negative exponent");
    base = Rat(boost::multiprecision::denominator(base), boost::multiprecision::numerator(base));
  }
  Int n = pow_int(boost::multiprecision::numerator(base), k);
  Int d = pow_int(boost::multiprecision::denominator(base), k);
  return Rat(n, d);
}

inline std::string rat_str(const Rat& q) {
  std::ostringstream os;
  os << boost::multiprecision::numerator(q);
  if (boost::multiprecision::denominator(q) != 1)
    os << "/" << boost::multiprecision::denominator(q);
  return os.str();
}

inline Rat rat_from_str(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return Rat(Int(s));
  Int num(s.substr(0, slash));
  Int den(s.substr(slash + 1));
  if (den == 0) throw std::invalid_argument("rational with zero denominator: " + s);
  return Rat(num, den);
}

// Extended rational with a single +infinity, used for divergence values
// (e^epsilon form; infinity means the supports escape each other).
class ExtRat {
 public:
  ExtRat() : inf_(false), v_(0) {}
  explicit ExtRat(Rat v) : inf_(false), v_(std::move(v)) {}
  static ExtRat infinity() {
    ExtRat r;
    r.inf_ = true;
    return r;
  }

  bool is_inf() const { return inf_; }
  const Rat& value() const {
    if (inf_) throw std::logic_error("ExtRat: value() on infinity");
    return v_;
  }

  friend bool operator==(const ExtRat& a, const ExtRat& b) {
    if (a.inf_ || b.inf_) return a.inf_ && b.inf_;
    return a.v_ == b.v_;
  }
  friend bool operator<(const ExtRat& a, const ExtRat& b) {
    if (a.inf_) return false;
    if (b.inf_) return true;
    return a.v_ < b.v_;
  }
  friend bool operator<=(const ExtRat& a, const ExtRat& b) { return a < b || a == b; }
  friend bool operator>(const ExtRat& a, const ExtRat& b) { return b < a; }
  friend bool operator>=(const ExtRat& a, const ExtRat& b) { return b <= a; }

  ExtRat& max_with(const ExtRat& o) {
    if (*this < o) *this = o;
    return *this;
  }

  std::string str() const { return inf_ ? "inf" : rat_str(v_); }

  friend std::ostream& operator<<(std::ostream& os, const ExtRat& e) { return os << e.str(); }

 private:
  bool inf_;
  Rat v_;
};

}  // namespace tpv
