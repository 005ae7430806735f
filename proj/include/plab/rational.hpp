#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <stdexcept>
#include <string>

namespace plab {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

// Exact element of Q(i): re + im*i.
struct GaussRat {
  Rat re{0};
  Rat im{0};

  GaussRat() = default;
  GaussRat(long v) : re(v) {}
  GaussRat(const Rat& r) : re(r) {}
  GaussRat(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

  static GaussRat i() { return GaussRat(Rat(0), Rat(1)); }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_real() const { return im == 0; }

  GaussRat conj() const { return GaussRat(re, -im); }

  GaussRat operator-() const { return GaussRat(-re, -im); }
  GaussRat& operator+=(const GaussRat& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  GaussRat& operator-=(const GaussRat& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
  GaussRat operator+(const GaussRat& o) const {
    GaussRat t(*this);
    return t += o;
  }
  GaussRat operator-(const GaussRat& o) const {
    GaussRat t(*this);
    return t -= o;
  }
  GaussRat operator*(const GaussRat& o) const {
    return GaussRat(re * o.re - im * o.im, re * o.im + im * o.re);
  }
  GaussRat& operator*=(const GaussRat& o) { return *this = *this * o; }
  GaussRat inv() const {
    Rat n = re * re + im * im;
    if (n == 0) throw std::domain_error("GaussRat: division by zero");
    return GaussRat(re / n, -im / n);
  }
  GaussRat operator/(const GaussRat& o) const { return *this * o.inv(); }

  bool operator==(const GaussRat& o) const { return re == o.re && im == o.im; }
  bool operator!=(const GaussRat& o) const { return !(*this == o); }
  // Total order used only as a map key / canonical sort, no algebraic meaning.
  bool operator<(const GaussRat& o) const {
    if (re != o.re) return re < o.re;
    return im < o.im;
  }

  std::complex<double> to_complex() const {
    return {static_cast<double>(re), static_cast<double>(im)};
  }
};

inline std::string to_string(const Rat& r) {
  std::string s = r.str();
  return s;
}

// Renders in the scalar grammar: "2", "-3/4", "i", "-2*i", "1/2+3*i", ...
inline std::string to_string(const GaussRat& g) {
  if (g.is_zero()) return "0";
  std::string out;
  if (g.re != 0) out += to_string(g.re);
  if (g.im != 0) {
    if (!out.empty() && g.im > 0) out += "+";
    if (g.im == 1)
      out += "i";
    else if (g.im == -1)
      out += "-i";
    else
      out += to_string(g.im) + "*i";
  }
  return out;
}

}  // namespace plab
