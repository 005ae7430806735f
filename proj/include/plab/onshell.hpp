#pragma once

#include <complex>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

#include "plab/poly.hpp"

namespace plab {

// Element of the on-shell coefficient ring: rational functions of
// (p1,p2,p3,mu) with p0 adjoined modulo p0^2 = p1^2+p2^2+p3^2+mu^2.
//
// Representation: (even + odd*p0) / den, where den is a product of monic,
// p0-free polynomial factors (kept factored so LCMs and cancellations never
// need a general multivariate gcd). Zero is canonical: even = odd = 0, den
// empty. Equality holds iff the difference reduces to canonical zero.
class OnShellScalar {
 public:
  using DenFactors = std::map<Poly, int>;

  OnShellScalar() = default;
  explicit OnShellScalar(GaussRat c) : even_(Poly(std::move(c))) {}
  explicit OnShellScalar(long v) : even_(Poly(GaussRat(v))) {}
  explicit OnShellScalar(Poly even) : even_(std::move(even)) {}
  OnShellScalar(Poly even, Poly odd, DenFactors den)
      : even_(std::move(even)), odd_(std::move(odd)), den_(std::move(den)) {
    normalize();
  }

  static OnShellScalar i() { return OnShellScalar(GaussRat::i()); }
  static OnShellScalar p0() { return OnShellScalar(Poly(), Poly(GaussRat(1)), {}); }
  // v: 0..2 -> p1..p3, 3 -> mu
  static OnShellScalar var(int v) { return OnShellScalar(Poly::var(v)); }
  static OnShellScalar mu() { return var(3); }

  const Poly& even() const { return even_; }
  const Poly& odd() const { return odd_; }
  const DenFactors& den() const { return den_; }

  bool is_zero() const { return even_.is_zero() && odd_.is_zero(); }
  bool p0_free() const { return odd_.is_zero(); }
  // True iff the value is a constant in Q(i) (no p or mu dependence).
  bool is_constant() const {
    return odd_.is_zero() && den_.empty() && even_.is_constant();
  }
  GaussRat constant_value() const { return even_.constant_value(); }

  OnShellScalar operator-() const {
    OnShellScalar r;
    r.even_ = -even_;
    r.odd_ = -odd_;
    r.den_ = den_;
    return r;
  }

  OnShellScalar operator+(const OnShellScalar& o) const {
    DenFactors lcm = den_;
    for (const auto& [f, m] : o.den_) {
      auto it = lcm.find(f);
      if (it == lcm.end())
        lcm[f] = m;
      else
        it->second = std::max(it->second, m);
    }
    Poly ca = complement(lcm, den_);
    Poly cb = complement(lcm, o.den_);
    OnShellScalar r;
    r.even_ = even_ * ca + o.even_ * cb;
    r.odd_ = odd_ * ca + o.odd_ * cb;
    r.den_ = std::move(lcm);
    r.cancel();
    return r;
  }
  OnShellScalar operator-(const OnShellScalar& o) const { return *this + (-o); }
  OnShellScalar& operator+=(const OnShellScalar& o) { return *this = *this + o; }
  OnShellScalar& operator-=(const OnShellScalar& o) { return *this = *this - o; }

  OnShellScalar operator*(const OnShellScalar& o) const {
    OnShellScalar r;
    Poly sg = Poly::sigma();
    r.even_ = even_ * o.even_ + (odd_ * o.odd_) * sg;
    r.odd_ = even_ * o.odd_ + odd_ * o.even_;
    r.den_ = den_;
    for (const auto& [f, m] : o.den_) r.den_[f] += m;
    r.cancel();
    return r;
  }
  OnShellScalar& operator*=(const OnShellScalar& o) { return *this = *this * o; }

  // (x + y*p0)^-1 = (x - y*p0) / (x^2 - y^2*(p^2+mu^2)); the factored
  // denominator is split over {mu, p^2, p^2+mu^2} before being stored.
  OnShellScalar invert() const {
    if (is_zero()) throw std::domain_error("OnShellScalar: division by zero");
    Poly N = even_ * even_ - (odd_ * odd_) * Poly::sigma();
    OnShellScalar r;
    Poly E = expand(den_);
    r.even_ = E * even_;
    r.odd_ = -(E * odd_);
    GaussRat content = split_into(N, r.den_, 1);
    r.scale_num(content.inv());
    r.cancel();
    return r;
  }
  OnShellScalar operator/(const OnShellScalar& o) const { return *this * o.invert(); }

  bool operator==(const OnShellScalar& o) const { return (*this - o).is_zero(); }
  bool operator!=(const OnShellScalar& o) const { return !(*this == o); }

  // d/dp_j (j in 0..2) with dp0/dp_j = p_j/p0.
  OnShellScalar derive(int j) const {
    OnShellScalar dnum(even_.derive(j), odd_.derive(j), {});
    if (!odd_.is_zero()) {
      // odd * d(p0) = odd * p_j * p0 / sigma
      DenFactors ds;
      ds[Poly::sigma()] = 1;
      dnum += OnShellScalar(Poly(), odd_ * Poly::var(j), std::move(ds));
    }
    OnShellScalar invden(Poly(GaussRat(1)), Poly(), den_);
    OnShellScalar result = dnum * invden;
    if (!den_.empty()) {
      OnShellScalar logd;  // -sum_k m_k * (d f_k) / f_k
      for (const auto& [f, m] : den_) {
        DenFactors fk;
        fk[f] = 1;
        logd += OnShellScalar(f.derive(j).scaled(GaussRat(-m)), Poly(), std::move(fk));
      }
      OnShellScalar numpart(even_, odd_, {});
      result += numpart * invden * logd;
    }
    return result;
  }

  // Complex conjugation automorphism: i -> -i, p_j, p0, mu fixed.
  OnShellScalar conj() const {
    OnShellScalar r;
    r.even_ = even_.conj();
    r.odd_ = odd_.conj();
    for (const auto& [f, m] : den_) r.den_[f.conj()] += m;
    return r;
  }

  // Parity automorphism: p_j -> -p_j, p0 and mu fixed.
  OnShellScalar parity() const {
    OnShellScalar r;
    r.even_ = even_.parity();
    r.odd_ = odd_.parity();
    GaussRat scale(1);
    for (const auto& [f, m] : den_) {
      Poly g = f.parity();
      GaussRat lc = g.lead().second;
      if (!(lc == GaussRat(1))) {
        g = g.scaled(lc.inv());
        GaussRat fi = lc.inv();
        for (int k = 0; k < m; ++k) scale *= fi;
      }
      r.den_[g] += m;
    }
    r.scale_num(scale);
    return r;
  }

  // Evaluate at a real momentum with p0 = +sqrt(mu^2+|p|^2).
  std::complex<double> eval(const std::array<double, 3>& p, double mu) const {
    double p0v = std::sqrt(mu * mu + p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
    std::complex<double> num = even_.eval(p, mu) + odd_.eval(p, mu) * p0v;
    std::complex<double> den{1.0, 0.0};
    for (const auto& [f, m] : den_) {
      std::complex<double> fv = f.eval(p, mu);
      for (int k = 0; k < m; ++k) den *= fv;
    }
    if (std::abs(den) < 1e-300)
      throw std::domain_error("OnShellScalar::eval: denominator vanishes");
    return num / den;
  }

  // Exact evaluation at a rational point with rational p0. The caller picks
  // the branch through p0v, which must satisfy p0v^2 = p^2 + mu^2 (e.g.
  // Pythagorean points such as p = (2,3,6), mu = 24, p0 = 25). Throws if the
  // point is off shell or a denominator factor vanishes there.
  GaussRat eval_exact(const std::array<Rat, 4>& at, const Rat& p0v) const {
    if (p0v * p0v !=
        at[0] * at[0] + at[1] * at[1] + at[2] * at[2] + at[3] * at[3])
      throw std::domain_error("OnShellScalar::eval_exact: point off shell");
    GaussRat num = even_.eval_exact(at);
    GaussRat op = odd_.eval_exact(at);
    num += GaussRat(op.re * p0v, op.im * p0v);
    GaussRat den(1);
    for (const auto& [f, m] : den_) {
      GaussRat fv = f.eval_exact(at);
      if (fv.is_zero())
        throw std::domain_error(
            "OnShellScalar::eval_exact: denominator vanishes");
      for (int k = 0; k < m; ++k) den *= fv;
    }
    return num * den.inv();
  }

  static Poly expand(const DenFactors& den) {
    Poly r(GaussRat(1));
    for (const auto& [f, m] : den)
      for (int k = 0; k < m; ++k) r *= f;
    return r;
  }

 private:
  // product of lcm / den (factor complements)
  static Poly complement(const DenFactors& lcm, const DenFactors& den) {
    Poly r(GaussRat(1));
    for (const auto& [f, m] : lcm) {
      auto it = den.find(f);
      int have = (it == den.end()) ? 0 : it->second;
      for (int k = have; k < m; ++k) r *= f;
    }
    return r;
  }

  // Splits N into monic factors over the basis {mu, p^2, p^2+mu^2} plus a
  // monic remainder; appends each with multiplicity `mult`; returns the
  // scalar content c with N^mult = c^mult * (appended factors).
  static GaussRat split_into(Poly N, DenFactors& den, int mult) {
    if (N.is_zero()) throw std::domain_error("OnShellScalar: zero denominator");
    GaussRat lc = N.lead().second;
    if (!(lc == GaussRat(1))) N = N.scaled(lc.inv());
    static const Poly basis[3] = {Poly::var(3), Poly::p_sq(), Poly::sigma()};
    for (const auto& b : basis) {
      while (!N.is_constant()) {
        auto q = N.divide_exact(b);
        if (!q) break;
        den[b] += mult;
        N = *q;
      }
    }
    if (!N.is_constant()) {
      den[N] += mult;
    } else {
      lc = lc * N.constant_value();
    }
    return lc;
  }

  void scale_num(const GaussRat& c) {
    even_ = even_.scaled(c);
    odd_ = odd_.scaled(c);
  }

  void normalize() {
    if (is_zero()) den_.clear();
  }

  // Cancel denominator factors dividing both numerator parts exactly.
  void cancel() {
    if (is_zero()) {
      den_.clear();
      return;
    }
    for (auto it = den_.begin(); it != den_.end();) {
      bool reduced = true;
      while (it->second > 0 && reduced) {
        reduced = false;
        std::optional<Poly> qe, qo;
        if (even_.is_zero())
          qe = Poly();
        else
          qe = even_.divide_exact(it->first);
        if (qe) {
          if (odd_.is_zero())
            qo = Poly();
          else
            qo = odd_.divide_exact(it->first);
          if (qo) {
            even_ = *qe;
            odd_ = *qo;
            it->second -= 1;
            reduced = true;
          }
        }
      }
      if (it->second == 0)
        it = den_.erase(it);
      else
        ++it;
    }
  }

  Poly even_, odd_;
  DenFactors den_;
};

// --- rendering -------------------------------------------------------------

inline std::string numerator_to_string(const Poly& even, const Poly& odd) {
  if (even.is_zero() && odd.is_zero()) return "0";
  std::string out = even.is_zero() ? std::string() : to_string(even);
  for (const auto& [m, c] : odd.terms()) {
    std::string cs = to_string(c);
    bool composite = (c.re != 0 && c.im != 0);
    std::string ms = mono_to_string(m);
    std::string piece;
    if (c == GaussRat(1))
      piece = "";
    else if (c == -GaussRat(1))
      piece = "-";
    else
      piece = (composite ? "(" + cs + ")" : cs) + "*";
    piece += ms.empty() ? "p0" : ms + "*p0";
    if (out.empty()) {
      out = piece;
    } else if (!piece.empty() && piece[0] == '-') {
      out += " - " + piece.substr(1);
    } else {
      out += " + " + piece;
    }
  }
  return out;
}

inline std::string to_string(const OnShellScalar& s) {
  std::string num = numerator_to_string(s.even(), s.odd());
  if (s.den().empty()) return num;
  std::string den;
  for (const auto& [f, m] : s.den()) {
    if (!den.empty()) den += "*";
    std::string fs = to_string(f);
    bool bare = (f.terms().size() == 1 && !f.is_constant() &&
                 f.lead().second == GaussRat(1) &&
                 mono_to_string(f.lead().first).find('*') == std::string::npos &&
                 mono_to_string(f.lead().first).find('^') == std::string::npos);
    std::string piece = bare ? fs : "(" + fs + ")";
    if (m > 1) piece += "^" + std::to_string(m);
    den += piece;
  }
  return "(" + num + ")/(" + den + ")";
}

// --- parsing ---------------------------------------------------------------
//
// Grammar (documented in docs/GRAMMAR.md):
//   expr    := term (('+'|'-') term)*
//   term    := factor (('*'|'/') factor)*
//   factor  := ('+'|'-')* primary ('^' ('-')? digits)?
//   primary := digits | 'p0'|'p1'|'p2'|'p3'|'mu'|'i' | '(' expr ')'
class ScalarParser {
 public:
  explicit ScalarParser(std::string_view text) : text_(text) {}

  OnShellScalar parse() {
    OnShellScalar v = expr();
    skip_ws();
    if (pos_ != text_.size())
      throw std::runtime_error("scalar parse: trailing input at offset " +
                               std::to_string(pos_));
    return v;
  }

 private:
  OnShellScalar expr() {
    OnShellScalar v = term();
    for (;;) {
      skip_ws();
      if (peek() == '+') {
        ++pos_;
        v += term();
      } else if (peek() == '-') {
        ++pos_;
        v -= term();
      } else {
        return v;
      }
    }
  }

  OnShellScalar term() {
    OnShellScalar v = factor();
    for (;;) {
      skip_ws();
      if (peek() == '*') {
        ++pos_;
        v *= factor();
      } else if (peek() == '/') {
        ++pos_;
        v = v / factor();
      } else {
        return v;
      }
    }
  }

  OnShellScalar factor() {
    skip_ws();
    bool neg = false;
    while (peek() == '+' || peek() == '-') {
      if (peek() == '-') neg = !neg;
      ++pos_;
      skip_ws();
    }
    OnShellScalar v = primary();
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      bool eneg = false;
      if (peek() == '-') {
        eneg = true;
        ++pos_;
      }
      long e = integer();
      OnShellScalar p(1L);
      for (long k = 0; k < e; ++k) p *= v;
      v = eneg ? p.invert() : p;
    }
    return neg ? -v : v;
  }

  OnShellScalar primary() {
    skip_ws();
    char c = peek();
    if (c == '(') {
      ++pos_;
      OnShellScalar v = expr();
      skip_ws();
      if (peek() != ')') throw std::runtime_error("scalar parse: expected ')'");
      ++pos_;
      return v;
    }
    if (c >= '0' && c <= '9') {
      size_t start = pos_;
      while (peek() >= '0' && peek() <= '9') ++pos_;
      BigInt n(std::string(text_.substr(start, pos_ - start)));
      return OnShellScalar(GaussRat(Rat(n)));
    }
    if (match("p0")) return OnShellScalar::p0();
    if (match("p1")) return OnShellScalar::var(0);
    if (match("p2")) return OnShellScalar::var(1);
    if (match("p3")) return OnShellScalar::var(2);
    if (match("mu")) return OnShellScalar::mu();
    if (match("i")) return OnShellScalar::i();
    throw std::runtime_error("scalar parse: unexpected input at offset " +
                             std::to_string(pos_));
  }

  long integer() {
    skip_ws();
    if (!(peek() >= '0' && peek() <= '9'))
      throw std::runtime_error("scalar parse: expected integer");
    long v = 0;
    while (peek() >= '0' && peek() <= '9') {
      v = v * 10 + (peek() - '0');
      ++pos_;
    }
    return v;
  }

  bool match(std::string_view kw) {
    if (text_.substr(pos_, kw.size()) != kw) return false;
    // avoid eating "i" out of an identifier-ish context; names here are fixed
    pos_ += kw.size();
    return true;
  }

  void skip_ws() {
    while (pos_ < text_.size() &&
           (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n'))
      ++pos_;
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  std::string_view text_;
  size_t pos_ = 0;
};

inline OnShellScalar parse_scalar(std::string_view text) {
  return ScalarParser(text).parse();
}

}  // namespace plab
