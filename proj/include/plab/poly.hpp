#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "plab/rational.hpp"

namespace plab {

// Exponent vector for (p1, p2, p3, mu).
using Mono = std::array<uint16_t, 4>;

inline Mono mono_one() { return {0, 0, 0, 0}; }

// Sparse polynomial in p1, p2, p3, mu over Q(i).
// Invariant: no zero coefficients are stored.
class Poly {
 public:
  using Terms = std::map<Mono, GaussRat>;

  Poly() = default;
  explicit Poly(GaussRat c) {
    if (!c.is_zero()) terms_[mono_one()] = std::move(c);
  }
  Poly(Mono m, GaussRat c) {
    if (!c.is_zero()) terms_[m] = std::move(c);
  }

  static Poly constant(long v) { return Poly(GaussRat(v)); }
  // var: 0..2 -> p1..p3, 3 -> mu
  static Poly var(int v, int exp = 1) {
    Mono m = mono_one();
    m[static_cast<size_t>(v)] = static_cast<uint16_t>(exp);
    return Poly(m, GaussRat(1));
  }
  // p1^2 + p2^2 + p3^2
  static Poly p_sq() {
    Poly r;
    for (int v = 0; v < 3; ++v) r += var(v, 2);
    return r;
  }
  // p1^2 + p2^2 + p3^2 + mu^2 (= p0^2 on shell)
  static Poly sigma() { return p_sq() + var(3, 2); }

  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const {
    return terms_.empty() ||
           (terms_.size() == 1 && terms_.begin()->first == mono_one());
  }
  GaussRat constant_value() const {
    if (terms_.empty()) return GaussRat(0);
    auto it = terms_.find(mono_one());
    return it == terms_.end() ? GaussRat(0) : it->second;
  }

  Poly& operator+=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Poly operator+(const Poly& o) const {
    Poly t(*this);
    return t += o;
  }
  Poly operator-(const Poly& o) const {
    Poly t(*this);
    return t -= o;
  }
  Poly operator-() const {
    Poly t;
    for (const auto& [m, c] : terms_) t.terms_[m] = -c;
    return t;
  }
  Poly operator*(const Poly& o) const {
    Poly r;
    for (const auto& [ma, ca] : terms_)
      for (const auto& [mb, cb] : o.terms_) {
        Mono m;
        for (size_t k = 0; k < 4; ++k)
          m[k] = static_cast<uint16_t>(ma[k] + mb[k]);
        r.add_term(m, ca * cb);
      }
    return r;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }
  Poly scaled(const GaussRat& c) const {
    Poly r;
    if (c.is_zero()) return r;
    for (const auto& [m, v] : terms_) r.terms_[m] = v * c;
    return r;
  }

  bool operator==(const Poly& o) const { return terms_ == o.terms_; }
  bool operator!=(const Poly& o) const { return !(*this == o); }
  // Key order for canonical factor maps.
  bool operator<(const Poly& o) const { return terms_ < o.terms_; }

  // d/d(var v), treating all four variables as independent.
  Poly derive(int v) const {
    Poly r;
    for (const auto& [m, c] : terms_) {
      if (m[static_cast<size_t>(v)] == 0) continue;
      Mono d = m;
      d[static_cast<size_t>(v)] -= 1;
      r.add_term(d, c * GaussRat(static_cast<long>(m[static_cast<size_t>(v)])));
    }
    return r;
  }

  // p_j -> -p_j (mu untouched).
  Poly parity() const {
    Poly r;
    for (const auto& [m, c] : terms_) {
      int deg = m[0] + m[1] + m[2];
      r.terms_[m] = (deg % 2 == 0) ? c : -c;
    }
    return r;
  }

  Poly conj() const {
    Poly r;
    for (const auto& [m, c] : terms_) r.terms_[m] = c.conj();
    return r;
  }

  int total_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) {
      (void)c;
      d = std::max(d, int(m[0]) + m[1] + m[2] + m[3]);
    }
    return d;
  }

  // Leading term in the map's (lexicographic) order.
  std::pair<Mono, GaussRat> lead() const {
    auto it = terms_.rbegin();
    return {it->first, it->second};
  }

  // Exact division: returns quotient iff *this == q * d.
  std::optional<Poly> divide_exact(const Poly& d) const {
    if (d.is_zero()) throw std::domain_error("Poly: division by zero");
    Poly rem(*this), q;
    auto [dm, dc] = d.lead();
    while (!rem.is_zero()) {
      auto [rm, rc] = rem.lead();
      Mono qm;
      for (size_t k = 0; k < 4; ++k) {
        if (rm[k] < dm[k]) return std::nullopt;
        qm[k] = static_cast<uint16_t>(rm[k] - dm[k]);
      }
      Poly t(qm, rc / dc);
      q += t;
      rem -= t * d;
    }
    return q;
  }

  // Exact evaluation at a rational point (p1, p2, p3, mu).
  GaussRat eval_exact(const std::array<Rat, 4>& at) const {
    GaussRat acc;
    for (const auto& [m, c] : terms_) {
      Rat v(1);
      for (size_t k = 0; k < 4; ++k)
        for (int e = 0; e < m[k]; ++e) v *= at[k];
      acc += GaussRat(c.re * v, c.im * v);
    }
    return acc;
  }

  std::complex<double> eval(const std::array<double, 3>& p, double mu) const {
    std::complex<double> acc{0.0, 0.0};
    for (const auto& [m, c] : terms_) {
      double v = 1.0;
      for (int k = 0; k < 3; ++k)
        for (int e = 0; e < m[static_cast<size_t>(k)]; ++e)
          v *= p[static_cast<size_t>(k)];
      for (int e = 0; e < m[3]; ++e) v *= mu;
      acc += c.to_complex() * v;
    }
    return acc;
  }

  void add_term(const Mono& m, const GaussRat& c) {
    if (c.is_zero()) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_[m] = c;
    } else {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

 private:
  Terms terms_;
};

inline std::string mono_to_string(const Mono& m) {
  static const char* names[4] = {"p1", "p2", "p3", "mu"};
  std::string out;
  for (size_t k = 0; k < 4; ++k) {
    if (m[k] == 0) continue;
    if (!out.empty()) out += "*";
    out += names[k];
    if (m[k] > 1) out += "^" + std::to_string(m[k]);
  }
  return out;
}

// Rendering follows the scalar grammar; terms in map order.
inline std::string to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& [m, c] : p.terms()) {
    std::string cs = to_string(c);
    bool composite = (c.re != 0 && c.im != 0);
    std::string piece;
    std::string ms = mono_to_string(m);
    if (ms.empty()) {
      piece = composite ? "(" + cs + ")" : cs;
    } else if (c == GaussRat(1)) {
      piece = ms;
    } else if (c == -GaussRat(1)) {
      piece = "-" + ms;
    } else {
      piece = (composite ? "(" + cs + ")" : cs) + "*" + ms;
    }
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

}  // namespace plab
