#pragma once

// Arithmetic over the truncated polynomial ring R[t]/(t^{k+1}) with scalar
// or matrix coefficients, and representations whose generator images are
// unitary over that ring.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "pardef/cochains.hpp"

namespace pardef {

namespace detail {
template <class T>
T zero_like(const T&) {
  return T(0);
}
inline CMat zero_like(const CMat& m) { return CMat::Zero(m.rows(), m.cols()); }
}  // namespace detail

/// c_0 + c_1 t + ... + c_k t^k; products discard degrees above k.
template <class T>
class Truncated {
public:
  Truncated() = default;
  Truncated(int order, const T& constant) : c_(static_cast<std::size_t>(order) + 1, detail::zero_like(constant)) {
    c_[0] = constant;
  }
  explicit Truncated(std::vector<T> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) throw std::invalid_argument("Truncated: no coefficients");
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  const T& operator[](int m) const { return c_[static_cast<std::size_t>(m)]; }
  T& operator[](int m) { return c_[static_cast<std::size_t>(m)]; }
  const std::vector<T>& coefficients() const { return c_; }

  friend Truncated operator+(Truncated a, const Truncated& b) {
    for (std::size_t m = 0; m < a.c_.size(); ++m) a.c_[m] += b.c_[m];
    return a;
  }
  friend Truncated operator-(Truncated a, const Truncated& b) {
    for (std::size_t m = 0; m < a.c_.size(); ++m) a.c_[m] -= b.c_[m];
    return a;
  }
  Truncated operator-() const {
    Truncated out = *this;
    for (auto& x : out.c_) x = -x;
    return out;
  }
  friend Truncated operator*(const Truncated& a, const Truncated& b) {
    const std::size_t len = a.c_.size();
    Truncated out;
    out.c_.assign(len, detail::zero_like(a.c_[0]));
    for (std::size_t i = 0; i < len; ++i)
      for (std::size_t j = 0; i + j < len; ++j) out.c_[i + j] += a.c_[i] * b.c_[j];
    return out;
  }
  template <class S>
  friend Truncated scale(const S& s, Truncated a) {
    for (auto& x : a.c_) x = s * x;
    return a;
  }

private:
  std::vector<T> c_;
};

using JetScalar = Truncated<cplx>;
using MatrixJet = Truncated<CMat>;

/// Coefficientwise conjugate transpose; the inverse of a unitary jet.
inline MatrixJet adjoint(const MatrixJet& a) {
  std::vector<CMat> c;
  for (const auto& x : a.coefficients()) c.push_back(x.adjoint());
  return MatrixJet(std::move(c));
}

inline MatrixJet times_constant(const MatrixJet& a, const CMat& right) {
  std::vector<CMat> c;
  for (const auto& x : a.coefficients()) c.push_back(x * right);
  return MatrixJet(std::move(c));
}

/// exp(Z) for Z with vanishing constant term: a finite sum modulo t^{k+1}.
inline MatrixJet exp_nilpotent(const MatrixJet& z) {
  const int k = z.order();
  const Eigen::Index n = z[0].rows();
  MatrixJet out(k, CMat::Identity(n, n));
  MatrixJet power(k, CMat::Identity(n, n));
  double fact = 1.0;
  for (int j = 1; j <= k; ++j) {
    power = power * z;
    fact *= j;
    out = out + scale(1.0 / fact, power);
  }
  return out;
}

/// Builds sum_m t^m X_m from X_1..X_k.
inline MatrixJet lie_series(int n, int order, const std::vector<SkewHermitian>& coeffs) {
  MatrixJet z(order, CMat::Zero(n, n));
  for (std::size_t m = 0; m < coeffs.size() && static_cast<int>(m) + 1 <= order; ++m) z[static_cast<int>(m) + 1] = coeffs[m].matrix();
  return z;
}

/// Largest coefficientwise deviation of a^* a from the identity.
inline double unitarity_defect(const MatrixJet& a) {
  const MatrixJet p = adjoint(a) * a;
  double worst = (p[0] - CMat::Identity(p[0].rows(), p[0].cols())).norm();
  for (int m = 1; m <= p.order(); ++m) worst = std::max(worst, p[m].norm());
  return worst;
}

/// Jet deformation of a representation:
///   generator x  ->  exp(sum_m t^m X_m(x)) rho(x),
///   group S      ->  conjugator exp(sum_m t^m zeta_m(S)).
struct JetRepresentation {
  Representation base;
  int order = 1;
  std::vector<std::vector<SkewHermitian>> generator_jets;   // [generator][m-1]
  std::vector<std::vector<SkewHermitian>> conjugator_jets;  // [group][m-1]

  static JetRepresentation zero(const Representation& base, int order) {
    JetRepresentation j;
    j.base = base;
    j.order = order;
    const int n = base.rank();
    j.generator_jets.assign(base.generator_count(), std::vector<SkewHermitian>(order, SkewHermitian::zero(n)));
    j.conjugator_jets.assign(base.presentation->groups.size(), std::vector<SkewHermitian>(order, SkewHermitian::zero(n)));
    return j;
  }

  int rank() const { return base.rank(); }

  MatrixJet generator(std::size_t j) const {
    return times_constant(exp_nilpotent(lie_series(rank(), order, generator_jets.at(j))), base.matrices.at(j).matrix());
  }
  MatrixJet conjugator(std::size_t s) const { return exp_nilpotent(lie_series(rank(), order, conjugator_jets.at(s))); }
  MatrixJet conjugator_inverse(std::size_t s) const {
    return exp_nilpotent(-lie_series(rank(), order, conjugator_jets.at(s)));
  }
};

/// Exact truncated product of generator jets along w.
inline MatrixJet jet_word(const JetRepresentation& rj, const Word& w) {
  const int n = rj.rank();
  MatrixJet acc(rj.order, CMat::Identity(n, n));
  std::vector<std::optional<MatrixJet>> cache(rj.generator_jets.size());
  for (const Letter& l : w.letters) {
    if (!cache[l.gen]) cache[l.gen] = rj.generator(l.gen);
    acc = acc * (l.sign > 0 ? *cache[l.gen] : adjoint(*cache[l.gen]));
  }
  return acc;
}

/// Coefficient of t^m of the constraint defects:
///   relators:     jet_word(r) rho(r)^{-1}
///   peripherals:  exp(-zeta_S) jet_word(gamma) exp(zeta_S) rho(gamma)^{-1}
/// Skew-Hermitian parts are returned; when all lower orders vanish the
/// coefficients are exactly skew-Hermitian.
inline Cochain2 order_defect(const JetRepresentation& rj, int m) {
  const Presentation& p = *rj.base.presentation;
  Cochain2 out;
  for (const Word& r : p.relators) {
    const MatrixJet v = times_constant(jet_word(rj, r), evaluate_word(rj.base, r).matrix().adjoint());
    out.relator_part.push_back(SkewHermitian::project(v[m]));
  }
  std::vector<std::optional<std::pair<MatrixJet, MatrixJet>>> conj(p.groups.size());
  for (std::size_t i = 0; i < p.peripherals.size(); ++i) {
    const std::size_t s = p.group_of(i);
    if (!conj[s]) conj[s] = std::make_pair(rj.conjugator_inverse(s), rj.conjugator(s));
    const Word& w = p.peripherals[i].word;
    const MatrixJet v =
        times_constant(conj[s]->first * jet_word(rj, w) * conj[s]->second, evaluate_word(rj.base, w).matrix().adjoint());
    out.peripheral_part.push_back(SkewHermitian::project(v[m]));
  }
  return out;
}

}  // namespace pardef
