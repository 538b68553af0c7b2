#pragma once

// Numerics on U(N) and u(N): exponential and principal logarithm, the
// adjoint action, the invariant form B(X,Y) = -tr(XY), conjugacy classes
// through eigenvalue angles and characteristic polynomials, Haar sampling.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "pardef/errors.hpp"
#include "pardef/presentation.hpp"

namespace pardef {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

inline constexpr double kUnitarityTolerance = 1e-10;
inline constexpr double kSkewTolerance = 1e-12;
inline constexpr double kAngleTolerance = 1e-9;
inline constexpr double kBranchTolerance = 1e-8;

/// Element of the Lie algebra u(N).
class SkewHermitian {
public:
  SkewHermitian() = default;
  explicit SkewHermitian(CMat m) : m_(std::move(m)) {}

  static SkewHermitian zero(int n) { return SkewHermitian(CMat::Zero(n, n)); }
  /// Skew-Hermitian part (M - M^*)/2.
  static SkewHermitian project(const CMat& m) { return SkewHermitian((m - m.adjoint()) * 0.5); }

  const CMat& matrix() const { return m_; }
  int rank() const { return static_cast<int>(m_.rows()); }
  double norm() const { return m_.norm(); }
  double skewness_defect() const { return (m_ + m_.adjoint()).norm(); }

  SkewHermitian operator-() const { return SkewHermitian(-m_); }
  friend SkewHermitian operator+(const SkewHermitian& a, const SkewHermitian& b) { return SkewHermitian(a.m_ + b.m_); }
  friend SkewHermitian operator-(const SkewHermitian& a, const SkewHermitian& b) { return SkewHermitian(a.m_ - b.m_); }
  friend SkewHermitian operator*(double s, const SkewHermitian& a) { return SkewHermitian(s * a.m_); }
  SkewHermitian& operator+=(const SkewHermitian& o) {
    m_ += o.m_;
    return *this;
  }

private:
  CMat m_;
};

/// Element of U(N).
class UnitaryMatrix {
public:
  UnitaryMatrix() = default;
  explicit UnitaryMatrix(CMat m) : m_(std::move(m)) {}

  static UnitaryMatrix identity(int n) { return UnitaryMatrix(CMat::Identity(n, n)); }

  const CMat& matrix() const { return m_; }
  int rank() const { return static_cast<int>(m_.rows()); }
  UnitaryMatrix inverse() const { return UnitaryMatrix(m_.adjoint()); }
  double unitarity_defect() const { return (m_.adjoint() * m_ - CMat::Identity(m_.rows(), m_.cols())).norm(); }
  bool is_unitary(double tol = kUnitarityTolerance) const { return unitarity_defect() <= tol; }

  friend UnitaryMatrix operator*(const UnitaryMatrix& a, const UnitaryMatrix& b) { return UnitaryMatrix(a.m_ * b.m_); }

private:
  CMat m_;
};

// ---------------------------------------------------------------------------
// Real coordinates on u(N), orthonormal for B.
//   i e_kk;  (e_kl - e_lk)/sqrt2;  i (e_kl + e_lk)/sqrt2   (k < l)

inline int lie_dimension(int n) { return n * n; }

inline std::vector<SkewHermitian> lie_basis(int n) {
  std::vector<SkewHermitian> basis;
  basis.reserve(n * n);
  const cplx I(0, 1);
  const double r = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < n; ++k) {
    CMat m = CMat::Zero(n, n);
    m(k, k) = I;
    basis.emplace_back(m);
  }
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      CMat a = CMat::Zero(n, n);
      a(k, l) = r;
      a(l, k) = -r;
      basis.emplace_back(a);
      CMat s = CMat::Zero(n, n);
      s(k, l) = I * r;
      s(l, k) = I * r;
      basis.emplace_back(s);
    }
  return basis;
}

inline double inner_product(const SkewHermitian& x, const SkewHermitian& y) {
  return -(x.matrix() * y.matrix()).trace().real();
}

inline Eigen::VectorXd to_coords(const SkewHermitian& x) {
  const int n = x.rank();
  Eigen::VectorXd v(n * n);
  const CMat& m = x.matrix();
  const double s = std::sqrt(2.0);
  int a = 0;
  for (int k = 0; k < n; ++k) v[a++] = m(k, k).imag();
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      v[a++] = s * (m(k, l).real() - m(l, k).real()) * 0.5;
      v[a++] = s * (m(k, l).imag() + m(l, k).imag()) * 0.5;
    }
  return v;
}

template <class Vec>
SkewHermitian from_coords(int n, const Vec& v) {
  CMat m = CMat::Zero(n, n);
  const cplx I(0, 1);
  const double r = 1.0 / std::sqrt(2.0);
  int a = 0;
  for (int k = 0; k < n; ++k) m(k, k) = I * v[a++];
  for (int k = 0; k < n; ++k)
    for (int l = k + 1; l < n; ++l) {
      const double re = v[a++] * r;
      const double im = v[a++] * r;
      m(k, l) = cplx(re, im);
      m(l, k) = cplx(-re, im);
    }
  return SkewHermitian(m);
}

// ---------------------------------------------------------------------------

inline UnitaryMatrix exponential(const SkewHermitian& x) {
  const int n = x.rank();
  const CMat h = cplx(0, -1) * x.matrix();
  Eigen::SelfAdjointEigenSolver<CMat> es((h + h.adjoint()) * 0.5);
  CVec phases(n);
  for (int k = 0; k < n; ++k) phases[k] = std::polar(1.0, es.eigenvalues()[k]);
  return UnitaryMatrix(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
}

/// Eigenvalues of a unitary through its complex Schur form, with the Schur basis.
struct UnitarySpectrum {
  CVec eigenvalues;
  CMat basis;
};

inline UnitarySpectrum unitary_spectrum(const UnitaryMatrix& g) {
  Eigen::ComplexSchur<CMat> schur(g.matrix());
  return {schur.matrixT().diagonal(), schur.matrixU()};
}

/// Logarithm with eigenangles in (-pi, pi). Throws BranchCut near -1.
inline SkewHermitian principal_log(const UnitaryMatrix& g, double branch_tol = kBranchTolerance) {
  const auto sp = unitary_spectrum(g);
  const int n = g.rank();
  CVec logs(n);
  for (int k = 0; k < n; ++k) {
    const double th = std::arg(sp.eigenvalues[k]);
    if (std::numbers::pi - std::abs(th) <= branch_tol)
      throw BranchCut("principal_log: eigenvalue at -1 (angle " + std::to_string(th) + ")");
    logs[k] = cplx(0, th);
  }
  return SkewHermitian::project(sp.basis * logs.asDiagonal() * sp.basis.adjoint());
}

inline SkewHermitian adjoint_action(const UnitaryMatrix& g, const SkewHermitian& x) {
  return SkewHermitian::project(g.matrix() * x.matrix() * g.matrix().adjoint());
}

/// Sorted eigenvalue angles in turns, each in [0,1).
inline ConjugacyClassSpec class_of(const UnitaryMatrix& g) {
  const auto sp = unitary_spectrum(g);
  std::vector<Angle> angles;
  for (Eigen::Index k = 0; k < sp.eigenvalues.size(); ++k)
    angles.push_back(Angle::decimal(std::arg(sp.eigenvalues[k]) / (2.0 * std::numbers::pi)));
  return ConjugacyClassSpec(std::move(angles));
}

/// Largest circular distance between matched sorted angles, minimized over cyclic shifts.
inline double class_distance(const ConjugacyClassSpec& a, const ConjugacyClassSpec& b) {
  const auto& x = a.angles();
  const auto& y = b.angles();
  if (x.size() != y.size()) return std::numeric_limits<double>::infinity();
  const std::size_t n = x.size();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < n; ++s) {
    double worst = 0;
    for (std::size_t k = 0; k < n; ++k) {
      double d = std::abs(x[k].turns() - y[(k + s) % n].turns());
      d = std::min(d, 1.0 - d);
      worst = std::max(worst, d);
    }
    best = std::min(best, worst);
  }
  return n ? best : 0.0;
}

inline CVec eigenvalues_of(const ConjugacyClassSpec& c) {
  CVec e(static_cast<Eigen::Index>(c.rank()));
  for (std::size_t k = 0; k < c.rank(); ++k) e[k] = std::polar(1.0, 2.0 * std::numbers::pi * c.angles()[k].turns());
  return e;
}

inline UnitaryMatrix diagonal_model(const ConjugacyClassSpec& c) {
  return UnitaryMatrix(CMat(eigenvalues_of(c).asDiagonal()));
}

/// Coefficients c_1..c_N of det(lambda - g) = lambda^N + c_1 lambda^{N-1} + ... + c_N,
/// with the Faddeev-LeVerrier adjugate factors B_0..B_{N-1}:
/// adj(lambda - g) = sum_k lambda^{N-1-k} B_k and d c_{k+1} = -tr(B_k dg).
struct CharPoly {
  CVec coeffs;
  std::vector<CMat> adjugate_terms;
};

inline CharPoly characteristic_polynomial(const CMat& g) {
  const Eigen::Index n = g.rows();
  CharPoly cp;
  cp.coeffs.resize(n);
  CMat b = CMat::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    cp.adjugate_terms.push_back(b);
    const CMat gb = g * b;
    const cplx c = -gb.trace() / static_cast<double>(k);
    cp.coeffs[k - 1] = c;
    b = gb + c * CMat::Identity(n, n);
  }
  return cp;
}

/// Characteristic-polynomial coefficients of the diagonal model, by expanding the product.
inline CVec class_coefficients(const ConjugacyClassSpec& c) {
  const CVec e = eigenvalues_of(c);
  const Eigen::Index n = e.size();
  std::vector<cplx> p{1.0};  // p[k] = coefficient of lambda^{deg-k}
  for (Eigen::Index j = 0; j < n; ++j) {
    std::vector<cplx> q(p.size() + 1, 0.0);
    for (std::size_t k = 0; k < p.size(); ++k) {
      q[k] += p[k];
      q[k + 1] -= e[j] * p[k];
    }
    p = std::move(q);
  }
  CVec out(n);
  for (Eigen::Index k = 0; k < n; ++k) out[k] = p[k + 1];
  return out;
}

inline double class_residual(const UnitaryMatrix& g, const ConjugacyClassSpec& c) {
  if (static_cast<int>(c.rank()) != g.rank()) throw InvalidInput("class_residual: angle count differs from rank");
  return (characteristic_polynomial(g.matrix()).coeffs - class_coefficients(c)).norm();
}

// ---------------------------------------------------------------------------
// Randomness. A master seed is split into independent streams with splitmix64.

using Rng = std::mt19937_64;

inline std::uint64_t split_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline CMat complex_gaussian(int rows, int cols, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  CMat z(rows, cols);
  const double r = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) {
      const double re = nd(rng);
      const double im = nd(rng);
      z(i, j) = cplx(re * r, im * r);
    }
  return z;
}

inline UnitaryMatrix haar_sample(int n, Rng& rng) {
  const CMat z = complex_gaussian(n, n, rng);
  Eigen::HouseholderQR<CMat> qr(z);
  CMat q = qr.householderQ() * CMat::Identity(n, n);
  const CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < n; ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0) q.col(k) *= r(k, k) / a;
  }
  return UnitaryMatrix(q);
}

inline UnitaryMatrix haar_sample(int n, std::uint64_t seed) {
  Rng rng(seed);
  return haar_sample(n, rng);
}

/// Skew-Hermitian matrix with independent standard normal B-coordinates.
inline SkewHermitian random_skew(int n, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  Eigen::VectorXd v(n * n);
  for (int a = 0; a < n * n; ++a) v[a] = nd(rng);
  return from_coords(n, v);
}

}  // namespace pardef
