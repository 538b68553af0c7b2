#pragma once

// Rank-revealing dense linear algebra on real matrices. Every rank decision
// goes through RankCut so that it can be audited and reported.

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <memory>
#include <string>

#include "pardef/errors.hpp"

namespace pardef {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Default relative singular-value threshold for rank decisions.
inline constexpr double kRankTolerance = 1e-8;

/// Outcome of cutting a singular-value spectrum at a threshold.
struct RankCut {
  int rank = 0;
  double threshold = 0.0;
  double smallest_kept = 0.0;    // 0 when rank == 0
  double largest_dropped = 0.0;  // 0 when nothing dropped
  bool ill_conditioned = false;
  int rank_low = 0;
  int rank_high = 0;

  /// Ratio of the singular values on either side of the cut (inf when one side is empty).
  double gap() const {
    if (rank == 0 || largest_dropped == 0.0) return std::numeric_limits<double>::infinity();
    return smallest_kept / largest_dropped;
  }
};

/// Threshold is rel_tol * max(sigma_max, 1): the maps handled here have O(1)
/// entries, and rounding noise in an identically-zero map must not count.
inline RankCut cut_spectrum(const VectorXd& sv, double rel_tol) {
  RankCut c;
  const double smax = sv.size() ? sv.maxCoeff() : 0.0;
  c.threshold = rel_tol * std::max(smax, 1.0);
  for (Eigen::Index k = 0; k < sv.size(); ++k) {
    const double s = sv[k];
    if (s > c.threshold) {
      ++c.rank;
      c.smallest_kept = c.rank == 1 ? s : std::min(c.smallest_kept, s);
    } else {
      c.largest_dropped = std::max(c.largest_dropped, s);
    }
    if (s > 10.0 * c.threshold) ++c.rank_low;
    if (s > 0.1 * c.threshold) ++c.rank_high;
  }
  c.ill_conditioned = c.rank_low != c.rank_high;
  return c;
}

/// Thin wrapper over a full SVD, with the rank decided once at construction.
class RankRevealing {
public:
  RankRevealing() = default;
  RankRevealing(const MatrixXd& a, double rel_tol = kRankTolerance) : rows_(a.rows()), cols_(a.cols()) {
    if (a.rows() == 0 || a.cols() == 0) {
      u_ = MatrixXd::Identity(a.rows(), a.rows());
      v_ = MatrixXd::Identity(a.cols(), a.cols());
      s_ = VectorXd::Zero(0);
      cut_ = cut_spectrum(s_, rel_tol);
      return;
    }
    Eigen::JacobiSVD<MatrixXd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    u_ = svd.matrixU();
    v_ = svd.matrixV();
    s_ = svd.singularValues();
    cut_ = cut_spectrum(s_, rel_tol);
  }

  Eigen::Index rows() const { return rows_; }
  Eigen::Index cols() const { return cols_; }
  int rank() const { return cut_.rank; }
  int nullity() const { return static_cast<int>(cols_) - cut_.rank; }
  const RankCut& cut() const { return cut_; }
  const VectorXd& singular_values() const { return s_; }

  /// Throws IllConditioned when the cut is too close to the threshold.
  void require_well_conditioned(const std::string& where) const {
    if (cut_.ill_conditioned) throw IllConditioned(where, cut_.rank_low, cut_.rank_high);
  }

  /// Orthonormal basis of the kernel (columns).
  MatrixXd kernel() const { return v_.rightCols(cols_ - cut_.rank); }
  /// Orthonormal basis of the image.
  MatrixXd image() const { return u_.leftCols(cut_.rank); }
  /// Orthonormal basis of the orthogonal complement of the image.
  MatrixXd cokernel() const { return u_.rightCols(rows_ - cut_.rank); }

  /// Minimal-norm least-squares solution of A x = b.
  VectorXd solve(const VectorXd& b) const {
    const int r = cut_.rank;
    VectorXd y = u_.leftCols(r).transpose() * b;
    for (int k = 0; k < r; ++k) y[k] /= s_[k];
    return v_.leftCols(r) * y;
  }

  /// b minus its projection onto the image of A.
  VectorXd residual(const VectorXd& b) const {
    const int r = cut_.rank;
    return b - u_.leftCols(r) * (u_.leftCols(r).transpose() * b);
  }

private:
  Eigen::Index rows_ = 0;
  Eigen::Index cols_ = 0;
  MatrixXd u_, v_;
  VectorXd s_;
  RankCut cut_;
};

/// Orthonormal basis of the column span of a.
inline MatrixXd orthonormal_span(const MatrixXd& a, double rel_tol = kRankTolerance) {
  if (a.cols() == 0) return MatrixXd(a.rows(), 0);
  return RankRevealing(a, rel_tol).image();
}

/// Orthonormal basis of the orthogonal complement of the column span of a.
inline MatrixXd orthogonal_complement(const MatrixXd& a, Eigen::Index ambient, double rel_tol = kRankTolerance) {
  if (a.cols() == 0) return MatrixXd::Identity(ambient, ambient);
  return RankRevealing(a, rel_tol).cokernel();
}

inline MatrixXd hstack(const MatrixXd& a, const MatrixXd& b) {
  MatrixXd out(std::max(a.rows(), b.rows()), a.cols() + b.cols());
  if (a.cols()) out.leftCols(a.cols()) = a;
  if (b.cols()) out.rightCols(b.cols()) = b;
  return out;
}

}  // namespace pardef
