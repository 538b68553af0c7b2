#pragma once

// Representations of a presentation into U(N): word evaluation, twisted
// (Fox-calculus) derivatives of word maps, constraint residuals, and the
// Gauss-Newton retraction onto the constraint variety.

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "pardef/linalg.hpp"
#include "pardef/presentation.hpp"
#include "pardef/unitary.hpp"

namespace pardef {

inline constexpr double kRepresentationTolerance = 1e-10;

struct Representation {
  std::shared_ptr<const Presentation> presentation;
  std::vector<UnitaryMatrix> matrices;  // one per generator
  double tolerance = kRepresentationTolerance;

  int rank() const { return presentation->rank; }
  std::size_t generator_count() const { return matrices.size(); }

  static Representation trivial(std::shared_ptr<const Presentation> p) {
    Representation r;
    r.matrices.assign(p->generator_count(), UnitaryMatrix::identity(p->rank));
    r.presentation = std::move(p);
    return r;
  }
};

inline void check_shape(const Representation& rho) {
  if (!rho.presentation) throw InvalidInput("representation without presentation");
  if (rho.matrices.size() != rho.presentation->generator_count())
    throw InvalidInput("representation has " + std::to_string(rho.matrices.size()) + " matrices for " +
                       std::to_string(rho.presentation->generator_count()) + " generators");
  for (const auto& m : rho.matrices)
    if (m.rank() != rho.presentation->rank) throw InvalidInput("generator matrix has the wrong size");
}

inline UnitaryMatrix evaluate_word(const Representation& rho, const Word& w) {
  CMat acc = CMat::Identity(rho.rank(), rho.rank());
  for (const Letter& l : w.letters) {
    const CMat& g = rho.matrices.at(l.gen).matrix();
    if (l.sign > 0)
      acc = acc * g;
    else
      acc = acc * g.adjoint();
  }
  return UnitaryMatrix(acc);
}

/// Generator-part of a 1-cochain: one u(N) element per generator.
using GeneratorPart = std::vector<SkewHermitian>;

/// Twisted derivative u(w) of the word map at rho in direction u, with
/// u(vw) = u(v) + Ad(rho(v)) u(w) and u(x^{-1}) = -Ad(rho(x)^{-1}) u(x).
inline SkewHermitian cocycle_transport(const Representation& rho, const GeneratorPart& u, const Word& w) {
  const int n = rho.rank();
  CMat prefix = CMat::Identity(n, n);
  CMat acc = CMat::Zero(n, n);
  for (const Letter& l : w.letters) {
    const CMat& g = rho.matrices.at(l.gen).matrix();
    if (l.sign > 0) {
      acc += prefix * u.at(l.gen).matrix() * prefix.adjoint();
      prefix = prefix * g;
    } else {
      prefix = prefix * g.adjoint();
      acc -= prefix * u.at(l.gen).matrix() * prefix.adjoint();
    }
  }
  return SkewHermitian::project(acc);
}

/// Matrix of Ad(g) in the B-orthonormal coordinates of u(N).
inline MatrixXd adjoint_matrix(const UnitaryMatrix& g) {
  const int n = g.rank();
  const auto basis = lie_basis(n);
  MatrixXd m(n * n, n * n);
  for (int a = 0; a < n * n; ++a) m.col(a) = to_coords(adjoint_action(g, basis[a]));
  return m;
}

/// The linear map u -> u(w) as an N^2 x (generators * N^2) real matrix.
inline MatrixXd transport_matrix(const Representation& rho, const Word& w) {
  const int n = rho.rank();
  const int d = n * n;
  MatrixXd t = MatrixXd::Zero(d, d * static_cast<int>(rho.generator_count()));
  CMat prefix = CMat::Identity(n, n);
  for (const Letter& l : w.letters) {
    const CMat& g = rho.matrices.at(l.gen).matrix();
    const int off = static_cast<int>(l.gen) * d;
    if (l.sign > 0) {
      t.middleCols(off, d) += adjoint_matrix(UnitaryMatrix(prefix));
      prefix = prefix * g;
    } else {
      prefix = prefix * g.adjoint();
      t.middleCols(off, d) -= adjoint_matrix(UnitaryMatrix(prefix));
    }
  }
  return t;
}

inline VectorXd generator_coords(const GeneratorPart& u) {
  if (u.empty()) return VectorXd(0);
  const int d = u.front().rank() * u.front().rank();
  VectorXd v(d * static_cast<int>(u.size()));
  for (std::size_t j = 0; j < u.size(); ++j) v.segment(static_cast<int>(j) * d, d) = to_coords(u[j]);
  return v;
}

inline GeneratorPart generator_part_from(int n, std::size_t gens, const VectorXd& v) {
  GeneratorPart u;
  const int d = n * n;
  for (std::size_t j = 0; j < gens; ++j) u.push_back(from_coords(n, v.segment(static_cast<int>(j) * d, d)));
  return u;
}

/// rho_t(x) = exp(t u_x) rho(x).
inline Representation perturb_left(const Representation& rho, const GeneratorPart& u, double t = 1.0) {
  Representation out = rho;
  for (std::size_t j = 0; j < rho.matrices.size(); ++j)
    out.matrices[j] = exponential(t * u.at(j)) * rho.matrices[j];
  return out;
}

inline Representation conjugate(const Representation& rho, const UnitaryMatrix& g) {
  Representation out = rho;
  for (auto& m : out.matrices) m = g * m * g.inverse();
  return out;
}

// ---------------------------------------------------------------------------

struct Residuals {
  std::vector<double> relators;
  std::vector<double> peripherals;
  double max = 0.0;
};

inline Residuals constraint_residual(const Representation& rho) {
  check_shape(rho);
  const Presentation& p = *rho.presentation;
  const int n = rho.rank();
  Residuals r;
  for (const Word& w : p.relators) {
    const double v = (evaluate_word(rho, w).matrix() - CMat::Identity(n, n)).norm();
    r.relators.push_back(v);
    r.max = std::max(r.max, v);
  }
  for (const Peripheral& q : p.peripherals) {
    const double v = class_residual(evaluate_word(rho, q.word), q.cls);
    r.peripherals.push_back(v);
    r.max = std::max(r.max, v);
  }
  return r;
}

/// Complex dimension of the commutant of the image.
inline int commutant_dimension(const Representation& rho, double rel_tol = kRankTolerance) {
  const int n = rho.rank();
  const int gens = static_cast<int>(rho.generator_count());
  if (gens == 0) return n * n;
  const CMat id = CMat::Identity(n, n);
  CMat sys(gens * n * n, n * n);
  for (int j = 0; j < gens; ++j) {
    const CMat& a = rho.matrices[j].matrix();
    // vec(M A - A M) = (A^T (x) I - I (x) A) vec(M)
    CMat blk(n * n, n * n);
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q) blk.block(p * n, q * n, n, n) = a(q, p) * id - (p == q ? a : CMat::Zero(n, n));
    sys.middleRows(j * n * n, n * n) = blk;
  }
  Eigen::JacobiSVD<CMat> svd(sys);
  const auto cut = cut_spectrum(svd.singularValues(), rel_tol);
  return n * n - cut.rank;
}

// ---------------------------------------------------------------------------
// Gauss-Newton refinement.

namespace detail {

struct Residual {
  VectorXd values;
  MatrixXd jacobian;
};

inline void push_complex(VectorXd& v, int& at, const cplx& z) {
  v[at++] = z.real();
  v[at++] = z.imag();
}

/// Residual vector (relator entries of rho(r) - I and characteristic-polynomial
/// differences) with its Jacobian in left-exponential tangent coordinates.
inline Residual residual_and_jacobian(const Representation& rho, bool with_jacobian) {
  const Presentation& p = *rho.presentation;
  const int n = rho.rank();
  const int d = n * n;
  const int cols = d * static_cast<int>(rho.generator_count());
  const int rows = static_cast<int>(p.relators.size()) * 2 * d + static_cast<int>(p.peripherals.size()) * 2 * n;
  Residual out;
  out.values.resize(rows);
  if (with_jacobian) out.jacobian = MatrixXd::Zero(rows, cols);
  const auto basis = lie_basis(n);
  int row = 0;
  for (const Word& w : p.relators) {
    const CMat val = evaluate_word(rho, w).matrix();
    const CMat diff = val - CMat::Identity(n, n);
    int at = row;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) push_complex(out.values, at, diff(i, j));
    if (with_jacobian) {
      const MatrixXd t = transport_matrix(rho, w);
      for (int c = 0; c < cols; ++c) {
        const CMat dv = from_coords(n, t.col(c)).matrix() * val;
        VectorXd col(2 * d);
        int k = 0;
        for (int j = 0; j < n; ++j)
          for (int i = 0; i < n; ++i) push_complex(col, k, dv(i, j));
        out.jacobian.block(row, c, 2 * d, 1) = col;
      }
    }
    row += 2 * d;
  }
  for (const Peripheral& q : p.peripherals) {
    const CMat g = evaluate_word(rho, q.word).matrix();
    const CharPoly cp = characteristic_polynomial(g);
    const CVec diff = cp.coeffs - class_coefficients(q.cls);
    int at = row;
    for (int k = 0; k < n; ++k) push_complex(out.values, at, diff[k]);
    if (with_jacobian) {
      const MatrixXd t = transport_matrix(rho, q.word);
      for (int c = 0; c < cols; ++c) {
        const CMat dg = from_coords(n, t.col(c)).matrix() * g;
        for (int k = 0; k < n; ++k) {
          const cplx dc = -(cp.adjugate_terms[k] * dg).trace();
          out.jacobian(row + 2 * k, c) = dc.real();
          out.jacobian(row + 2 * k + 1, c) = dc.imag();
        }
      }
    }
    row += 2 * n;
  }
  return out;
}

}  // namespace detail

struct RefineOptions {
  int max_iterations = 50;
  double target_tolerance = 1e-12;
  double rank_tolerance = 1e-10;
  int max_halvings = 30;
};

struct RefineResult {
  Representation representation;  // best iterate
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // max constraint residual of the returned iterate
  std::string diagnostic;
};

/// Gauss-Newton on the sum of squared relator and class residuals, with one
/// tangent per generator retracted by the exponential on the left and
/// minimal-norm steps. Accepted iterates never increase the objective.
inline RefineResult refine(const Representation& start, const RefineOptions& opts = {}) {
  check_shape(start);
  RefineResult res;
  res.representation = start;
  res.residual = constraint_residual(start).max;
  if (!std::isfinite(res.residual)) {
    res.diagnostic = "non-finite residual at start";
    return res;
  }
  const int n = start.rank();
  Representation cur = start;
  double objective = detail::residual_and_jacobian(cur, false).values.squaredNorm();
  while (true) {
    if (res.residual <= opts.target_tolerance) {
      res.converged = true;
      res.representation.tolerance = std::max(res.residual, opts.target_tolerance);
      return res;
    }
    if (res.iterations >= opts.max_iterations) {
      res.diagnostic = "no convergence after " + std::to_string(opts.max_iterations) + " iterations";
      return res;
    }
    const auto rj = detail::residual_and_jacobian(cur, true);
    const RankRevealing solver(rj.jacobian, opts.rank_tolerance);
    const VectorXd step = -solver.solve(rj.values);
    if (!(step.norm() > 0.0) || !std::isfinite(step.norm())) {
      res.diagnostic = "stalled: zero Gauss-Newton step with residual " + std::to_string(res.residual);
      return res;
    }
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h, t *= 0.5) {
      Representation trial = perturb_left(cur, generator_part_from(n, cur.generator_count(), step), t);
      const double obj = detail::residual_and_jacobian(trial, false).values.squaredNorm();
      if (obj < objective) {
        cur = std::move(trial);
        objective = obj;
        accepted = true;
        break;
      }
    }
    ++res.iterations;
    if (!accepted) {
      res.diagnostic = "stalled: no decrease along the Gauss-Newton direction, residual " +
                       std::to_string(res.residual);
      return res;
    }
    const double r = constraint_residual(cur).max;
    if (r <= res.residual || r <= opts.target_tolerance) {
      res.representation = cur;
      res.residual = r;
    }
  }
}

struct FindOptions {
  std::uint64_t seed = 1;
  int attempts = 50;
  double target_tolerance = kRepresentationTolerance;
  int max_iterations = 100;
};

struct FindResult {
  std::optional<Representation> representation;
  int attempt = -1;  // index of the successful attempt
  double best_residual = std::numeric_limits<double>::infinity();
};

/// Random restarts of refine from Haar-distributed generators; generators
/// that are themselves peripheral words start in their prescribed class.
/// Attempt a uses the stream split_seed(seed, a).
inline FindResult find_representation(std::shared_ptr<const Presentation> p, const FindOptions& opts = {}) {
  FindResult out;
  const int n = p->rank;
  for (int a = 0; a < opts.attempts; ++a) {
    Rng rng(split_seed(opts.seed, static_cast<std::uint64_t>(a)));
    Representation rho;
    rho.presentation = p;
    for (std::size_t j = 0; j < p->generator_count(); ++j) rho.matrices.push_back(haar_sample(n, rng));
    for (const Peripheral& q : p->peripherals) {
      if (q.word.size() != 1) continue;
      const Letter l = q.word.letters[0];
      const UnitaryMatrix h = haar_sample(n, rng);
      const UnitaryMatrix g = h * diagonal_model(q.cls) * h.inverse();
      rho.matrices[l.gen] = l.sign > 0 ? g : g.inverse();
    }
    RefineOptions ro;
    ro.max_iterations = opts.max_iterations;
    ro.target_tolerance = opts.target_tolerance;
    RefineResult rr = refine(rho, ro);
    out.best_residual = std::min(out.best_residual, rr.residual);
    if (rr.converged) {
      out.representation = std::move(rr.representation);
      out.attempt = a;
      return out;
    }
  }
  return out;
}

}  // namespace pardef
