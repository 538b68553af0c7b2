#pragma once

// Order-by-order lifting of first-order deformations over R[t]/(t^{k+1}),
// and the empirical probe of the quadratic cone.

#include <optional>
#include <random>
#include <vector>

#include "pardef/cohomology.hpp"

namespace pardef {

struct LiftOptions {
  double tolerance = kObstructionTolerance;  // relative to |u|^m at order m
  int budget = 3;                            // fallback attempts for failures past order 2
  int newton_steps = 12;
};

struct LiftReport {
  int requested_order = 0;
  int achieved_order = 0;
  std::vector<double> residuals;  // index m-1: norm of the order-m defect after solving
  std::optional<ObstructionClass> obstruction;
  int failed_order = 0;  // 0 on success
  bool budget_exceeded = false;
  int fallback_attempts = 0;
  JetRepresentation corrections;
  /// Factorization used at each order >= 2; all equal to the complex's d1_cone factor.
  std::vector<const RankRevealing*> factor_handles;

  bool succeeded() const { return achieved_order == requested_order; }
};

namespace detail {

inline void add_order(JetRepresentation& rj, const ComplexLayout& l, int m, const VectorXd& z) {
  for (int j = 0; j < l.generators; ++j) rj.generator_jets[j][m - 1] += from_coords(l.n, z.segment(j * l.lie, l.lie));
  for (int s = 0; s < l.groups; ++s)
    rj.conjugator_jets[s][m - 1] += from_coords(l.n, z.segment(l.c1_generators() + s * l.lie, l.lie));
}

inline void set_order(JetRepresentation& rj, const ComplexLayout& l, int m, const VectorXd& z) {
  for (int j = 0; j < l.generators; ++j) rj.generator_jets[j][m - 1] = SkewHermitian::zero(l.n);
  for (int s = 0; s < l.groups; ++s) rj.conjugator_jets[s][m - 1] = SkewHermitian::zero(l.n);
  add_order(rj, l, m, z);
}

inline VectorXd defect_coords(const ConeComplex& cx, const JetRepresentation& rj, int m) {
  return to_coords(cx.layout, order_defect(rj, m));
}

/// Greedy minimal-norm solve of orders from..to in place.
inline void solve_orders(const ConeComplex& cx, JetRepresentation& rj, int from, int to) {
  for (int m = from; m <= to; ++m) {
    set_order(rj, cx.layout, m, VectorXd::Zero(cx.layout.c1()));
    set_order(rj, cx.layout, m, -cx.d1_cone_factor->solve(defect_coords(cx, rj, m)));
  }
}

}  // namespace detail

/// Lifts the direction u (parabolic cocycle, generator coordinates) to order k.
inline LiftReport lift(const ConeComplex& cx, const VectorXd& u, int k, const LiftOptions& opts = {}) {
  require_cocycle(cx, u);
  if (k < 1) throw InvalidInput("lift order must be at least 1");
  const ComplexLayout& l = cx.layout;
  const RankRevealing& factor = *cx.d1_cone_factor;
  const double unorm = u.norm();

  LiftReport rep;
  rep.requested_order = k;
  const SecondOrderData sd = second_order_data(cx, u);
  JetRepresentation rj = first_order_jet(cx, u, sd.conjugators, k);
  rep.residuals.push_back(detail::defect_coords(cx, rj, 1).norm());
  rep.achieved_order = 1;

  auto threshold = [&](int m) { return opts.tolerance * std::pow(unorm, m); };

  for (int m = 2; m <= k; ++m) {
    rep.factor_handles.push_back(&factor);
    VectorXd residual;
    if (m == 2) {
      // Unknowns: (X_2, zeta_2) and a shift of zeta_1 along ker J_S.
      const VectorXd r0 = factor.residual(sd.defect);
      MatrixXd projected(sd.shifts.rows(), sd.shifts.cols());
      for (Eigen::Index c = 0; c < sd.shifts.cols(); ++c) projected.col(c) = factor.residual(sd.shifts.col(c));
      VectorXd kappa = VectorXd::Zero(sd.shifts.cols());
      if (sd.shifts.cols() > 0) kappa = -RankRevealing(projected, cx.rank_tolerance).solve(r0);
      for (std::size_t c = 0; c < sd.shift_directions.size(); ++c) {
        const auto& [s, dir] = sd.shift_directions[c];
        rj.conjugator_jets[s][0] += from_coords(l.n, VectorXd(kappa[static_cast<Eigen::Index>(c)] * dir));
      }
      detail::set_order(rj, l, 2, -factor.solve(sd.defect + sd.shifts * kappa));
      residual = detail::defect_coords(cx, rj, 2);
      if (!(residual.norm() <= threshold(2)) && unorm > 0) {
        rep.residuals.push_back(residual.norm());
        rep.failed_order = 2;
        // Least-squares residual of the cone system, read in the obstruction space of u.
        const VectorXd ls = r0 + projected * kappa;
        rep.obstruction = make_class(cx, cx.parabolic_project(ls), obstruction_space(cx, {&sd}));
        rep.corrections = rj;
        return rep;
      }
    } else {
      detail::solve_orders(cx, rj, m, m);
      residual = detail::defect_coords(cx, rj, m);
      if (!(residual.norm() <= threshold(m))) {
        // Fallback: perturb an earlier order along ker(d1_cone) and re-solve greedily.
        bool fixed = false;
        while (!fixed && rep.fallback_attempts < opts.budget) {
          const int j = m - 1 - rep.fallback_attempts % (m - 1);
          ++rep.fallback_attempts;
          MatrixXd dirs;
          if (j == 1) {
            dirs = MatrixXd::Zero(l.c1(), sd.shifts.cols());
            for (std::size_t c = 0; c < sd.shift_directions.size(); ++c) {
              const auto& [s, dir] = sd.shift_directions[c];
              dirs.block(l.c1_generators() + s * l.lie, static_cast<Eigen::Index>(c), l.lie, 1) = dir;
            }
          } else {
            dirs = factor.kernel();
          }
          if (dirs.cols() == 0) continue;
          VectorXd delta = VectorXd::Zero(dirs.cols());
          auto evaluate = [&](const VectorXd& dl) {
            JetRepresentation t = rj;
            detail::add_order(t, l, j, dirs * dl);
            detail::solve_orders(cx, t, j + 1, m);
            return std::make_pair(detail::defect_coords(cx, t, m), t);
          };
          auto [g, t0] = evaluate(delta);
          // Iterate past the acceptance threshold so that later orders start from an accurate solution.
          for (int it = 0; it < opts.newton_steps && g.norm() > 1e-6 * threshold(m); ++it) {
            MatrixXd jac(g.size(), dirs.cols());
            const double h = 1e-4 * std::max(1.0, unorm);
            for (Eigen::Index c = 0; c < dirs.cols(); ++c) {
              VectorXd e = VectorXd::Zero(dirs.cols());
              e[c] = h;
              jac.col(c) = (evaluate(delta + e).first - evaluate(delta - e).first) / (2 * h);
            }
            const VectorXd next = delta - RankRevealing(jac, cx.rank_tolerance).solve(g);
            auto trial = evaluate(next);
            if (!(trial.first.norm() < g.norm())) break;
            delta = next;
            std::tie(g, t0) = std::move(trial);
          }
          if (g.norm() <= threshold(m)) {
            rj = t0;
            residual = g;
            fixed = true;
          }
        }
        if (!fixed) {
          rep.residuals.push_back(residual.norm());
          rep.failed_order = m;
          rep.budget_exceeded = true;
          rep.obstruction = make_class(cx, cx.parabolic_project(factor.residual(residual)),
                                       obstruction_space(cx, {}));
          rep.corrections = rj;
          return rep;
        }
      }
    }
    rep.residuals.push_back(residual.norm());
    rep.achieved_order = m;
  }
  rep.corrections = rj;
  return rep;
}

inline LiftReport lift(const ConeComplex& cx, const GeneratorPart& u, int k, const LiftOptions& opts = {}) {
  return lift(cx, generator_coords(u), k, opts);
}

/// Norms of the order-m defects, m = 1..order.
inline std::vector<double> residual_profile(const JetRepresentation& rj) {
  std::vector<double> out;
  const ComplexLayout l(*rj.base.presentation);
  for (int m = 1; m <= rj.order; ++m) out.push_back(to_coords(l, order_defect(rj, m)).norm());
  return out;
}

/// log(I + N) for N with vanishing constant term.
inline MatrixJet log_unipotent(const MatrixJet& a) {
  const int k = a.order();
  const Eigen::Index n = a[0].rows();
  MatrixJet nil = a;
  nil[0] = CMat::Zero(n, n);
  MatrixJet out(k, CMat::Zero(n, n));
  MatrixJet power(k, CMat::Identity(n, n));
  for (int j = 1; j <= k; ++j) {
    power = power * nil;
    out = out + scale((j % 2 ? 1.0 : -1.0) / j, power);
  }
  return out;
}

/// Conjugation of a jet representation by exp(sum_m t^m Y_m).
inline JetRepresentation gauge_transform(const JetRepresentation& rj, const std::vector<SkewHermitian>& y) {
  const int n = rj.rank();
  const MatrixJet g = exp_nilpotent(lie_series(n, rj.order, y));
  const MatrixJet ginv = adjoint(g);
  JetRepresentation out = rj;
  auto unpack = [&](const MatrixJet& z) {
    std::vector<SkewHermitian> c;
    for (int m = 1; m <= rj.order; ++m) c.push_back(SkewHermitian::project(z[m]));
    return c;
  };
  for (std::size_t j = 0; j < rj.generator_jets.size(); ++j) {
    const CMat& base = rj.base.matrices[j].matrix();
    // g exp(X) rho g^{-1} rho^{-1} = exp(X'), new generator jet is X'.
    const MatrixJet v = times_constant(g * rj.generator(j) * ginv, base.adjoint());
    out.generator_jets[j] = unpack(log_unipotent(v));
  }
  for (std::size_t s = 0; s < rj.conjugator_jets.size(); ++s)
    out.conjugator_jets[s] = unpack(log_unipotent(g * rj.conjugator(s)));
  return out;
}

// ---------------------------------------------------------------------------

struct ProbeSample {
  double q_norm = 0.0;
  bool in_cone = false;
  int achieved_order = 0;
  int failed_order = 0;
  bool budget_exceeded = false;
};

struct ConeProbeReport {
  bool rigid = false;
  int order = 0;
  std::uint64_t seed = 0;
  double tolerance = kObstructionTolerance;
  std::vector<ProbeSample> samples;
  // Contingency of {Q <= tol, Q > tol} x {lifted to the requested order, failed}.
  int cone_lifted = 0;
  int cone_failed = 0;
  int noncone_lifted = 0;
  int noncone_failed = 0;
  int cone_failed_at_order_2 = 0;
  int noncone_past_order_2 = 0;
  int budget_exceeded = 0;

  /// No cone direction fails at order 2 and no non-cone direction lifts past order 2.
  bool prediction_holds() const { return cone_failed_at_order_2 == 0 && noncone_past_order_2 == 0; }
};

/// Random unit directions in H^1 (sample s uses stream split_seed(seed, s)).
inline ConeProbeReport probe_cone(const ConeComplex& cx, const CohomologyBasis& basis, int samples, int k,
                                  std::uint64_t seed, const LiftOptions& opts = {}) {
  ConeProbeReport rep;
  rep.order = k;
  rep.seed = seed;
  rep.tolerance = opts.tolerance;
  if (basis.size() == 0) {
    rep.rigid = true;
    return rep;
  }
  for (int s = 0; s < samples; ++s) {
    Rng rng(split_seed(seed, static_cast<std::uint64_t>(s)));
    std::normal_distribution<double> nd(0.0, 1.0);
    VectorXd c(basis.size());
    for (int i = 0; i < basis.size(); ++i) c[i] = nd(rng);
    VectorXd u = basis.vectors * c;
    u /= u.norm();
    ProbeSample ps;
    ps.q_norm = obstruction(cx, u).norm;
    ps.in_cone = ps.q_norm <= opts.tolerance * u.squaredNorm();
    const LiftReport lr = lift(cx, u, k, opts);
    ps.achieved_order = lr.achieved_order;
    ps.failed_order = lr.failed_order;
    ps.budget_exceeded = lr.budget_exceeded;
    rep.samples.push_back(ps);
    const bool lifted = lr.succeeded();
    if (ps.in_cone) {
      (lifted ? rep.cone_lifted : rep.cone_failed)++;
      if (lr.failed_order == 2) ++rep.cone_failed_at_order_2;
    } else {
      (lifted ? rep.noncone_lifted : rep.noncone_failed)++;
      if (lr.achieved_order > 2) ++rep.noncone_past_order_2;
    }
    if (lr.budget_exceeded) ++rep.budget_exceeded;
  }
  return rep;
}

}  // namespace pardef
