#pragma once

// The deformation complexes of a constrained representation.
//
// Cone complex, with explicit first-order conjugators xi_S per simultaneity group:
//   d0 : X            -> ( X - Ad(rho(x_j)) X ;  X per group )
//   d1 : (u, xi)      -> ( u(r) ;  u(gamma_i) - (Id - Ad rho(gamma_i)) xi_S(i) )
// Parabolic complex, on generator parts only: the peripheral rows of d1 are
// projected onto the B-orthogonal complement of the joint image
//   J_S : xi -> ( (Id - Ad rho(gamma_i)) xi )_{i in S}.
// The obstruction Q(u) is the order-2 defect of the jet deformation with
// first-order data (u, xi(u)), taken modulo Im(d1_par) and the directions
// produced by shifting xi(u) along ker J_S.

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "pardef/jet_ring.hpp"
#include "pardef/linalg.hpp"

namespace pardef {

inline constexpr double kObstructionTolerance = 1e-7;
inline constexpr double kCocycleTolerance = 1e-8;

struct ConeComplex {
  Representation rho;
  ComplexLayout layout;
  double rank_tolerance = kRankTolerance;

  MatrixXd d0;       // c1 x lie
  MatrixXd d0_gen;   // c1_generators x lie
  MatrixXd d1_cone;  // c2 x c1
  MatrixXd d1_par;   // parabolic_dim x c1_generators

  /// Per group: factorization of J_S, and orthonormal bases of ker J_S and (Im J_S)^perp.
  std::vector<RankRevealing> joint_maps;
  std::vector<MatrixXd> joint_kernel;
  std::vector<MatrixXd> joint_complement;
  std::vector<int> parabolic_offsets;  // per group, offset in parabolic coordinates

  /// Factorization of d1_cone, built once and shared by every order of a lift.
  std::shared_ptr<const RankRevealing> d1_cone_factor;

  int parabolic_dim() const { return static_cast<int>(d1_par.rows()); }

  /// Parabolic coordinates of a degree-2 cochain (coordinates in C2).
  VectorXd parabolic_project(const VectorXd& c2) const {
    VectorXd out(parabolic_dim());
    const int rel = layout.relators * layout.lie;
    out.head(rel) = c2.head(rel);
    const auto& groups = rho.presentation->groups;
    for (std::size_t s = 0; s < groups.size(); ++s) {
      const VectorXd stacked = stack_peripherals(c2, s);
      out.segment(parabolic_offsets[s], joint_complement[s].cols()) = joint_complement[s].transpose() * stacked;
    }
    return out;
  }

  /// Inverse of parabolic_project on its image: a C2 vector with peripheral
  /// parts in the joint complements.
  VectorXd parabolic_embed(const VectorXd& par) const {
    VectorXd out = VectorXd::Zero(layout.c2());
    const int rel = layout.relators * layout.lie;
    out.head(rel) = par.head(rel);
    const auto& groups = rho.presentation->groups;
    for (std::size_t s = 0; s < groups.size(); ++s) {
      const VectorXd stacked = joint_complement[s] * par.segment(parabolic_offsets[s], joint_complement[s].cols());
      for (std::size_t k = 0; k < groups[s].size(); ++k)
        out.segment(layout.peripheral_offset(static_cast<int>(groups[s][k])), layout.lie) =
            stacked.segment(static_cast<int>(k) * layout.lie, layout.lie);
    }
    return out;
  }

  VectorXd stack_peripherals(const VectorXd& c2, std::size_t s) const {
    const auto& grp = rho.presentation->groups[s];
    VectorXd v(static_cast<int>(grp.size()) * layout.lie);
    for (std::size_t k = 0; k < grp.size(); ++k)
      v.segment(static_cast<int>(k) * layout.lie, layout.lie) =
          c2.segment(layout.peripheral_offset(static_cast<int>(grp[k])), layout.lie);
    return v;
  }

  /// Minimal-norm conjugator parts xi(u) solving u(gamma_i) = (Id - Ad rho(gamma_i)) xi_S jointly.
  std::vector<VectorXd> conjugators_for(const VectorXd& u_gen) const {
    const auto& p = *rho.presentation;
    std::vector<VectorXd> xi;
    // Peripheral rows of d1_cone restricted to generator columns give u(gamma_i).
    const VectorXd ug = d1_cone.leftCols(layout.c1_generators()) * u_gen;
    for (std::size_t s = 0; s < p.groups.size(); ++s) xi.push_back(joint_maps[s].solve(stack_peripherals(ug, s)));
    return xi;
  }
};

inline ConeComplex assemble_complex(const Representation& rho, double rank_tol = kRankTolerance) {
  check_shape(rho);
  const Presentation& p = *rho.presentation;
  ConeComplex cx{rho, ComplexLayout(p), rank_tol};
  const ComplexLayout& l = cx.layout;
  const int d = l.lie;
  const MatrixXd id = MatrixXd::Identity(d, d);

  cx.d0 = MatrixXd::Zero(l.c1(), d);
  for (int j = 0; j < l.generators; ++j) cx.d0.middleRows(j * d, d) = id - adjoint_matrix(rho.matrices[j]);
  for (int s = 0; s < l.groups; ++s) cx.d0.middleRows(l.c1_generators() + s * d, d) = id;
  cx.d0_gen = cx.d0.topRows(l.c1_generators());

  std::vector<MatrixXd> id_minus_ad;
  cx.d1_cone = MatrixXd::Zero(l.c2(), l.c1());
  for (int j = 0; j < l.relators; ++j)
    cx.d1_cone.block(l.relator_offset(j), 0, d, l.c1_generators()) = transport_matrix(rho, p.relators[j]);
  for (int i = 0; i < l.peripherals; ++i) {
    const Word& w = p.peripherals[i].word;
    id_minus_ad.push_back(id - adjoint_matrix(evaluate_word(rho, w)));
    cx.d1_cone.block(l.peripheral_offset(i), 0, d, l.c1_generators()) = transport_matrix(rho, w);
    const int s = static_cast<int>(p.group_of(static_cast<std::size_t>(i)));
    cx.d1_cone.block(l.peripheral_offset(i), l.c1_generators() + s * d, d, d) = -id_minus_ad.back();
  }

  int par_dim = l.relators * d;
  for (int s = 0; s < l.groups; ++s) {
    const auto& grp = p.groups[s];
    MatrixXd joint(static_cast<int>(grp.size()) * d, d);
    for (std::size_t k = 0; k < grp.size(); ++k) joint.middleRows(static_cast<int>(k) * d, d) = id_minus_ad[grp[k]];
    cx.joint_maps.emplace_back(joint, rank_tol);
    cx.joint_kernel.push_back(cx.joint_maps.back().kernel());
    cx.joint_complement.push_back(cx.joint_maps.back().cokernel());
    cx.parabolic_offsets.push_back(par_dim);
    par_dim += static_cast<int>(cx.joint_complement.back().cols());
  }

  cx.d1_par = MatrixXd::Zero(par_dim, l.c1_generators());
  cx.d1_par.topRows(l.relators * d) = cx.d1_cone.topLeftCorner(l.relators * d, l.c1_generators());
  for (int s = 0; s < l.groups; ++s) {
    const auto& grp = p.groups[s];
    MatrixXd stacked(static_cast<int>(grp.size()) * d, l.c1_generators());
    for (std::size_t k = 0; k < grp.size(); ++k)
      stacked.middleRows(static_cast<int>(k) * d, d) =
          cx.d1_cone.block(l.peripheral_offset(static_cast<int>(grp[k])), 0, d, l.c1_generators());
    cx.d1_par.middleRows(cx.parabolic_offsets[s], cx.joint_complement[s].cols()) =
        cx.joint_complement[s].transpose() * stacked;
  }

  cx.d1_cone_factor = std::make_shared<const RankRevealing>(cx.d1_cone, rank_tol);
  return cx;
}

inline Cochain1 coboundary(const Representation& rho, const SkewHermitian& x) {
  Cochain1 c;
  for (const auto& g : rho.matrices) c.generator_part.push_back(x - adjoint_action(g, x));
  c.conjugator_part.assign(rho.presentation->groups.size(), x);
  return c;
}

// ---------------------------------------------------------------------------
// Dimensions.

struct Dims {
  int h0 = 0;
  int c0 = 0;
  int z1_par = 0;
  int b1 = 0;
  int h1_par = 0;
  int h1_cone = 0;
  int o2 = 0;
  /// Rank cut of every map involved, keyed by map name.
  std::map<std::string, RankCut> cuts;
};

namespace detail {
inline void require(const RankRevealing& f, const std::string& name, std::map<std::string, RankCut>& cuts) {
  cuts[name] = f.cut();
  f.require_well_conditioned(name);
}
}  // namespace detail

/// All ranks via SVD with the complex's relative tolerance. Throws
/// IllConditioned when a cut falls within a factor 10 of the threshold.
inline Dims h_dims(const ConeComplex& cx) {
  Dims dims;
  const RankRevealing d0(cx.d0, cx.rank_tolerance);
  const RankRevealing d0g(cx.d0_gen, cx.rank_tolerance);
  const RankRevealing d1p(cx.d1_par, cx.rank_tolerance);
  const RankRevealing& d1c = *cx.d1_cone_factor;
  detail::require(d0, "d0", dims.cuts);
  detail::require(d0g, "d0_gen", dims.cuts);
  detail::require(d1p, "d1_par", dims.cuts);
  detail::require(d1c, "d1_cone", dims.cuts);
  for (std::size_t s = 0; s < cx.joint_maps.size(); ++s)
    detail::require(cx.joint_maps[s], "joint_" + std::to_string(s), dims.cuts);
  dims.h0 = d0.nullity();
  dims.c0 = d0g.nullity();
  dims.z1_par = d1p.nullity();
  dims.b1 = d0g.rank();
  dims.h1_par = dims.z1_par - dims.b1;
  dims.h1_cone = d1c.nullity() - d0.rank();
  dims.o2 = cx.parabolic_dim() - d1p.rank();
  return dims;
}

struct CohomologyBasis {
  /// Columns: B-orthonormal generator-part coordinates of parabolic cocycles,
  /// orthogonal to the coboundaries.
  MatrixXd vectors;
  Dims dims;

  int size() const { return static_cast<int>(vectors.cols()); }
  VectorXd operator[](int i) const { return vectors.col(i); }
};

inline CohomologyBasis h1_basis(const ConeComplex& cx) {
  CohomologyBasis out;
  out.dims = h_dims(cx);
  const RankRevealing d1p(cx.d1_par, cx.rank_tolerance);
  const MatrixXd z = d1p.kernel();
  const MatrixXd b = orthonormal_span(cx.d0_gen, cx.rank_tolerance);
  const MatrixXd w = z - b * (b.transpose() * z);
  if (w.cols() == 0) {
    out.vectors = MatrixXd(cx.layout.c1_generators(), 0);
    return out;
  }
  const RankRevealing f(w, cx.rank_tolerance);
  f.require_well_conditioned("h1 complement");
  if (f.rank() != out.dims.h1_par)
    throw IllConditioned("h1 basis", std::min(f.rank(), out.dims.h1_par), std::max(f.rank(), out.dims.h1_par));
  out.vectors = f.image();
  return out;
}

// ---------------------------------------------------------------------------
// Obstruction.

/// Order-1 data and order-2 defect along u, shared by the obstruction and by
/// the order-2 step of lifting.
struct SecondOrderData {
  VectorXd u;                         // generator-part coordinates
  std::vector<VectorXd> conjugators;  // xi(u), per group
  VectorXd defect;                    // C2 coordinates, second-order corrections zero
  MatrixXd shifts;                    // C2 x (sum dim ker J_S): defect change per unit kernel shift of xi
  std::vector<std::pair<int, VectorXd>> shift_directions;  // (group, kappa) per column of shifts
};

inline JetRepresentation first_order_jet(const ConeComplex& cx, const VectorXd& u,
                                         const std::vector<VectorXd>& conjugators, int order) {
  JetRepresentation rj = JetRepresentation::zero(cx.rho, order);
  const int n = cx.layout.n;
  const int d = cx.layout.lie;
  for (int j = 0; j < cx.layout.generators; ++j) rj.generator_jets[j][0] = from_coords(n, u.segment(j * d, d));
  for (int s = 0; s < cx.layout.groups; ++s) rj.conjugator_jets[s][0] = from_coords(n, conjugators[s]);
  return rj;
}

inline double cocycle_defect(const ConeComplex& cx, const VectorXd& u) { return (cx.d1_par * u).norm(); }

inline void require_cocycle(const ConeComplex& cx, const VectorXd& u, double tol = kCocycleTolerance) {
  if (u.size() != cx.layout.c1_generators()) throw InvalidInput("cochain has the wrong number of coordinates");
  const double r = cocycle_defect(cx, u);
  if (!(r <= tol * std::max(1.0, u.norm())))
    throw NotACocycle("d1_par(u) has norm " + std::to_string(r));
}

inline SecondOrderData second_order_data(const ConeComplex& cx, const VectorXd& u) {
  SecondOrderData sd;
  sd.u = u;
  sd.conjugators = cx.conjugators_for(u);
  const ComplexLayout& l = cx.layout;
  auto defect_with = [&](const std::vector<VectorXd>& xi) {
    return to_coords(l, order_defect(first_order_jet(cx, u, xi, 2), 2));
  };
  sd.defect = defect_with(sd.conjugators);
  int cols = 0;
  for (const auto& k : cx.joint_kernel) cols += static_cast<int>(k.cols());
  sd.shifts = MatrixXd::Zero(l.c2(), cols);
  int c = 0;
  for (int s = 0; s < l.groups; ++s)
    for (Eigen::Index q = 0; q < cx.joint_kernel[s].cols(); ++q, ++c) {
      // The defect is affine in a kernel shift, so the central difference is exact.
      auto plus = sd.conjugators, minus = sd.conjugators;
      plus[s] += cx.joint_kernel[s].col(q);
      minus[s] -= cx.joint_kernel[s].col(q);
      sd.shifts.col(c) = 0.5 * (defect_with(plus) - defect_with(minus));
      sd.shift_directions.emplace_back(s, cx.joint_kernel[s].col(q));
    }
  return sd;
}

/// Parabolic-coordinate span of the kernel-shift directions.
inline MatrixXd parabolic_shifts(const ConeComplex& cx, const SecondOrderData& sd) {
  MatrixXd out(cx.parabolic_dim(), sd.shifts.cols());
  for (Eigen::Index c = 0; c < sd.shifts.cols(); ++c) out.col(c) = cx.parabolic_project(sd.shifts.col(c));
  return out;
}

/// Orthonormal basis (parabolic coordinates) of the obstruction space
/// (Im d1_par + shift directions of every argument)^perp.
inline MatrixXd obstruction_space(const ConeComplex& cx, const std::vector<const SecondOrderData*>& args) {
  MatrixXd span = cx.d1_par;
  for (const auto* sd : args) span = hstack(span, parabolic_shifts(cx, *sd));
  return orthogonal_complement(span, cx.parabolic_dim(), cx.rank_tolerance);
}

struct ObstructionClass {
  Cochain2 representative;  // relator parts and projected peripheral parts
  VectorXd parabolic;       // parabolic coordinates of the representative
  MatrixXd basis;           // orthonormal basis of the obstruction space, parabolic coordinates
  VectorXd coordinates;
  double norm = 0.0;
};

inline ObstructionClass make_class(const ConeComplex& cx, const VectorXd& parabolic, const MatrixXd& basis) {
  ObstructionClass q;
  q.parabolic = parabolic;
  q.representative = cochain2_from(cx.layout, cx.parabolic_embed(parabolic));
  q.basis = basis;
  q.coordinates = basis.transpose() * parabolic;
  q.norm = q.coordinates.norm();
  return q;
}

/// Q(u): the order-2 defect along u in the quotient O^2(u). Throws NotACocycle.
inline ObstructionClass obstruction(const ConeComplex& cx, const VectorXd& u) {
  require_cocycle(cx, u);
  const SecondOrderData sd = second_order_data(cx, u);
  return make_class(cx, cx.parabolic_project(sd.defect), obstruction_space(cx, {&sd}));
}

inline ObstructionClass obstruction(const ConeComplex& cx, const GeneratorPart& u) {
  return obstruction(cx, generator_coords(u));
}

/// Classes of several cocycles expressed in one common quotient.
inline std::vector<ObstructionClass> obstructions_in_common_quotient(const ConeComplex& cx,
                                                                     const std::vector<VectorXd>& us) {
  std::vector<SecondOrderData> data;
  for (const auto& u : us) {
    require_cocycle(cx, u);
    data.push_back(second_order_data(cx, u));
  }
  std::vector<const SecondOrderData*> ptrs;
  for (const auto& sd : data) ptrs.push_back(&sd);
  const MatrixXd basis = obstruction_space(cx, ptrs);
  std::vector<ObstructionClass> out;
  for (const auto& sd : data) out.push_back(make_class(cx, cx.parabolic_project(sd.defect), basis));
  return out;
}

// ---------------------------------------------------------------------------
// Pairing.

struct PairingEntry {
  int i = 0;
  int j = 0;
  ObstructionClass value;
};

struct PairingTensor {
  std::vector<PairingEntry> entries;  // i <= j, row-major
  MatrixXd basis;                     // the common obstruction space
  double tolerance = kObstructionTolerance;
  bool smooth = false;                // every entry vanishes: smooth by the cup-product criterion

  double max_norm() const {
    double m = 0.0;
    for (const auto& e : entries) m = std::max(m, e.value.norm);
    return m;
  }
};

/// B(e_i, e_j) = (Q(e_i + e_j) - Q(e_i) - Q(e_j)) / 2 in the common quotient.
inline PairingTensor pairing_tensor(const ConeComplex& cx, const CohomologyBasis& basis,
                                    double tol = kObstructionTolerance) {
  PairingTensor t;
  t.tolerance = tol;
  const int h = basis.size();
  std::vector<SecondOrderData> single, sums;
  for (int i = 0; i < h; ++i) {
    require_cocycle(cx, basis[i]);
    single.push_back(second_order_data(cx, basis[i]));
  }
  std::vector<const SecondOrderData*> ptrs;
  for (const auto& sd : single) ptrs.push_back(&sd);
  std::map<std::pair<int, int>, std::size_t> sum_index;
  sums.reserve(static_cast<std::size_t>(h * (h - 1) / 2));
  for (int i = 0; i < h; ++i)
    for (int j = i + 1; j < h; ++j) {
      sum_index[{i, j}] = sums.size();
      sums.push_back(second_order_data(cx, basis[i] + basis[j]));
    }
  for (const auto& sd : sums) ptrs.push_back(&sd);
  t.basis = obstruction_space(cx, ptrs);
  for (int i = 0; i < h; ++i)
    for (int j = i; j < h; ++j) {
      VectorXd par;
      if (i == j) {
        par = cx.parabolic_project(single[i].defect);
      } else {
        const auto& s = sums[sum_index[{i, j}]];
        par = 0.5 * cx.parabolic_project(s.defect - single[i].defect - single[j].defect);
      }
      t.entries.push_back({i, j, make_class(cx, par, t.basis)});
    }
  t.smooth = t.max_norm() <= tol;
  return t;
}

}  // namespace pardef
