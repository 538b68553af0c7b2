#pragma once

// JSON encodings of matrices, representations, cochains and reports.

#include <json.hpp>
#include <string>

#include "pardef/jets.hpp"

namespace pardef {

using nlohmann::json;

inline json matrix_to_json(const CMat& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({{"re", m(i, j).real()}, {"im", m(i, j).imag()}});
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMat matrix_from_json(const json& j, int n) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) throw InvalidInput("matrix must have " + std::to_string(n) + " rows");
  CMat m(n, n);
  for (int r = 0; r < n; ++r) {
    const json& row = j[r];
    if (!row.is_array() || static_cast<int>(row.size()) != n)
      throw InvalidInput("matrix row must have " + std::to_string(n) + " entries");
    for (int c = 0; c < n; ++c) {
      const json& e = row[c];
      if (!e.is_object() || !e.contains("re") || !e.contains("im") || !e["re"].is_number() || !e["im"].is_number())
        throw InvalidInput("matrix entry must be {\"re\": float, \"im\": float}");
      m(r, c) = cplx(e["re"].get<double>(), e["im"].get<double>());
    }
  }
  return m;
}

inline json representation_to_json(const Representation& rho) {
  json gens = json::object();
  const auto& p = *rho.presentation;
  for (std::size_t j = 0; j < p.generator_count(); ++j) gens[p.generators[j]] = matrix_to_json(rho.matrices[j].matrix());
  return {{"presentation", p.name}, {"N", p.rank}, {"tolerance", rho.tolerance}, {"generators", gens}};
}

inline Representation representation_from_json(const json& j, std::shared_ptr<const Presentation> p) {
  if (!j.is_object()) throw InvalidInput("representation JSON must be an object");
  if (!j.contains("N") || !j["N"].is_number_integer() || j["N"].get<int>() != p->rank)
    throw InvalidInput("representation rank does not match presentation rank " + std::to_string(p->rank));
  if (j.contains("presentation") && j["presentation"] != p->name)
    throw InvalidInput("representation is for presentation '" + j["presentation"].get<std::string>() + "', not '" +
                       p->name + "'");
  if (!j.contains("generators") || !j["generators"].is_object()) throw InvalidInput("missing 'generators' object");
  Representation rho;
  rho.presentation = p;
  if (j.contains("tolerance")) rho.tolerance = j["tolerance"].get<double>();
  const json& g = j["generators"];
  if (g.size() != p->generator_count()) throw InvalidInput("generator count mismatch");
  for (const auto& name : p->generators) {
    if (!g.contains(name)) throw InvalidInput("missing matrix for generator '" + name + "'");
    UnitaryMatrix m(matrix_from_json(g[name], p->rank));
    if (!m.is_unitary()) throw InvalidInput("matrix for generator '" + name + "' is not unitary");
    rho.matrices.push_back(std::move(m));
  }
  return rho;
}

inline json cochain_to_json(const Presentation& p, const Cochain1& c) {
  json gp = json::object(), cp = json::object();
  for (std::size_t j = 0; j < c.generator_part.size(); ++j) gp[p.generators[j]] = matrix_to_json(c.generator_part[j].matrix());
  for (std::size_t s = 0; s < c.conjugator_part.size(); ++s) cp[std::to_string(s)] = matrix_to_json(c.conjugator_part[s].matrix());
  return {{"generator_part", gp}, {"conjugator_part", cp}};
}

inline Cochain1 cochain_from_json(const json& j, const Presentation& p) {
  if (!j.is_object() || !j.contains("generator_part")) throw InvalidInput("cochain JSON needs 'generator_part'");
  Cochain1 c;
  const json& gp = j["generator_part"];
  for (const auto& name : p.generators) {
    if (!gp.contains(name)) throw InvalidInput("cochain missing generator '" + name + "'");
    const CMat m = matrix_from_json(gp[name], p.rank);
    if ((m + m.adjoint()).norm() > 1e-9) throw InvalidInput("cochain value for '" + name + "' is not skew-Hermitian");
    c.generator_part.push_back(SkewHermitian::project(m));
  }
  if (j.contains("conjugator_part"))
    for (std::size_t s = 0; s < p.groups.size(); ++s) {
      const auto key = std::to_string(s);
      c.conjugator_part.push_back(j["conjugator_part"].contains(key)
                                      ? SkewHermitian::project(matrix_from_json(j["conjugator_part"][key], p.rank))
                                      : SkewHermitian::zero(p.rank));
    }
  return c;
}

inline json cut_to_json(const RankCut& c) {
  return {{"rank", c.rank},
          {"threshold", c.threshold},
          {"smallest_kept", c.smallest_kept},
          {"largest_dropped", c.largest_dropped},
          {"gap", std::isfinite(c.gap()) ? json(c.gap()) : json(nullptr)}};
}

inline json dims_to_json(const Dims& d) {
  json cuts = json::object();
  for (const auto& [k, v] : d.cuts) cuts[k] = cut_to_json(v);
  return {{"h0", d.h0},         {"c0", d.c0}, {"z1_par", d.z1_par}, {"b1", d.b1},
          {"h1_par", d.h1_par}, {"h1_cone", d.h1_cone}, {"o2", d.o2}, {"rank_cuts", cuts}};
}

inline json residuals_to_json(const Residuals& r) {
  return {{"relators", r.relators}, {"peripherals", r.peripherals}, {"max", r.max}};
}

inline json vector_to_json(const VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json obstruction_to_json(const Presentation& p, const ObstructionClass& q) {
  json rel = json::array(), per = json::object();
  for (const auto& x : q.representative.relator_part) rel.push_back(matrix_to_json(x.matrix()));
  for (std::size_t i = 0; i < q.representative.peripheral_part.size(); ++i)
    per[p.peripherals[i].name] = matrix_to_json(q.representative.peripheral_part[i].matrix());
  return {{"coordinates", vector_to_json(q.coordinates)},
          {"norm", q.norm},
          {"dimension", q.basis.cols()},
          {"representative", {{"relator_part", rel}, {"peripheral_part", per}}}};
}

inline json lift_report_to_json(const LiftReport& r) {
  return {{"achieved_order", r.achieved_order},
          {"requested_order", r.requested_order},
          {"residuals", r.residuals},
          {"obstruction", r.obstruction ? vector_to_json(r.obstruction->coordinates) : json(nullptr)},
          {"failed_order", r.failed_order},
          {"budget_exceeded", r.budget_exceeded},
          {"fallback_attempts", r.fallback_attempts}};
}

inline json pairing_to_json(const PairingTensor& t) {
  json entries = json::array();
  for (const auto& e : t.entries)
    entries.push_back({{"i", e.i}, {"j", e.j}, {"coordinates", vector_to_json(e.value.coordinates)}, {"norm", e.value.norm}});
  return {{"entries", entries},
          {"quotient_dimension", t.basis.cols()},
          {"max_norm", t.max_norm()},
          {"tolerance", t.tolerance},
          {"smooth", t.smooth},
          {"verdict", t.smooth ? "smooth by cup-product criterion" : "pairing does not vanish"}};
}

inline json probe_to_json(const ConeProbeReport& r) {
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"q_norm", s.q_norm},
                       {"in_cone", s.in_cone},
                       {"achieved_order", s.achieved_order},
                       {"failed_order", s.failed_order},
                       {"budget_exceeded", s.budget_exceeded}});
  return {{"rigid", r.rigid},
          {"order", r.order},
          {"samples", samples},
          {"contingency",
           {{"cone_lifted", r.cone_lifted},
            {"cone_failed", r.cone_failed},
            {"noncone_lifted", r.noncone_lifted},
            {"noncone_failed", r.noncone_failed}}},
          {"cone_failed_at_order_2", r.cone_failed_at_order_2},
          {"noncone_past_order_2", r.noncone_past_order_2},
          {"budget_exceeded", r.budget_exceeded},
          {"prediction_holds", r.prediction_holds()}};
}

inline json presentation_to_json(const Presentation& p) {
  json rel = json::array(), per = json::array(), groups = json::array();
  for (const auto& r : p.relators) rel.push_back(word_to_string(p, r));
  for (const auto& q : p.peripherals) {
    json angles = json::array();
    for (const auto& a : q.cls.angles()) angles.push_back(a.to_string());
    per.push_back({{"name", q.name}, {"word", word_to_string(p, q.word)}, {"angles", angles}});
  }
  for (const auto& g : p.groups) {
    json names = json::array();
    for (std::size_t i : g) names.push_back(p.peripherals[i].name);
    groups.push_back(names);
  }
  return {{"name", p.name},         {"rank", p.rank},     {"generators", p.generators}, {"relators", rel},
          {"peripherals", per},     {"groups", groups},   {"warnings", p.warnings}};
}

}  // namespace pardef
