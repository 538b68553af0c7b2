#pragma once

#include <vector>

#include "pardef/repspace.hpp"

namespace pardef {

/// Degree-1 cochain of the cone complex: a tangent per generator and a
/// first-order conjugator per simultaneity group.
struct Cochain1 {
  std::vector<SkewHermitian> generator_part;
  std::vector<SkewHermitian> conjugator_part;
};

/// Degree-2 cochain: one u(N) value per relator and per peripheral.
struct Cochain2 {
  std::vector<SkewHermitian> relator_part;
  std::vector<SkewHermitian> peripheral_part;
};

/// Sizes of the real coordinate vectors of the cone complex.
struct ComplexLayout {
  int n = 1;            // matrix rank N
  int lie = 1;          // N^2
  int generators = 0;
  int groups = 0;
  int relators = 0;
  int peripherals = 0;

  explicit ComplexLayout(const Presentation& p)
      : n(p.rank),
        lie(p.rank * p.rank),
        generators(static_cast<int>(p.generator_count())),
        groups(static_cast<int>(p.groups.size())),
        relators(static_cast<int>(p.relators.size())),
        peripherals(static_cast<int>(p.peripherals.size())) {}

  int c0() const { return lie; }
  int c1_generators() const { return generators * lie; }
  int c1() const { return (generators + groups) * lie; }
  int c2() const { return (relators + peripherals) * lie; }
  int relator_offset(int j) const { return j * lie; }
  int peripheral_offset(int i) const { return (relators + i) * lie; }
};

inline VectorXd to_coords(const Cochain1& c) {
  const int d = c.generator_part.empty() && c.conjugator_part.empty()
                    ? 0
                    : (c.generator_part.empty() ? c.conjugator_part : c.generator_part).front().rank();
  VectorXd v(d * d * static_cast<int>(c.generator_part.size() + c.conjugator_part.size()));
  int at = 0;
  for (const auto& x : c.generator_part) {
    v.segment(at, d * d) = to_coords(x);
    at += d * d;
  }
  for (const auto& x : c.conjugator_part) {
    v.segment(at, d * d) = to_coords(x);
    at += d * d;
  }
  return v;
}

inline Cochain1 cochain1_from(const ComplexLayout& l, const VectorXd& v) {
  Cochain1 c;
  int at = 0;
  for (int j = 0; j < l.generators; ++j, at += l.lie) c.generator_part.push_back(from_coords(l.n, v.segment(at, l.lie)));
  for (int s = 0; s < l.groups; ++s, at += l.lie) c.conjugator_part.push_back(from_coords(l.n, v.segment(at, l.lie)));
  return c;
}

inline VectorXd to_coords(const ComplexLayout& l, const Cochain2& c) {
  VectorXd v(l.c2());
  for (int j = 0; j < l.relators; ++j) v.segment(l.relator_offset(j), l.lie) = to_coords(c.relator_part[j]);
  for (int i = 0; i < l.peripherals; ++i) v.segment(l.peripheral_offset(i), l.lie) = to_coords(c.peripheral_part[i]);
  return v;
}

inline Cochain2 cochain2_from(const ComplexLayout& l, const VectorXd& v) {
  Cochain2 c;
  for (int j = 0; j < l.relators; ++j) c.relator_part.push_back(from_coords(l.n, v.segment(l.relator_offset(j), l.lie)));
  for (int i = 0; i < l.peripherals; ++i)
    c.peripheral_part.push_back(from_coords(l.n, v.segment(l.peripheral_offset(i), l.lie)));
  return c;
}

}  // namespace pardef
