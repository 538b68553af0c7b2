#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pardef/json_io.hpp"

#ifndef PARDEF_CORPUS_DIR
#error "PARDEF_CORPUS_DIR must be defined"
#endif

namespace pardef::test {

inline std::string corpus_path(const std::string& rel) { return std::string(PARDEF_CORPUS_DIR) + "/" + rel; }

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::shared_ptr<const Presentation> load_group(const std::string& name) {
  return std::make_shared<const Presentation>(parse_presentation(slurp(corpus_path(name + ".grp"))));
}

inline Representation load_rep(const std::shared_ptr<const Presentation>& p, const std::string& name) {
  return representation_from_json(json::parse(slurp(corpus_path("reps/" + name + ".json"))), p);
}

inline std::vector<std::string> corpus_groups() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(PARDEF_CORPUS_DIR))
    if (e.path().extension() == ".grp") out.push_back(e.path().stem().string());
  std::sort(out.begin(), out.end());
  return out;
}

struct CorpusPoint {
  std::string group;
  std::string rep;
  bool irreducible;
};

/// Every shipped representation together with its presentation.
inline std::vector<CorpusPoint> corpus_points() {
  return {{"torus_puncture", "torus_puncture", true},  {"genus2", "genus2_irred", true},
          {"genus2", "genus2_reducible", false},       {"sphere3", "sphere3", true},
          {"sphere4", "sphere4", true},                {"sphere4_together", "sphere4_together", true}};
}

inline Word random_word(Rng& rng, int gens, int max_len) {
  std::uniform_int_distribution<int> len(0, max_len), g(0, gens - 1), s(0, 1);
  Word w;
  const int n = len(rng);
  for (int k = 0; k < n; ++k) w.letters.push_back({static_cast<std::size_t>(g(rng)), s(rng) ? 1 : -1});
  return w;
}

inline GeneratorPart random_generator_part(int n, std::size_t gens, Rng& rng) {
  GeneratorPart u;
  for (std::size_t j = 0; j < gens; ++j) u.push_back(random_skew(n, rng));
  return u;
}

/// A random element of the span of the H^1 basis, plus an optional coboundary.
inline VectorXd random_cocycle(const CohomologyBasis& b, Rng& rng) {
  std::normal_distribution<double> nd;
  VectorXd c(b.size());
  for (int i = 0; i < b.size(); ++i) c[i] = nd(rng);
  return b.vectors * c;
}

}  // namespace pardef::test
