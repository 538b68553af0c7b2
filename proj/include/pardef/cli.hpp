#pragma once

// Batch front end. run() parses argv, executes one verb and writes a
// deterministic report; tools/pardef.cpp is a thin main() around it.
//
// Exit codes: 0 success, 1 input or usage error, 2 constraint or verdict failure.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "pardef/json_io.hpp"

namespace pardef::cli {

struct Config {
  std::string verb;
  std::string presentation_file;
  std::string representation_file;
  std::string cochain_file;
  std::optional<double> tol;
  std::uint64_t seed = 1;
  int order = 4;
  int attempts = 50;
  int samples = 100;
  int budget = 3;
  std::string format = "json";
};

class Failure : public std::runtime_error {
public:
  Failure(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
  int code() const { return code_; }

private:
  int code_;
};

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure(1, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::shared_ptr<const Presentation> load_presentation(const std::string& path) {
  return std::make_shared<const Presentation>(parse_presentation(read_file(path)));
}

inline json load_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw Failure(1, path + ": " + e.what());
  }
}

/// Flattens a report into "path: value" lines.
inline void to_text(const json& j, const std::string& prefix, std::ostream& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) to_text(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array() && !j.empty() && (j.front().is_object() || j.front().is_array())) {
    for (std::size_t i = 0; i < j.size(); ++i) to_text(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else {
    out << prefix << ": " << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

inline void emit(const Config& cfg, const json& report, std::ostream& out) {
  if (cfg.format == "text") {
    to_text(report, "", out);
  } else {
    out << report.dump(2) << "\n";
  }
}

struct Loaded {
  std::shared_ptr<const Presentation> presentation;
  Representation rho;
};

inline Loaded load_point(const Config& cfg, bool require_valid = true) {
  Loaded l;
  l.presentation = load_presentation(cfg.presentation_file);
  l.rho = representation_from_json(load_json(cfg.representation_file), l.presentation);
  if (require_valid) {
    const double r = constraint_residual(l.rho).max;
    const double tol = std::max(l.rho.tolerance, kRepresentationTolerance);
    if (!(r <= tol))
      throw Failure(2, "representation violates its constraints: residual " + std::to_string(r) + " > " +
                           std::to_string(tol));
  }
  return l;
}

inline json base_config(const Config& cfg) {
  return {{"verb", cfg.verb}, {"format", cfg.format}};
}

inline int run_verb(const Config& cfg, std::ostream& out) {
  json report;
  json conf = base_config(cfg);
  int code = 0;
  const double q_tol = cfg.tol.value_or(kObstructionTolerance);

  if (cfg.verb == "validate") {
    const auto p = load_presentation(cfg.presentation_file);
    if (cfg.format == "text") {
      out << serialize_presentation(*p);
      for (const auto& w : p->warnings) out << "# warning: " << w << "\n";
      return 0;
    }
    report = {{"presentation", presentation_to_json(*p)}, {"normalized", serialize_presentation(*p)}};
  } else if (cfg.verb == "find") {
    const auto p = load_presentation(cfg.presentation_file);
    FindOptions fo;
    fo.seed = cfg.seed;
    fo.attempts = cfg.attempts;
    fo.target_tolerance = cfg.tol.value_or(kRepresentationTolerance);
    conf.update({{"seed", cfg.seed}, {"attempts", cfg.attempts}, {"tol", fo.target_tolerance},
                 {"max_iterations", fo.max_iterations}, {"seed_splitting", "splitmix64(seed, attempt)"}});
    const FindResult fr = find_representation(p, fo);
    if (fr.representation) {
      report = representation_to_json(*fr.representation);
      report["search"] = {{"attempt", fr.attempt},
                          {"residual", constraint_residual(*fr.representation).max},
                          {"commutant_dimension", commutant_dimension(*fr.representation)}};
    } else {
      report = {{"error", "NotFound"}, {"best_residual", fr.best_residual}};
      code = 2;
    }
  } else if (cfg.verb == "check") {
    const Loaded l = load_point(cfg, false);
    const double tol = cfg.tol.value_or(std::max(l.rho.tolerance, kRepresentationTolerance));
    conf["tol"] = tol;
    const Residuals r = constraint_residual(l.rho);
    report = {{"residuals", residuals_to_json(r)},
              {"valid", r.max <= tol},
              {"commutant_dimension", commutant_dimension(l.rho)},
              {"irreducible", commutant_dimension(l.rho) == 1}};
    if (!(r.max <= tol)) code = 2;
  } else if (cfg.verb == "tangent") {
    const Loaded l = load_point(cfg);
    const double rank_tol = cfg.tol.value_or(kRankTolerance);
    conf["rank_tolerance"] = rank_tol;
    const ConeComplex cx = assemble_complex(l.rho, rank_tol);
    const CohomologyBasis b = h1_basis(cx);
    json basis = json::array();
    for (int i = 0; i < b.size(); ++i) {
      Cochain1 c;
      c.generator_part = generator_part_from(cx.layout.n, l.rho.generator_count(), b[i]);
      for (const auto& xi : cx.conjugators_for(b[i])) c.conjugator_part.push_back(from_coords(cx.layout.n, xi));
      basis.push_back(cochain_to_json(*l.presentation, c));
    }
    report = {{"dims", dims_to_json(b.dims)}, {"basis", basis}};
  } else if (cfg.verb == "pairing") {
    const Loaded l = load_point(cfg);
    conf.update({{"obstruction_tolerance", q_tol}, {"rank_tolerance", kRankTolerance}});
    const ConeComplex cx = assemble_complex(l.rho);
    const CohomologyBasis b = h1_basis(cx);
    report = {{"h1_par", b.size()}, {"pairing", pairing_to_json(pairing_tensor(cx, b, q_tol))}};
  } else if (cfg.verb == "obstruct" || cfg.verb == "lift") {
    const Loaded l = load_point(cfg);
    const Cochain1 c = cochain_from_json(load_json(cfg.cochain_file), *l.presentation);
    const ConeComplex cx = assemble_complex(l.rho);
    const VectorXd u = generator_coords(c.generator_part);
    conf.update({{"obstruction_tolerance", q_tol}, {"rank_tolerance", kRankTolerance}});
    if (cfg.verb == "obstruct") {
      const ObstructionClass q = obstruction(cx, u);
      report = {{"obstruction", obstruction_to_json(*l.presentation, q)},
                {"vanishes", q.norm <= q_tol * u.squaredNorm()}};
    } else {
      LiftOptions lo;
      lo.tolerance = q_tol;
      lo.budget = cfg.budget;
      conf.update({{"order", cfg.order}, {"budget", cfg.budget}});
      const LiftReport lr = lift(cx, u, cfg.order, lo);
      report = lift_report_to_json(lr);
      if (!lr.succeeded()) code = 2;
    }
  } else if (cfg.verb == "probe") {
    const Loaded l = load_point(cfg);
    LiftOptions lo;
    lo.tolerance = q_tol;
    lo.budget = cfg.budget;
    conf.update({{"obstruction_tolerance", q_tol}, {"rank_tolerance", kRankTolerance}, {"seed", cfg.seed},
                 {"samples", cfg.samples}, {"order", cfg.order}, {"budget", cfg.budget},
                 {"seed_splitting", "splitmix64(seed, sample)"}});
    const ConeComplex cx = assemble_complex(l.rho);
    const CohomologyBasis b = h1_basis(cx);
    const ConeProbeReport pr = probe_cone(cx, b, cfg.samples, cfg.order, cfg.seed, lo);
    report = probe_to_json(pr);
    if (!pr.prediction_holds()) code = 2;
  } else {
    throw Failure(1, "unknown verb '" + cfg.verb + "'");
  }
  report["config"] = conf;
  emit(cfg, report, out);
  return code;
}

/// Entry point; returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Constrained U(N) representations: tangent spaces, cup-product obstructions, jet lifting"};
  app.require_subcommand(1);
  Config cfg;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--format", cfg.format, "Output format")->check(CLI::IsMember({"json", "text"}));
  };
  auto add_point = [&](CLI::App* sub) {
    sub->add_option("presentation", cfg.presentation_file, "Presentation file")->required();
    sub->add_option("representation", cfg.representation_file, "Representation JSON")->required();
  };
  auto add_tol = [&](CLI::App* sub, const std::string& what) { sub->add_option("--tol", cfg.tol, what); };

  auto* validate = app.add_subcommand("validate", "Parse and normalize a presentation");
  validate->add_option("presentation", cfg.presentation_file, "Presentation file")->required();
  add_common(validate);

  auto* find = app.add_subcommand("find", "Search for a representation");
  find->add_option("presentation", cfg.presentation_file, "Presentation file")->required();
  find->add_option("--seed", cfg.seed, "Master seed");
  find->add_option("--attempts", cfg.attempts, "Random restarts")->check(CLI::PositiveNumber);
  add_tol(find, "Target residual");
  add_common(find);

  auto* check = app.add_subcommand("check", "Constraint residuals and commutant dimension");
  add_point(check);
  add_tol(check, "Validity tolerance");
  add_common(check);

  auto* tangent = app.add_subcommand("tangent", "Cohomology dimensions and an H^1 basis");
  add_point(tangent);
  add_tol(tangent, "Relative rank tolerance");
  add_common(tangent);

  auto* pairing = app.add_subcommand("pairing", "Cup-product pairing tensor and smoothness verdict");
  add_point(pairing);
  add_tol(pairing, "Obstruction tolerance");
  add_common(pairing);

  auto* obstruct = app.add_subcommand("obstruct", "Obstruction class of a cocycle");
  add_point(obstruct);
  obstruct->add_option("cochain", cfg.cochain_file, "Cochain JSON")->required();
  add_tol(obstruct, "Obstruction tolerance");
  add_common(obstruct);

  auto* lift_cmd = app.add_subcommand("lift", "Lift a cocycle order by order");
  add_point(lift_cmd);
  lift_cmd->add_option("cochain", cfg.cochain_file, "Cochain JSON")->required();
  lift_cmd->add_option("--order", cfg.order, "Target order")->check(CLI::PositiveNumber);
  lift_cmd->add_option("--budget", cfg.budget, "Fallback attempts past order 2")->check(CLI::NonNegativeNumber);
  add_tol(lift_cmd, "Obstruction tolerance");
  add_common(lift_cmd);

  auto* probe = app.add_subcommand("probe", "Probe the quadratic cone with random directions");
  add_point(probe);
  probe->add_option("--samples", cfg.samples, "Number of directions")->check(CLI::NonNegativeNumber);
  probe->add_option("--order", cfg.order, "Target order")->check(CLI::PositiveNumber);
  probe->add_option("--seed", cfg.seed, "Master seed");
  probe->add_option("--budget", cfg.budget, "Fallback attempts past order 2")->check(CLI::NonNegativeNumber);
  add_tol(probe, "Obstruction tolerance");
  add_common(probe);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 1;
  }
  cfg.verb = app.get_subcommands().front()->get_name();

  try {
    return run_verb(cfg, out);
  } catch (const Failure& e) {
    err << "error: " << e.what() << "\n";
    return e.code();
  } catch (const IllConditioned& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pardef::cli
