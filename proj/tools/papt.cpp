// Copyright (c) 2026 the papt authors. Apache-2.0 license; see LICENSE.
//
// Command line driver. Every emitted file embeds the run parameters, the
// RNG algorithm identifier, and the artifact version, so any output can be
// reproduced bit-exactly from its own metadata.

#include <fstream>
#include <iostream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "papt/expander.hpp"
#include "papt/io.hpp"
#include "papt/pa_model.hpp"
#include "papt/percolation.hpp"
#include "papt/ppt.hpp"
#include "papt/rng.hpp"
#include "papt/spectral.hpp"
#include "papt/spine.hpp"
#include "papt/version.hpp"

namespace {

using nlohmann::json;

struct Output {
  std::unique_ptr<std::ofstream> file;
  std::ostream* os = &std::cout;

  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file) throw std::runtime_error("cannot open for write: " + path);
      os = file.get();
    }
  }
  std::ostream& stream() { return *os; }
};

json meta_block(json spec) {
  return json{{"artifact", std::string(papt::kArtifactVersion)},
              {"rng", std::string(papt::kRngAlgorithm)},
              {"spec", std::move(spec)}};
}

void emit_json(Output& out, json doc) {
  out.stream() << doc.dump(2) << '\n';
}

void csv_meta_line(Output& out, const json& spec) {
  out.stream() << "# " << meta_block(spec).dump() << '\n';
}

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> vals;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  return vals;
}

std::vector<std::uint32_t> parse_u32s(const std::string& csv) {
  std::vector<std::uint32_t> vals;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(static_cast<std::uint32_t>(std::stoul(tok)));
  return vals;
}

struct CommonModel {
  std::string variant = "b";
  std::uint32_t m = 2;
  double delta = 0.0;

  papt::Variant variant_enum() const { return papt::variant_from_letter(variant.at(0)); }
};

void add_model_flags(CLI::App* cmd, CommonModel& mdl, bool with_variant = true) {
  if (with_variant)
    cmd->add_option("--variant", mdl.variant, "attachment variant: a, b or d")
        ->check(CLI::IsMember({"a", "b", "d"}));
  cmd->add_option("--m", mdl.m, "edges per new vertex")->check(CLI::PositiveNumber);
  cmd->add_option("--delta", mdl.delta, "attachment affinity shift (> -m)");
}

json model_spec(const CommonModel& mdl, bool with_variant = true) {
  json j{{"m", mdl.m}, {"delta", mdl.delta}};
  if (with_variant) j["variant"] = mdl.variant;
  return j;
}

int run_generate(const CommonModel& mdl, std::uint32_t n, std::uint64_t seed,
                 const std::string& out_path) {
  papt::PAConfig cfg;
  cfg.variant = mdl.variant_enum();
  cfg.m = mdl.m;
  cfg.delta = mdl.delta;
  cfg.n = n;
  cfg.seed = seed;
  papt::MultiGraph g = papt::generate(cfg);
  Output out(out_path);
  papt::write_graph(out.stream(), g, cfg);
  return 0;
}

int run_sweep(const CommonModel& mdl, std::uint32_t n, const std::string& pis,
              std::uint64_t replicas, std::uint64_t seed, unsigned threads,
              const std::string& out_path) {
  papt::PAConfig cfg;
  cfg.variant = mdl.variant_enum();
  cfg.m = mdl.m;
  cfg.delta = mdl.delta;
  cfg.n = n;
  auto grid = parse_doubles(pis);
  auto table = papt::sweep(cfg, grid, replicas, seed, threads);

  Output out(out_path);
  json spec = model_spec(mdl);
  spec["n"] = n;
  spec["pis"] = grid;
  spec["replicas"] = replicas;
  spec["seed"] = seed;
  csv_meta_line(out, spec);
  out.stream() << "# monotonicity_violations=" << table.monotonicity_violations << '\n';
  papt::CsvWriter csv(out.stream());
  csv.header({"pi", "replicas", "c1_mean", "c1_sd", "c2_mean", "c2_sd", "n", "m", "delta",
              "variant", "seed"});
  for (const auto& row : table.rows) {
    csv.field(row.pi);
    csv.field(replicas);
    csv.field(row.c1_mean);
    csv.field(row.c1_sd);
    csv.field(row.c2_mean);
    csv.field(row.c2_sd);
    csv.field(static_cast<std::uint64_t>(n));
    csv.field(static_cast<std::uint64_t>(mdl.m));
    csv.field(mdl.delta);
    csv.field(mdl.variant);
    csv.field(seed);
    csv.end_row();
  }
  return 0;
}

int run_ppt_survival(const CommonModel& mdl, double pi, double b, std::uint32_t gens,
                     std::uint64_t cap, std::uint64_t replicas, std::uint64_t seed,
                     unsigned threads, const std::string& out_path) {
  papt::PptParams p;
  p.m = mdl.m;
  p.delta = mdl.delta;
  p.pi = pi;
  p.b = b;
  auto est = papt::estimate_survival(p, gens, cap, replicas, seed, threads);
  json spec = model_spec(mdl, false);
  spec["pi"] = pi;
  spec["b"] = b;
  spec["generations"] = gens;
  spec["population_cap"] = cap;
  spec["replicas"] = replicas;
  spec["seed"] = seed;
  json doc{{"meta", meta_block(spec)},
           {"survivals", est.survivals},
           {"survival_frac", est.survival_frac},
           {"ci_half_width", est.ci_half_width}};
  Output out(out_path);
  emit_json(out, doc);
  return 0;
}

int run_elbow(const CommonModel& mdl, double pi, double h_cut, std::uint32_t gens,
              std::uint64_t cap, std::uint64_t replicas, std::uint64_t seed, unsigned threads,
              const std::string& out_path) {
  json doc;
  double h = h_cut;
  if (h <= 0.0) {
    auto thr = papt::choose_elbow_threshold(pi, mdl.m, mdl.delta);
    h = thr.h_chosen;
    doc["h_unit"] = thr.h_unit;
  }
  doc["h_cut"] = h;
  doc["closed_form_mean"] = papt::elbow_bp_mean(pi, h, mdl.m, mdl.delta);
  auto mom = papt::elbow_offspring_moments(pi, h, mdl.m, mdl.delta, replicas, seed, threads);
  doc["empirical_mean"] = mom.mean;
  doc["empirical_se"] = mom.se;
  auto est = papt::simulate_elbow_bp(pi, h, mdl.m, mdl.delta, gens, cap, replicas,
                                     papt::seed_stream(seed, 1), threads);
  doc["survival_frac"] = est.survival_frac;
  doc["ci_half_width"] = est.ci_half_width;
  json spec = model_spec(mdl, false);
  spec["pi"] = pi;
  spec["h_cut"] = h_cut;
  spec["generations"] = gens;
  spec["population_cap"] = cap;
  spec["replicas"] = replicas;
  spec["seed"] = seed;
  doc["meta"] = meta_block(spec);
  Output out(out_path);
  emit_json(out, doc);
  return 0;
}

int run_threshold(const CommonModel& mdl, double b, const std::string& out_path) {
  auto rep = papt::spectral_norm(mdl.m, mdl.delta);
  json doc{{"chi", rep.constants.chi},
           {"c_oo", rep.constants.c_oo},
           {"c_oy", rep.constants.c_oy},
           {"c_yo", rep.constants.c_yo},
           {"c_yy", rep.constants.c_yy},
           {"lambda_m", rep.lambda_m},
           {"r", rep.r},
           {"pi_c", rep.pi_c},
           {"p", {rep.p[0], rep.p[1]}}};
  if (b > 1.0) {
    auto t = papt::truncated_spectral(mdl.m, mdl.delta, b);
    doc["truncated"] = json{{"b", t.b},
                            {"q", t.q},
                            {"lambda_m_b", t.lambda_m_b},
                            {"r_b", t.r_b},
                            {"u", {t.u[0], t.u[1]}}};
  }
  json spec = model_spec(mdl, false);
  spec["b"] = b;
  doc["meta"] = meta_block(spec);
  Output out(out_path);
  emit_json(out, doc);
  return 0;
}

int run_spectral(const CommonModel& mdl, double b, double x_min, double x_max, std::uint32_t n0,
                 std::uint32_t levels, bool grid_study, const std::string& out_path) {
  auto t = papt::truncated_spectral(mdl.m, mdl.delta, b);
  json spec = model_spec(mdl, false);
  spec["b"] = b;
  spec["x_min"] = x_min;
  spec["x_max"] = x_max;
  spec["n_points"] = n0;
  Output out(out_path);
  if (grid_study) {
    spec["levels"] = levels;
    csv_meta_line(out, spec);
    papt::CsvWriter csv(out.stream());
    csv.header({"n_points", "estimate", "converged", "iterations", "r_b", "rel_error"});
    std::uint32_t n = n0;
    for (std::uint32_t lvl = 0; lvl < levels; ++lvl, n *= 2) {
      auto res = papt::power_iteration_norm(mdl.m, mdl.delta, b, {x_min, x_max, n});
      csv.field(static_cast<std::uint64_t>(n));
      csv.field(res.estimate);
      csv.field(std::string(res.converged ? "1" : "0"));
      csv.field(static_cast<std::uint64_t>(res.iterations));
      csv.field(t.r_b);
      csv.field((res.estimate - t.r_b) / t.r_b);
      csv.end_row();
    }
    return 0;
  }
  auto res = papt::power_iteration_norm(mdl.m, mdl.delta, b, {x_min, x_max, n0});
  json doc{{"estimate", res.estimate},
           {"converged", res.converged},
           {"iterations", res.iterations},
           {"r_b", t.r_b},
           {"rel_error", (res.estimate - t.r_b) / t.r_b},
           {"meta", meta_block(spec)}};
  if (!res.converged) {
    doc["last_iterates"] = {res.prev, res.last};
    emit_json(out, doc);
    std::cerr << "power iteration did not converge\n";
    return 1;
  }
  emit_json(out, doc);
  return 0;
}

int run_spine(const CommonModel& mdl, double b, std::uint64_t steps, std::uint64_t draws,
              std::uint64_t seed, const std::string& out_path, const std::string& traj_path) {
  json spec = model_spec(mdl, false);
  spec["b"] = b;
  spec["steps"] = steps;
  spec["ratio_draws"] = draws;
  spec["seed"] = seed;
  auto rep = papt::empirical_vs_analytic_report(mdl.m, mdl.delta, b, steps, draws, seed);
  json doc{{"applicable", rep.applicable}, {"all_pass", rep.all_pass}, {"meta", meta_block(spec)}};
  json checks = json::array();
  for (const auto& ch : rep.checks)
    checks.push_back(json{{"name", ch.name},
                          {"empirical", ch.empirical},
                          {"analytic", ch.analytic},
                          {"tolerance", ch.tolerance},
                          {"pass", ch.pass}});
  doc["checks"] = checks;
  if (rep.applicable) {
    auto chain = papt::transition_matrix(mdl.m, mdl.delta, b);
    doc["transition"] = json{{"p_oo", chain.p[0][0]},
                             {"p_oy", chain.p[0][1]},
                             {"p_yo", chain.p[1][0]},
                             {"p_yy", chain.p[1][1]},
                             {"stationary", {chain.stationary[0], chain.stationary[1]}}};
    doc["lyapunov_drift"] = papt::lyapunov_drift(mdl.m, mdl.delta, b);
  }
  Output out(out_path);
  emit_json(out, doc);
  if (!traj_path.empty() && rep.applicable) {
    auto tr = papt::simulate_spine(mdl.m, mdl.delta, b, steps, papt::seed_stream(seed, 0));
    Output tout(traj_path);
    csv_meta_line(tout, spec);
    papt::CsvWriter csv(tout.stream());
    csv.header({"step", "label", "log_age"});
    for (std::size_t i = 0; i < tr.labels.size(); ++i) {
      csv.field(static_cast<std::uint64_t>(i));
      csv.field(std::string(tr.labels[i] == papt::Label::O ? "O" : "Y"));
      csv.field(tr.log_age[i]);
      csv.end_row();
    }
  }
  return rep.applicable ? 0 : 0;
}

int run_expander(const CommonModel& mdl, double epsilon, double alpha_probe,
                 const std::string& ns, std::uint64_t replicas, std::uint64_t seed,
                 unsigned threads, const std::string& out_path) {
  papt::PAConfig base;
  base.variant = mdl.variant_enum();
  base.m = mdl.m;
  base.delta = mdl.delta;
  auto n_grid = parse_u32s(ns);
  auto rows =
      papt::expansion_experiment(base, epsilon, alpha_probe, n_grid, replicas, seed, threads);
  Output out(out_path);
  json spec = model_spec(mdl);
  spec["epsilon"] = epsilon;
  spec["alpha_probe"] = alpha_probe;
  spec["ns"] = n_grid;
  spec["replicas"] = replicas;
  spec["seed"] = seed;
  csv_meta_line(out, spec);
  papt::CsvWriter csv(out.stream());
  csv.header({"n", "replicas", "method", "epsilon", "alpha_probe", "fail_frac", "min_observed"});
  for (const auto& row : rows) {
    csv.field(static_cast<std::uint64_t>(row.n));
    csv.field(row.replicas);
    csv.field(std::string(row.method == papt::CutMethod::Exact ? "exact" : "spectral_bound"));
    csv.field(row.epsilon);
    csv.field(row.alpha_probe);
    csv.field(row.fail_frac);
    csv.field(row.min_observed);
    csv.end_row();
  }
  return 0;
}

int run_scores(const CommonModel& mdl, double pi, double b, std::uint32_t gens,
               std::uint64_t replicas, std::uint64_t seed, unsigned threads,
               const std::string& out_path) {
  papt::PptParams p;
  p.m = mdl.m;
  p.delta = mdl.delta;
  p.pi = pi;
  p.b = b;
  const bool martingale = b > 1.0;
  auto rows = martingale ? papt::martingale_trajectory(p, gens, replicas, seed, threads)
                         : papt::score_trajectory(p, gens, replicas, seed, threads);
  Output out(out_path);
  json spec = model_spec(mdl, false);
  spec["pi"] = pi;
  spec["b"] = b;
  spec["generations"] = gens;
  spec["replicas"] = replicas;
  spec["seed"] = seed;
  csv_meta_line(out, spec);
  papt::CsvWriter csv(out.stream());
  csv.header({"generation", "particles_mean", "score_mean", "score_se", "martingale_mean",
              "martingale_se"});
  const std::string na = "nan";
  for (const auto& row : rows) {
    csv.field(static_cast<std::uint64_t>(row.generation));
    csv.field(row.particles_mean);
    if (martingale) {
      csv.field(na);
      csv.field(na);
      csv.field(row.mean);
      csv.field(row.se);
    } else {
      csv.field(row.mean);
      csv.field(row.se);
      csv.field(na);
      csv.field(na);
    }
    csv.end_row();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"percolation on preferential attachment models: simulation toolkit"};
  app.require_subcommand(1);

  std::string out_path;
  unsigned threads = papt::default_threads();
  app.add_option("--out", out_path, "output path ('-' or empty for stdout)");
  app.add_option("--threads", threads, "worker pool size (default: PAPT_THREADS or hardware)");

  CommonModel mdl;
  std::uint32_t n = 1000;
  std::uint64_t seed = 1;
  double pi = 1.0, b = 0.0, h_cut = 0.0;
  std::uint32_t gens = 30;
  std::uint64_t cap = 10000, replicas = 10000;
  std::string pis, ns = "10,12,14,16,18,20";
  double epsilon = 0.25, alpha_probe = 0.05;
  double x_min = 1e-6, x_max = 1.0;
  std::uint32_t n_points = 2000, levels = 3;
  bool grid_study = false;
  std::uint64_t steps = 100000, draws = 1000000;
  std::string traj_path;

  auto* c_gen = app.add_subcommand("generate", "grow one graph and write it as text");
  add_model_flags(c_gen, mdl);
  c_gen->add_option("--n", n, "number of vertices");
  c_gen->add_option("--seed", seed, "rng seed");

  auto* c_sweep = app.add_subcommand("sweep", "percolation sweep over a pi grid");
  add_model_flags(c_sweep, mdl);
  c_sweep->add_option("--n", n, "number of vertices");
  c_sweep->add_option("--pis", pis, "comma-separated ascending pi grid")->required();
  c_sweep->add_option("--replicas", replicas, "independent graphs");
  c_sweep->add_option("--seed", seed, "rng seed");

  auto* c_surv = app.add_subcommand("ppt-survival", "survival probability of the percolated tree");
  add_model_flags(c_surv, mdl, false);
  c_surv->add_option("--pi", pi, "edge retention probability");
  c_surv->add_option("--b", b, "age truncation factor (> 1), 0 for restricted mode");
  c_surv->add_option("--generations", gens, "generation horizon G");
  c_surv->add_option("--cap", cap, "population cap K (reach it = survive)");
  c_surv->add_option("--replicas", replicas, "replica count R");
  c_surv->add_option("--seed", seed, "rng seed");

  auto* c_elbow = app.add_subcommand("elbow", "dominated single-type process for delta <= 0");
  add_model_flags(c_elbow, mdl, false);
  c_elbow->add_option("--pi", pi, "edge retention probability");
  c_elbow->add_option("--h-cut", h_cut, "age threshold, 0 to choose automatically");
  c_elbow->add_option("--generations", gens, "generation horizon G");
  c_elbow->add_option("--cap", cap, "population cap K");
  c_elbow->add_option("--replicas", replicas, "replica count R");
  c_elbow->add_option("--seed", seed, "rng seed");

  auto* c_thr = app.add_subcommand("threshold", "closed-form spectral report and pi_c");
  add_model_flags(c_thr, mdl, false);
  c_thr->add_option("--b", b, "also report the b-truncated quantities");

  auto* c_spec = app.add_subcommand("spectral", "discretized-kernel power iteration");
  add_model_flags(c_spec, mdl, false);
  c_spec->add_option("--b", b, "age truncation factor")->required();
  c_spec->add_option("--xmin", x_min, "grid lower end");
  c_spec->add_option("--xmax", x_max, "grid upper end");
  c_spec->add_option("--points", n_points, "log-spaced grid points");
  c_spec->add_flag("--grid", grid_study, "emit a refinement study CSV");
  c_spec->add_option("--levels", levels, "doublings in the refinement study");

  auto* c_spine = app.add_subcommand("spine", "tilted-spine empirical vs analytic report");
  add_model_flags(c_spine, mdl, false);
  c_spine->add_option("--b", b, "age truncation factor")->required();
  c_spine->add_option("--steps", steps, "chain steps");
  c_spine->add_option("--draws", draws, "ratio draws per label");
  c_spine->add_option("--seed", seed, "rng seed");
  c_spine->add_option("--traj-out", traj_path, "also dump the trajectory CSV here");

  auto* c_exp = app.add_subcommand("expander", "edge-expansion experiment over an n grid");
  add_model_flags(c_exp, mdl);
  c_exp->add_option("--epsilon", epsilon, "minimum subset fraction");
  c_exp->add_option("--alpha-probe", alpha_probe, "failure threshold");
  c_exp->add_option("--ns", ns, "comma-separated vertex counts");
  c_exp->add_option("--replicas", replicas, "graphs per n");
  c_exp->add_option("--seed", seed, "rng seed");

  auto* c_scores = app.add_subcommand("scores", "score / martingale trajectories");
  add_model_flags(c_scores, mdl, false);
  c_scores->add_option("--pi", pi, "edge retention probability");
  c_scores->add_option("--b", b, "b > 1 runs the martingale, 0 the restricted score");
  c_scores->add_option("--generations", gens, "generation horizon");
  c_scores->add_option("--replicas", replicas, "replica count");
  c_scores->add_option("--seed", seed, "rng seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_gen->parsed()) return run_generate(mdl, n, seed, out_path);
    if (c_sweep->parsed()) return run_sweep(mdl, n, pis, replicas, seed, threads, out_path);
    if (c_surv->parsed())
      return run_ppt_survival(mdl, pi, b, gens, cap, replicas, seed, threads, out_path);
    if (c_elbow->parsed())
      return run_elbow(mdl, pi, h_cut, gens, cap, replicas, seed, threads, out_path);
    if (c_thr->parsed()) return run_threshold(mdl, b, out_path);
    if (c_spec->parsed())
      return run_spectral(mdl, b, x_min, x_max, n_points, levels, grid_study, out_path);
    if (c_spine->parsed()) return run_spine(mdl, b, steps, draws, seed, out_path, traj_path);
    if (c_exp->parsed())
      return run_expander(mdl, epsilon, alpha_probe, ns, replicas, seed, threads, out_path);
    if (c_scores->parsed())
      return run_scores(mdl, pi, b, gens, replicas, seed, threads, out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
