// Command-line front end: solves the full-duplex WPCN MDP and runs the
// throughput-region, max-min and parameter-sweep experiments as CSV.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "wpcn/experiments.hpp"
#include "wpcn/mdp_solver.hpp"
#include "wpcn/params.hpp"
#include "wpcn/policy_eval.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::vector<std::string> modes;
  std::string gamma_db;
  std::string alpha;
  std::uint64_t seed = 1;
  long long slots = 1'000'000;
  std::string out;
  unsigned workers = 0;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--config", o.config, "key = value configuration file")->check(CLI::ExistingFile);
  app->add_option("--mode", o.modes, "fd, fd:<gamma dB>, fd:perfect, hd or myopic (repeatable)");
  app->add_option("--gamma-db", o.gamma_db, "self-interference level in dB, or 'perfect'");
  app->add_option("--alpha", o.alpha, "weight of device 1 in [0, 1]");
  app->add_option("--seed", o.seed, "simulation seed");
  app->add_option("--slots", o.slots, "simulated slots")->check(CLI::PositiveNumber);
  app->add_option("--out", o.out, "output path (default: standard output)");
  app->add_option("--workers", o.workers, "solver threads")->check(CLI::PositiveNumber);
}

wpcn::ExperimentSpec make_spec(const CommonOptions& o, wpcn::ExperimentKind kind) {
  wpcn::ExperimentSpec spec;
  spec.kind = kind;
  if (!o.config.empty()) spec.base = wpcn::load_config(o.config);
  if (!o.gamma_db.empty()) spec.base["gamma_db"] = o.gamma_db;
  if (!o.alpha.empty()) spec.base["alpha"] = o.alpha;
  if (o.workers > 0) spec.base["workers"] = std::to_string(o.workers);
  spec.seed = o.seed;
  spec.slots = o.slots;
  for (const auto& m : o.modes) spec.modes.push_back(wpcn::ModeSpec::parse(m));
  if (spec.modes.empty()) spec.modes = wpcn::default_modes(kind);
  spec.values = wpcn::default_values(kind);
  return spec;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad value '" + item + "'");
    values.push_back(v);
  }
  return values;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal long-term policies for a full-duplex wireless powered network"};
  app.require_subcommand(1);

  CommonOptions solve_opts, eval_opts, region_opts, maxmin_opts, sweep_opts;
  std::string solve_eval_out, fidelity = "discrete", eval_fidelity = "discrete", policy_path;
  std::string region_values, sweep_values, sweep_kind;
  bool timing = false;

  auto* solve = app.add_subcommand("solve", "solve one configuration; writes the policy file and an evaluation row");
  add_common(solve, solve_opts);
  solve->add_option("--eval-out", solve_eval_out, "evaluation CSV path (default: standard output)");
  solve->add_option("--fidelity", fidelity, "discrete or continuous");

  auto* eval = app.add_subcommand("eval", "simulate a policy (solved on the fly or loaded with --policy)");
  add_common(eval, eval_opts);
  eval->add_option("--policy", policy_path, "solve file written by 'solve --out'")->check(CLI::ExistingFile);
  eval->add_option("--fidelity", eval_fidelity, "discrete or continuous");

  auto* region = app.add_subcommand("region", "throughput region over a grid of alpha");
  add_common(region, region_opts);
  region->add_option("--values", region_values, "comma-separated alpha values");

  auto* maxmin = app.add_subcommand("maxmin", "max-min common throughput by bisection on alpha");
  add_common(maxmin, maxmin_opts);

  auto* sweep = app.add_subcommand("sweep", "long-term reward versus one parameter");
  add_common(sweep, sweep_opts);
  sweep->add_option("--kind", sweep_kind, "beta, pmax (dBm), d1 (m) or zeta1 (J)")->required();
  sweep->add_option("--values", sweep_values, "comma-separated sweep values");
  sweep->add_flag("--timing", timing, "add a wall-time column");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      auto spec = make_spec(solve_opts, wpcn::ExperimentKind::single);
      const auto result = wpcn::run_single(spec, wpcn::parse_fidelity(fidelity));
      std::cerr << "gain " << wpcn::csv_number(result.solve.gain) << " bits/slot after " << result.solve.iterations
                << " iterations (" << wpcn::csv_number(result.solve.wall_seconds) << " s)\n";
      if (!solve_opts.out.empty()) {
        std::ofstream out(solve_opts.out);
        if (!out) throw std::runtime_error("cannot write '" + solve_opts.out + "'");
        wpcn::write_solve_result(out, result.solve, result.params);
      }
      emit(solve_eval_out, wpcn::eval_csv_header() +
                               wpcn::eval_csv_row(spec.modes.front().label(), result.params, result.eval));
      return 0;
    }
    if (*eval) {
      auto spec = make_spec(eval_opts, wpcn::ExperimentKind::single);
      const auto fid = wpcn::parse_fidelity(eval_fidelity);
      if (policy_path.empty()) {
        const auto result = wpcn::run_single(spec, fid);
        emit(eval_opts.out, wpcn::eval_csv_header() +
                                wpcn::eval_csv_row(spec.modes.front().label(), result.params, result.eval));
        return 0;
      }
      const auto params = wpcn::params_for(spec.base, spec.modes.front());
      std::ifstream in(policy_path);
      const auto file = wpcn::read_solve_result(in);
      if (file.params_hash != wpcn::hash_hex(wpcn::params_hash(params))) {
        std::cerr << "warning: policy file was solved with different parameters (hash " << file.params_hash << ")\n";
      }
      const auto report = wpcn::simulate(file.policy, params, spec.slots, spec.seed, fid);
      emit(eval_opts.out,
           wpcn::eval_csv_header() + wpcn::eval_csv_row(std::string(wpcn::to_string(file.mode)), params, report));
      return 0;
    }
    if (*region) {
      auto spec = make_spec(region_opts, wpcn::ExperimentKind::region);
      if (!region_values.empty()) spec.values = parse_values(region_values);
      const auto out = wpcn::run_region(spec);
      emit(region_opts.out, out.csv);
      return out.ok ? 0 : 1;
    }
    if (*maxmin) {
      auto spec = make_spec(maxmin_opts, wpcn::ExperimentKind::maxmin);
      const auto out = wpcn::run_maxmin_csv(spec);
      emit(maxmin_opts.out, out.csv);
      return out.ok ? 0 : 1;
    }
    if (*sweep) {
      auto spec = make_spec(sweep_opts, wpcn::parse_sweep_kind(sweep_kind));
      if (!sweep_values.empty()) spec.values = parse_values(sweep_values);
      spec.timing = timing;
      const auto out = wpcn::run_sweep(spec);
      emit(sweep_opts.out, out.csv);
      return out.ok ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
