#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wpcn/action_space.hpp"
#include "wpcn/mdp_solver.hpp"
#include "wpcn/params.hpp"
#include "wpcn/policy_eval.hpp"

namespace wpcn {

inline constexpr const char* kToolVersion = "wpcn 0.1.0";

enum class ExperimentKind { region, maxmin, sweep_beta, sweep_pmax, sweep_d1, sweep_zeta1, single };

ExperimentKind parse_sweep_kind(const std::string& text);
std::string to_string(ExperimentKind kind);

/// An operating mode plus an optional override of the self-interference level.
/// Text forms: "fd", "fd:perfect", "fd:-70", "hd", "myopic".
struct ModeSpec {
  Mode mode = Mode::full_duplex;
  std::optional<std::string> gamma_db;

  static ModeSpec parse(const std::string& text);
  std::string label() const;
};

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::single;
  RawConfig base;
  std::vector<double> values;
  std::vector<ModeSpec> modes;
  std::uint64_t seed = 1;
  long long slots = 1'000'000;
  /// Adds a wall-time column to sweep output (breaks byte-identical reruns).
  bool timing = false;
};

/// Throws std::invalid_argument if values are empty or unsorted, or modes are empty.
void check_spec(const ExperimentSpec& spec);

/// Default swept values for each kind (alpha grid for region; Fig.-style ranges otherwise).
std::vector<double> default_values(ExperimentKind kind);
std::vector<ModeSpec> default_modes(ExperimentKind kind);

/// Config for one mode: applies the mode's gamma override.
SystemParams params_for(const RawConfig& base, const ModeSpec& mode);

/// Config for one sweep point, before the mode override.
RawConfig sweep_point(const RawConfig& base, ExperimentKind kind, double value);

struct RegionRow {
  std::string mode;
  double alpha = 0.0;
  ThroughputPair pair;
  std::string error;
};

struct MaxMinResult {
  std::string mode;
  double alpha_star = 0.0;
  std::array<double, kDevices> throughput_bps{};
  double common_bps = 0.0;
  int evaluations = 0;
  std::string error;
};

struct SweepRow {
  std::string mode;
  double value = 0.0;
  double gain_bps = 0.0;
  long iterations = 0;
  double wall_seconds = 0.0;
  std::string error;
};

struct ExperimentOutput {
  std::string csv;
  bool ok = true;
};

std::vector<RegionRow> run_region_rows(const ExperimentSpec& spec);

/// Bisection on alpha for G1 = G2. Stops when |G1 - G2| < rel_tol * max(G1, G2)
/// or the bracket is narrower than alpha_tol; reports the best min(G1, G2) seen.
MaxMinResult run_maxmin(const ExperimentSpec& spec, const ModeSpec& mode, double rel_tol = 0.01,
                        double alpha_tol = 1e-3);

std::vector<SweepRow> run_sweep_rows(const ExperimentSpec& spec);

/// Gain in bits/s of one configuration: solver gain, or exact evaluation of the greedy policy.
SweepRow solve_gain(const SystemParams& params, Mode mode);

ExperimentOutput run_region(const ExperimentSpec& spec);
ExperimentOutput run_maxmin_csv(const ExperimentSpec& spec);
ExperimentOutput run_sweep(const ExperimentSpec& spec);

struct SingleResult {
  SystemParams params;
  SolveResult solve;
  EvalReport eval;
};

/// Solves one (mode, config) and evaluates the resulting policy.
SingleResult run_single(const ExperimentSpec& spec, Fidelity fidelity = Fidelity::discrete);

std::string eval_csv_header();
std::string eval_csv_row(const std::string& mode, const SystemParams& params, const EvalReport& report);

/// Number rendering used in every CSV: 12 significant digits.
std::string csv_number(double x);

}  // namespace wpcn
