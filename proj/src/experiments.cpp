#include "wpcn/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace wpcn {

ExperimentKind parse_sweep_kind(const std::string& text) {
  if (text == "beta") return ExperimentKind::sweep_beta;
  if (text == "pmax") return ExperimentKind::sweep_pmax;
  if (text == "d1") return ExperimentKind::sweep_d1;
  if (text == "zeta1") return ExperimentKind::sweep_zeta1;
  throw std::invalid_argument("unknown sweep kind '" + text + "' (expected beta, pmax, d1 or zeta1)");
}

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::region: return "region";
    case ExperimentKind::maxmin: return "maxmin";
    case ExperimentKind::sweep_beta: return "sweep-beta";
    case ExperimentKind::sweep_pmax: return "sweep-pmax";
    case ExperimentKind::sweep_d1: return "sweep-d1";
    case ExperimentKind::sweep_zeta1: return "sweep-zeta1";
    case ExperimentKind::single: return "single";
  }
  return "?";
}

ModeSpec ModeSpec::parse(const std::string& text) {
  ModeSpec spec;
  const auto colon = text.find(':');
  spec.mode = parse_mode(text.substr(0, colon));
  if (colon != std::string::npos) {
    if (spec.mode != Mode::full_duplex) throw std::invalid_argument("only fd accepts a gamma override: '" + text + "'");
    spec.gamma_db = text.substr(colon + 1);
    if (spec.gamma_db->empty()) throw std::invalid_argument("empty gamma in mode '" + text + "'");
  }
  return spec;
}

std::string ModeSpec::label() const {
  std::string out(to_string(mode));
  if (gamma_db) out += ":" + *gamma_db;
  return out;
}

void check_spec(const ExperimentSpec& spec) {
  if (spec.modes.empty()) throw std::invalid_argument("experiment needs at least one mode");
  if (spec.kind == ExperimentKind::maxmin || spec.kind == ExperimentKind::single) return;
  if (spec.values.empty()) throw std::invalid_argument("experiment needs at least one value");
  if (!std::is_sorted(spec.values.begin(), spec.values.end())) {
    throw std::invalid_argument("experiment values must be sorted ascending");
  }
}

std::vector<double> default_values(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::region: {
      std::vector<double> alphas;
      for (int k = 0; k <= 10; ++k) alphas.push_back(k / 10.0);
      return alphas;
    }
    case ExperimentKind::sweep_beta: return {2.0, 2.5, 3.0, 3.5, 4.0};
    case ExperimentKind::sweep_pmax: return {0, 5, 10, 15, 20, 25, 30, 35, 40};
    case ExperimentKind::sweep_d1: return {1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};
    case ExperimentKind::sweep_zeta1: return {0.05, 0.1, 0.5, 1.0};
    case ExperimentKind::maxmin:
    case ExperimentKind::single: return {};
  }
  return {};
}

std::vector<ModeSpec> default_modes(ExperimentKind kind) {
  if (kind == ExperimentKind::sweep_beta) {
    return {ModeSpec::parse("fd:perfect"), ModeSpec::parse("fd:-110"), ModeSpec::parse("fd:-100"),
            ModeSpec::parse("fd:-70"), ModeSpec::parse("hd")};
  }
  if (kind == ExperimentKind::single) return {ModeSpec::parse("fd")};
  return {ModeSpec::parse("fd:perfect"), ModeSpec::parse("hd")};
}

SystemParams params_for(const RawConfig& base, const ModeSpec& mode) {
  RawConfig raw = base;
  if (mode.gamma_db) raw["gamma_db"] = *mode.gamma_db;
  return validate(raw);
}

RawConfig sweep_point(const RawConfig& base, ExperimentKind kind, double value) {
  RawConfig raw = base;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  switch (kind) {
    case ExperimentKind::sweep_beta:
      // Batteries stay sized by beta_battery_ref.
      raw["beta"] = buf;
      break;
    case ExperimentKind::sweep_pmax:
      raw.erase("p_max_w");
      raw["p_max_dbm"] = buf;
      break;
    case ExperimentKind::sweep_d1: {
      // D1's battery keeps the size it has at the base distance.
      const auto ref = raw.find("battery_ref_d1_m");
      if (ref == raw.end() || ref->second == "auto") {
        const auto d1 = raw.find("d1_m");
        raw["battery_ref_d1_m"] = d1 != raw.end() ? d1->second : default_config().at("d1_m");
      }
      raw["d1_m"] = buf;
      break;
    }
    case ExperimentKind::sweep_zeta1:
      raw["zeta1_j"] = buf;
      break;
    default:
      throw std::invalid_argument("sweep_point: not a sweep kind");
  }
  return raw;
}

std::string csv_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

std::string quote_error(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

std::string csv_preamble(const ExperimentSpec& spec) {
  std::string hash = "invalid";
  try {
    hash = hash_hex(params_hash(validate(spec.base)));
  } catch (const ConfigError&) {
  }
  return "# " + std::string(kToolVersion) + " experiment=" + to_string(spec.kind) + " params_hash=" + hash +
         " seed=" + std::to_string(spec.seed) + "\n";
}

}  // namespace

std::vector<RegionRow> run_region_rows(const ExperimentSpec& spec) {
  check_spec(spec);
  std::vector<RegionRow> rows;
  for (const auto& mode : spec.modes) {
    for (double alpha : spec.values) {
      RegionRow row{mode.label(), alpha, {}, {}};
      try {
        row.pair = throughput_pair(params_for(spec.base, mode), mode.mode, alpha, spec.slots, spec.seed);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

MaxMinResult run_maxmin(const ExperimentSpec& spec, const ModeSpec& mode, double rel_tol, double alpha_tol) {
  MaxMinResult out;
  out.mode = mode.label();
  try {
    const SystemParams params = params_for(spec.base, mode);
    auto eval = [&](double alpha) {
      ++out.evaluations;
      const auto pair = throughput_pair(params, mode.mode, alpha, spec.slots, spec.seed);
      const double common = std::min(pair.throughput_bps[0], pair.throughput_bps[1]);
      if (common > out.common_bps || out.evaluations == 1) {
        out.common_bps = common;
        out.alpha_star = alpha;
        out.throughput_bps = pair.throughput_bps;
      }
      return pair.throughput_bps;
    };
    double lo = 0.0, hi = 1.0;
    const auto at_lo = eval(lo);
    const auto at_hi = eval(hi);
    const double f_lo = at_lo[0] - at_lo[1];
    const double f_hi = at_hi[0] - at_hi[1];
    if (!(f_lo < 0.0 && f_hi > 0.0)) {
      out.error = "bisection endpoints do not bracket G1 = G2: G1-G2 = " + csv_number(f_lo) + " at alpha=0, " +
                  csv_number(f_hi) + " at alpha=1";
      return out;
    }
    while (hi - lo >= alpha_tol) {
      const double mid = 0.5 * (lo + hi);
      const auto g = eval(mid);
      const double f = g[0] - g[1];
      if (std::abs(f) < rel_tol * std::max(g[0], g[1])) break;
      (f < 0.0 ? lo : hi) = mid;
    }
  } catch (const std::exception& e) {
    out.error = e.what();
  }
  return out;
}

SweepRow solve_gain(const SystemParams& params, Mode mode) {
  SweepRow row;
  const auto start = std::chrono::steady_clock::now();
  if (mode == Mode::myopic) {
    row.gain_bps = evaluate_policy(myopic_policy(params), params).gain / params.slot_length_s;
  } else {
    const SolveResult solved = relative_value_iteration(params, mode);
    row.gain_bps = solved.gain / params.slot_length_s;
    row.iterations = solved.iterations;
  }
  row.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

std::vector<SweepRow> run_sweep_rows(const ExperimentSpec& spec) {
  check_spec(spec);
  std::vector<SweepRow> rows;
  for (const auto& mode : spec.modes) {
    for (double value : spec.values) {
      SweepRow row;
      try {
        row = solve_gain(params_for(sweep_point(spec.base, spec.kind, value), mode), mode.mode);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      row.mode = mode.label();
      row.value = value;
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

ExperimentOutput run_region(const ExperimentSpec& spec) {
  ExperimentOutput out;
  std::ostringstream os;
  os << csv_preamble(spec);
  os << "mode,alpha,g1_bps,g2_bps,weighted_bps,model_gain_bps,status\n";
  for (const auto& row : run_region_rows(spec)) {
    os << row.mode << ',' << csv_number(row.alpha) << ',';
    if (row.error.empty()) {
      os << csv_number(row.pair.throughput_bps[0]) << ',' << csv_number(row.pair.throughput_bps[1]) << ','
         << csv_number(row.pair.weighted_bps) << ',' << csv_number(row.pair.model_gain_bps) << ",ok\n";
    } else {
      out.ok = false;
      os << ",,,," << quote_error(row.error) << '\n';
    }
  }
  out.csv = os.str();
  return out;
}

ExperimentOutput run_maxmin_csv(const ExperimentSpec& spec) {
  check_spec(spec);
  ExperimentOutput out;
  std::ostringstream os;
  os << csv_preamble(spec);
  os << "mode,alpha_star,g1_bps,g2_bps,common_bps,evaluations,status\n";
  for (const auto& mode : spec.modes) {
    const MaxMinResult r = run_maxmin(spec, mode);
    os << r.mode << ',';
    if (r.error.empty()) {
      os << csv_number(r.alpha_star) << ',' << csv_number(r.throughput_bps[0]) << ','
         << csv_number(r.throughput_bps[1]) << ',' << csv_number(r.common_bps) << ',' << r.evaluations << ",ok\n";
    } else {
      out.ok = false;
      os << ",,,," << r.evaluations << ',' << quote_error(r.error) << '\n';
    }
  }
  out.csv = os.str();
  return out;
}

ExperimentOutput run_sweep(const ExperimentSpec& spec) {
  ExperimentOutput out;
  std::ostringstream os;
  os << csv_preamble(spec);
  os << "mode,value,gain_bps,iterations" << (spec.timing ? ",wall_seconds" : "") << ",status\n";
  for (const auto& row : run_sweep_rows(spec)) {
    os << row.mode << ',' << csv_number(row.value) << ',';
    if (row.error.empty()) {
      os << csv_number(row.gain_bps) << ',' << row.iterations;
      if (spec.timing) os << ',' << csv_number(row.wall_seconds);
      os << ",ok\n";
    } else {
      out.ok = false;
      os << ',' << (spec.timing ? "," : "") << ',' << quote_error(row.error) << '\n';
    }
  }
  out.csv = os.str();
  return out;
}

SingleResult run_single(const ExperimentSpec& spec, Fidelity fidelity) {
  if (spec.modes.empty()) throw std::invalid_argument("run_single needs a mode");
  const ModeSpec& mode = spec.modes.front();
  SingleResult out;
  out.params = params_for(spec.base, mode);
  if (mode.mode == Mode::myopic) {
    out.solve.mode = Mode::myopic;
    out.solve.policy = myopic_policy(out.params);
    out.solve.gain = evaluate_policy(out.solve.policy, out.params).gain;
    out.solve.gain_lower = out.solve.gain_upper = out.solve.gain;
    out.solve.values.assign(out.solve.policy.size(), 0.0);
  } else {
    out.solve = relative_value_iteration(out.params, mode.mode);
  }
  out.eval = simulate(out.solve.policy, out.params, spec.slots, spec.seed, fidelity);
  return out;
}

std::string eval_csv_header() {
  return "mode,alpha,g1_bps,g2_bps,weighted_bps,tail_weighted_bps,std_error_bps,slots,seed,fidelity,b1_initial,"
         "b2_initial\n";
}

std::string eval_csv_row(const std::string& mode, const SystemParams& params, const EvalReport& r) {
  std::ostringstream os;
  os << mode << ',' << csv_number(params.alpha) << ',' << csv_number(r.throughput_bps[0]) << ','
     << csv_number(r.throughput_bps[1]) << ',' << csv_number(r.weighted_bps) << ',' << csv_number(r.tail_weighted_bps)
     << ',' << csv_number(r.std_error_bps) << ',' << r.slots << ',' << r.seed << ',' << to_string(r.fidelity) << ','
     << r.initial_battery[0] << ',' << r.initial_battery[1] << '\n';
  return os.str();
}

}  // namespace wpcn
