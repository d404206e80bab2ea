#include "wpcn/params.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>

namespace wpcn {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

double noise_power_watts(double psd_dbm_per_hz, double bandwidth_hz) {
  if (!(bandwidth_hz > 0.0)) {
    throw ConfigError("bandwidth_hz", "must be > 0");
  }
  return dbm_to_watts(psd_dbm_per_hz + 10.0 * std::log10(bandwidth_hz));
}

double mean_channel_gain(double distance_m, double beta) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("mean_channel_gain: distance must be > 0");
  return kPathlossConstant * std::pow(distance_m, -beta);
}

double battery_capacity_joules(double distance_m, double beta_ref, double zeta_joules) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("battery_capacity_joules: distance must be > 0");
  if (!(zeta_joules > 0.0)) throw std::invalid_argument("battery_capacity_joules: zeta must be > 0");
  return kPathlossConstant * std::pow(distance_m, -beta_ref) * zeta_joules;
}

namespace {

std::string format_violations(const std::vector<ConfigViolation>& violations) {
  std::string out = "invalid configuration:";
  for (const auto& v : violations) out += " [" + v.field + ": " + v.message + "]";
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  const std::string& text(const std::string& key) const {
    auto it = raw_.find(key);
    if (it != raw_.end()) return it->second;
    return default_config().at(key);
  }

  bool given(const std::string& key) const { return raw_.count(key) != 0; }

  double real(const std::string& key) {
    const std::string& s = text(key);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(value)) {
      fail(key, "expected a finite number, got '" + s + "'");
      return 0.0;
    }
    return value;
  }

  long integer(const std::string& key) {
    const std::string& s = text(key);
    long value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      fail(key, "expected an integer, got '" + s + "'");
      return 0;
    }
    return value;
  }

  void fail(const std::string& field, const std::string& message) {
    violations.push_back({field, message});
  }

  std::vector<ConfigViolation> violations;

 private:
  const RawConfig& raw_;
};

void check_invariants(const SystemParams& p, std::vector<ConfigViolation>& out) {
  auto require = [&out](bool ok, const char* field, const char* message) {
    if (!ok) out.push_back({field, message});
  };
  require(p.slot_length_s > 0.0, "slot_length_s", "must be > 0");
  require(p.p_max_w > 0.0, "p_max_w", "must be > 0");
  require(p.gamma_si >= 0.0 && p.gamma_si <= 1.0, "gamma_db", "linear value must lie in [0, 1]");
  require(p.bandwidth_hz > 0.0, "bandwidth_hz", "must be > 0");
  require(p.alpha >= 0.0 && p.alpha <= 1.0, "alpha", "must lie in [0, 1]");
  require(p.beta > 0.0, "beta", "must be > 0");
  require(p.beta_battery_ref > 0.0, "beta_battery_ref", "must be > 0");
  static constexpr const char* kDistance[] = {"d1_m", "d2_m"};
  static constexpr const char* kEta[] = {"eta1", "eta2"};
  static constexpr const char* kZeta[] = {"zeta1_j", "zeta2_j"};
  static constexpr const char* kRef[] = {"battery_ref_d1_m", "battery_ref_d2_m"};
  static constexpr const char* kRho[] = {"rho1_max_w", "rho2_max_w"};
  static constexpr const char* kQuanta[] = {"battery_quanta1", "battery_quanta2"};
  for (std::size_t i = 0; i < kDevices; ++i) {
    const auto& d = p.device[i];
    require(d.distance_m > 0.0, kDistance[i], "must be > 0");
    require(d.harvest_efficiency > 0.0 && d.harvest_efficiency <= 1.0, kEta[i], "must lie in (0, 1]");
    require(d.zeta_j > 0.0, kZeta[i], "must be > 0");
    require(d.battery_ref_distance_m > 0.0, kRef[i], "must be > 0");
    require(d.rho_max_w > 0.0, kRho[i], "must be > 0");
    require(d.battery_quanta >= 0 && d.battery_quanta <= 250, kQuanta[i], "must lie in [0, 250]");
  }
  require(p.grid.channel_bins >= 1 && p.grid.channel_bins <= 64, "channel_bins", "must lie in [1, 64]");
  require(p.grid.tau_steps >= 2 && p.grid.tau_steps <= 250, "tau_steps", "must lie in [2, 250]");
  require(p.grid.power_levels >= 2 && p.grid.power_levels <= 250, "power_levels", "must lie in [2, 250]");
  require(p.solver.tolerance > 0.0, "rvi_tolerance", "must be > 0");
  require(p.solver.max_iterations >= 1, "rvi_max_iterations", "must be >= 1");
  require(p.solver.damping > 0.0 && p.solver.damping <= 1.0, "rvi_damping", "must lie in (0, 1]");
  require(p.solver.max_states >= 1, "max_states", "must be >= 1");
  require(p.solver.workers >= 1, "workers", "must be >= 1");
}

void derive(SystemParams& p) {
  for (auto& d : p.device) {
    if (d.battery_ref_distance_m > 0.0 && d.zeta_j > 0.0) {
      d.battery_capacity_j = battery_capacity_joules(d.battery_ref_distance_m, p.beta_battery_ref, d.zeta_j);
    }
    // With zero quanta nothing is storable; the quantum is then only a scale.
    d.quantum_j = d.battery_quanta > 0 ? d.battery_capacity_j / d.battery_quanta : d.battery_capacity_j;
  }
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigViolation> violations)
    : std::runtime_error(format_violations(violations)), violations_(std::move(violations)) {}

ConfigError::ConfigError(std::string field, std::string message)
    : ConfigError(std::vector<ConfigViolation>{{std::move(field), std::move(message)}}) {}

RawConfig parse_config(std::istream& in) {
  RawConfig raw;
  std::vector<ConfigViolation> errors;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::string body = trim(line);
    if (body.empty()) continue;
    auto eq = body.find('=');
    if (eq == std::string::npos) {
      errors.push_back({"line " + std::to_string(number), "expected 'key = value'"});
      continue;
    }
    std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty()) {
      errors.push_back({"line " + std::to_string(number), "empty key or value"});
      continue;
    }
    raw[key] = value;
  }
  if (!errors.empty()) throw ConfigError(std::move(errors));
  return raw;
}

RawConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  return parse_config(in);
}

const RawConfig& default_config() {
  static const RawConfig defaults = {
      {"slot_length_s", "1"},
      {"p_max_w", "2"},
      {"p_max_dbm", "auto"},
      {"gamma_db", "perfect"},
      {"noise_psd_dbm_per_hz", "-125"},
      {"bandwidth_hz", "1e6"},
      {"alpha", "0.5"},
      {"beta", "2"},
      {"beta_battery_ref", "2"},
      {"d1_m", "5"},
      {"d2_m", "10"},
      {"eta1", "0.8"},
      {"eta2", "0.8"},
      {"zeta1_j", "0.1"},
      {"zeta2_j", "1"},
      {"battery_ref_d1_m", "auto"},
      {"battery_ref_d2_m", "auto"},
      {"rho1_max_w", "auto"},
      {"rho2_max_w", "auto"},
      {"battery_quanta1", "10"},
      {"battery_quanta2", "10"},
      {"channel_bins", "2"},
      {"tau_steps", "10"},
      {"power_levels", "2"},
      {"rvi_tolerance", "1e-6"},
      {"rvi_max_iterations", "100000"},
      {"rvi_damping", "0.9"},
      {"max_states", "5000000"},
      {"workers", "1"},
  };
  return defaults;
}

SystemParams validate(const RawConfig& raw) {
  Reader r(raw);
  for (const auto& [key, value] : raw) {
    if (default_config().count(key) == 0) r.fail(key, "unknown key");
  }

  SystemParams p;
  p.slot_length_s = r.real("slot_length_s");
  if (r.text("p_max_dbm") != "auto") {
    if (r.given("p_max_w")) r.fail("p_max_dbm", "conflicts with p_max_w; give only one");
    p.p_max_w = dbm_to_watts(r.real("p_max_dbm"));
  } else {
    p.p_max_w = r.real("p_max_w");
  }
  if (r.text("gamma_db") == "perfect") {
    p.gamma_si = 0.0;
  } else {
    p.gamma_si = db_to_linear(r.real("gamma_db"));
  }
  p.noise_psd_dbm_per_hz = r.real("noise_psd_dbm_per_hz");
  p.bandwidth_hz = r.real("bandwidth_hz");
  p.alpha = r.real("alpha");
  p.beta = r.real("beta");
  p.beta_battery_ref = r.real("beta_battery_ref");

  for (std::size_t i = 0; i < kDevices; ++i) {
    const std::string n = std::to_string(i + 1);
    auto& d = p.device[i];
    d.distance_m = r.real("d" + n + "_m");
    d.harvest_efficiency = r.real("eta" + n);
    d.zeta_j = r.real("zeta" + n + "_j");
    const std::string ref_key = "battery_ref_d" + n + "_m";
    d.battery_ref_distance_m = r.text(ref_key) == "auto" ? d.distance_m : r.real(ref_key);
    d.battery_quanta = static_cast<int>(r.integer("battery_quanta" + n));
  }
  p.grid.channel_bins = static_cast<int>(r.integer("channel_bins"));
  p.grid.tau_steps = static_cast<int>(r.integer("tau_steps"));
  p.grid.power_levels = static_cast<int>(r.integer("power_levels"));
  p.solver.tolerance = r.real("rvi_tolerance");
  p.solver.max_iterations = r.integer("rvi_max_iterations");
  p.solver.damping = r.real("rvi_damping");
  const long max_states = r.integer("max_states");
  p.solver.max_states = max_states > 0 ? static_cast<std::size_t>(max_states) : 0;
  const long workers = r.integer("workers");
  p.solver.workers = workers > 0 ? static_cast<unsigned>(workers) : 0;

  derive(p);
  for (std::size_t i = 0; i < kDevices; ++i) {
    const std::string key = "rho" + std::to_string(i + 1) + "_max_w";
    auto& d = p.device[i];
    if (r.text(key) == "auto") {
      d.rho_max_w = p.slot_length_s > 0.0 ? d.battery_capacity_j / p.slot_length_s : 0.0;
    } else {
      d.rho_max_w = r.real(key);
    }
  }

  check_invariants(p, r.violations);
  if (!r.violations.empty()) throw ConfigError(std::move(r.violations));
  return p;
}

SystemParams validate(const SystemParams& params) {
  SystemParams p = params;
  std::vector<ConfigViolation> violations;
  check_invariants(p, violations);
  if (!violations.empty()) throw ConfigError(std::move(violations));
  derive(p);
  return p;
}

SystemParams default_params() { return validate(RawConfig{}); }

std::uint64_t params_hash(const SystemParams& p) {
  std::ostringstream os;
  char buf[32];
  auto put = [&](double x) {
    std::snprintf(buf, sizeof buf, "%.17g;", x);
    os << buf;
  };
  put(p.slot_length_s);
  put(p.p_max_w);
  put(p.gamma_si);
  put(p.noise_psd_dbm_per_hz);
  put(p.bandwidth_hz);
  put(p.alpha);
  put(p.beta);
  put(p.beta_battery_ref);
  for (const auto& d : p.device) {
    put(d.distance_m);
    put(d.harvest_efficiency);
    put(d.zeta_j);
    put(d.battery_ref_distance_m);
    put(d.rho_max_w);
    os << d.battery_quanta << ';';
  }
  os << p.grid.channel_bins << ';' << p.grid.tau_steps << ';' << p.grid.power_levels << ';';
  put(p.solver.tolerance);
  os << p.solver.max_iterations << ';';
  put(p.solver.damping);

  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : os.str()) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

std::string hash_hex(std::uint64_t hash) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

}  // namespace wpcn
