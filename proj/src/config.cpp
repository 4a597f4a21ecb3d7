#include "alkspin/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "alkspin/constants.hpp"

namespace alkspin {

namespace {

using nlohmann::json;

void require_known_keys(const json& obj, const std::string& scope,
                        const std::set<std::string>& known) {
  const std::string prefix = scope.empty() ? "" : scope + ".";
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!known.count(it.key()))
      throw std::invalid_argument("config: unknown key '" + prefix + it.key() +
                                  "'");
  }
}

double get_number(const json& obj, const std::string& scope,
                  const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number())
    throw std::invalid_argument("config: '" + scope + "." + key +
                                "' must be a number");
  return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& scope, const std::string& key,
            int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer())
    throw std::invalid_argument("config: '" + scope + "." + key +
                                "' must be an integer");
  return obj[key].get<int>();
}

std::string get_string(const json& obj, const std::string& scope,
                       const std::string& key, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_string())
    throw std::invalid_argument("config: '" + scope + "." + key +
                                "' must be a string");
  return obj[key].get<std::string>();
}

bool get_bool(const json& obj, const std::string& scope,
              const std::string& key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_boolean())
    throw std::invalid_argument("config: '" + scope + "." + key +
                                "' must be a boolean");
  return obj[key].get<bool>();
}

} // namespace

RunConfig default_config() {
  RunConfig cfg;
  cfg.setup.atom = AtomParams{};

  cfg.setup.drive.mode = DriveConfig::Mode::dual_harmonic;
  cfg.setup.drive.b0 = 27e-6;
  cfg.setup.drive.omega = constants::two_pi * 33.2e3;
  cfg.setup.drive.b_dc = 0.0;
  cfg.setup.drive.b_ac = 0.0;
  cfg.setup.drive.t0 = 0.0;

  cfg.setup.pump.e_amp = 100.0;
  cfg.setup.pump.detuning = 0.0;

  cfg.setup.rates.gamma = 1e3;
  cfg.setup.rates.delta_mix = 1e9;
  cfg.setup.rates.delta_dcy = 1e8;
  cfg.setup.rates.delta_dec = 1e10;

  cfg.setup.velocity_nodes = 8;
  cfg.setup.temperature_k = 80.0 + 273.15;

  cfg.setup.engine = EngineSettings{};
  return cfg;
}

RunConfig load_config_text(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config: invalid JSON: ") +
                                e.what());
  }
  if (!root.is_object())
    throw std::invalid_argument("config: top level must be an object");

  require_known_keys(root, "",
                     {"atom", "field", "pump", "rates", "ensemble", "run"});

  RunConfig cfg = default_config();

  if (root.contains("atom")) {
    const json& a = root["atom"];
    require_known_keys(a, "atom",
                       {"reduced_dipole_cm", "ground_splitting_hz",
                        "excited_splitting_hz", "carrier_frequency_hz", "g_j",
                        "g_i"});
    auto& p = cfg.setup.atom;
    p.reduced_dipole_cm = get_number(a, "atom", "reduced_dipole_cm", p.reduced_dipole_cm);
    p.ground_splitting_hz = get_number(a, "atom", "ground_splitting_hz", p.ground_splitting_hz);
    p.excited_splitting_hz = get_number(a, "atom", "excited_splitting_hz", p.excited_splitting_hz);
    p.carrier_frequency_hz = get_number(a, "atom", "carrier_frequency_hz", p.carrier_frequency_hz);
    p.g_j = get_number(a, "atom", "g_j", p.g_j);
    p.g_i = get_number(a, "atom", "g_i", p.g_i);
  }

  if (root.contains("field")) {
    const json& f = root["field"];
    require_known_keys(f, "field",
                       {"mode", "B0_tesla", "Omega_hz", "Bdc_tesla",
                        "Bac_tesla", "phase_origin_s"});
    auto& d = cfg.setup.drive;
    const std::string mode = get_string(f, "field", "mode", "dual_harmonic");
    if (mode == "dual_harmonic")
      d.mode = DriveConfig::Mode::dual_harmonic;
    else if (mode == "epr")
      d.mode = DriveConfig::Mode::epr;
    else
      throw std::invalid_argument(
          "config: 'field.mode' must be 'dual_harmonic' or 'epr'");
    d.b0 = get_number(f, "field", "B0_tesla", d.b0);
    const double omega_hz =
        get_number(f, "field", "Omega_hz", d.omega / constants::two_pi);
    d.omega = constants::two_pi * omega_hz;
    d.b_dc = get_number(f, "field", "Bdc_tesla", d.b_dc);
    d.b_ac = get_number(f, "field", "Bac_tesla", d.b_ac);
    d.t0 = get_number(f, "field", "phase_origin_s", d.t0);
  }

  if (root.contains("pump")) {
    const json& p = root["pump"];
    require_known_keys(p, "pump", {"E_amp_vpm", "detuning_hz"});
    cfg.setup.pump.e_amp = get_number(p, "pump", "E_amp_vpm", cfg.setup.pump.e_amp);
    cfg.setup.pump.detuning =
        constants::two_pi *
        get_number(p, "pump", "detuning_hz",
                   cfg.setup.pump.detuning / constants::two_pi);
  }

  if (root.contains("rates")) {
    const json& r = root["rates"];
    require_known_keys(
        r, "rates", {"gamma_hz", "delta_mix_hz", "delta_dcy_hz", "delta_dec_hz"});
    auto& rr = cfg.setup.rates;
    rr.gamma = get_number(r, "rates", "gamma_hz", rr.gamma);
    rr.delta_mix = get_number(r, "rates", "delta_mix_hz", rr.delta_mix);
    rr.delta_dcy = get_number(r, "rates", "delta_dcy_hz", rr.delta_dcy);
    rr.delta_dec = get_number(r, "rates", "delta_dec_hz", rr.delta_dec);
  }

  if (root.contains("ensemble")) {
    const json& e = root["ensemble"];
    require_known_keys(e, "ensemble", {"velocity_nodes", "temperature_c"});
    cfg.setup.velocity_nodes =
        get_int(e, "ensemble", "velocity_nodes", cfg.setup.velocity_nodes);
    if (cfg.setup.velocity_nodes < 1 || cfg.setup.velocity_nodes > 256)
      throw std::invalid_argument(
          "config: 'ensemble.velocity_nodes' must be in [1, 256]");
    cfg.setup.temperature_k =
        273.15 + get_number(e, "ensemble", "temperature_c",
                            cfg.setup.temperature_k - 273.15);
    if (cfg.setup.temperature_k <= 0.0)
      throw std::invalid_argument(
          "config: 'ensemble.temperature_c' must be above absolute zero");
  }

  if (root.contains("run")) {
    const json& r = root["run"];
    require_known_keys(r, "run",
                       {"tier", "steady_rel_tol", "max_periods_factor",
                        "samples_per_period", "jobs", "output_dir",
                        "deterministic"});
    const std::string tier = get_string(r, "run", "tier", "reduced");
    if (tier == "full")
      cfg.setup.engine.tier = Tier::full;
    else if (tier == "reduced")
      cfg.setup.engine.tier = Tier::reduced;
    else
      throw std::invalid_argument("config: 'run.tier' must be 'full' or 'reduced'");
    cfg.setup.engine.steady_rel_tol =
        get_number(r, "run", "steady_rel_tol", cfg.setup.engine.steady_rel_tol);
    cfg.setup.engine.max_periods_factor = get_number(
        r, "run", "max_periods_factor", cfg.setup.engine.max_periods_factor);
    cfg.setup.engine.samples_per_period = get_int(
        r, "run", "samples_per_period", cfg.setup.engine.samples_per_period);
    if (cfg.setup.engine.samples_per_period < 16 ||
        cfg.setup.engine.samples_per_period > 65536)
      throw std::invalid_argument(
          "config: 'run.samples_per_period' must be in [16, 65536]");
    if (!(cfg.setup.engine.steady_rel_tol > 0.0))
      throw std::invalid_argument("config: 'run.steady_rel_tol' must be > 0");
    if (!(cfg.setup.engine.max_periods_factor > 0.0))
      throw std::invalid_argument(
          "config: 'run.max_periods_factor' must be > 0");
    cfg.run.jobs = get_int(r, "run", "jobs", cfg.run.jobs);
    if (cfg.run.jobs < 0)
      throw std::invalid_argument("config: 'run.jobs' must be >= 0");
    cfg.run.output_dir = get_string(r, "run", "output_dir", cfg.run.output_dir);
    cfg.run.deterministic = get_bool(r, "run", "deterministic", cfg.run.deterministic);
  }

  // cross-field checks happen in the component validators
  cfg.setup.drive.validate();
  cfg.setup.pump.validate();
  cfg.setup.rates.validate();
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::invalid_argument("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return load_config_text(ss.str());
}

std::string config_snapshot(const RunConfig& cfg) {
  json j;
  const auto& s = cfg.setup;
  j["atom"] = {{"reduced_dipole_cm", s.atom.reduced_dipole_cm},
               {"ground_splitting_hz", s.atom.ground_splitting_hz},
               {"excited_splitting_hz", s.atom.excited_splitting_hz},
               {"carrier_frequency_hz", s.atom.carrier_frequency_hz},
               {"g_j", s.atom.g_j},
               {"g_i", s.atom.g_i}};
  j["field"] = {
      {"mode", s.drive.mode == DriveConfig::Mode::dual_harmonic ? "dual_harmonic" : "epr"},
      {"B0_tesla", s.drive.b0},
      {"Omega_hz", s.drive.omega / constants::two_pi},
      {"Bdc_tesla", s.drive.b_dc},
      {"Bac_tesla", s.drive.b_ac},
      {"phase_origin_s", s.drive.t0}};
  j["pump"] = {{"E_amp_vpm", s.pump.e_amp},
               {"detuning_hz", s.pump.detuning / constants::two_pi}};
  j["rates"] = {{"gamma_hz", s.rates.gamma},
                {"delta_mix_hz", s.rates.delta_mix},
                {"delta_dcy_hz", s.rates.delta_dcy},
                {"delta_dec_hz", s.rates.delta_dec}};
  j["ensemble"] = {{"velocity_nodes", s.velocity_nodes},
                   {"temperature_c", s.temperature_k - 273.15}};
  j["run"] = {{"tier", s.engine.tier == Tier::full ? "full" : "reduced"},
              {"steady_rel_tol", s.engine.steady_rel_tol},
              {"max_periods_factor", s.engine.max_periods_factor},
              {"samples_per_period", s.engine.samples_per_period},
              {"jobs", cfg.run.jobs},
              {"output_dir", cfg.run.output_dir},
              {"deterministic", cfg.run.deterministic}};
  return j.dump();
}

} // namespace alkspin
