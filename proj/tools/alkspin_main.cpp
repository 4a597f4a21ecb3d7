#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "alkspin/config.hpp"
#include "alkspin/constants.hpp"
#include "alkspin/observables.hpp"
#include "alkspin/pauli.hpp"
#include "alkspin/spectrum.hpp"

namespace {

using alkspin::constants::two_pi;
using nlohmann::json;

alkspin::RunConfig load(const std::string& path) {
  return path.empty() ? alkspin::default_config()
                      : alkspin::load_config_file(path);
}

std::string out_path(const alkspin::RunConfig& cfg, const std::string& name) {
  std::filesystem::path dir(cfg.run.output_dir);
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << text;
}

json peak_to_json(const alkspin::Peak& p) {
  return {{"center_hz", p.center / two_pi}, {"height", p.height},
          {"baseline", p.baseline},         {"hwhm_hz", p.hwhm / two_pi},
          {"partial", p.partial},           {"index", p.index}};
}

int cmd_sweep(const std::string& cfg_path, double omega_min_hz,
              double omega_max_hz, int points, const std::string& out_name) {
  alkspin::RunConfig cfg = load(cfg_path);
  const auto omegas =
      alkspin::linspace(two_pi * omega_min_hz, two_pi * omega_max_hz, points);

  const alkspin::SweepResult res =
      alkspin::sweep(cfg.setup, omegas, cfg.run.jobs);

  const std::string csv = out_path(cfg, out_name);
  alkspin::export_sweep_csv(csv, res, alkspin::config_snapshot(cfg));

  std::vector<double> x, y;
  for (const auto& pt : res.points) {
    x.push_back(pt.omega);
    y.push_back(pt.c2);
  }
  json rep;
  rep["config"] = json::parse(alkspin::config_snapshot(cfg));
  rep["all_converged"] = res.all_converged;
  rep["peaks"] = json::array();
  for (const auto& p : alkspin::find_peaks(x, y))
    rep["peaks"].push_back(peak_to_json(p));
  write_text(csv + ".peaks.json", rep.dump(2) + "\n");

  std::cout << "wrote " << csv << " (" << points << " points, "
            << (res.all_converged ? "all converged" : "NOT all converged")
            << ")\n";
  return res.all_converged ? 0 : 2;
}

int cmd_trajectory(const std::string& cfg_path, double omega_hz,
                   const std::string& out_name, const std::string& strobe_name) {
  alkspin::RunConfig cfg = load(cfg_path);
  if (omega_hz > 0.0) cfg.setup.drive.omega = two_pi * omega_hz;

  alkspin::Engine eng = alkspin::make_engine(cfg.setup);
  const alkspin::SteadyResult steady = eng.evolve_to_steady();

  const std::string meta = alkspin::config_snapshot(cfg);
  alkspin::export_trajectory(out_path(cfg, out_name), steady.period_samples, meta);
  if (!strobe_name.empty())
    alkspin::export_strobe(out_path(cfg, strobe_name), steady.strobe, meta);

  std::printf("steady after %d periods (rel change %.3g): C1=%.6g C2=%.6g\n",
              steady.periods, steady.rel_change,
              alkspin::convolution_c1(steady.period_samples),
              alkspin::convolution_c2(steady.period_samples));
  return steady.converged ? 0 : 2;
}

int cmd_pauli(double r_min, double r_max, int grid, const std::string& out) {
  const auto rep = alkspin::pauli::scan_set_a(r_min, r_max, grid);
  json j;
  j["r_min"] = rep.r_min;
  j["r_max"] = rep.r_max;
  j["grid"] = rep.grid;
  j["accept_threshold"] = rep.accept_threshold;
  j["roots"] = json::array();
  for (const auto& root : rep.roots) {
    const auto avg = alkspin::pauli::averaged_spin(root.r);
    json rj = {{"r", root.r},
               {"deviation", root.deviation},
               {"trace_sign", root.trace_sign},
               {"averaged_spin", json::array()}};
    for (int i = 0; i < 3; ++i)
      rj["averaged_spin"].push_back(
          {avg.table(i, 0), avg.table(i, 1), avg.table(i, 2)});
    j["roots"].push_back(rj);
  }
  const std::string text = j.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_text(out, text);
  std::cout << "found " << rep.roots.size() << " roots\n";
  return 0;
}

int cmd_hwhm(const std::string& cfg_path, const std::string& mode,
             std::vector<double> gammas, double center_hz,
             const std::string& out_name) {
  alkspin::RunConfig cfg = load(cfg_path);
  if (gammas.empty()) gammas = {500.0, 1000.0, 2000.0};

  if (mode == "epr") {
    cfg.setup.drive.mode = alkspin::DriveConfig::Mode::epr;
    if (cfg.setup.drive.b_dc <= 0.0) {
      // place the magnetic resonance at the requested center
      cfg.setup.drive.b_dc =
          two_pi * center_hz / std::abs(alkspin::build_atom_system(cfg.setup.atom).gamma_f2);
      cfg.setup.drive.b_ac = cfg.setup.drive.b_dc / 475.0;
    }
  } else if (mode != "spin") {
    std::cerr << "hwhm: mode must be 'spin' or 'epr'\n";
    return 1;
  }

  const auto study = alkspin::hwhm_vs_gamma(cfg.setup, gammas, center_hz, 33,
                                            cfg.run.jobs);
  json j;
  j["mode"] = mode;
  j["center_hz"] = center_hz;
  j["slope_hz_per_rate"] = study.slope;
  j["max_residual_frac"] = study.max_residual_frac;
  j["points"] = json::array();
  for (const auto& p : study.points)
    j["points"].push_back({{"gamma_hz", p.gamma},
                           {"center_hz", p.center},
                           {"hwhm_hz", p.hwhm}});
  write_text(out_path(cfg, out_name), j.dump(2) + "\n");
  std::cout << "slope " << study.slope << " Hz per unit rate, residual "
            << study.max_residual_frac << "\n";
  return 0;
}

int cmd_dump_operators(const std::string& cfg_path, const std::string& out) {
  alkspin::RunConfig cfg = load(cfg_path);
  const alkspin::AtomSystem sys = alkspin::build_atom_system(cfg.setup.atom);
  json j;
  j["dim"] = alkspin::AtomSystem::dim;
  j["g_f1"] = sys.g_f1;
  j["g_f2"] = sys.g_f2;
  j["gamma_f1_rad_per_s_t"] = sys.gamma_f1;
  j["gamma_f2_rad_per_s_t"] = sys.gamma_f2;
  j["omega_hf_g_rad"] = sys.omega_hf_g;
  j["omega_hf_e_rad"] = sys.omega_hf_e;
  j["wavevector_rad_per_m"] = sys.wavevector;
  j["levels"] = json::array();
  for (int i = 0; i < 16; ++i)
    j["levels"].push_back({{"excited", sys.labels[i].excited},
                           {"f", sys.labels[i].f},
                           {"m", sys.labels[i].m},
                           {"offset_rad", sys.offsets[i]}});
  j["dipole_entries"] = json::array();
  for (const auto& en : sys.dplus_entries)
    j["dipole_entries"].push_back(
        {{"row", en.row}, {"col", en.col}, {"amp_cm", en.amp}});
  const std::string text = j.dump(2) + "\n";
  if (out.empty())
    std::cout << text;
  else
    write_text(out, text);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"non-adiabatic alkali spin dynamics under dual-harmonic drive"};
  app.require_subcommand(1);

  std::string cfg_path, strobe_name, mode = "spin";
  std::string sweep_out = "sweep.csv", traj_out = "trajectory.csv";
  std::string hwhm_out = "hwhm.json", pauli_out, dump_out;
  double omega_min_hz = 25e3, omega_max_hz = 40e3, omega_hz = 0.0;
  double r_min = 0.05, r_max = 0.35, center_hz = 33.19e3;
  int points = 61, grid = 3001;
  std::vector<double> gammas;

  auto* sw = app.add_subcommand("sweep", "steady-state spectrum over drive frequency");
  sw->add_option("--config", cfg_path, "JSON config file");
  sw->add_option("--omega-min-hz", omega_min_hz, "scan start, Hz");
  sw->add_option("--omega-max-hz", omega_max_hz, "scan end, Hz");
  sw->add_option("--points", points, "grid points")->check(CLI::PositiveNumber);
  sw->add_option("--out", sweep_out, "output CSV name");

  auto* tr = app.add_subcommand("trajectory", "steady-state orbit at one drive frequency");
  tr->add_option("--config", cfg_path, "JSON config file");
  tr->add_option("--omega-hz", omega_hz, "drive frequency override, Hz");
  tr->add_option("--out", traj_out, "output CSV name");
  tr->add_option("--strobe-out", strobe_name, "per-period record CSV name");

  auto* pl = app.add_subcommand("pauli", "monodromy scan of the two-level reduction");
  pl->add_option("--r-min", r_min, "scan start");
  pl->add_option("--r-max", r_max, "scan end");
  pl->add_option("--grid", grid, "scan points")->check(CLI::Range(8, 1000000));
  pl->add_option("--out", pauli_out, "output JSON path (stdout when empty)");

  auto* hw = app.add_subcommand("hwhm", "line width versus relaxation rate");
  hw->add_option("--config", cfg_path, "JSON config file");
  hw->add_option("--mode", mode, "'spin' or 'epr'");
  hw->add_option("--gamma-hz", gammas, "relaxation rates to scan");
  hw->add_option("--center-hz", center_hz, "line center, Hz");
  hw->add_option("--out", hwhm_out, "output JSON name");

  auto* du = app.add_subcommand("dump-operators", "atomic structure tables");
  du->add_option("--config", cfg_path, "JSON config file");
  du->add_option("--out", dump_out, "output JSON path (stdout when empty)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sw->parsed()) return cmd_sweep(cfg_path, omega_min_hz, omega_max_hz, points, sweep_out);
    if (tr->parsed()) return cmd_trajectory(cfg_path, omega_hz, traj_out, strobe_name);
    if (pl->parsed()) return cmd_pauli(r_min, r_max, grid, pauli_out);
    if (hw->parsed()) return cmd_hwhm(cfg_path, mode, gammas, center_hz, hwhm_out);
    if (du->parsed()) return cmd_dump_operators(cfg_path, dump_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
