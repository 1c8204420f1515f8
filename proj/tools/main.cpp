#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cvqkd/allocator.hpp"
#include "cvqkd/csv.hpp"
#include "cvqkd/estimation.hpp"
#include "cvqkd/keyrate.hpp"
#include "cvqkd/noise.hpp"
#include "cvqkd/scenario.hpp"
#include "cvqkd/scenario_io.hpp"

namespace {

using namespace cvqkd;

constexpr const char* kToolVersion = "1.0.0";
constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;

struct CommonOpts {
  std::string scenario_path;
  std::string out_path;
  std::string format = "csv";
  std::uint64_t seed = 0;
  bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--scenario", o.scenario_path, "scenario file (TOML subset)");
  cmd->add_option("--out", o.out_path, "output path (default: stdout)");
  cmd->add_option("--format", o.format, "output format")->check(CLI::IsMember({"csv"}));
  cmd->add_option("--seed", o.seed, "override scenario seed")
      ->each([&o](const std::string&) { o.seed_set = true; });
}

ScenarioConfig load_config(const CommonOpts& o) {
  ScenarioConfig cfg;
  if (const char* env = std::getenv("QKD_COEXIST_DEFAULTS")) {
    if (*env) parse_scenario_into(env, cfg);
  }
  if (!o.scenario_path.empty()) {
    parse_scenario_into(o.scenario_path, cfg);
  }
  if (o.seed_set) cfg.seed = o.seed;
  return cfg;
}

// Output is buffered and written whole, so a failing run leaves no partial file.
void emit(const CommonOpts& o, const std::string& text) {
  if (o.out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(o.out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output file: " + o.out_path);
  f << text;
}

void write_meta(CsvWriter& w, const ScenarioConfig& cfg, const char* command) {
  w.metadata("tool", std::string("qkd-coexist ") + kToolVersion);
  w.metadata("command", command);
  for (const auto& [k, v] : resolved_config(cfg)) w.metadata(k, v);
}

void write_warnings(CsvWriter& w, const CoexistScenario& scenario) {
  for (const std::string& warning : validate(scenario)) w.metadata("warning", warning);
}

int cmd_budget(const CommonOpts& o) {
  const ScenarioConfig cfg = load_config(o);
  const NoiseBudget budget = total_noise_budget(cfg.scenario, NoiseRef::AtAlice);

  std::ostringstream buf;
  CsvWriter w(buf);
  write_meta(w, cfg, "budget");
  write_warnings(w, cfg.scenario);
  for (const auto& [name, value] : calibration_constants()) w.metadata(name, value);
  w.metadata("total_xi_n0", budget.total);
  w.header({"source", "xi_n0", "reference", "note"});
  for (const NoiseBudget::Entry& e : budget.entries) {
    w.row({to_string(e.source), CsvWriter::num(e.xi), "alice", e.note});
  }
  w.row({"total", CsvWriter::num(budget.total), "alice", "sum of all entries"});
  emit(o, buf.str());

  if (!o.out_path.empty()) {
    std::printf("%-12s %14s\n", "source", "xi_n0");
    for (const NoiseBudget::Entry& e : budget.entries) {
      std::printf("%-12s %14.6e\n", to_string(e.source), e.xi);
    }
    std::printf("%-12s %14.6e  (at alice)\n", "total", budget.total);
  }
  return 0;
}

int cmd_keyrate(const CommonOpts& o) {
  const ScenarioConfig cfg = load_config(o);
  const ScenarioKeyRate r = scenario_key_rate(cfg.scenario, cfg.finite_size);

  std::ostringstream buf;
  CsvWriter w(buf);
  write_meta(w, cfg, "keyrate");
  write_warnings(w, cfg.scenario);
  w.header({"xi_total_n0", "xi_worst_case_n0", "threshold_xi_n0", "key_bits_per_pulse",
            "key_bits_per_s", "key_bits_per_s_scheduled", "feasible"});
  w.row({CsvWriter::num(r.xi_total), CsvWriter::num(r.xi_worst_case),
         CsvWriter::num(r.threshold.xi), CsvWriter::num(r.key.key_bits_per_pulse),
         CsvWriter::num(r.key.key_bits_per_second),
         CsvWriter::num(r.key_bits_per_second_scheduled), r.feasible ? "1" : "0"});
  emit(o, buf.str());

  if (!o.out_path.empty()) {
    std::printf("xi_total %.6e N_0, worst case %.6e, threshold %.6e\n", r.xi_total,
                r.xi_worst_case, r.threshold.xi);
    std::printf("key %.6e bits/pulse = %.3f kb/s (%.3f kb/s scheduled), %s\n",
                r.key.key_bits_per_pulse, r.key.key_bits_per_second / 1e3,
                r.key_bits_per_second_scheduled / 1e3,
                r.feasible ? "feasible" : "infeasible");
  }
  return r.feasible ? 0 : kExitInfeasible;
}

int cmd_sweep(const CommonOpts& o) {
  const ScenarioConfig cfg = load_config(o);
  const SweepSpec& sweep = cfg.sweep;
  if (!sweep.present) throw ScenarioError("sweep: scenario has no [sweep] section");
  if (sweep.steps < 2) throw ScenarioError("sweep: steps must be >= 2");
  if (!(sweep.from != sweep.to)) throw ScenarioError("sweep: empty range, from == to");

  std::ostringstream buf;
  CsvWriter w(buf);
  write_meta(w, cfg, "sweep");
  write_warnings(w, cfg.scenario);
  w.header({"x", "xi_total_n0", "key_bits_per_pulse", "key_bits_per_s", "positive",
            "threshold_xi_n0"});
  for (int i = 0; i < sweep.steps; ++i) {
    const double x = sweep.from + (sweep.to - sweep.from) * i / (sweep.steps - 1);
    CoexistScenario point = cfg.scenario;
    switch (sweep.axis) {
      case SweepSpec::Axis::PowerMw:
        if (x <= 0.0) {
          point.channels.clear();  // powered off
        } else {
          for (WdmChannel& ch : point.channels) ch.launch_power_dbm = mw_to_dbm(x);
        }
        break;
      case SweepSpec::Axis::PowerDbm:
        for (WdmChannel& ch : point.channels) ch.launch_power_dbm = x;
        break;
      case SweepSpec::Axis::DistanceKm:
        point.link.length_km = x;
        break;
    }
    const ScenarioKeyRate r = scenario_key_rate(point, cfg.finite_size);
    w.row({CsvWriter::num(x), CsvWriter::num(r.xi_total),
           CsvWriter::num(r.key.key_bits_per_pulse),
           CsvWriter::num(r.key.key_bits_per_second), r.key.positive ? "1" : "0",
           CsvWriter::num(r.threshold.xi)});
  }
  emit(o, buf.str());
  return 0;
}

int cmd_allocate(const CommonOpts& o) {
  const ScenarioConfig cfg = load_config(o);
  const AllocationRequest req = build_allocation_request(cfg);
  const AllocationResult result = allocate(req);

  std::ostringstream buf;
  CsvWriter w(buf);
  write_meta(w, cfg, "allocate");
  w.metadata("pairs_placed", static_cast<std::uint64_t>(result.pairs_placed));
  w.metadata("baseline_feasible", result.baseline_feasible ? "1" : "0");
  w.metadata("feasible", result.feasible ? "1" : "0");
  w.metadata("xi_final_n0", result.xi_final);
  w.metadata("key_bits_per_pulse_final", result.key_rate_final.key_bits_per_pulse);
  w.header({"itu_index", "wavelength_nm", "role", "marginal_xi_n0", "cumulative_xi_n0"});

  struct Row {
    int index;
    int rank;  // quantum 0, fwd 1, bwd 2, unused 3
    std::vector<std::string> fields;
  };
  std::vector<Row> rows;
  const ItuChannel& q = req.system.quantum_channel;
  rows.push_back({q.index, 0,
                  {CsvWriter::num(static_cast<std::uint64_t>(q.index)),
                   CsvWriter::num(q.wavelength_nm), "quantum", "0", "0"}});
  for (const AllocationResult::Placed& p : result.chosen) {
    rows.push_back({p.itu.index, p.direction == Direction::Forward ? 1 : 2,
                    {CsvWriter::num(static_cast<std::uint64_t>(p.itu.index)),
                     CsvWriter::num(p.itu.wavelength_nm),
                     p.direction == Direction::Forward ? "fwd" : "bwd",
                     CsvWriter::num(p.marginal_xi), CsvWriter::num(p.cumulative_xi)}});
  }
  for (int idx : req.candidate_indices) {
    bool used = false;
    for (const AllocationResult::Placed& p : result.chosen) {
      if (p.itu.index == idx) used = true;
    }
    if (used) continue;
    const ItuChannel ch = itu_channel(idx);
    rows.push_back({idx, 3,
                    {CsvWriter::num(static_cast<std::uint64_t>(idx)),
                     CsvWriter::num(ch.wavelength_nm), "unused", "0", "0"}});
  }
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.index != b.index ? a.index < b.index : a.rank < b.rank;
  });
  for (const Row& r : rows) w.row(r.fields);
  emit(o, buf.str());

  if (!o.out_path.empty()) {
    std::printf("%d pairs placed, final xi %.6e N_0, key %.6e bits/pulse, %s\n",
                result.pairs_placed, result.xi_final,
                result.key_rate_final.key_bits_per_pulse,
                result.feasible ? "feasible" : "infeasible");
  }
  return result.feasible ? 0 : kExitInfeasible;
}

int cmd_simulate(const CommonOpts& o) {
  const ScenarioConfig cfg = load_config(o);
  AcquisitionConfig acq = cfg.estimation.cfg;
  acq.seed = cfg.seed;
  const double t_channel = channel_transmission(cfg.scenario.link, cfg.scenario.mux);
  const double xi_true = total_noise_budget(cfg.scenario, NoiseRef::AtAlice).total;
  const Session session =
      simulate_homodyne_session(cfg.scenario.system, t_channel, xi_true, acq);
  const EstimationResult est = estimate_t_xi(session, cfg.scenario.system);

  std::ostringstream buf;
  CsvWriter w(buf);
  write_meta(w, cfg, "simulate");
  w.metadata("t_true", t_channel);
  w.metadata("xi_true_n0", xi_true);
  w.metadata("estimate.t_hat", est.t_hat);
  w.metadata("estimate.xi_hat_n0", est.xi_hat);
  w.metadata("estimate.xi_hat_at_bob_n0", est.xi_hat_at_bob);
  w.metadata("estimate.n0_hat", est.n0_hat);
  w.metadata("estimate.std_xi_n0", est.std_xi);
  w.metadata("estimate.n_used", est.n_used);
  w.metadata("estimate.n_shot", est.n_shot);
  w.metadata("estimate.t_flagged", est.t_flagged ? "1" : "0");
  w.header({"block_index", "kind", "variance", "covariance"});
  for (const BlockRecord& b : session.blocks) {
    w.row({CsvWriter::num(b.index), b.shot ? "shot" : "signal", CsvWriter::num(b.variance),
           CsvWriter::num(b.covariance)});
  }
  emit(o, buf.str());

  if (!o.out_path.empty()) {
    std::printf("t_hat %.6f (true %.6f), xi_hat %.6e N_0 (true %.6e), sigma %.3e\n",
                est.t_hat, t_channel, est.xi_hat, xi_true, est.std_xi);
  }
  return 0;
}

std::vector<RamanMeasurement> read_measurements(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open measurement file");
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  std::vector<RamanMeasurement> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != "pump_nm,length_km,direction,power_in_mw,scattered_mw") {
        throw ScenarioError(path + ":" + std::to_string(line_no) +
                            ": expected header pump_nm,length_km,direction,power_in_mw,"
                            "scattered_mw");
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string f[5];
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(row, f[i], ',')) {
        throw ScenarioError(path + ":" + std::to_string(line_no) + ": malformed row");
      }
    }
    RamanMeasurement m;
    try {
      m.pump_nm = std::stod(f[0]);
      m.length_km = std::stod(f[1]);
      m.power_in_mw = std::stod(f[3]);
      m.scattered_mw = std::stod(f[4]);
    } catch (const std::exception&) {
      throw ScenarioError(path + ":" + std::to_string(line_no) + ": malformed number");
    }
    if (f[2] == "forward") m.direction = Direction::Forward;
    else if (f[2] == "backward") m.direction = Direction::Backward;
    else throw ScenarioError(path + ":" + std::to_string(line_no) + ": bad direction");
    out.push_back(m);
  }
  if (!header_seen) throw ScenarioError(path + ": empty measurement file");
  return out;
}

int cmd_fit_raman(const CommonOpts& o, const std::string& data_path, double band_nm) {
  const ScenarioConfig cfg = load_config(o);
  const std::vector<RamanMeasurement> measurements = read_measurements(data_path);
  const RamanProfile fitted =
      fit_raman_coefficient(measurements, cfg.scenario.link, band_nm,
                            cfg.scenario.system.quantum_channel.wavelength_nm);

  std::ostringstream buf;
  CsvWriter w(buf);
  write_meta(w, cfg, "fit-raman");
  w.metadata("data", data_path);
  w.metadata("band_nm", band_nm);
  w.metadata("n_measurements", static_cast<std::uint64_t>(measurements.size()));
  w.header({"pump_nm", "quantum_nm", "beta_per_km_nm"});
  for (const RamanProfile::Entry& e : fitted.entries) {
    w.row({CsvWriter::num(e.pump_nm), CsvWriter::num(e.quantum_nm),
           CsvWriter::num(e.beta_per_km_nm)});
  }
  emit(o, buf.str());
  return 0;
}

int cmd_plot_stub(const CommonOpts& o, const std::string& kind) {
  std::ostringstream buf;
  buf << "#!/usr/bin/env python3\n"
      << "# Plotting stub for qkd-coexist '" << kind << "' CSV output.\n"
      << "import csv, sys\n"
      << "import matplotlib.pyplot as plt\n\n"
      << "rows = [r for r in csv.reader(open(sys.argv[1]))\n"
      << "        if r and not r[0].startswith('#')]\n"
      << "head, data = rows[0], rows[1:]\n"
      << "col = {name: i for i, name in enumerate(head)}\n\n";
  if (kind == "sweep") {
    buf << "x = [float(r[col['x']]) for r in data]\n"
        << "plt.plot(x, [float(r[col['xi_total_n0']]) for r in data], label='xi_total')\n"
        << "plt.plot(x, [float(r[col['threshold_xi_n0']]) for r in data],\n"
        << "         ls='--', label='null-key threshold')\n"
        << "plt.xlabel('sweep axis'); plt.ylabel('excess noise [N_0]')\n";
  } else if (kind == "budget") {
    buf << "data = [r for r in data if r[col['source']] != 'total']\n"
        << "plt.bar([r[col['source']] for r in data],\n"
        << "        [float(r[col['xi_n0']]) for r in data])\n"
        << "plt.yscale('log'); plt.ylabel('excess noise [N_0]'); plt.xticks(rotation=45)\n";
  } else if (kind == "allocation") {
    buf << "colors = {'quantum': 'k', 'fwd': 'r', 'bwd': 'g', 'unused': '0.8'}\n"
        << "for r in data:\n"
        << "    plt.bar(int(r[col['itu_index']]), 1, color=colors[r[col['role']]])\n"
        << "plt.xlabel('ITU channel index')\n";
  } else if (kind == "blocks") {
    buf << "for kind_name, marker in (('shot', '.'), ('signal', 'x')):\n"
        << "    sel = [r for r in data if r[col['kind']] == kind_name]\n"
        << "    plt.plot([int(r[col['block_index']]) for r in sel],\n"
        << "             [float(r[col['variance']]) for r in sel], marker,\n"
        << "             label=kind_name)\n"
        << "plt.xlabel('block'); plt.ylabel('variance [N_0]')\n";
  } else {
    throw ScenarioError("plot-stub: unknown kind '" + kind +
                        "' (sweep, budget, allocation, blocks)");
  }
  buf << "plt.legend(); plt.tight_layout(); plt.show()\n";
  emit(o, buf.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CV-QKD / DWDM coexistence simulator"};
  app.require_subcommand(1);

  CommonOpts budget_o, keyrate_o, sweep_o, allocate_o, simulate_o, fit_o, plot_o;
  CLI::App* budget = app.add_subcommand("budget", "per-source excess-noise budget");
  add_common(budget, budget_o);
  CLI::App* keyrate = app.add_subcommand("keyrate", "worst-case secret key rate");
  add_common(keyrate, keyrate_o);
  CLI::App* sweep = app.add_subcommand("sweep", "key rate vs power or distance");
  add_common(sweep, sweep_o);
  CLI::App* allocate_cmd = app.add_subcommand("allocate", "greedy DWDM channel allocation");
  add_common(allocate_cmd, allocate_o);
  CLI::App* simulate = app.add_subcommand("simulate", "homodyne acquisition Monte Carlo");
  add_common(simulate, simulate_o);
  CLI::App* fit = app.add_subcommand("fit-raman", "fit scattering coefficients");
  add_common(fit, fit_o);
  std::string fit_data;
  double fit_band_nm = 0.8;
  fit->add_option("--data", fit_data, "measurement CSV")->required();
  fit->add_option("--band-nm", fit_band_nm, "detection bandwidth, nm");
  CLI::App* plot = app.add_subcommand("plot-stub", "emit a plotting script for a CSV kind");
  add_common(plot, plot_o);
  std::string plot_kind;
  plot->add_option("kind", plot_kind, "sweep|budget|allocation|blocks")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (budget->parsed()) return cmd_budget(budget_o);
    if (keyrate->parsed()) return cmd_keyrate(keyrate_o);
    if (sweep->parsed()) return cmd_sweep(sweep_o);
    if (allocate_cmd->parsed()) return cmd_allocate(allocate_o);
    if (simulate->parsed()) return cmd_simulate(simulate_o);
    if (fit->parsed()) return cmd_fit_raman(fit_o, fit_data, fit_band_nm);
    if (plot->parsed()) return cmd_plot_stub(plot_o, plot_kind);
  } catch (const ScenarioError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitValidation;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInfeasible;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return 1;
  }
  return 0;
}
