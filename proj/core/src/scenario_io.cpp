#include "cvqkd/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "cvqkd/csv.hpp"

namespace cvqkd {
namespace {

struct Ctx {
  std::string path;
  int line = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw ScenarioError(path + ":" + std::to_string(line) + ": " + msg);
  }
};

struct Value {
  enum class Kind { Str, Num, Bool };
  Kind kind = Kind::Num;
  std::string str;
  double num = 0.0;
  bool flag = false;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Strips an inline comment, honoring quoted strings.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

Value parse_value(const std::string& raw, const Ctx& ctx) {
  Value v;
  if (raw.empty()) ctx.fail("missing value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') ctx.fail("unterminated string");
    v.kind = Value::Kind::Str;
    v.str = raw.substr(1, raw.size() - 2);
    if (v.str.find('"') != std::string::npos) ctx.fail("embedded quote in string");
    return v;
  }
  if (raw == "true" || raw == "false") {
    v.kind = Value::Kind::Bool;
    v.flag = raw == "true";
    return v;
  }
  char* end = nullptr;
  v.num = std::strtod(raw.c_str(), &end);
  if (end != raw.c_str() + raw.size()) ctx.fail("malformed value '" + raw + "'");
  v.kind = Value::Kind::Num;
  return v;
}

double as_double(const Value& v, const std::string& key, const Ctx& ctx) {
  if (v.kind != Value::Kind::Num) ctx.fail("key '" + key + "' expects a number");
  return v.num;
}

std::string as_string(const Value& v, const std::string& key, const Ctx& ctx) {
  if (v.kind != Value::Kind::Str) ctx.fail("key '" + key + "' expects a quoted string");
  return v.str;
}

bool as_bool(const Value& v, const std::string& key, const Ctx& ctx) {
  if (v.kind != Value::Kind::Bool) ctx.fail("key '" + key + "' expects true or false");
  return v.flag;
}

long long as_int(const Value& v, const std::string& key, const Ctx& ctx) {
  double d = as_double(v, key, ctx);
  if (!(std::floor(d) == d) || std::abs(d) > 9.007199254740992e15)
    ctx.fail("key '" + key + "' expects an integer");
  return static_cast<long long>(d);
}

std::uint64_t as_u64(const Value& v, const std::string& key, const Ctx& ctx) {
  long long i = as_int(v, key, ctx);
  if (i < 0) ctx.fail("key '" + key + "' expects a non-negative integer");
  return static_cast<std::uint64_t>(i);
}

Direction parse_direction(const Value& v, const std::string& key, const Ctx& ctx) {
  std::string s = as_string(v, key, ctx);
  if (s == "forward") return Direction::Forward;
  if (s == "backward") return Direction::Backward;
  ctx.fail("key '" + key + "': expected \"forward\" or \"backward\", got \"" + s + "\"");
}

Modulation parse_modulation(const Value& v, const std::string& key, const Ctx& ctx) {
  std::string s = as_string(v, key, ctx);
  if (s == "continuous") return Modulation::Continuous;
  if (s == "ook") return Modulation::OnOffKeying;
  ctx.fail("key '" + key + "': expected \"continuous\" or \"ook\", got \"" + s + "\"");
}

ItuChannel checked_itu(long long index, const Ctx& ctx) {
  try {
    return itu_channel(static_cast<int>(index));
  } catch (const std::out_of_range& e) {
    ctx.fail(e.what());
  }
}

}  // namespace

const char* to_string(SweepSpec::Axis a) {
  switch (a) {
    case SweepSpec::Axis::PowerMw: return "power_mw";
    case SweepSpec::Axis::PowerDbm: return "power_dbm";
    case SweepSpec::Axis::DistanceKm: return "distance_km";
  }
  return "?";
}

void parse_scenario_into(const std::string& path, ScenarioConfig& config) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(path + ": cannot open scenario file");

  Ctx ctx{path, 0};
  std::string section;         // current [table]
  bool channels_reset = false; // first [[channels]] in this file replaces the list
  bool in_channel = false;
  bool channel_has_index = false;
  int channel_header_line = 0;
  WdmChannel cur;

  auto flush_channel = [&]() {
    if (!in_channel) return;
    if (!channel_has_index) {
      throw ScenarioError(path + ":" + std::to_string(channel_header_line) +
                          ": [[channels]] entry missing itu_index");
    }
    config.scenario.channels.push_back(cur);
    in_channel = false;
  };

  std::string line;
  while (std::getline(in, line)) {
    ++ctx.line;
    std::string body = trim(strip_comment(line));
    if (body.empty()) continue;

    if (body.size() >= 4 && body.substr(0, 2) == "[[" &&
        body.substr(body.size() - 2) == "]]") {
      std::string name = trim(body.substr(2, body.size() - 4));
      if (name != "channels") ctx.fail("unknown array section [[" + name + "]]");
      flush_channel();
      if (!channels_reset) {
        config.scenario.channels.clear();
        channels_reset = true;
      }
      cur = WdmChannel{};
      in_channel = true;
      channel_has_index = false;
      channel_header_line = ctx.line;
      section = "channels";
      continue;
    }
    if (body.front() == '[' && body.back() == ']') {
      std::string name = trim(body.substr(1, body.size() - 2));
      static const char* known[] = {"system",   "link",  "mux",        "amplifier",
                                    "finite_size", "sweep", "estimation", "allocate"};
      if (std::find_if(std::begin(known), std::end(known), [&](const char* k) {
            return name == k;
          }) == std::end(known)) {
        ctx.fail("unknown section [" + name + "]");
      }
      flush_channel();
      section = name;
      continue;
    }

    std::size_t eq = body.find('=');
    if (eq == std::string::npos) ctx.fail("expected key = value");
    std::string key = trim(body.substr(0, eq));
    Value val = parse_value(trim(body.substr(eq + 1)), ctx);
    if (key.empty()) ctx.fail("empty key");

    if (section.empty()) {
      if (key == "seed") {
        config.seed = as_u64(val, key, ctx);
      } else if (key == "raman_profile") {
        std::filesystem::path p = as_string(val, key, ctx);
        if (p.is_relative()) p = std::filesystem::path(path).parent_path() / p;
        config.raman_profile_path = p.string();
        config.scenario.raman = RamanProfile::from_csv(config.raman_profile_path);
      } else {
        ctx.fail("unknown top-level key '" + key + "'");
      }
    } else if (section == "system") {
      CvqkdSystem& s = config.scenario.system;
      if (key == "v_a") s.v_a = as_double(val, key, ctx);
      else if (key == "clock_hz") s.clock_hz = as_double(val, key, ctx);
      else if (key == "lo_photons") s.lo_photons = as_double(val, key, ctx);
      else if (key == "pulse_ns") s.pulse_ns = as_double(val, key, ctx);
      else if (key == "eta_b") s.eta_b = as_double(val, key, ctx);
      else if (key == "v_el") s.v_el = as_double(val, key, ctx);
      else if (key == "beta_rec") s.beta_rec = as_double(val, key, ctx);
      else if (key == "xi_system") s.xi_system = as_double(val, key, ctx);
      else if (key == "quantum_itu_index") s.quantum_channel = checked_itu(as_int(val, key, ctx), ctx);
      else ctx.fail("unknown key '" + key + "' in [system]");
    } else if (section == "link") {
      FiberLink& l = config.scenario.link;
      if (key == "length_km") l.length_km = as_double(val, key, ctx);
      else if (key == "alpha_db_per_km") l.alpha_db_per_km = as_double(val, key, ctx);
      else if (key == "n2_m2_per_mw") l.n2_m2_per_mw = as_double(val, key, ctx);
      else if (key == "a_eff_um2") l.a_eff_um2 = as_double(val, key, ctx);
      else ctx.fail("unknown key '" + key + "' in [link]");
    } else if (section == "mux") {
      MuxSpec& m = config.scenario.mux;
      if (key == "adjacent_isolation_db") m.adjacent_isolation_db = as_double(val, key, ctx);
      else if (key == "nonadjacent_isolation_db") m.nonadjacent_isolation_db = as_double(val, key, ctx);
      else if (key == "insertion_loss_db") m.insertion_loss_db = as_double(val, key, ctx);
      else if (key == "adm_insertion_loss_db") m.adm_insertion_loss_db = as_double(val, key, ctx);
      else if (key == "channel_spacing_ghz") m.channel_spacing_ghz = as_double(val, key, ctx);
      else ctx.fail("unknown key '" + key + "' in [mux]");
    } else if (section == "amplifier") {
      Amplifier& a = config.scenario.amplifier;
      if (key == "gain") a.gain = as_double(val, key, ctx);
      else if (key == "n_sp") a.n_sp = as_double(val, key, ctx);
      else ctx.fail("unknown key '" + key + "' in [amplifier]");
    } else if (section == "finite_size") {
      FiniteSizePolicy& f = config.finite_size;
      if (key == "n_samples") f.n_samples = as_double(val, key, ctx);
      else if (key == "sigmas") f.sigmas = as_double(val, key, ctx);
      else if (key == "duty") f.duty = as_double(val, key, ctx);
      else ctx.fail("unknown key '" + key + "' in [finite_size]");
    } else if (section == "channels") {
      if (key == "itu_index") {
        cur.itu = checked_itu(as_int(val, key, ctx), ctx);
        channel_has_index = true;
      } else if (key == "direction") {
        cur.direction = parse_direction(val, key, ctx);
      } else if (key == "power_dbm") {
        cur.launch_power_dbm = as_double(val, key, ctx);
      } else if (key == "modulation") {
        cur.modulation = parse_modulation(val, key, ctx);
      } else if (key == "ook_rate_hz") {
        cur.ook_rate_hz = as_double(val, key, ctx);
      } else {
        ctx.fail("unknown key '" + key + "' in [[channels]]");
      }
    } else if (section == "sweep") {
      SweepSpec& w = config.sweep;
      w.present = true;
      if (key == "axis") {
        std::string s = as_string(val, key, ctx);
        if (s == "power_mw") w.axis = SweepSpec::Axis::PowerMw;
        else if (s == "power_dbm") w.axis = SweepSpec::Axis::PowerDbm;
        else if (s == "distance_km") w.axis = SweepSpec::Axis::DistanceKm;
        else ctx.fail("key 'axis': expected \"power_mw\", \"power_dbm\" or \"distance_km\"");
      } else if (key == "from") w.from = as_double(val, key, ctx);
      else if (key == "to") w.to = as_double(val, key, ctx);
      else if (key == "steps") w.steps = static_cast<int>(as_int(val, key, ctx));
      else ctx.fail("unknown key '" + key + "' in [sweep]");
    } else if (section == "estimation") {
      EstimationSpec& e = config.estimation;
      e.present = true;
      if (key == "n_total_pulses") e.cfg.n_total_pulses = as_u64(val, key, ctx);
      else if (key == "block_pulses") e.cfg.block_pulses = as_u64(val, key, ctx);
      else if (key == "schedule") {
        std::string s = as_string(val, key, ctx);
        if (s == "alternating") e.cfg.schedule = CalibrationSchedule::Alternating;
        else if (s == "sequential") e.cfg.schedule = CalibrationSchedule::Sequential;
        else ctx.fail("key 'schedule': expected \"alternating\" or \"sequential\"");
      } else if (key == "drift") {
        std::string s = as_string(val, key, ctx);
        if (s == "none") e.cfg.drift = DriftModel::none();
        else if (s == "random_walk") e.cfg.drift = DriftModel::random_walk(e.cfg.drift.step_per_pulse > 0 ? e.cfg.drift.step_per_pulse : kDefaultDriftStepPerPulse);
        else ctx.fail("key 'drift': expected \"none\" or \"random_walk\"");
      } else if (key == "drift_step_per_pulse") {
        e.cfg.drift.step_per_pulse = as_double(val, key, ctx);
      } else ctx.fail("unknown key '" + key + "' in [estimation]");
    } else if (section == "allocate") {
      AllocateSpec& a = config.allocate;
      a.present = true;
      if (key == "candidate_min_index") a.candidate_min_index = static_cast<int>(as_int(val, key, ctx));
      else if (key == "candidate_max_index") a.candidate_max_index = static_cast<int>(as_int(val, key, ctx));
      else if (key == "forward_power_dbm") a.forward_power_dbm = as_double(val, key, ctx);
      else if (key == "backward_power_dbm") a.backward_power_dbm = as_double(val, key, ctx);
      else if (key == "objective") {
        std::string s = as_string(val, key, ctx);
        if (s == "min_noise") a.objective = AllocObjective::MinNoise;
        else if (s == "max_noise") a.objective = AllocObjective::MaxNoise;
        else ctx.fail("key 'objective': expected \"min_noise\" or \"max_noise\"");
      } else if (key == "mode") {
        std::string s = as_string(val, key, ctx);
        if (s == "max_pairs") a.mode = AllocationMode::max_pairs();
        else if (s == "fixed") a.mode.kind = AllocationMode::Kind::FixedPairs;
        else ctx.fail("key 'mode': expected \"max_pairs\" or \"fixed\"");
      } else if (key == "fixed_pairs") {
        a.mode.fixed_pairs = static_cast<int>(as_int(val, key, ctx));
      } else if (key == "paired") {
        a.paired = as_bool(val, key, ctx);
      } else ctx.fail("unknown key '" + key + "' in [allocate]");
    } else {
      ctx.fail("key '" + key + "' outside any section");
    }
  }
  flush_channel();
}

ScenarioConfig parse_scenario_file(const std::string& path) {
  ScenarioConfig config;
  parse_scenario_into(path, config);
  return config;
}

AllocationRequest build_allocation_request(const ScenarioConfig& config) {
  const AllocateSpec& a = config.allocate;
  AllocationRequest req;
  req.system = config.scenario.system;
  req.link = config.scenario.link;
  req.mux = config.scenario.mux;
  req.profile = config.scenario.raman;
  req.forward_power_dbm = a.forward_power_dbm;
  req.backward_power_dbm = a.backward_power_dbm;
  req.objective = a.objective;
  req.mode = a.mode;
  req.paired = a.paired;
  req.finite_size = config.finite_size;
  for (int idx : default_candidates(config.scenario.system.quantum_channel)) {
    if (idx >= a.candidate_min_index && idx <= a.candidate_max_index)
      req.candidate_indices.push_back(idx);
  }
  return req;
}

std::vector<std::pair<std::string, std::string>> resolved_config(const ScenarioConfig& config) {
  using P = std::pair<std::string, std::string>;
  std::vector<P> out;
  auto num = [](double v) { return CsvWriter::num(v); };
  const CvqkdSystem& s = config.scenario.system;
  const FiberLink& l = config.scenario.link;
  const MuxSpec& m = config.scenario.mux;

  out.emplace_back("seed", CsvWriter::num(config.seed));
  out.emplace_back("raman_profile",
                   config.raman_profile_path.empty() ? "flat" : config.raman_profile_path);
  out.emplace_back("system.v_a", num(s.v_a));
  out.emplace_back("system.clock_hz", num(s.clock_hz));
  out.emplace_back("system.lo_photons", num(s.lo_photons));
  out.emplace_back("system.pulse_ns", num(s.pulse_ns));
  out.emplace_back("system.eta_b", num(s.eta_b));
  out.emplace_back("system.v_el", num(s.v_el));
  out.emplace_back("system.beta_rec", num(s.beta_rec));
  out.emplace_back("system.xi_system", num(s.xi_system));
  out.emplace_back("system.quantum_itu_index", std::to_string(s.quantum_channel.index));
  out.emplace_back("system.quantum_wavelength_nm", num(s.quantum_channel.wavelength_nm));
  out.emplace_back("link.length_km", num(l.length_km));
  out.emplace_back("link.alpha_db_per_km", num(l.alpha_db_per_km));
  out.emplace_back("link.n2_m2_per_mw", num(l.n2_m2_per_mw));
  out.emplace_back("link.a_eff_um2", num(l.a_eff_um2));
  out.emplace_back("mux.adjacent_isolation_db", num(m.adjacent_isolation_db));
  out.emplace_back("mux.nonadjacent_isolation_db", num(m.nonadjacent_isolation_db));
  out.emplace_back("mux.insertion_loss_db", num(m.insertion_loss_db));
  out.emplace_back("mux.adm_insertion_loss_db", num(m.adm_insertion_loss_db));
  out.emplace_back("mux.channel_spacing_ghz", num(m.channel_spacing_ghz));
  out.emplace_back("amplifier.gain", num(config.scenario.amplifier.gain));
  out.emplace_back("amplifier.n_sp", num(config.scenario.amplifier.n_sp));
  out.emplace_back("finite_size.n_samples", num(config.finite_size.n_samples));
  out.emplace_back("finite_size.sigmas", num(config.finite_size.sigmas));
  out.emplace_back("finite_size.duty", num(config.finite_size.duty));
  for (std::size_t i = 0; i < config.scenario.channels.size(); ++i) {
    const WdmChannel& ch = config.scenario.channels[i];
    std::string pre = "channels." + std::to_string(i) + ".";
    out.emplace_back(pre + "itu_index", std::to_string(ch.itu.index));
    out.emplace_back(pre + "direction", to_string(ch.direction));
    out.emplace_back(pre + "power_dbm", num(ch.launch_power_dbm));
    out.emplace_back(pre + "modulation", to_string(ch.modulation));
    out.emplace_back(pre + "ook_rate_hz", num(ch.ook_rate_hz));
  }
  if (config.sweep.present) {
    out.emplace_back("sweep.axis", to_string(config.sweep.axis));
    out.emplace_back("sweep.from", num(config.sweep.from));
    out.emplace_back("sweep.to", num(config.sweep.to));
    out.emplace_back("sweep.steps", std::to_string(config.sweep.steps));
  }
  if (config.estimation.present) {
    const AcquisitionConfig& c = config.estimation.cfg;
    out.emplace_back("estimation.n_total_pulses", CsvWriter::num(c.n_total_pulses));
    out.emplace_back("estimation.block_pulses", CsvWriter::num(c.block_pulses));
    out.emplace_back("estimation.schedule", to_string(c.schedule));
    out.emplace_back("estimation.drift", to_string(c.drift.kind));
    out.emplace_back("estimation.drift_step_per_pulse", num(c.drift.step_per_pulse));
  }
  if (config.allocate.present) {
    const AllocateSpec& a = config.allocate;
    out.emplace_back("allocate.candidate_min_index", std::to_string(a.candidate_min_index));
    out.emplace_back("allocate.candidate_max_index", std::to_string(a.candidate_max_index));
    out.emplace_back("allocate.forward_power_dbm", num(a.forward_power_dbm));
    out.emplace_back("allocate.backward_power_dbm", num(a.backward_power_dbm));
    out.emplace_back("allocate.objective", to_string(a.objective));
    out.emplace_back("allocate.mode", a.mode.kind == AllocationMode::Kind::MaxPairs
                                          ? "max_pairs"
                                          : "fixed");
    if (a.mode.kind == AllocationMode::Kind::FixedPairs)
      out.emplace_back("allocate.fixed_pairs", std::to_string(a.mode.fixed_pairs));
    out.emplace_back("allocate.paired", a.paired ? "true" : "false");
  }
  return out;
}

}  // namespace cvqkd
