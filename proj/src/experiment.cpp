#include "refsim/experiment.hpp"

#include <atomic>
#include <charconv>
#include <exception>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace refsim {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  while (true) {
    const std::size_t comma = v.find(',');
    const std::string_view item = trim(v.substr(0, comma));
    if (!item.empty()) out.emplace_back(item);
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
T parse_integer(std::string_view v) {
  T out{};
  const char* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError("expected an integer, got '" + std::string(v) + "'");
  return out;
}

double parse_real(std::string_view v) {
  // from_chars for double is missing from older libstdc++; strtod on a copy.
  const std::string s(v);
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ConfigError("expected a number, got '" + s + "'");
  return d;
}

bool parse_bool(std::string_view v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw ConfigError("expected a boolean, got '" + std::string(v) + "'");
}

std::string basename_of(const std::string& path) {
  const std::size_t slash = path.find_last_of('/');
  return slash == std::string::npos ? path : path.substr(slash + 1);
}

using Setter = std::function<void(ExperimentConfig&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = [] {
    std::map<std::string, Setter, std::less<>> t;
    auto int_field = [&t](const std::string& key, auto member_ptr_getter) {
      t[key] = [member_ptr_getter](ExperimentConfig& c, std::string_view v) {
        member_ptr_getter(c) = parse_integer<int>(v);
      };
    };
    auto real_field = [&t](const std::string& key, auto getter) {
      t[key] = [getter](ExperimentConfig& c, std::string_view v) { getter(c) = parse_real(v); };
    };

    t["system.cores"] = [](ExperimentConfig& c, std::string_view v) { c.base.cores = parse_integer<int>(v); };
    t["system.warmup_cycles"] = [](ExperimentConfig& c, std::string_view v) {
      c.base.warmup_cycles = parse_integer<Cycle>(v);
    };
    t["system.measured_cycles"] = [](ExperimentConfig& c, std::string_view v) {
      c.base.measured_cycles = parse_integer<Cycle>(v);
    };
    t["system.seed"] = [](ExperimentConfig& c, std::string_view v) {
      c.base.seed = parse_integer<std::uint64_t>(v);
    };
    t["system.policy"] = [](ExperimentConfig& c, std::string_view v) {
      std::vector<PolicyKind> kinds;
      for (const std::string& name : split_list(v)) kinds.push_back(parse_policy(name));
      if (kinds.empty()) throw ConfigError("empty policy list");
      c.policies = kinds;
      c.base.policy = kinds.front();
    };
    t["system.density"] = [](ExperimentConfig& c, std::string_view v) {
      std::vector<int> ds;
      for (const std::string& d : split_list(v)) {
        const int g = parse_integer<int>(d);
        density_profile(g);
        ds.push_back(g);
      }
      if (ds.empty()) throw ConfigError("empty density list");
      c.densities = ds;
      c.base.density_gbit = ds.front();
    };
    real_field("system.retention_ms", [](ExperimentConfig& c) -> double& { return c.base.retention_ms; });
    t["system.translation"] = [](ExperimentConfig& c, std::string_view v) {
      if (v == "random") c.base.page_translation = true;
      else if (v == "none") c.base.page_translation = false;
      else throw ConfigError("expected random or none, got '" + std::string(v) + "'");
    };
    t["system.address_order"] = [](ExperimentConfig& c, std::string_view v) {
      c.base.address_order = parse_address_order(v);
    };
    int_field("system.jobs", [](ExperimentConfig& c) -> int& { return c.jobs; });
    t["system.alone_policy"] = [](ExperimentConfig& c, std::string_view v) {
      if (v == "same") c.alone_policy.reset();
      else c.alone_policy = parse_policy(v);
    };
    t["system.oracle_check"] = [](ExperimentConfig& c, std::string_view v) { c.oracle_check = parse_bool(v); };

    int_field("geometry.channels", [](ExperimentConfig& c) -> int& { return c.base.geometry.channels; });
    int_field("geometry.ranks", [](ExperimentConfig& c) -> int& { return c.base.geometry.ranks_per_channel; });
    int_field("geometry.banks", [](ExperimentConfig& c) -> int& { return c.base.geometry.banks_per_rank; });
    int_field("geometry.subarrays", [](ExperimentConfig& c) -> int& { return c.base.geometry.subarrays_per_bank; });
    int_field("geometry.rows", [](ExperimentConfig& c) -> int& { return c.base.geometry.rows_per_bank; });
    int_field("geometry.columns", [](ExperimentConfig& c) -> int& { return c.base.geometry.columns_per_row; });
    int_field("geometry.cacheline_bytes", [](ExperimentConfig& c) -> int& { return c.base.geometry.cacheline_bytes; });

    real_field("timing.tck", [](ExperimentConfig& c) -> double& { return c.base.raw.tCK; });
    real_field("timing.trcd", [](ExperimentConfig& c) -> double& { return c.base.raw.tRCD; });
    real_field("timing.trp", [](ExperimentConfig& c) -> double& { return c.base.raw.tRP; });
    real_field("timing.tcl", [](ExperimentConfig& c) -> double& { return c.base.raw.tCL; });
    real_field("timing.tcwl", [](ExperimentConfig& c) -> double& { return c.base.raw.tCWL; });
    real_field("timing.tras", [](ExperimentConfig& c) -> double& { return c.base.raw.tRAS; });
    real_field("timing.trrd", [](ExperimentConfig& c) -> double& { return c.base.raw.tRRD; });
    real_field("timing.tfaw", [](ExperimentConfig& c) -> double& { return c.base.raw.tFAW; });
    real_field("timing.twtr", [](ExperimentConfig& c) -> double& { return c.base.raw.tWTR; });
    real_field("timing.trtp", [](ExperimentConfig& c) -> double& { return c.base.raw.tRTP; });
    real_field("timing.twr", [](ExperimentConfig& c) -> double& { return c.base.raw.tWR; });
    real_field("timing.trtw", [](ExperimentConfig& c) -> double& { return c.base.raw.tRTW; });
    int_field("timing.tburst", [](ExperimentConfig& c) -> int& { return c.base.raw.tBURST_cycles; });
    real_field("timing.rfc_ab_to_pb", [](ExperimentConfig& c) -> double& { return c.base.raw.rfc_ab_to_pb; });
    int_field("timing.refresh_slots", [](ExperimentConfig& c) -> int& { return c.base.raw.refresh_slots; });

    real_field("currents.i_act", [](ExperimentConfig& c) -> double& { return c.base.currents.i_act; });
    real_field("currents.i_ref_ab", [](ExperimentConfig& c) -> double& { return c.base.currents.i_ref_ab; });
    real_field("currents.i_ref_pb", [](ExperimentConfig& c) -> double& { return c.base.currents.i_ref_pb; });
    real_field("currents.i_bg_active", [](ExperimentConfig& c) -> double& { return c.base.currents.i_bg_active; });
    real_field("currents.i_bg_precharged",
               [](ExperimentConfig& c) -> double& { return c.base.currents.i_bg_precharged; });
    real_field("currents.i_rd", [](ExperimentConfig& c) -> double& { return c.base.currents.i_rd; });
    real_field("currents.i_wr", [](ExperimentConfig& c) -> double& { return c.base.currents.i_wr; });
    real_field("currents.vdd", [](ExperimentConfig& c) -> double& { return c.base.currents.vdd; });

    int_field("controller.read_queue", [](ExperimentConfig& c) -> int& { return c.base.controller.read_queue_capacity; });
    int_field("controller.write_queue", [](ExperimentConfig& c) -> int& { return c.base.controller.write_queue_capacity; });
    int_field("controller.high_watermark", [](ExperimentConfig& c) -> int& { return c.base.controller.high_watermark; });
    int_field("controller.low_watermark", [](ExperimentConfig& c) -> int& { return c.base.controller.low_watermark; });
    t["controller.drain_writes_when_idle"] = [](ExperimentConfig& c, std::string_view v) {
      c.base.controller.drain_writes_when_idle = parse_bool(v);
    };

    int_field("core.issue_width", [](ExperimentConfig& c) -> int& { return c.base.core.issue_width; });
    int_field("core.window", [](ExperimentConfig& c) -> int& { return c.base.core.window_capacity; });
    int_field("core.mshrs", [](ExperimentConfig& c) -> int& { return c.base.core.mshr_capacity; });
    int_field("core.clock_ratio", [](ExperimentConfig& c) -> int& { return c.base.core.clock_ratio; });

    t["workload.type"] = [](ExperimentConfig& c, std::string_view v) {
      std::vector<std::string> kinds = split_list(v);
      for (const std::string& k : kinds)
        if (k != "random" && k != "stream") throw ConfigError("expected random or stream, got '" + k + "'");
      if (kinds.empty()) throw ConfigError("empty workload type list");
      c.workload_kinds = kinds;
    };
    t["workload.trace"] = [](ExperimentConfig& c, std::string_view v) { c.workload_traces = split_list(v); };
    t["workload.footprint_mb"] = [](ExperimentConfig& c, std::string_view v) {
      c.workload_template.footprint_bytes = parse_integer<std::uint64_t>(v) << 20;
    };
    real_field("workload.read_fraction", [](ExperimentConfig& c) -> double& { return c.workload_template.read_fraction; });
    real_field("workload.intensity", [](ExperimentConfig& c) -> double& { return c.workload_template.intensity; });
    t["workload.stride"] = [](ExperimentConfig& c, std::string_view v) {
      c.workload_template.stride = parse_integer<std::uint64_t>(v);
    };
    t["workload.name"] = [](ExperimentConfig& c, std::string_view v) { c.workload_name = std::string(v); };
    return t;
  }();
  return table;
}

void rebuild_workload(ExperimentConfig& c) {
  const bool traces = !c.workload_traces.empty();
  c.base.workload = make_mix(traces ? c.workload_traces : c.workload_kinds, traces,
                             c.workload_template, c.base.cores);
  if (!c.workload_name.empty()) c.base.workload.name = c.workload_name;
}

}  // namespace

WorkloadMix make_mix(const std::vector<std::string>& kinds_or_traces, bool traces,
                     const WorkloadSpec& tmpl, int cores) {
  if (kinds_or_traces.empty()) throw ConfigError("empty workload list");
  WorkloadMix mix;
  std::vector<std::string> names;
  for (int c = 0; c < std::max(cores, 1); ++c) {
    const std::string& item = kinds_or_traces[static_cast<std::size_t>(c) % kinds_or_traces.size()];
    WorkloadSpec spec = tmpl;
    if (traces) {
      spec.kind = WorkloadKind::kTrace;
      spec.trace_path = item;
    } else if (item == "random") {
      spec.kind = WorkloadKind::kRandom;
    } else if (item == "stream") {
      spec.kind = WorkloadKind::kStream;
    } else {
      throw ConfigError("unknown synthetic workload '" + item + "'");
    }
    mix.per_core.push_back(spec);
  }
  for (const std::string& item : kinds_or_traces) {
    const std::string n = traces ? basename_of(item) : item;
    if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
  }
  for (std::size_t i = 0; i < names.size(); ++i) mix.name += (i ? "+" : "") + names[i];
  return mix;
}

ExperimentConfig default_experiment() {
  ExperimentConfig c;
  c.workload_template.kind = WorkloadKind::kRandom;
  c.workload_template.footprint_bytes = 256ULL << 20;
  c.workload_template.read_fraction = 0.8;
  c.workload_template.intensity = 10.0;
  c.alone_policy = PolicyKind::kNoRefresh;
  rebuild_workload(c);
  return c;
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value) {
  std::string full(key);
  if (full.find('.') == std::string::npos) full = "system." + full;
  const auto it = setters().find(full);
  if (it == setters().end()) throw ConfigError("unknown key '" + full + "'");
  try {
    it->second(config, trim(value));
  } catch (const ConfigError& e) {
    throw ConfigError("invalid value for '" + full + "': " + e.what());
  }
  rebuild_workload(config);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c = default_experiment();
  std::string raw;
  std::string section = "system";
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto fail = [line_no](const std::string& what) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + what);
    };
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) fail("empty section name");
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) fail("missing key");
    try {
      apply_setting(c, section + "." + std::string(key), value);
    } catch (const ConfigError& e) {
      fail(e.what());
    }
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  try {
    return parse_config(in);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------

namespace {

struct Cell {
  std::size_t mix;
  PolicyKind policy;
  int density;
};

struct SoloTask {
  std::string key;
  std::size_t mix;
  int core;
  PolicyKind policy;
  int density;
};

std::string cell_name(const Cell& cell, const WorkloadMix& mix) {
  return std::string(to_string(cell.policy)) + "/" + std::to_string(cell.density) + "Gb/" + mix.name;
}

std::string suffixed(const std::string& path, const std::string& tag, bool many) {
  if (!many || path.empty()) return path;
  const std::size_t dot = path.find_last_of('.');
  const std::size_t slash = path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + "." + tag;
  return path.substr(0, dot) + "." + tag + path.substr(dot);
}

std::string tag_of(const Cell& cell, const WorkloadMix& mix) {
  std::string t = std::string(to_string(cell.policy)) + "-" + std::to_string(cell.density) + "-" + mix.name;
  for (char& ch : t)
    if (ch == '/' || ch == ' ') ch = '_';
  return t;
}

[[noreturn]] void rethrow_named(const std::string& cell, std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const ConfigError& e) {
    throw ConfigError(cell + ": " + e.what());
  } catch (const TraceParseError& e) {
    throw ConfigError(cell + ": " + e.what());
  } catch (const AuditError& e) {
    throw AuditError(cell + ": " + e.what());
  } catch (const std::exception& e) {
    throw SimulationError(cell + ": " + e.what());
  }
}

/// Runs task(i) for i in [0, n) on `jobs` threads; results land by index.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& task) {
  if (jobs <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), n);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) task(i);
    });
  }
  for (std::thread& t : pool) t.join();
}

SimConfig cell_config(const ExperimentConfig& config, const WorkloadMix& mix, PolicyKind policy,
                      int density) {
  SimConfig sc = config.base;
  sc.workload = mix;
  sc.policy = policy;
  sc.density_gbit = density;
  return sc;
}

void check_audit(const RunResult& r) {
  if (r.audited && !r.audit.pass) {
    throw AuditError("retention audit failed: " + std::to_string(r.audit.stale.size()) +
                     " stale row groups, max lateness " + std::to_string(r.audit.max_lateness) +
                     " cycles");
  }
}

}  // namespace

SweepResult run_experiment(const ExperimentConfig& config, const SweepOutputs& outputs) {
  std::vector<WorkloadMix> mixes = config.workloads;
  if (mixes.empty()) mixes.push_back(config.base.workload);
  for (const WorkloadMix& m : mixes)
    if (m.per_core.empty()) throw ConfigError("workload '" + m.name + "' has no cores");
  if (config.policies.empty() || config.densities.empty()) throw ConfigError("empty sweep");

  std::vector<Cell> cells;
  for (std::size_t m = 0; m < mixes.size(); ++m)
    for (PolicyKind p : config.policies)
      for (int d : config.densities) cells.push_back({m, p, d});
  const bool many = cells.size() > 1;

  // Distinct solo runs: alone IPC depends on the core's trace, the policy
  // and the density only.
  auto alone_of = [&](PolicyKind p) { return config.alone_policy.value_or(p); };
  std::vector<SoloTask> solo_tasks;
  std::map<std::string, std::size_t> solo_index;
  std::vector<std::vector<std::size_t>> cell_solo(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& cell = cells[i];
    const WorkloadMix& mix = mixes[cell.mix];
    for (int core = 0; core < config.base.cores; ++core) {
      const WorkloadSpec& spec = mix.per_core[static_cast<std::size_t>(core) % mix.per_core.size()];
      const std::string key = spec.key() + "|" + std::to_string(workload_seed(config.base.seed, core, spec)) +
                              "|" + std::string(to_string(alone_of(cell.policy))) + "|" + std::to_string(cell.density);
      auto [it, inserted] = solo_index.emplace(key, solo_tasks.size());
      if (inserted) solo_tasks.push_back({key, cell.mix, core, alone_of(cell.policy), cell.density});
      cell_solo[i].push_back(it->second);
    }
  }

  std::vector<double> alone(solo_tasks.size(), 0.0);
  std::vector<std::exception_ptr> solo_errors(solo_tasks.size());
  parallel_for(solo_tasks.size(), config.jobs, [&](std::size_t i) {
    const SoloTask& t = solo_tasks[i];
    try {
      const SimConfig sc = cell_config(config, mixes[t.mix], t.policy, t.density);
      RunOptions opts;
      opts.only_cores = {t.core};
      const RunResult r = run_simulation(sc, opts);
      check_audit(r);
      alone[i] = r.ipc.front();
    } catch (...) {
      solo_errors[i] = std::current_exception();
    }
  });
  for (std::size_t i = 0; i < solo_tasks.size(); ++i) {
    if (solo_errors[i]) {
      const SoloTask& t = solo_tasks[i];
      rethrow_named(std::string(to_string(t.policy)) + "/" + std::to_string(t.density) + "Gb/" +
                        mixes[t.mix].name + " solo core " + std::to_string(t.core),
                    solo_errors[i]);
    }
  }

  SweepResult result;
  result.solo_runs = solo_tasks.size();
  result.rows.resize(cells.size());
  std::vector<std::exception_ptr> errors(cells.size());
  std::mutex io_mutex;
  parallel_for(cells.size(), config.jobs, [&](std::size_t i) {
    const Cell& cell = cells[i];
    const WorkloadMix& mix = mixes[cell.mix];
    try {
      const SimConfig sc = cell_config(config, mix, cell.policy, cell.density);
      RunOptions opts;
      opts.record_commands = config.oracle_check || !outputs.cmd_trace_path.empty();
      const RunResult r = run_simulation(sc, opts);
      const std::string tag = tag_of(cell, mix);

      if (!outputs.refresh_log_path.empty()) {
        std::ofstream out(suffixed(outputs.refresh_log_path, tag, many));
        if (!out) throw ConfigError("cannot write refresh log");
        write_refresh_log(out, r.refresh_log, sc.geometry);
      }
      if (!outputs.latency_histogram_path.empty()) {
        std::ofstream out(suffixed(outputs.latency_histogram_path, tag, many));
        if (!out) throw ConfigError("cannot write latency histogram");
        write_latency_histogram(out, r.stats);
      }
      if (!outputs.cmd_trace_path.empty()) {
        std::ofstream out(suffixed(outputs.cmd_trace_path, tag, many));
        if (!out) throw ConfigError("cannot write command trace");
        for (const auto& h : r.command_history) write_command_trace(out, h);
      }
      check_audit(r);
      if (opts.record_commands) {
        for (std::size_t ch = 0; ch < r.command_history.size(); ++ch) {
          const auto violations = oracle_check(r.command_history[ch], r.engine_configs[ch]);
          if (!violations.empty()) {
            throw AuditError("timing oracle: " + std::to_string(violations.size()) +
                             " violations on channel " + std::to_string(ch) + ", first: " +
                             violations.front().detail);
          }
        }
      }

      std::vector<double> alone_ipc;
      for (std::size_t k = 0; k < r.core_ids.size(); ++k)
        alone_ipc.push_back(alone[cell_solo[i][static_cast<std::size_t>(r.core_ids[k])]]);
      ResultRow row;
      row.policy = std::string(to_string(cell.policy));
      row.density_gbit = cell.density;
      row.workload = mix.name;
      row.seed = config.base.seed;
      row.ws = weighted_speedup(r.ipc, alone_ipc);
      row.hs = harmonic_speedup(r.ipc, alone_ipc);
      row.max_slowdown = max_slowdown(r.ipc, alone_ipc);
      row.energy_per_access_pj = r.energy.per_access;
      row.refresh_count = r.stats.refresh_count();
      row.postponed = r.stats.refresh_postponed;
      row.pulled_in = r.stats.refresh_pulled;
      row.forced = r.stats.refresh_forced;
      row.subarray_conflicts = r.stats.subarray_conflicts;
      row.avg_read_latency_cycles = r.stats.avg_read_latency();
      result.rows[i] = row;
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (std::size_t i = 0; i < cells.size(); ++i)
    if (errors[i]) rethrow_named(cell_name(cells[i], mixes[cells[i].mix]), errors[i]);

  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Cell& cell = cells[i];
    for (int core = 0; core < config.base.cores; ++core) {
      SoloRow s;
      s.policy = std::string(to_string(alone_of(cell.policy)));
      s.density_gbit = cell.density;
      s.workload = mixes[cell.mix].name;
      s.core = core;
      s.alone_ipc = alone[cell_solo[i][static_cast<std::size_t>(core)]];
      result.solo.push_back(s);
    }
  }
  return result;
}

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "policy,density_gbit,workload,seed,ws,hs,max_slowdown,energy_per_access_pj,refresh_count,"
         "postponed,pulled_in,forced,subarray_conflicts,avg_read_latency_cycles\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(6);
  for (const ResultRow& r : rows) {
    out << r.policy << ',' << r.density_gbit << ',' << r.workload << ',' << r.seed << ',' << r.ws
        << ',' << r.hs << ',' << r.max_slowdown << ',' << r.energy_per_access_pj << ','
        << r.refresh_count << ',' << r.postponed << ',' << r.pulled_in << ',' << r.forced << ','
        << r.subarray_conflicts << ',' << r.avg_read_latency_cycles << '\n';
  }
  out.flags(flags);
  out.precision(precision);
}

void write_solo_csv(std::ostream& out, const std::vector<SoloRow>& rows) {
  out << "policy,density_gbit,workload,core,alone_ipc\n";
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(6);
  for (const SoloRow& r : rows)
    out << r.policy << ',' << r.density_gbit << ',' << r.workload << ',' << r.core << ','
        << r.alone_ipc << '\n';
  out.flags(flags);
  out.precision(precision);
}

void write_latency_histogram(std::ostream& out, const SimStats& stats) {
  out << "latency_cycles,count\n";
  for (const auto& [latency, count] : stats.read_latency_histogram) out << latency << ',' << count << '\n';
}

}  // namespace refsim
