#include "refsim/system.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace refsim {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

class System final : public MemoryPort {
 public:
  System(const SimConfig& config, const RunOptions& options)
      : config_(config),
        map_(config.geometry, config.address_order),
        pages_(config.geometry.capacity_bytes(), config.seed, config.page_translation) {
    const DensityProfile profile = density_profile(config.density_gbit, config.retention_ms);
    timing_ = derive_timing(profile, config.geometry, config.raw, config.currents, config.policy);
    const bool sarp = uses_sarp(config.policy);
    controllers_.reserve(static_cast<std::size_t>(config.geometry.channels));
    for (int ch = 0; ch < config.geometry.channels; ++ch) {
      EngineConfig ec = make_engine_config(config.geometry, timing_, sarp, config.retention_ms, ch);
      RefreshPolicyParams pp;
      pp.kind = config.policy;
      pp.geometry = config.geometry;
      pp.timing = timing_;
      pp.channel = ch;
      pp.seed = config.seed;
      pp.rows_by_granularity = ec.rows_by_granularity;
      controllers_.emplace_back(config.controller, ec, make_refresh_policy(pp));
      controllers_.back().engine().set_record_history(options.record_commands);
      engine_configs_.push_back(ec);
    }
    std::vector<int> ids = options.only_cores;
    if (ids.empty()) {
      for (int c = 0; c < config.cores; ++c) ids.push_back(c);
    }
    slot_of_core_.assign(static_cast<std::size_t>(config.cores), -1);
    cores_.reserve(ids.size());
    for (int c : ids) {
      if (c < 0 || c >= config.cores) throw ConfigError("core index out of range");
      const WorkloadSpec& spec =
          config.workload.per_core[static_cast<std::size_t>(c) % config.workload.per_core.size()];
      cores_.emplace_back(c, config.core, make_trace_source(spec, workload_seed(config.seed, c, spec)));
      slot_of_core_[static_cast<std::size_t>(c)] = static_cast<int>(cores_.size()) - 1;
    }
  }

  bool send(int core, RequestKind kind, std::uint64_t address, std::uint64_t id) override {
    const std::uint64_t physical = pages_.translate(core, address);
    MemRequest req;
    req.id = id;
    req.core = core;
    req.kind = kind;
    req.addr = map_.decode(physical);
    req.arrival = now_;
    MemoryController& mc = controllers_[static_cast<std::size_t>(req.addr.channel)];
    if (mc.enqueue(req) != EnqueueResult::kAccepted) return false;
    if (kind == RequestKind::kRead) ++reads_sent_;
    else ++writes_sent_;
    return true;
  }

  RunResult run(const RunOptions& options) {
    const Cycle end = config_.warmup_cycles + config_.measured_cycles;
    for (now_ = 0; now_ < end; ++now_) {
      if (now_ == config_.warmup_cycles) {
        for (MemoryController& mc : controllers_) mc.reset_stats();
        for (CoreModel& core : cores_) core.reset_counters();
      }
      for (MemoryController& mc : controllers_) {
        mc.tick(now_);
        auto& done = mc.completed();
        for (const MemRequest& req : done) {
          cores_[static_cast<std::size_t>(slot_of_core_[static_cast<std::size_t>(req.core)])]
              .on_read_complete(req.id);
          ++reads_completed_;
        }
        done.clear();
      }
      for (int s = 0; s < config_.core.clock_ratio; ++s) {
        for (CoreModel& core : cores_) core.tick(*this);
      }
    }
    return collect(options, end);
  }

 private:
  RunResult collect(const RunOptions& options, Cycle end) {
    RunResult r;
    r.timing = timing_;
    r.engine_configs = engine_configs_;
    for (const CoreModel& core : cores_) {
      r.core_ids.push_back(core.index());
      r.ipc.push_back(core.ipc());
      r.stats.core_retired.push_back(core.retired());
      r.stats.core_cycles.push_back(core.cycles());
    }
    r.min_occupancy_at_entry = 1 << 30;
    for (const MemoryController& mc : controllers_) {
      r.stats.add_channel(mc.stats());
      r.reads_in_system += mc.read_queue_size() + mc.reads_in_flight();
      const auto& log = mc.policy().log();
      r.refresh_log.insert(r.refresh_log.end(), log.begin(), log.end());
      if (options.record_commands) r.command_history.push_back(mc.engine().history());
      r.writeback_episodes += mc.stats().writeback_episodes;
      r.min_occupancy_at_entry = std::min(r.min_occupancy_at_entry, mc.stats().min_occupancy_at_entry);
      r.max_occupancy_at_exit = std::max(r.max_occupancy_at_exit, mc.stats().max_occupancy_at_exit);
    }
    if (!r.stats.read_latency_histogram.empty())
      r.max_read_latency = r.stats.read_latency_histogram.rbegin()->first;
    r.reads_sent = reads_sent_;
    r.reads_completed = reads_completed_;
    r.writes_sent = writes_sent_;
    r.energy = energy_accumulate(r.stats, config_.currents, timing_);
    if (options.audit && config_.policy != PolicyKind::kNoRefresh) {
      const RetentionSchedule schedule = nominal_schedule(
          config_.policy, config_.geometry, timing_, engine_configs_.front().rows_per_refresh(1));
      r.audit = retention_audit(r.refresh_log, config_.geometry, schedule, end);
      r.audited = true;
    }
    return r;
  }

  const SimConfig& config_;
  AddressMap map_;
  PageMapper pages_;
  TimingParams timing_;
  std::vector<MemoryController> controllers_;
  std::vector<EngineConfig> engine_configs_;
  std::vector<CoreModel> cores_;
  std::vector<int> slot_of_core_;
  Cycle now_ = 0;
  std::uint64_t reads_sent_ = 0;
  std::uint64_t reads_completed_ = 0;
  std::uint64_t writes_sent_ = 0;
};

}  // namespace

std::string WorkloadSpec::key() const {
  std::ostringstream k;
  switch (kind) {
    case WorkloadKind::kRandom:
      k << "random:" << footprint_bytes << ':' << read_fraction << ':' << intensity;
      break;
    case WorkloadKind::kStream:
      k << "stream:" << footprint_bytes << ':' << stride << ':' << read_fraction << ':' << intensity;
      break;
    case WorkloadKind::kTrace:
      k << "trace:" << trace_path;
      break;
  }
  return k.str();
}

std::uint64_t workload_seed(std::uint64_t seed, int core, const WorkloadSpec& spec) {
  return mix64(seed ^ mix64(fnv1a(spec.key()) + static_cast<std::uint64_t>(core)));
}

std::unique_ptr<TraceSource> make_trace_source(const WorkloadSpec& spec, std::uint64_t seed) {
  switch (spec.kind) {
    case WorkloadKind::kRandom:
      return std::make_unique<RandomTraceSource>(
          RandomWorkload{seed, spec.footprint_bytes, spec.read_fraction, spec.intensity});
    case WorkloadKind::kStream:
      return std::make_unique<StreamTraceSource>(StreamWorkload{
          seed, spec.footprint_bytes, spec.stride, spec.read_fraction, spec.intensity});
    case WorkloadKind::kTrace:
      return std::make_unique<VectorTraceSource>(load_trace(spec.trace_path));
  }
  throw ConfigError("unknown workload kind");
}

void SimConfig::validate() const {
  geometry.validate();
  currents.validate();
  if (cores <= 0) throw ConfigError("cores must be positive");
  if (measured_cycles <= 0) throw ConfigError("measured_cycles must be positive");
  if (warmup_cycles < 0) throw ConfigError("warmup_cycles must be non-negative");
  if (workload.per_core.empty()) throw ConfigError("no workload configured");
  density_profile(density_gbit, retention_ms);
}

RunResult run_simulation(const SimConfig& config, const RunOptions& options) {
  config.validate();
  System system(config, options);
  return system.run(options);
}

}  // namespace refsim
