#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "refsim/controller.hpp"
#include "refsim/geometry.hpp"

namespace refsim {

struct TraceRecord {
  std::uint64_t bubble_count = 0;
  std::uint64_t address = 0;  // cacheline aligned
  RequestKind kind = RequestKind::kRead;
  bool operator==(const TraceRecord&) const = default;
};

/// `<bubble_count> <hex_address> <R|W>` per line; blank lines and `#`
/// comments skipped. Throws TraceParseError with the 1-based line number.
std::vector<TraceRecord> parse_trace(std::istream& in);
/// Reads a trace file, gunzipping when the name ends in `.gz`.
std::vector<TraceRecord> load_trace(const std::string& path);
void write_trace(std::ostream& out, const std::vector<TraceRecord>& records);

/// Endless supply of trace records.
class TraceSource {
 public:
  virtual ~TraceSource() = default;
  virtual TraceRecord next() = 0;
};

/// Replays a recorded trace, wrapping to the start when exhausted.
class VectorTraceSource final : public TraceSource {
 public:
  explicit VectorTraceSource(std::vector<TraceRecord> records);
  TraceRecord next() override;

 private:
  std::vector<TraceRecord> records_;
  std::size_t pos_ = 0;
};

struct RandomWorkload {
  std::uint64_t seed = 1;
  std::uint64_t footprint_bytes = 256ULL << 20;
  double read_fraction = 0.75;
  double intensity = 10.0;  // mean non-memory instructions per access
};

/// Uniform random cachelines over the footprint with geometric bubbles.
class RandomTraceSource final : public TraceSource {
 public:
  explicit RandomTraceSource(const RandomWorkload& w);
  TraceRecord next() override;

 private:
  std::mt19937_64 rng_;
  std::uint64_t lines_;
  double read_fraction_;
  std::geometric_distribution<std::uint64_t> bubbles_;
  std::uniform_real_distribution<double> coin_{0.0, 1.0};
};

struct StreamWorkload {
  std::uint64_t seed = 1;
  std::uint64_t footprint_bytes = 256ULL << 20;
  std::uint64_t stride = 64;
  double read_fraction = 0.75;
  double intensity = 10.0;
};

/// Sequential strided addresses wrapping over the footprint.
class StreamTraceSource final : public TraceSource {
 public:
  explicit StreamTraceSource(const StreamWorkload& w);
  TraceRecord next() override;

 private:
  std::mt19937_64 rng_;
  std::uint64_t footprint_;
  std::uint64_t stride_;
  std::uint64_t next_addr_ = 0;
  double read_fraction_;
  std::geometric_distribution<std::uint64_t> bubbles_;
  std::uniform_real_distribution<double> coin_{0.0, 1.0};
};

/// Throws ConfigError on a footprint smaller than one row or a bad fraction.
std::vector<TraceRecord> synth_random(std::uint64_t seed, std::uint64_t footprint_bytes,
                                      double read_fraction, double intensity, std::size_t count,
                                      const DramGeometry& geometry = {});
std::vector<TraceRecord> synth_stream(std::uint64_t seed, std::uint64_t footprint_bytes,
                                      std::uint64_t stride, std::size_t count,
                                      double read_fraction = 1.0, double intensity = 0.0);

enum class AddressField : std::uint8_t { kChannel, kColumn, kBank, kRank, kRow };

/// Physical address to DRAM coordinates. Fields are packed above the
/// cacheline offset in `order`, lowest first.
class AddressMap {
 public:
  static constexpr std::array<AddressField, 5> kDefaultOrder{
      AddressField::kChannel, AddressField::kColumn, AddressField::kBank, AddressField::kRank,
      AddressField::kRow};

  explicit AddressMap(const DramGeometry& geometry,
                      std::array<AddressField, 5> order = kDefaultOrder);

  /// Bits above the mapped range are ignored.
  DecodedAddress decode(std::uint64_t address) const;
  std::uint64_t encode(const DecodedAddress& a) const;
  const DramGeometry& geometry() const { return geometry_; }

 private:
  int width(AddressField f) const;
  DramGeometry geometry_;
  std::array<AddressField, 5> order_;
  int offset_bits_;
};

/// Parses a comma-separated field order such as "ch,col,bank,rank,row".
std::array<AddressField, 5> parse_address_order(std::string_view text);

/// Virtual-to-physical page mapping with pseudo-random frames, so a
/// workload's footprint spreads over all rows and subarrays. A page's frame
/// is a hash of (seed, core, page), probed linearly on collision, so the same
/// core sees nearly the same mapping whether it runs alone or shared.
class PageMapper {
 public:
  PageMapper(std::uint64_t capacity_bytes, std::uint64_t seed, bool enabled,
             std::uint64_t page_bytes = 4096);
  std::uint64_t translate(int core, std::uint64_t address);
  std::size_t mapped_pages() const { return mapped_; }

 private:
  static constexpr std::uint64_t kDensePages = 1ULL << 22;
  bool enabled_;
  std::uint64_t page_bytes_;
  std::uint64_t frames_;
  std::uint64_t seed_;
  std::size_t mapped_ = 0;
  std::vector<std::vector<std::uint32_t>> dense_;  // per core, frame + 1 (0 = unmapped)
  std::unordered_map<std::uint64_t, std::uint64_t> sparse_;
  std::vector<bool> used_;
};

struct CoreParams {
  int issue_width = 3;
  int window_capacity = 128;
  int mshr_capacity = 8;
  int clock_ratio = 6;  // core cycles per DRAM command cycle
};

/// Where a core sends its memory requests.
class MemoryPort {
 public:
  virtual ~MemoryPort() = default;
  /// False on backpressure.
  virtual bool send(int core, RequestKind kind, std::uint64_t address, std::uint64_t id) = 0;
};

/// In-order retirement window fed by a trace. Non-memory instructions are
/// complete on dispatch; a read holds its slot until data returns; writes are
/// posted and never enter the window.
class CoreModel {
 public:
  CoreModel(int index, const CoreParams& params, std::unique_ptr<TraceSource> trace);

  void tick(MemoryPort& port);
  void on_read_complete(std::uint64_t id);

  int index() const { return index_; }
  std::uint64_t retired() const { return retired_; }
  std::uint64_t cycles() const { return cycles_; }
  double ipc() const { return cycles_ ? static_cast<double>(retired_) / static_cast<double>(cycles_) : 0.0; }
  int outstanding_reads() const { return outstanding_; }
  int window_occupancy() const { return occupancy_; }
  std::uint64_t reads_sent() const { return reads_sent_; }
  std::uint64_t writes_sent() const { return writes_sent_; }
  std::uint64_t reads_completed() const { return reads_completed_; }
  void reset_counters();

 private:
  struct Entry {
    std::uint64_t count;
    bool ready;
    std::uint64_t id;
  };

  int index_;
  CoreParams params_;
  std::unique_ptr<TraceSource> trace_;
  std::deque<Entry> window_;
  int occupancy_ = 0;
  int outstanding_ = 0;
  TraceRecord current_;
  std::uint64_t bubbles_left_ = 0;
  std::uint64_t next_id_;
  std::uint64_t retired_ = 0;
  std::uint64_t cycles_ = 0;
  std::uint64_t reads_sent_ = 0;
  std::uint64_t writes_sent_ = 0;
  std::uint64_t reads_completed_ = 0;
};

}  // namespace refsim
