#include "refsim/workload.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace refsim {

namespace {

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string_view next_token(std::string_view& line) {
  std::size_t start = line.find_first_not_of(" \t\r");
  if (start == std::string_view::npos) {
    line = {};
    return {};
  }
  line.remove_prefix(start);
  std::size_t end = line.find_first_of(" \t\r");
  std::string_view tok = line.substr(0, end);
  line.remove_prefix(end == std::string_view::npos ? line.size() : end);
  return tok;
}

template <typename T>
bool parse_number(std::string_view tok, T& out, int base) {
  if (tok.empty()) return false;
  const char* end = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(tok.data(), end, out, base);
  return ec == std::errc() && ptr == end;
}

std::geometric_distribution<std::uint64_t> bubble_distribution(double intensity) {
  if (!(intensity >= 0.0)) throw ConfigError("intensity must be non-negative");
  return std::geometric_distribution<std::uint64_t>(1.0 / (1.0 + intensity));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

void check_fraction(double f) {
  if (!(f >= 0.0 && f <= 1.0)) throw ConfigError("read_fraction must be within [0, 1]");
}

}  // namespace

std::vector<TraceRecord> parse_trace(std::istream& in) {
  std::vector<TraceRecord> out;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    std::string_view bubble = next_token(line);
    if (bubble.empty()) continue;
    std::string_view addr = next_token(line);
    std::string_view kind = next_token(line);
    if (!next_token(line).empty()) throw TraceParseError(line_no, "trailing fields");

    TraceRecord rec;
    if (!parse_number(bubble, rec.bubble_count, 10))
      throw TraceParseError(line_no, "bad bubble count '" + std::string(bubble) + "'");
    if (addr.size() > 2 && addr[0] == '0' && (addr[1] == 'x' || addr[1] == 'X')) addr.remove_prefix(2);
    if (!parse_number(addr, rec.address, 16))
      throw TraceParseError(line_no, "bad address '" + std::string(addr) + "'");
    rec.address &= ~std::uint64_t{63};
    if (kind == "R" || kind == "r") rec.kind = RequestKind::kRead;
    else if (kind == "W" || kind == "w") rec.kind = RequestKind::kWrite;
    else throw TraceParseError(line_no, "expected R or W, got '" + std::string(kind) + "'");
    out.push_back(rec);
  }
  return out;
}

std::vector<TraceRecord> load_trace(const std::string& path) {
  if (ends_with(path, ".gz")) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (f == nullptr) throw ConfigError("cannot open trace '" + path + "'");
    std::string text;
    char buf[1 << 16];
    int n;
    while ((n = gzread(f, buf, sizeof buf)) > 0) text.append(buf, static_cast<std::size_t>(n));
    const bool failed = n < 0;
    gzclose(f);
    if (failed) throw ConfigError("corrupt gzip trace '" + path + "'");
    std::istringstream in(text);
    return parse_trace(in);
  }
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open trace '" + path + "'");
  return parse_trace(in);
}

void write_trace(std::ostream& out, const std::vector<TraceRecord>& records) {
  for (const TraceRecord& r : records) {
    out << r.bubble_count << " 0x" << std::hex << r.address << std::dec << ' '
        << (r.kind == RequestKind::kRead ? 'R' : 'W') << '\n';
  }
}

VectorTraceSource::VectorTraceSource(std::vector<TraceRecord> records)
    : records_(std::move(records)) {
  if (records_.empty()) throw ConfigError("trace has no records");
}

TraceRecord VectorTraceSource::next() {
  const TraceRecord r = records_[pos_];
  pos_ = pos_ + 1 == records_.size() ? 0 : pos_ + 1;
  return r;
}

RandomTraceSource::RandomTraceSource(const RandomWorkload& w)
    : rng_(w.seed),
      lines_(w.footprint_bytes / 64),
      read_fraction_(w.read_fraction),
      bubbles_(bubble_distribution(w.intensity)) {
  check_fraction(w.read_fraction);
  if (lines_ == 0) throw ConfigError("footprint smaller than a cacheline");
}

TraceRecord RandomTraceSource::next() {
  TraceRecord r;
  r.bubble_count = bubbles_(rng_);
  r.address = (rng_() % lines_) * 64;
  r.kind = coin_(rng_) < read_fraction_ ? RequestKind::kRead : RequestKind::kWrite;
  return r;
}

StreamTraceSource::StreamTraceSource(const StreamWorkload& w)
    : rng_(w.seed),
      footprint_(w.footprint_bytes),
      stride_(w.stride),
      read_fraction_(w.read_fraction),
      bubbles_(bubble_distribution(w.intensity)) {
  check_fraction(w.read_fraction);
  if (stride_ < 64) throw ConfigError("stream stride must be at least one cacheline");
  if (footprint_ < 64) throw ConfigError("footprint smaller than a cacheline");
}

TraceRecord StreamTraceSource::next() {
  TraceRecord r;
  r.bubble_count = bubbles_(rng_);
  r.address = next_addr_ & ~std::uint64_t{63};
  r.kind = read_fraction_ >= 1.0 || coin_(rng_) < read_fraction_ ? RequestKind::kRead
                                                                  : RequestKind::kWrite;
  next_addr_ += stride_;
  if (next_addr_ >= footprint_) next_addr_ = 0;
  return r;
}

std::vector<TraceRecord> synth_random(std::uint64_t seed, std::uint64_t footprint_bytes,
                                      double read_fraction, double intensity, std::size_t count,
                                      const DramGeometry& geometry) {
  const std::uint64_t row_bytes =
      static_cast<std::uint64_t>(geometry.columns_per_row) * geometry.cacheline_bytes;
  if (footprint_bytes < row_bytes) throw ConfigError("footprint smaller than one row");
  RandomTraceSource src({seed, footprint_bytes, read_fraction, intensity});
  std::vector<TraceRecord> out(count);
  for (TraceRecord& r : out) r = src.next();
  return out;
}

std::vector<TraceRecord> synth_stream(std::uint64_t seed, std::uint64_t footprint_bytes,
                                      std::uint64_t stride, std::size_t count,
                                      double read_fraction, double intensity) {
  StreamTraceSource src({seed, footprint_bytes, stride, read_fraction, intensity});
  std::vector<TraceRecord> out(count);
  for (TraceRecord& r : out) r = src.next();
  return out;
}

// ---------------------------------------------------------------------------

AddressMap::AddressMap(const DramGeometry& geometry, std::array<AddressField, 5> order)
    : geometry_(geometry), order_(order) {
  geometry_.validate();
  auto pow2 = [](int v) { return v > 0 && std::has_single_bit(static_cast<unsigned>(v)); };
  if (!pow2(geometry_.channels) || !pow2(geometry_.ranks_per_channel) ||
      !pow2(geometry_.columns_per_row) || !pow2(geometry_.cacheline_bytes))
    throw ConfigError("address mapping needs power-of-two geometry counts");
  std::array<bool, 5> seen{};
  for (AddressField f : order_) seen[static_cast<std::size_t>(f)] = true;
  if (std::find(seen.begin(), seen.end(), false) != seen.end())
    throw ConfigError("address order must name every field once");
  offset_bits_ = std::countr_zero(static_cast<unsigned>(geometry_.cacheline_bytes));
}

int AddressMap::width(AddressField f) const {
  auto bits = [](int v) { return std::countr_zero(static_cast<unsigned>(v)); };
  switch (f) {
    case AddressField::kChannel: return bits(geometry_.channels);
    case AddressField::kColumn: return bits(geometry_.columns_per_row);
    case AddressField::kBank: return bits(geometry_.banks_per_rank);
    case AddressField::kRank: return bits(geometry_.ranks_per_channel);
    case AddressField::kRow: return bits(geometry_.rows_per_bank);
  }
  return 0;
}

DecodedAddress AddressMap::decode(std::uint64_t address) const {
  DecodedAddress a;
  std::uint64_t v = address >> offset_bits_;
  for (AddressField f : order_) {
    const int w = width(f);
    const int value = static_cast<int>(v & ((std::uint64_t{1} << w) - 1));
    v >>= w;
    switch (f) {
      case AddressField::kChannel: a.channel = value; break;
      case AddressField::kColumn: a.column = value; break;
      case AddressField::kBank: a.bank = value; break;
      case AddressField::kRank: a.rank = value; break;
      case AddressField::kRow: a.row = value; break;
    }
  }
  a.subarray = a.row / geometry_.rows_per_subarray();
  return a;
}

std::uint64_t AddressMap::encode(const DecodedAddress& a) const {
  std::uint64_t v = 0;
  int shift = offset_bits_;
  for (AddressField f : order_) {
    int value = 0;
    switch (f) {
      case AddressField::kChannel: value = a.channel; break;
      case AddressField::kColumn: value = a.column; break;
      case AddressField::kBank: value = a.bank; break;
      case AddressField::kRank: value = a.rank; break;
      case AddressField::kRow: value = a.row; break;
    }
    v |= static_cast<std::uint64_t>(value) << shift;
    shift += width(f);
  }
  return v;
}

std::array<AddressField, 5> parse_address_order(std::string_view text) {
  std::array<AddressField, 5> order{};
  std::size_t n = 0;
  while (!text.empty()) {
    const std::size_t comma = text.find(',');
    std::string_view tok = text.substr(0, comma);
    text.remove_prefix(comma == std::string_view::npos ? text.size() : comma + 1);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    AddressField f;
    if (tok == "ch" || tok == "channel") f = AddressField::kChannel;
    else if (tok == "col" || tok == "column") f = AddressField::kColumn;
    else if (tok == "ba" || tok == "bank") f = AddressField::kBank;
    else if (tok == "ra" || tok == "rank") f = AddressField::kRank;
    else if (tok == "ro" || tok == "row") f = AddressField::kRow;
    else throw ConfigError("unknown address field '" + std::string(tok) + "'");
    if (n == order.size()) throw ConfigError("address order has too many fields");
    for (std::size_t i = 0; i < n; ++i)
      if (order[i] == f) throw ConfigError("address field '" + std::string(tok) + "' listed twice");
    order[n++] = f;
  }
  if (n != order.size()) throw ConfigError("address order must list 5 fields");
  return order;
}

// ---------------------------------------------------------------------------

PageMapper::PageMapper(std::uint64_t capacity_bytes, std::uint64_t seed, bool enabled,
                       std::uint64_t page_bytes)
    : enabled_(enabled),
      page_bytes_(page_bytes),
      frames_(capacity_bytes / page_bytes),
      seed_(seed) {
  if (page_bytes_ == 0 || frames_ == 0) throw ConfigError("page size larger than memory");
  if (enabled_) {
    if (frames_ >= (1ULL << 32) - 1) throw ConfigError("too many physical pages to map");
    used_.assign(frames_, false);
  }
}

std::uint64_t PageMapper::translate(int core, std::uint64_t address) {
  if (!enabled_) return address;
  const std::uint64_t page = address / page_bytes_;
  const std::uint64_t offset = address % page_bytes_;
  // Low pages of each core live in a flat table; sparse traces fall back to the map.
  std::uint32_t* slot = nullptr;
  if (page < kDensePages && core >= 0) {
    if (dense_.size() <= static_cast<std::size_t>(core)) dense_.resize(static_cast<std::size_t>(core) + 1);
    auto& table = dense_[static_cast<std::size_t>(core)];
    if (table.size() <= page) table.resize(std::max<std::size_t>(page + 1, table.size() * 2), 0);
    slot = &table[page];
    if (*slot != 0) return (*slot - 1) * page_bytes_ + offset;
  }
  const std::uint64_t key = (static_cast<std::uint64_t>(core) << 48) ^ page;
  if (slot == nullptr) {
    const auto it = sparse_.find(key);
    if (it != sparse_.end()) return it->second * page_bytes_ + offset;
  }
  if (mapped_ >= frames_) throw SimulationError("physical memory exhausted by page mapping");
  std::uint64_t frame = splitmix64(seed_ ^ splitmix64(key)) % frames_;
  while (used_[frame]) frame = frame + 1 == frames_ ? 0 : frame + 1;
  used_[frame] = true;
  ++mapped_;
  if (slot != nullptr) *slot = static_cast<std::uint32_t>(frame + 1);
  else sparse_.emplace(key, frame);
  return frame * page_bytes_ + offset;
}

// ---------------------------------------------------------------------------

CoreModel::CoreModel(int index, const CoreParams& params, std::unique_ptr<TraceSource> trace)
    : index_(index),
      params_(params),
      trace_(std::move(trace)),
      next_id_((static_cast<std::uint64_t>(index) + 1) << 40) {
  if (!trace_) throw ConfigError("core needs a trace");
  if (params_.issue_width <= 0 || params_.window_capacity <= 0 || params_.mshr_capacity <= 0 ||
      params_.clock_ratio <= 0)
    throw ConfigError("core parameters must be positive");
  current_ = trace_->next();
  bubbles_left_ = current_.bubble_count;
}

void CoreModel::reset_counters() {
  retired_ = 0;
  cycles_ = 0;
  reads_sent_ = 0;
  writes_sent_ = 0;
  reads_completed_ = 0;
}

void CoreModel::on_read_complete(std::uint64_t id) {
  for (Entry& e : window_) {
    if (e.id == id && !e.ready) {
      e.ready = true;
      --outstanding_;
      ++reads_completed_;
      return;
    }
  }
  throw SimulationError("read completion for unknown request");
}

void CoreModel::tick(MemoryPort& port) {
  ++cycles_;
  const auto width = static_cast<std::uint64_t>(params_.issue_width);

  std::uint64_t budget = width;
  while (budget > 0 && !window_.empty() && window_.front().ready) {
    Entry& head = window_.front();
    const std::uint64_t take = std::min(budget, head.count);
    head.count -= take;
    budget -= take;
    occupancy_ -= static_cast<int>(take);
    retired_ += take;
    if (head.count == 0) window_.pop_front();
  }

  std::uint64_t slots = width;
  while (slots > 0) {
    if (bubbles_left_ > 0) {
      const int space = params_.window_capacity - occupancy_;
      if (space <= 0) break;
      const std::uint64_t take =
          std::min({slots, static_cast<std::uint64_t>(space), bubbles_left_});
      if (!window_.empty() && window_.back().ready && window_.back().id == 0)
        window_.back().count += take;
      else
        window_.push_back({take, true, 0});
      occupancy_ += static_cast<int>(take);
      bubbles_left_ -= take;
      slots -= take;
      continue;
    }
    if (current_.kind == RequestKind::kWrite) {
      if (!port.send(index_, RequestKind::kWrite, current_.address, next_id_)) break;
      ++writes_sent_;
      ++retired_;
    } else {
      if (outstanding_ >= params_.mshr_capacity || occupancy_ >= params_.window_capacity) break;
      if (!port.send(index_, RequestKind::kRead, current_.address, next_id_)) break;
      window_.push_back({1, false, next_id_});
      ++occupancy_;
      ++outstanding_;
      ++reads_sent_;
    }
    ++next_id_;
    --slots;
    current_ = trace_->next();
    bubbles_left_ = current_.bubble_count;
  }
}

}  // namespace refsim
