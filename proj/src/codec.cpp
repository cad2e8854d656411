#include "mymove/codec.hpp"

#include <bit>
#include <cstring>

#include <fmt/format.h>
#include <zlib.h>

#include "mymove/errors.hpp"

namespace mymove {

namespace {

constexpr std::uint8_t kMagic[4] = {'M', 'Y', 'M', 'V'};
constexpr std::uint8_t kTagWindow = 0x01;
constexpr std::uint8_t kTagVitals = 0x02;
constexpr std::uint8_t kTagLocomotion = 0x03;

class Writer {
 public:
  std::vector<std::uint8_t> out;

  void u8(std::uint8_t v) { out.push_back(v); }
  void u16(std::uint16_t v) { le(v, 2); }
  void u32(std::uint32_t v) { le(v, 4); }
  void u64(std::uint64_t v) { le(v, 8); }
  void i64(std::int64_t v) { le(static_cast<std::uint64_t>(v), 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void bytes(const void* p, std::size_t n) {
    auto b = static_cast<const std::uint8_t*>(p);
    out.insert(out.end(), b, b + n);
  }

  // Reserves the u32 length slot of a record and returns its offset.
  std::size_t begin_record(std::uint8_t tag) {
    u8(tag);
    std::size_t at = out.size();
    u32(0);
    return at;
  }
  void end_record(std::size_t at) {
    auto len = static_cast<std::uint32_t>(out.size() - at - 4);
    for (int i = 0; i < 4; ++i) out[at + i] = static_cast<std::uint8_t>(len >> (8 * i));
  }

 private:
  void le(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
};

class Reader {
 public:
  Reader(std::span<const std::uint8_t> b, ErrorCode on_short) : b_(b), on_short_(on_short) {}

  std::size_t pos() const { return pos_; }
  std::size_t remaining() const { return b_.size() - pos_; }
  bool done() const { return pos_ == b_.size(); }

  std::uint8_t u8() { return static_cast<std::uint8_t>(le(1)); }
  std::uint16_t u16() { return static_cast<std::uint16_t>(le(2)); }
  std::uint32_t u32() { return static_cast<std::uint32_t>(le(4)); }
  std::uint64_t u64() { return le(8); }
  std::int64_t i64() { return static_cast<std::int64_t>(le(8)); }
  float f32() { return std::bit_cast<float>(u32()); }
  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(std::size_t n) {
    if (remaining() < n)
      throw Error(on_short_, fmt::format("need {} bytes at offset {}, have {}", n, pos_, remaining()));
  }
  std::uint64_t le(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t{b_[pos_ + i]} << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
  ErrorCode on_short_;
};

std::uint32_t crc_of(std::span<const std::uint8_t> b) {
  uLong c = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  std::size_t off = 0;
  while (off < b.size()) {
    auto n = static_cast<uInt>(std::min<std::size_t>(b.size() - off, 1u << 30));
    c = crc32(c, b.data() + off, n);
    off += n;
  }
  return static_cast<std::uint32_t>(c);
}

[[noreturn]] void format_error(const std::string& what) { throw Error(ErrorCode::kFormat, what); }

InertialWindow read_window(std::span<const std::uint8_t> payload) {
  Reader r(payload, ErrorCode::kFormat);
  InertialWindow w;
  w.minute_anchor = from_epoch_ms(r.i64());
  std::uint8_t kind_count = r.u8();
  std::uint8_t seen = 0;
  for (int k = 0; k < kind_count; ++k) {
    KindSamples ks;
    std::uint8_t id = r.u8();
    if (id < 1 || id > 4) format_error(fmt::format("unknown sensor kind {}", id));
    if (seen & (1u << id)) format_error(fmt::format("sensor kind {} repeated", id));
    seen |= static_cast<std::uint8_t>(1u << id);
    ks.kind = static_cast<SensorKind>(id);
    ks.components = r.u8();
    if (ks.components == 0) format_error("sensor kind with zero components");
    std::uint16_t count = r.u16();
    std::size_t n = std::size_t{count} * ks.components;
    if (r.remaining() < n * 4) format_error("window payload shorter than its sample count");
    ks.values.resize(n);
    for (auto& v : ks.values) v = r.f32();
    w.kinds.push_back(std::move(ks));
  }
  if (!r.done()) format_error("trailing bytes in window record");
  return w;
}

MinuteVitals read_vitals(std::span<const std::uint8_t> payload) {
  Reader r(payload, ErrorCode::kFormat);
  MinuteVitals v;
  v.minute_anchor = from_epoch_ms(r.i64());
  v.step_count = r.u32();
  std::uint8_t present = r.u8();
  if (present > 1) format_error("heart-rate presence flag must be 0 or 1");
  if (present) {
    float hr = r.f32();
    if (!(hr > 0.0f)) format_error("heart rate must be positive");
    v.heart_rate = hr;
  }
  if (!r.done()) format_error("trailing bytes in vitals record");
  return v;
}

LocomotionSample read_locomotion(std::span<const std::uint8_t> payload) {
  Reader r(payload, ErrorCode::kFormat);
  LocomotionSample s;
  s.at = from_epoch_ms(r.i64());
  std::uint8_t cls = r.u8();
  if (cls > static_cast<std::uint8_t>(Locomotion::unknown))
    format_error(fmt::format("unknown locomotion class {}", cls));
  s.cls = static_cast<Locomotion>(cls);
  if (!r.done()) format_error("trailing bytes in locomotion record");
  return s;
}

}  // namespace

std::vector<std::uint8_t> encode_batch(const SensorBatch& batch) {
  if (batch.device_id.size() > 0xFFFF)
    throw Error(ErrorCode::kInvalidArgument, "device_id longer than 65535 bytes");
  Writer w;
  w.bytes(kMagic, 4);
  w.u8(kBatchVersion);
  w.u16(static_cast<std::uint16_t>(batch.device_id.size()));
  w.bytes(batch.device_id.data(), batch.device_id.size());
  w.u64(batch.sequence);

  for (const auto& win : batch.windows) {
    auto at = w.begin_record(kTagWindow);
    w.i64(to_epoch_ms(win.minute_anchor));
    if (win.kinds.size() > 0xFF) throw Error(ErrorCode::kInvalidArgument, "too many sensor kinds");
    w.u8(static_cast<std::uint8_t>(win.kinds.size()));
    for (const auto& k : win.kinds) {
      if (k.components == 0 || k.values.size() % k.components != 0 || k.sample_count() > 0xFFFF)
        throw Error(ErrorCode::kInvalidArgument,
                    fmt::format("{} samples do not fit the record layout", to_string(k.kind)));
      w.u8(static_cast<std::uint8_t>(k.kind));
      w.u8(k.components);
      w.u16(static_cast<std::uint16_t>(k.sample_count()));
      for (float v : k.values) w.f32(v);
    }
    w.end_record(at);
  }
  for (const auto& v : batch.vitals) {
    auto at = w.begin_record(kTagVitals);
    w.i64(to_epoch_ms(v.minute_anchor));
    w.u32(v.step_count);
    w.u8(v.heart_rate ? 1 : 0);
    if (v.heart_rate) w.f32(*v.heart_rate);
    w.end_record(at);
  }
  for (const auto& l : batch.locomotion) {
    auto at = w.begin_record(kTagLocomotion);
    w.i64(to_epoch_ms(l.at));
    w.u8(static_cast<std::uint8_t>(l.cls));
    w.end_record(at);
  }
  w.u32(crc_of(w.out));
  return std::move(w.out);
}

SensorBatch decode_batch(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 5 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    format_error("bad magic");
  if (bytes[4] != kBatchVersion) format_error(fmt::format("unsupported version {}", bytes[4]));
  if (bytes.size() < 4 + 1 + 2 + 8 + 4) throw Error(ErrorCode::kTruncatedBatch, "short header");

  // Structural walk over everything before the CRC trailer.
  auto body = bytes.first(bytes.size() - 4);
  Reader r(body, ErrorCode::kTruncatedBatch);
  r.take(5);
  SensorBatch batch;
  std::uint16_t id_len = r.u16();
  auto id = r.take(id_len);
  batch.device_id.assign(reinterpret_cast<const char*>(id.data()), id.size());
  batch.sequence = r.u64();
  struct Raw {
    std::uint8_t tag;
    std::span<const std::uint8_t> payload;
  };
  std::vector<Raw> records;
  while (!r.done()) {
    std::uint8_t tag = r.u8();
    std::uint32_t len = r.u32();
    records.push_back({tag, r.take(len)});
  }

  Reader trailer(bytes.subspan(bytes.size() - 4), ErrorCode::kTruncatedBatch);
  std::uint32_t stored = trailer.u32();
  std::uint32_t actual = crc_of(body);
  if (stored != actual)
    throw Error(ErrorCode::kCorruptBatch, fmt::format("crc {:08x} != {:08x}", stored, actual));

  std::uint8_t last_tag = 0;
  for (const auto& rec : records) {
    if (rec.tag < last_tag) format_error("records out of canonical order");
    last_tag = rec.tag;
    switch (rec.tag) {
      case kTagWindow: batch.windows.push_back(read_window(rec.payload)); break;
      case kTagVitals: batch.vitals.push_back(read_vitals(rec.payload)); break;
      case kTagLocomotion: batch.locomotion.push_back(read_locomotion(rec.payload)); break;
      default: format_error(fmt::format("unknown record tag {:#04x}", rec.tag));
    }
  }
  return batch;
}

}  // namespace mymove
