#include <doctest.h>

#include <random>

#include "mymove/codec.hpp"
#include "mymove/errors.hpp"
#include "mymove/io.hpp"
#include "support/oracles.hpp"

using namespace mymove;

namespace {

const Instant kAnchor = parse_iso("2021-05-10T10:00:00Z");

std::vector<KindSamples> full_kinds(float value = 0.0f) {
  SensorLayout l;
  std::vector<KindSamples> ks;
  for (auto k : kSensorKinds) {
    KindSamples s{k, l.components(k), {}};
    s.values.assign(500u * s.components, value);
    ks.push_back(std::move(s));
  }
  return ks;
}

SensorBatch fixture_batch() {
  SensorBatch b;
  b.device_id = "W01";
  b.sequence = 1;
  b.windows.push_back(seal_minute_window(kAnchor, full_kinds()));
  b.vitals.push_back({kAnchor, 0, std::nullopt});
  return b;
}

// Bitwise CRC-32 (IEEE, reflected), independent of zlib.
std::uint32_t crc32_bitwise(std::span<const std::uint8_t> data) {
  std::uint32_t c = 0xFFFFFFFFu;
  for (auto byte : data) {
    c ^= byte;
    for (int k = 0; k < 8; ++k) c = (c >> 1) ^ (0xEDB88320u & (0u - (c & 1u)));
  }
  return ~c;
}

std::uint32_t le32(std::span<const std::uint8_t> b, std::size_t at) {
  return b[at] | (b[at + 1] << 8) | (b[at + 2] << 16) | (static_cast<std::uint32_t>(b[at + 3]) << 24);
}

ErrorCode decode_error(std::span<const std::uint8_t> bytes) {
  try {
    decode_batch(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("decode accepted bad bytes");
  return ErrorCode::kInvalidArgument;
}

}  // namespace

TEST_CASE("seal_minute_window enforces 500 samples per kind") {
  CHECK(seal_minute_window(kAnchor, full_kinds()).kinds.size() == 4);
  auto short_acc = full_kinds();
  short_acc[0].values.resize(499 * 3);
  try {
    seal_minute_window(kAnchor, short_acc);
    FAIL("accepted 499 samples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kShortWindow);
  }
  auto over = full_kinds();
  over[2].values.resize(501 * 3);
  try {
    seal_minute_window(kAnchor, over);
    FAIL("accepted 501 samples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kOverfullWindow);
  }
  try {
    seal_minute_window(kAnchor, {});
    FAIL("accepted no samples");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kShortWindow);
  }
  auto missing = full_kinds();
  missing.pop_back();
  CHECK_THROWS_AS(seal_minute_window(kAnchor, missing), Error);
}

TEST_CASE("golden batch file") {
  auto golden = read_file_bytes(std::string(MYMOVE_FIXTURES) + "/golden_batch.mymv");
  CHECK(encode_batch(fixture_batch()) == golden);
  CHECK(decode_batch(golden) == fixture_batch());
}

TEST_CASE("header layout and CRC trailer") {
  auto bytes = encode_batch(fixture_batch());
  REQUIRE(bytes.size() > 22);
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "MYMV");
  CHECK(bytes[4] == 0x01);
  CHECK(bytes[5] == 3);  // u16 device id length, little-endian
  CHECK(bytes[6] == 0);
  CHECK(std::string(bytes.begin() + 7, bytes.begin() + 10) == "W01");
  CHECK(bytes[10] == 1);  // u64 sequence
  CHECK(bytes[18] == 0x01);  // first record is the window
  std::span<const std::uint8_t> all(bytes);
  CHECK(le32(all, bytes.size() - 4) == crc32_bitwise(all.first(bytes.size() - 4)));
}

TEST_CASE("empty batch is header plus CRC") {
  SensorBatch b;
  b.device_id = "W01";
  b.sequence = 2;
  auto bytes = encode_batch(b);
  CHECK(bytes.size() == 4 + 1 + 2 + 3 + 8 + 4);
  CHECK(decode_batch(bytes) == b);
}

TEST_CASE("decode errors") {
  auto bytes = encode_batch(fixture_batch());
  CHECK(decode_error({}) == ErrorCode::kFormat);
  auto magic = bytes;
  magic[0] = 'X';
  CHECK(decode_error(magic) == ErrorCode::kFormat);
  auto version = bytes;
  version[4] = 0x02;
  CHECK(decode_error(version) == ErrorCode::kFormat);
  auto payload = bytes;
  payload[100] ^= 0x10;
  CHECK(decode_error(payload) == ErrorCode::kCorruptBatch);
  auto cut = std::vector<std::uint8_t>(bytes.begin(), bytes.begin() + 200);
  CHECK(decode_error(cut) == ErrorCode::kTruncatedBatch);
}

TEST_CASE("randomized round-trips") {
  std::mt19937_64 rng(77);
  for (std::uint64_t i = 0; i < 300; ++i) {
    auto b = oracle::random_batch(rng, "D" + std::to_string(i % 7), i);
    auto bytes = encode_batch(b);
    REQUIRE(decode_batch(bytes) == b);
    REQUIRE(encode_batch(decode_batch(bytes)) == bytes);
  }
}

TEST_CASE("every single-bit flip of a small batch is rejected") {
  SensorBatch b;
  b.device_id = "W9";
  b.sequence = 5;
  b.vitals.push_back({kAnchor, 12, 71.5f});
  b.locomotion.push_back({kAnchor + std::chrono::seconds{30}, Locomotion::walking});
  auto bytes = encode_batch(b);
  for (std::size_t bit = 0; bit < bytes.size() * 8; ++bit) {
    auto bad = bytes;
    bad[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
    CAPTURE(bit);
    CHECK_THROWS_AS(decode_batch(bad), Error);
  }
}
