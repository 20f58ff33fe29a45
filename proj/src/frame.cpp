#include "fogsim/frame.hpp"

#include <algorithm>
#include <stdexcept>

namespace fogsim {

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::size_t at, std::uint32_t v) {
  out[at + 0] = static_cast<std::uint8_t>(v >> 24);
  out[at + 1] = static_cast<std::uint8_t>(v >> 16);
  out[at + 2] = static_cast<std::uint8_t>(v >> 8);
  out[at + 3] = static_cast<std::uint8_t>(v);
}

void put_u64(std::vector<std::uint8_t>& out, std::size_t at, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    out[at + static_cast<std::size_t>(i)] =
        static_cast<std::uint8_t>(v >> (56 - 8 * i));
  }
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return (static_cast<std::uint32_t>(p[0]) << 24) |
         (static_cast<std::uint32_t>(p[1]) << 16) |
         (static_cast<std::uint32_t>(p[2]) << 8) |
         static_cast<std::uint32_t>(p[3]);
}

std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) {
    v = (v << 8) | static_cast<std::uint64_t>(p[i]);
  }
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_frame(const ProbeFrame& f, std::size_t payload_bytes) {
  if (payload_bytes < kFrameHeaderBytes) {
    throw std::invalid_argument("frame payload smaller than header");
  }
  std::vector<std::uint8_t> out(payload_bytes, 0);
  out[0] = static_cast<std::uint8_t>(kFrameMagic[0]);
  out[1] = static_cast<std::uint8_t>(kFrameMagic[1]);
  out[2] = static_cast<std::uint8_t>(kFrameMagic[2]);
  out[3] = static_cast<std::uint8_t>(kFrameMagic[3]);
  out[4] = kFrameVersion;
  // Bytes 5..7: flags and reserved stay zero.
  put_u32(out, 8, f.sequence);
  put_u64(out, 12, f.send_timestamp_ns);
  return out;
}

std::optional<ProbeFrame> decode_frame(const std::uint8_t* data, std::size_t len) {
  if (data == nullptr || len < kFrameHeaderBytes) return std::nullopt;
  if (!std::equal(kFrameMagic, kFrameMagic + 4, data)) return std::nullopt;
  if (data[4] != kFrameVersion) return std::nullopt;
  ProbeFrame f;
  f.sequence = get_u32(data + 8);
  f.send_timestamp_ns = get_u64(data + 12);
  return f;
}

}  // namespace fogsim
