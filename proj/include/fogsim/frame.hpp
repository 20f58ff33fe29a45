#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace fogsim {

// Wire header, big-endian: magic (4), version (1), flags (1, zero),
// reserved (2, zero), sequence (4), send timestamp (8).
inline constexpr std::size_t kFrameHeaderBytes = 20;
inline constexpr std::uint8_t kFrameVersion = 0x01;
inline constexpr char kFrameMagic[4] = {'F', 'R', 'P', 'B'};

// Probe payloads never shrink below this floor, so frames stay comfortably
// self-describing even if the header grows a field.
inline constexpr std::size_t kMinProbePayloadBytes = 36;

// One probe packet. The timestamp is sender-local monotonic nanoseconds; the
// responder echoes it opaquely and it is never compared across hosts.
struct ProbeFrame {
  std::uint32_t sequence = 0;
  std::uint64_t send_timestamp_ns = 0;
};

// Header plus zero padding up to payload_bytes (which must be at least the
// header size). Bit-exact: same frame, same bytes, any platform.
std::vector<std::uint8_t> encode_frame(const ProbeFrame& f, std::size_t payload_bytes);

// nullopt for short buffers, wrong magic, or unknown versions. Padding past
// the header is ignored.
std::optional<ProbeFrame> decode_frame(const std::uint8_t* data, std::size_t len);

}  // namespace fogsim
