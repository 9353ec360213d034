#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "fwdiss/core.hpp"

namespace fwdiss {

/// FWS1 snapshot file:
///
///   "FWS1" | u32 N | f64 L | u8 frame | f64 t | N x f64 values | [u8 profile tag]
///
/// All numbers little-endian. Solution snapshots omit the trailing tag byte;
/// profile dumps append it.
struct Snapshot {
  double t = 0.0;
  Field field;
  std::optional<std::uint8_t> profile_tag;
};

/// Tags written by profile dumps.
enum class ProfileTag : std::uint8_t {
  modified_heat = 1,     // M G0
  self_similar = 2,      // W_p
  theorem_profile = 3,   // full two-term profile
  w_profile = 4,         // w_p on the similarity variable
};

[[nodiscard]] std::vector<std::uint8_t> encode_snapshot(const Snapshot& snap);
[[nodiscard]] Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes);

void write_snapshot(const std::filesystem::path& path, const Snapshot& snap);
[[nodiscard]] Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace fwdiss
