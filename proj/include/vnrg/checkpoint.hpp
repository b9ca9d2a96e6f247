#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vnrg/error.hpp"
#include "vnrg/nrg_mps.hpp"

namespace vnrg {

/// Binary layout (all integers and reals little-endian):
///   magic "VNRGMPS\0" | u32 version | u32 flags (bit 0: charges)
///   | u32 external kind | u64 external position | u64 n
///   | n x 3 u64 site shapes | [3 u64 bond tensor shape, bond leg only]
///   | [charges: n+1 x (u64 count, count x 2 i32)]
///   | f64 payload of every site, then the bond tensor
///   | u32 CRC-32 of everything before it
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public FormatError {
 public:
  enum class Kind { BadMagic, VersionMismatch, Corrupt, Truncated };
  CheckpointError(Kind kind, const std::string& what) : FormatError(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

std::vector<std::uint8_t> serialize_state(const NrgMps& state);
NrgMps deserialize_state(std::span<const std::uint8_t> bytes);

void save_state(const NrgMps& state, const std::string& path);
NrgMps load_state(const std::string& path);

/// Human-readable summary of a checkpoint file.
std::string describe_checkpoint(const std::string& path);

}  // namespace vnrg
