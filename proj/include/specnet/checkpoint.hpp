#pragma once

// Network checkpoint byte layout (all integers little-endian):
//
//   magic        8 bytes  "SPECNET\0"
//   version      u32      checkpoint_version
//   kind         u32      1 = network, 2 = random forest
//   architecture u32 length + UTF-8 bytes
//   run_id       u32 length + UTF-8 bytes
//   input        u64 channels, u64 length, u64 classes
//   layers       u32 count; per layer u8 kind, u64 units, u64 kernel_size,
//                u64 pool_size, u8 padding, u8 activation,
//                f64 coord_low, f64 coord_high
//   shapes       u32 tensor count; per tensor u32 rank, u64 dims[rank]
//   scaling      u64 n; f64 offset[n]; f64 scale[n]
//   parameters   f64 values (IEEE-754 binary64) of every tensor, in order
//   checksum     u64 FNV-1a over all preceding bytes

#include "specnet/network.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace specnet {

class CheckpointError : public Error {
public:
    using Error::Error;
};

inline constexpr std::uint32_t checkpoint_version = 1;

enum class CheckpointKind : std::uint32_t { network = 1, forest = 2 };

std::string serialize_network(const Network& network);

/// Rejects version, kind, checksum or shape mismatches, truncation and
/// trailing bytes. With `expected_architecture`, also rejects a checkpoint
/// written for a different architecture.
Network deserialize_network(std::string_view bytes,
                            std::optional<std::string_view> expected_architecture = {},
                            const std::string& source = "<memory>");

void save_checkpoint(const Network& network, const std::filesystem::path& path);
Network load_checkpoint(const std::filesystem::path& path,
                        std::optional<std::string_view> expected_architecture = {});

/// Kind stored in a checkpoint header (checksum verified).
CheckpointKind checkpoint_kind(const std::filesystem::path& path);

} // namespace specnet
