#pragma once

#include <filesystem>
#include <string>

#include "crl/a2c.hpp"

namespace crl {

/// Parameters, optimizer state and a free-form text header (the run config).
struct Checkpoint {
  PolicyParams params;
  OptimizerState optimizer;
  std::string metadata;
  bool operator==(const Checkpoint& o) const {
    return params == o.params && optimizer == o.optimizer && metadata == o.metadata;
  }
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Layout (little-endian): "CRLCKPT\0", u32 version, u64 metadata length + bytes,
// u32 tensor count, per tensor u32 rows, u32 cols, rows*cols f64 row-major,
// i64 adam step, f64 lr/eps/beta1/beta2, then first and second moments shaped like the tensors.
std::string serialize_checkpoint(const Checkpoint& c);
Checkpoint deserialize_checkpoint(std::string_view bytes);

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& c);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace crl
