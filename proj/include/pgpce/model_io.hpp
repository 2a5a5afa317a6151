#pragma once

#include <string>

#include "pgpce/surrogate.hpp"

namespace pgpce {

/// Model container ("PGSM"): magic, u32 version, u64 dimensions, then
/// length-prefixed sections (configuration, distribution, training inputs,
/// cluster-count trace, one block per local model). Matrices are stored
/// row-major as little-endian f64.
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::string encode_model(const TrainedSurrogate& model);
TrainedSurrogate decode_model(std::string bytes);

void save_model(const TrainedSurrogate& model, const std::string& path);
TrainedSurrogate load_model(const std::string& path);

}  // namespace pgpce
