#pragma once

#include <string>

#include "pgpce/surrogate.hpp"

namespace pgpce {

/// Dataset container ("PGDS"): magic, u32 version, u64 N, d, m_f, n_f, one
/// (u32 kind, f64 lo, f64 hi) descriptor per input, then N records of the
/// input vector followed by the row-major response, all little-endian.
inline constexpr std::uint32_t kDatasetFormatVersion = 1;

std::string encode_dataset(const Dataset& data);
Dataset decode_dataset(std::string bytes);

void save_dataset(const Dataset& data, const std::string& path);
/// Reads and validates a dataset file. Throws FormatError with the byte
/// offset on malformed or truncated content.
Dataset load_snapshot_dataset(const std::string& path);

}  // namespace pgpce
