#pragma once

#include <string>
#include <string_view>

#include "swe/types.hpp"

namespace swe {

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

/// Digest of the raw little-endian doubles of a field.
std::string field_hash(const Field& f);

}  // namespace swe
