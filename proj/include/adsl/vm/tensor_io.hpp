#pragma once

#include <string>
#include <string_view>

#include "adsl/vm/tensor.hpp"

namespace adsl::vm {

/// Binary tensor container: magic "ADSLT", u16 version (1), u8 dtype tag
/// (0 f16, 1 f32, 2 i32, 3 u8), u8 rank, rank x u64 dims, then the raw
/// row-major payload. All integers little-endian.
std::string encode_tensor(const TensorValue& t);

/// Throws std::runtime_error on malformed input.
TensorValue decode_tensor(std::string_view bytes);

void write_tensor_file(const std::string& path, const TensorValue& t);
TensorValue read_tensor_file(const std::string& path);

}  // namespace adsl::vm
