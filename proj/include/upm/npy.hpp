#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "upm/tensor.hpp"

namespace upm {

/// Reads an NPY container (format version 1.0 or 2.0) holding a C-order
/// float32 or float64 array of rank 1-3. float64 payloads are narrowed to
/// float32. Parse failures throw NpyError with the failing byte offset.
Tensor read_tensor(const std::filesystem::path& path);

/// In-memory variant of read_tensor; `bytes` is the full file contents.
Tensor parse_tensor(std::string_view bytes);

/// Writes `t` as an NPY v1.0 little-endian float32 array. Throws IoFailure.
void write_tensor(const Tensor& t, const std::filesystem::path& path);

std::string serialize_tensor(const Tensor& t);

}  // namespace upm
