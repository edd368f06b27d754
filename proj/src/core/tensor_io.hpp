#pragma once

#include "core/field.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dgp {

// Raw n-dimensional f64 tensor as stored on disk:
//   "DGPT" | u32 version=1 | u8 dtype (0=f64) | u8 ndim | u64 dims[ndim] | payload
// All integers and the payload are little-endian; payload is row-major.
struct Tensor {
    std::vector<std::uint64_t> dims;
    std::vector<double> data;

    std::uint64_t element_count() const;
};

std::vector<unsigned char> encode_tensor(const Tensor& t);
Tensor decode_tensor(const std::vector<unsigned char>& bytes);

void write_tensor(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor(const std::filesystem::path& path);

// Fields serialize with dims (ny, nx, channels). The grid boundary is not part
// of the format; callers supply it.
Tensor to_tensor(const Field& f);
Field to_field(const Tensor& t, Boundary boundary = Boundary::Periodic);

void write_field(const std::filesystem::path& path, const Field& f);
Field read_field(const std::filesystem::path& path, Boundary boundary = Boundary::Periodic);

} // namespace dgp
