#pragma once

#include <string>
#include <vector>

#include "helmdual/grid.hpp"

namespace helmdual {

inline constexpr std::uint32_t kFieldFileVersion = 1;

// "HLMF", u32 version, u32 N, u32 n, f64 L, then n^N f64; all little-endian.
std::vector<unsigned char> write_field(const Field& f);
Field read_field(const std::vector<unsigned char>& bytes);

void write_field_file(const std::string& path, const Field& f);
Field read_field_file(const std::string& path);

}  // namespace helmdual
