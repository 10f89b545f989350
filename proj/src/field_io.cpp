#include "helmdual/field_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "helmdual/error.hpp"

namespace helmdual {

namespace {

constexpr std::size_t kHeader = 4 + 4 + 4 + 4 + 8;

template <class T>
unsigned char* put(unsigned char* p, T value) {
  std::memcpy(p, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(p, p + sizeof(T));
  return p + sizeof(T);
}

template <class T>
T get(const unsigned char* p) {
  unsigned char b[sizeof(T)];
  std::memcpy(b, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(T));
  T value;
  std::memcpy(&value, b, sizeof(T));
  return value;
}

}  // namespace

std::vector<unsigned char> write_field(const Field& f) {
  std::vector<unsigned char> out(kHeader + 8 * f.size());
  unsigned char* p = out.data();
  std::memcpy(p, "HLMF", 4);
  p = put<std::uint32_t>(p + 4, kFieldFileVersion);
  p = put<std::uint32_t>(p, static_cast<std::uint32_t>(f.grid().dimension));
  p = put<std::uint32_t>(p, static_cast<std::uint32_t>(f.grid().points_per_axis));
  p = put<double>(p, f.grid().box_length);
  for (double v : f.values()) p = put<double>(p, v);
  return out;
}

Field read_field(const std::vector<unsigned char>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "HLMF", 4) != 0)
    throw Error(ErrorKind::BadMagic, "field data does not start with HLMF");
  if (bytes.size() < kHeader) throw Error(ErrorKind::TruncatedPayload, "field header is incomplete");
  const auto version = get<std::uint32_t>(bytes.data() + 4);
  if (version != kFieldFileVersion)
    throw Error(ErrorKind::VersionMismatch, "field version " + std::to_string(version) + " is not supported");
  GridSpec g;
  g.dimension = static_cast<int>(get<std::uint32_t>(bytes.data() + 8));
  g.points_per_axis = static_cast<int>(get<std::uint32_t>(bytes.data() + 12));
  g.box_length = get<double>(bytes.data() + 16);
  g.validate();
  const std::size_t need = kHeader + 8 * g.size();
  if (bytes.size() < need)
    throw Error(ErrorKind::TruncatedPayload, "payload has " + std::to_string((bytes.size() - kHeader) / 8) +
                                                 " values, expected " + std::to_string(g.size()));
  if (bytes.size() > need) throw Error(ErrorKind::TruncatedPayload, "trailing bytes after payload");
  std::vector<double> values(g.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = get<double>(bytes.data() + kHeader + 8 * i);
  return Field(g, std::move(values));
}

void write_field_file(const std::string& path, const Field& f) {
  const auto bytes = write_field(f);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::IoError, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "write failed for " + path);
}

Field read_field_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return read_field(bytes);
}

}  // namespace helmdual
