#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gms::io {

/// Little-endian scalar writers/readers. All binary artifacts are defined
/// byte-for-byte, so the on-disk layout cannot depend on host endianness.
void write_u32(std::ostream& out, std::uint32_t v);
void write_f64(std::ostream& out, double v);
std::uint32_t read_u32(std::istream& in);
double read_f64(std::istream& in);

void write_f64_array(std::ostream& out, const double* data, std::size_t count);
void read_f64_array(std::istream& in, double* data, std::size_t count);

/// Append little-endian encodings to a byte buffer (used when a payload has
/// to be hashed before it is written).
void append_u32(std::vector<std::uint8_t>& buf, std::uint32_t v);
void append_f64(std::vector<std::uint8_t>& buf, double v);
void append_f64_array(std::vector<std::uint8_t>& buf, const double* data, std::size_t count);

std::string sha256_hex(const std::uint8_t* data, std::size_t size);
std::string sha256_hex(const std::vector<std::uint8_t>& data);
std::string sha256_file(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

nlohmann::json read_json_file(const std::filesystem::path& path);
/// Serialized with sorted keys and a trailing newline so identical content
/// is identical on disk.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

/// Format a double with enough digits to round-trip exactly.
std::string format_full(double v);

} // namespace gms::io
