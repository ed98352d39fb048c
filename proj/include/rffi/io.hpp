#ifndef RFFI_IO_HPP
#define RFFI_IO_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "rffi/common.hpp"

namespace rffi {

// All binary artifacts (IQ payloads, feature tensors, model blobs) are raw
// little-endian float32 / uint8 streams. These helpers assume a little-endian
// host, which is checked once at startup by the CLI and the test binaries.

inline bool host_is_little_endian() {
    const std::uint16_t probe = 1;
    return *reinterpret_cast<const std::uint8_t*>(&probe) == 1;
}

inline void write_f32(std::ostream& os, const float* vals, std::size_t n) {
    os.write(reinterpret_cast<const char*>(vals), static_cast<std::streamsize>(n * sizeof(float)));
}

inline void write_f32(const std::filesystem::path& path, const std::vector<float>& vals) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open for writing: " + path.string());
    write_f32(os, vals.data(), vals.size());
    if (!os) throw FormatError("short write: " + path.string());
}

inline std::vector<float> read_f32(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is) throw FormatError("cannot open: " + path.string());
    const auto bytes = static_cast<std::size_t>(is.tellg());
    if (bytes % sizeof(float) != 0)
        throw FormatError("file size not a multiple of 4 bytes: " + path.string());
    std::vector<float> vals(bytes / sizeof(float));
    is.seekg(0);
    is.read(reinterpret_cast<char*>(vals.data()), static_cast<std::streamsize>(bytes));
    if (!is) throw FormatError("short read: " + path.string());
    return vals;
}

inline void write_u8(const std::filesystem::path& path, const std::vector<std::uint8_t>& vals) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open for writing: " + path.string());
    os.write(reinterpret_cast<const char*>(vals.data()), static_cast<std::streamsize>(vals.size()));
    if (!os) throw FormatError("short write: " + path.string());
}

inline std::vector<std::uint8_t> read_u8(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary | std::ios::ate);
    if (!is) throw FormatError("cannot open: " + path.string());
    const auto bytes = static_cast<std::size_t>(is.tellg());
    std::vector<std::uint8_t> vals(bytes);
    is.seekg(0);
    is.read(reinterpret_cast<char*>(vals.data()), static_cast<std::streamsize>(bytes));
    if (!is) throw FormatError("short read: " + path.string());
    return vals;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw FormatError("cannot open: " + path.string());
    return std::string(std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>());
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw FormatError("cannot open for writing: " + path.string());
    os << text;
    if (!os) throw FormatError("short write: " + path.string());
}

}  // namespace rffi

#endif
