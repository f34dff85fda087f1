#pragma once

// Little-endian encoding shared by the network and forest checkpoints.

#include "specnet/checkpoint.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace specnet::binary {

inline constexpr std::string_view magic{"SPECNET\0", 8};

std::uint64_t fnv1a(std::string_view bytes);

class Writer {
public:
    void u8(std::uint8_t v) { bytes_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f64(double v);
    void str(std::string_view v);
    void raw(std::string_view v) { bytes_.append(v); }

    /// Appends the checksum of everything written so far and returns the buffer.
    std::string finish();

private:
    std::string bytes_;
};

class Reader {
public:
    /// Verifies and strips the trailing checksum.
    Reader(std::string_view bytes, std::string source);

    std::uint8_t u8();
    std::uint32_t u32();
    std::uint64_t u64();
    double f64();
    std::string str();
    std::string_view raw(std::size_t n);

    /// Throws unless every byte before the checksum was consumed.
    void expect_end() const;

    [[noreturn]] void fail(const std::string& what) const;

private:
    std::string_view take(std::size_t n);

    std::string_view bytes_;
    std::size_t pos_ = 0;
    std::string source_;
};

/// Header shared by all checkpoint kinds: magic, version, kind.
void write_header(Writer& w, CheckpointKind kind);
/// Reads and validates the header; returns the stored kind.
CheckpointKind read_header(Reader& r);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view bytes);

} // namespace specnet::binary
