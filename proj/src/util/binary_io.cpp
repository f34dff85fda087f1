#include "util/binary_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>

namespace specnet::binary {

std::uint64_t fnv1a(std::string_view bytes)
{
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (char c : bytes) {
        hash ^= static_cast<std::uint8_t>(c);
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

void Writer::u32(std::uint32_t v)
{
    for (int i = 0; i < 4; ++i) {
        bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
    }
}

void Writer::u64(std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) {
        bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xffU));
    }
}

void Writer::f64(double v)
{
    u64(std::bit_cast<std::uint64_t>(v));
}

void Writer::str(std::string_view v)
{
    u32(static_cast<std::uint32_t>(v.size()));
    bytes_.append(v);
}

std::string Writer::finish()
{
    const std::uint64_t checksum = fnv1a(bytes_);
    u64(checksum);
    return std::move(bytes_);
}

Reader::Reader(std::string_view bytes, std::string source) : source_(std::move(source))
{
    if (bytes.size() < magic.size() + 8) {
        fail("file is truncated (" + std::to_string(bytes.size()) + " bytes)");
    }
    if (bytes.substr(0, magic.size()) != magic) {
        fail("not a specnet checkpoint (bad magic)");
    }
    const std::string_view body = bytes.substr(0, bytes.size() - 8);
    const std::string_view tail = bytes.substr(body.size());
    std::uint64_t stored = 0;
    for (int i = 0; i < 8; ++i) {
        stored |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(tail[i])) << (8 * i);
    }
    if (stored != fnv1a(body)) {
        fail("checksum mismatch (file is truncated or corrupted)");
    }
    bytes_ = body;
}

std::string_view Reader::take(std::size_t n)
{
    if (n > bytes_.size() - pos_) {
        fail("unexpected end of data at byte " + std::to_string(pos_));
    }
    std::string_view out = bytes_.substr(pos_, n);
    pos_ += n;
    return out;
}

std::uint8_t Reader::u8()
{
    return static_cast<std::uint8_t>(take(1)[0]);
}

std::uint32_t Reader::u32()
{
    const std::string_view b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) {
        v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(b[i])) << (8 * i);
    }
    return v;
}

std::uint64_t Reader::u64()
{
    const std::string_view b = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) {
        v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(b[i])) << (8 * i);
    }
    return v;
}

double Reader::f64()
{
    return std::bit_cast<double>(u64());
}

std::string Reader::str()
{
    const std::uint32_t n = u32();
    return std::string(take(n));
}

std::string_view Reader::raw(std::size_t n)
{
    return take(n);
}

void Reader::expect_end() const
{
    if (pos_ != bytes_.size()) {
        fail(std::to_string(bytes_.size() - pos_) + " unexpected trailing bytes");
    }
}

void Reader::fail(const std::string& what) const
{
    throw CheckpointError(source_ + ": " + what);
}

void write_header(Writer& w, CheckpointKind kind)
{
    w.raw(magic);
    w.u32(checkpoint_version);
    w.u32(static_cast<std::uint32_t>(kind));
}

CheckpointKind read_header(Reader& r)
{
    r.raw(magic.size());
    const std::uint32_t version = r.u32();
    if (version != checkpoint_version) {
        r.fail("unsupported checkpoint version " + std::to_string(version) + " (expected " +
               std::to_string(checkpoint_version) + ")");
    }
    const std::uint32_t kind = r.u32();
    if (kind != static_cast<std::uint32_t>(CheckpointKind::network) &&
        kind != static_cast<std::uint32_t>(CheckpointKind::forest)) {
        r.fail("unknown checkpoint kind " + std::to_string(kind));
    }
    return static_cast<CheckpointKind>(kind);
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw CheckpointError("cannot open " + path.string());
    }
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file(const std::filesystem::path& path, std::string_view bytes)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw CheckpointError("cannot write " + path.string());
    }
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw CheckpointError("write failed for " + path.string());
    }
}

} // namespace specnet::binary
