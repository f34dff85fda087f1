#pragma once

// Sample tables on disk.
//
//   raw:     sample_id,clay_pct,silt_pct,sand_pct,b0000,...,b4199
//   reduced: sample_id,label,b000,...,b255
//
// Band columns are `b` plus the zero-based band index, zero padded to
// the width of the largest index (at least three digits). Comma
// delimited, '.' decimal separator, one header row, no quoting. An empty
// label cell in a reduced file denotes an unlabeled sample.

#include "specnet/dataset.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace specnet {

enum class CsvFormat { raw, reduced };

CsvFormat parse_csv_format(std::string_view name);

/// Raised for malformed input; carries the 1-based data row (0 for the header).
class CsvError : public Error {
public:
    CsvError(const std::string& message, std::size_t row) : Error(message), row_(row) {}
    std::size_t row() const noexcept { return row_; }

private:
    std::size_t row_;
};

std::vector<std::string> csv_header(CsvFormat format, std::size_t bands);
std::size_t default_band_count(CsvFormat format);

std::vector<Sample> read_csv(std::istream& in, CsvFormat format, std::size_t bands,
                             const std::string& source = "<stream>");
std::vector<Sample> load_csv(const std::filesystem::path& path, CsvFormat format);
std::vector<Sample> load_csv(const std::filesystem::path& path, CsvFormat format,
                             std::size_t bands);

/// Writes samples in `format`; values round-trip exactly.
void write_csv(std::ostream& out, std::span<const Sample> samples, CsvFormat format);
void save_csv(const std::filesystem::path& path, std::span<const Sample> samples,
              CsvFormat format);

} // namespace specnet
