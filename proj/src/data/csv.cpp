#include "specnet/csv.hpp"

#include "util/text.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace specnet {

CsvFormat parse_csv_format(std::string_view name)
{
    if (name == "raw") {
        return CsvFormat::raw;
    }
    if (name == "reduced") {
        return CsvFormat::reduced;
    }
    throw Error("unknown CSV format '" + std::string(name) + "' (expected raw or reduced)");
}

std::size_t default_band_count(CsvFormat format)
{
    return format == CsvFormat::raw ? raw_band_count : reduced_band_count;
}

namespace {

std::string band_column(std::size_t index, std::size_t bands)
{
    const std::size_t width = std::max<std::size_t>(3, std::to_string(bands - 1).size());
    std::string digits = std::to_string(index);
    return "b" + std::string(width - std::min(width, digits.size()), '0') + digits;
}

std::size_t leading_columns(CsvFormat format)
{
    return format == CsvFormat::raw ? 4 : 2;
}

} // namespace

std::vector<std::string> csv_header(CsvFormat format, std::size_t bands)
{
    if (bands == 0) {
        throw Error("CSV schema needs at least one band");
    }
    std::vector<std::string> header;
    if (format == CsvFormat::raw) {
        header = {"sample_id", "clay_pct", "silt_pct", "sand_pct"};
    } else {
        header = {"sample_id", "label"};
    }
    for (std::size_t b = 0; b < bands; ++b) {
        header.push_back(band_column(b, bands));
    }
    return header;
}

std::vector<Sample> read_csv(std::istream& in, CsvFormat format, std::size_t bands,
                             const std::string& source)
{
    const std::vector<std::string> expected = csv_header(format, bands);
    std::string line;
    if (!std::getline(in, line)) {
        throw CsvError(source + ": missing header row", 0);
    }
    const std::vector<std::string> header = text::split_csv_line(text::strip_cr(line));
    if (header != expected) {
        std::string detail;
        if (header.size() != expected.size()) {
            detail = std::to_string(header.size()) + " columns, expected " +
                     std::to_string(expected.size());
        } else {
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (header[i] != expected[i]) {
                    detail = "column " + std::to_string(i + 1) + " is '" + header[i] +
                             "', expected '" + expected[i] + "'";
                    break;
                }
            }
        }
        throw CsvError(source + ": header does not match the " +
                           std::string(format == CsvFormat::raw ? "raw" : "reduced") +
                           " schema (" + detail + ")",
                       0);
    }

    const std::size_t lead = leading_columns(format);
    std::vector<Sample> samples;
    std::size_t line_no = 1;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++line_no;
        line = text::strip_cr(line);
        if (line.empty()) {
            continue;
        }
        ++row;
        const std::string where =
            source + " row " + std::to_string(row) + " (line " + std::to_string(line_no) + ")";
        const std::vector<std::string> cells = text::split_csv_line(line);
        if (cells.size() != expected.size()) {
            throw CsvError(where + ": " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(expected.size()),
                           row);
        }
        Sample sample;
        sample.id = cells[0];
        if (sample.id.empty()) {
            throw CsvError(where + ": empty sample_id", row);
        }
        auto number = [&](std::size_t column) {
            double value = 0.0;
            if (!text::try_parse_double(cells[column], value)) {
                throw CsvError(where + ", column " + expected[column] + ": non-numeric value '" +
                                   cells[column] + "'",
                               row);
            }
            return value;
        };
        if (format == CsvFormat::raw) {
            sample.texture = Texture{number(1), number(2), number(3)};
        } else if (!cells[1].empty()) {
            try {
                sample.label = parse_soil_class(cells[1]);
            } catch (const Error& e) {
                throw CsvError(where + ", column label: " + e.what(), row);
            }
        }
        std::vector<double> values(bands);
        for (std::size_t b = 0; b < bands; ++b) {
            values[b] = number(lead + b);
        }
        sample.spectrum = Tensor::row(std::move(values));
        samples.push_back(std::move(sample));
    }
    return samples;
}

std::vector<Sample> load_csv(const std::filesystem::path& path, CsvFormat format)
{
    return load_csv(path, format, default_band_count(format));
}

std::vector<Sample> load_csv(const std::filesystem::path& path, CsvFormat format,
                             std::size_t bands)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    return read_csv(in, format, bands, path.string());
}

void write_csv(std::ostream& out, std::span<const Sample> samples, CsvFormat format)
{
    const std::size_t bands =
        samples.empty() ? default_band_count(format) : samples.front().spectrum.size();
    const std::vector<std::string> header = csv_header(format, bands);
    for (std::size_t i = 0; i < header.size(); ++i) {
        out << (i ? "," : "") << header[i];
    }
    out << '\n';
    for (const Sample& s : samples) {
        if (s.spectrum.size() != bands) {
            throw ShapeError("sample '" + s.id + "' has " + std::to_string(s.spectrum.size()) +
                             " bands, expected " + std::to_string(bands));
        }
        out << s.id;
        if (format == CsvFormat::raw) {
            if (!s.texture) {
                throw Error("sample '" + s.id + "' has no texture for the raw format");
            }
            out << ',' << text::format_double(s.texture->clay_pct) << ','
                << text::format_double(s.texture->silt_pct) << ','
                << text::format_double(s.texture->sand_pct);
        } else {
            out << ',';
            if (s.label) {
                out << to_char(*s.label);
            }
        }
        for (double v : s.spectrum.values()) {
            out << ',' << text::format_double(v);
        }
        out << '\n';
    }
}

void save_csv(const std::filesystem::path& path, std::span<const Sample> samples, CsvFormat format)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    write_csv(out, samples, format);
    if (!out) {
        throw Error("write failed for " + path.string());
    }
}

} // namespace specnet
