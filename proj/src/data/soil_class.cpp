#include "specnet/soil_class.hpp"

#include "util/text.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace specnet {

namespace {

constexpr double edge_tolerance = 1e-9;

bool on_segment(const TexturePoint& a, const TexturePoint& b, double x, double y)
{
    const double cross = (b.clay_pct - a.clay_pct) * (y - a.silt_pct) -
                         (b.silt_pct - a.silt_pct) * (x - a.clay_pct);
    const double length = std::hypot(b.clay_pct - a.clay_pct, b.silt_pct - a.silt_pct);
    if (std::abs(cross) > edge_tolerance * std::max(1.0, length)) {
        return false;
    }
    return x >= std::min(a.clay_pct, b.clay_pct) - edge_tolerance &&
           x <= std::max(a.clay_pct, b.clay_pct) + edge_tolerance &&
           y >= std::min(a.silt_pct, b.silt_pct) - edge_tolerance &&
           y <= std::max(a.silt_pct, b.silt_pct) + edge_tolerance;
}

// Even-odd ray casting along +clay; edges are inside.
bool contains(const std::vector<TexturePoint>& polygon, double x, double y)
{
    bool inside = false;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const TexturePoint& a = polygon[i];
        const TexturePoint& b = polygon[j];
        if (on_segment(a, b, x, y)) {
            return true;
        }
        if ((a.silt_pct > y) != (b.silt_pct > y)) {
            const double crossing = a.clay_pct + (y - a.silt_pct) * (b.clay_pct - a.clay_pct) /
                                                     (b.silt_pct - a.silt_pct);
            if (x < crossing) {
                inside = !inside;
            }
        }
    }
    return inside;
}

} // namespace

BoundaryTable::BoundaryTable(std::vector<ClassRegion> regions) : regions_(std::move(regions))
{
    if (regions_.empty()) {
        throw Error("boundary table has no regions");
    }
    for (const ClassRegion& r : regions_) {
        if (r.vertices.size() < 3) {
            throw Error(std::string("boundary region ") + to_char(r.label) +
                        " needs at least 3 vertices");
        }
    }
    std::stable_sort(regions_.begin(), regions_.end(),
                     [](const ClassRegion& a, const ClassRegion& b) {
                         auto rank = [](SoilClass c) {
                             return std::find(boundary_priority.begin(), boundary_priority.end(),
                                              c) -
                                    boundary_priority.begin();
                         };
                         return rank(a.label) < rank(b.label);
                     });
}

const BoundaryTable& BoundaryTable::ka5_default()
{
    static const BoundaryTable table({
        {SoilClass::T, {{45, 0}, {100, 0}, {45, 55}}},
        {SoilClass::U, {{0, 65}, {30, 65}, {30, 70}, {0, 100}}},
        {SoilClass::S, {{0, 0}, {17, 0}, {17, 25}, {8, 40}, {0, 40}}},
        {SoilClass::L, {{0, 0}, {100, 0}, {0, 100}}},
    });
    return table;
}

SoilClass BoundaryTable::classify(double clay_pct, double silt_pct) const
{
    for (const ClassRegion& region : regions_) {
        if (contains(region.vertices, clay_pct, silt_pct)) {
            return region.label;
        }
    }
    throw Error("boundary table does not cover clay " + std::to_string(clay_pct) + "%, silt " +
                std::to_string(silt_pct) + "%");
}

BoundaryTable BoundaryTable::load_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open boundary table " + path.string());
    }
    return read_csv(in, path.string());
}

BoundaryTable BoundaryTable::read_csv(std::istream& in, const std::string& source)
{
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(source + ": empty boundary table");
    }
    const auto header = text::split_csv_line(text::strip_cr(line));
    if (header != std::vector<std::string>{"class", "clay_pct", "silt_pct"}) {
        throw Error(source + ": boundary table header must be 'class,clay_pct,silt_pct'");
    }
    std::vector<ClassRegion> regions;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = text::strip_cr(line);
        if (line.empty()) {
            continue;
        }
        const auto cells = text::split_csv_line(line);
        const std::string where = source + " line " + std::to_string(line_no);
        if (cells.size() != 3) {
            throw Error(where + ": expected 3 cells, got " + std::to_string(cells.size()));
        }
        const SoilClass label = parse_soil_class(cells[0]);
        const TexturePoint point{text::parse_double(cells[1], where + " clay_pct"),
                                 text::parse_double(cells[2], where + " silt_pct")};
        if (regions.empty() || regions.back().label != label) {
            for (const ClassRegion& r : regions) {
                if (r.label == label) {
                    throw Error(where + ": vertices of class " + cells[0] +
                                " are not consecutive");
                }
            }
            regions.push_back({label, {}});
        }
        regions.back().vertices.push_back(point);
    }
    return BoundaryTable(std::move(regions));
}

void BoundaryTable::write_csv(std::ostream& out) const
{
    out << "class,clay_pct,silt_pct\n";
    for (const ClassRegion& region : regions_) {
        for (const TexturePoint& p : region.vertices) {
            out << to_char(region.label) << ',' << text::format_double(p.clay_pct) << ','
                << text::format_double(p.silt_pct) << '\n';
        }
    }
}

SoilClass assign_soil_class(const Texture& texture, const BoundaryTable& table)
{
    validate_texture(texture);
    const double total = texture.clay_pct + texture.silt_pct + texture.sand_pct;
    const double clay = texture.clay_pct * 100.0 / total;
    const double silt = texture.silt_pct * 100.0 / total;
    return table.classify(clay, silt);
}

} // namespace specnet
