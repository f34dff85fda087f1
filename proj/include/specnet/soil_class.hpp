#pragma once

#include "specnet/dataset.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace specnet {

/// Vertex of a texture-triangle region, in (clay %, silt %).
struct TexturePoint {
    double clay_pct;
    double silt_pct;

    friend bool operator==(const TexturePoint&, const TexturePoint&) = default;
};

struct ClassRegion {
    SoilClass label;
    std::vector<TexturePoint> vertices;

    friend bool operator==(const ClassRegion&, const ClassRegion&) = default;
};

/// Polygons that map a texture to one of the four main groups.
///
/// A point is assigned to the first region, in the order T, U, S, L,
/// that contains it; polygon edges count as inside. Every point of the
/// texture triangle must be covered by some region.
///
/// CSV form: header `class,clay_pct,silt_pct`, then one row per vertex.
/// Rows of one class are consecutive and list its polygon in order.
class BoundaryTable {
public:
    explicit BoundaryTable(std::vector<ClassRegion> regions);

    /// Simplified main-group regions: T clay >= 45, U silt >= 65 with
    /// clay < 30, S clay <= 17 and silt <= 40 (tapering), L elsewhere.
    static const BoundaryTable& ka5_default();

    static BoundaryTable load_csv(const std::filesystem::path& path);
    static BoundaryTable read_csv(std::istream& in, const std::string& source = "<stream>");
    void write_csv(std::ostream& out) const;

    const std::vector<ClassRegion>& regions() const noexcept { return regions_; }

    /// Class of a point already on the texture triangle.
    SoilClass classify(double clay_pct, double silt_pct) const;

private:
    std::vector<ClassRegion> regions_;
};

inline constexpr std::array<SoilClass, soil_class_count> boundary_priority{
    SoilClass::T, SoilClass::U, SoilClass::S, SoilClass::L};

/// Validates the texture, rescales it to sum exactly 100, and classifies
/// the (clay, silt) point.
SoilClass assign_soil_class(const Texture& texture,
                            const BoundaryTable& table = BoundaryTable::ka5_default());

} // namespace specnet
