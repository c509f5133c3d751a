#pragma once

#include "crossview/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace crossview::ingest {

enum class HighwayClass { primary, secondary, other };

enum class SpeedUnit { kmh, mph };

// Speed limits are stored exactly as tagged in the source, never converted.
struct MaxSpeed {
    double value = 0.0;
    SpeedUnit unit = SpeedUnit::kmh;
    friend bool operator==(const MaxSpeed&, const MaxSpeed&) = default;
};

struct RoadSegment {
    std::int64_t way_id = 0;
    std::vector<geom::GeoPoint> geometry;
    HighwayClass highway_class = HighwayClass::other;
    std::optional<MaxSpeed> max_speed;
    std::vector<std::int64_t> node_ids; // parallel to geometry
};

struct BuildingFootprint {
    std::int64_t way_id = 0;
    geom::PolygonRing ring;
    std::vector<std::pair<std::string, std::string>> tags; // carried, unused
};

struct AccidentRecord {
    std::string accident_id;
    geom::GeoPoint location;
    int year = 0;
    std::string severity; // carried, unused
};

struct TrafficCountPoint {
    std::int64_t count_point_id = 0;
    geom::GeoPoint location;
    double aadf = 0.0;
};

struct StudyArea {
    geom::GeoPoint center;
    double radius_m = 0.0;

    double radius_deg() const {
        return geom::Conversion::meters_to_degrees(radius_m);
    }
};

struct OsmData {
    std::vector<RoadSegment> roads;
    std::vector<BuildingFootprint> buildings;
    std::size_t skipped_ways = 0; // missing node refs or invalid building rings
};

// Scans OSM XML for drivable ways and closed building outlines, resolves
// node references, and keeps only features with at least one vertex inside
// the study disc. Malformed XML raises ParseError with a byte offset; ways
// referencing absent nodes or carrying broken rings are skipped and counted.
OsmData parse_osm_extract(std::string_view xml, const StudyArea& area);

struct AccidentColumns {
    std::string id = "accident_index"; // optional in the source
    std::string longitude = "longitude";
    std::string latitude = "latitude";
    std::string year = "accident_year"; // preferred over date when present
    std::string date = "date";
    std::string severity = "accident_severity";
};

struct AccidentParse {
    std::vector<AccidentRecord> records;
    std::size_t rejected = 0;
};

// Rows with year >= min_year and parseable finite coordinates are returned;
// everything else adds to the reject count. A missing mandatory column
// raises SchemaError naming it.
AccidentParse parse_accident_csv(std::string_view text, int min_year,
                                 const AccidentColumns& columns = {});

struct TrafficColumns {
    std::string id = "count_point_id";
    std::string latitude = "latitude";
    std::string longitude = "longitude";
    std::string flow = "all_motor_vehicles";
};

struct TrafficParse {
    std::vector<TrafficCountPoint> points;
    std::size_t rejected = 0;
};

TrafficParse parse_aadf_csv(std::string_view text, const TrafficColumns& columns = {});

// Study-area filters. Point records test their location; line and polygon
// features stay whole if any vertex lies inside (inclusive boundary).
std::vector<AccidentRecord> clip_to_area(std::vector<AccidentRecord> items,
                                         const StudyArea& area);
std::vector<TrafficCountPoint> clip_to_area(std::vector<TrafficCountPoint> items,
                                            const StudyArea& area);
std::vector<RoadSegment> clip_to_area(std::vector<RoadSegment> items,
                                      const StudyArea& area);
std::vector<BuildingFootprint> clip_to_area(std::vector<BuildingFootprint> items,
                                            const StudyArea& area);

} // namespace crossview::ingest
