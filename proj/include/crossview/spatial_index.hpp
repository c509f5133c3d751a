#pragma once

#include "crossview/geometry.hpp"

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace crossview::geom {

// Uniform grid over axis-aligned boxes. Queries return candidate indexes
// (every box whose bbox meets the disc, no false negatives); callers apply
// their own exact geometry test afterwards.
class BoxGrid {
public:
    BoxGrid(std::vector<Bbox> boxes, double cell_size);

    // Indexes of all boxes whose bbox intersects the closed disc, ascending.
    std::vector<std::size_t> query_disc(const GeoPoint& center, double radius) const;

    std::size_t size() const { return boxes_.size(); }

private:
    std::vector<Bbox> boxes_;
    double cell_size_;
    double origin_x_ = 0.0;
    double origin_y_ = 0.0;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;

    std::uint64_t cell_key(std::int64_t ix, std::int64_t iy) const;
};

// Uniform grid over points supporting exact nearest-neighbor lookup.
// Equal distances resolve to the smallest id, then the lowest insertion
// index, so results never depend on grid layout.
class PointGrid {
public:
    struct Entry {
        GeoPoint position;
        std::uint64_t id = 0;
    };

    struct Neighbor {
        std::size_t index = 0; // index into the entry list passed at build
        double dist = 0.0;
    };

    PointGrid(std::vector<Entry> entries, double cell_size);

    // Nearest entry within max_radius (inclusive), or nullopt.
    std::optional<Neighbor> nearest(const GeoPoint& query, double max_radius) const;

    std::size_t size() const { return entries_.size(); }
    const Entry& entry(std::size_t index) const { return entries_[index]; }

private:
    std::vector<Entry> entries_;
    double cell_size_;
    double origin_x_ = 0.0;
    double origin_y_ = 0.0;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> cells_;

    std::uint64_t cell_key(std::int64_t ix, std::int64_t iy) const;
    void scan_cell(std::int64_t ix, std::int64_t iy, const GeoPoint& query,
                   std::optional<Neighbor>& best) const;
};

} // namespace crossview::geom
