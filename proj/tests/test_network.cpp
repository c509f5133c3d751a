#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "crossview/errors.hpp"
#include "crossview/network.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace crossview;
using geom::GeoPoint;
using ingest::HighwayClass;
using network::IntersectionNode;
using network::RoadType;

namespace {

ingest::RoadSegment make_way(std::int64_t way_id, HighwayClass cls,
                             std::vector<std::pair<std::int64_t, GeoPoint>> points,
                             std::optional<ingest::MaxSpeed> speed = std::nullopt) {
    ingest::RoadSegment seg;
    seg.way_id = way_id;
    seg.highway_class = cls;
    seg.max_speed = speed;
    for (const auto& [id, pt] : points) {
        seg.node_ids.push_back(id);
        seg.geometry.push_back(pt);
    }
    return seg;
}

} // namespace

TEST_CASE("detect_intersections finds crossings and T-junctions only") {
    SUBCASE("two ways crossing share one interior node") {
        const std::vector<ingest::RoadSegment> ways{
            make_way(1, HighwayClass::primary,
                     {{10, {0.0, -1.0}}, {11, {0.0, 0.0}}, {12, {0.0, 1.0}}}),
            make_way(2, HighwayClass::other,
                     {{20, {-1.0, 0.0}}, {11, {0.0, 0.0}}, {21, {1.0, 0.0}}})};
        const auto nodes = network::detect_intersections(ways);
        REQUIRE(nodes.size() == 1);
        CHECK(nodes[0].node_id == 11);
        CHECK(nodes[0].location == GeoPoint{0.0, 0.0});
        CHECK(nodes[0].incident_segments == std::vector<std::int64_t>{1, 2});
        CHECK(nodes[0].merged_from == std::vector<std::int64_t>{11});
    }
    SUBCASE("a mid-way vertex used by one way is not an intersection") {
        const std::vector<ingest::RoadSegment> ways{
            make_way(1, HighwayClass::primary,
                     {{10, {0.0, 0.0}}, {11, {0.5, 0.0}}, {12, {1.0, 0.0}}})};
        CHECK(network::detect_intersections(ways).empty());
    }
    SUBCASE("T-junction: way end touching a mid-way node") {
        const std::vector<ingest::RoadSegment> ways{
            make_way(1, HighwayClass::secondary,
                     {{10, {-1.0, 0.0}}, {11, {0.0, 0.0}}, {12, {1.0, 0.0}}}),
            make_way(2, HighwayClass::other, {{20, {0.0, 1.0}}, {11, {0.0, 0.0}}})};
        const auto nodes = network::detect_intersections(ways);
        REQUIRE(nodes.size() == 1);
        CHECK(nodes[0].node_id == 11);
    }
    SUBCASE("two ways continuing through a shared endpoint do not qualify") {
        const std::vector<ingest::RoadSegment> ways{
            make_way(1, HighwayClass::primary, {{10, {0.0, 0.0}}, {11, {1.0, 0.0}}}),
            make_way(2, HighwayClass::primary, {{11, {1.0, 0.0}}, {12, {2.0, 0.0}}})};
        CHECK(network::detect_intersections(ways).empty());
    }
}

namespace {

IntersectionNode plain_node(std::int64_t id, GeoPoint at,
                            std::vector<std::int64_t> ways = {}) {
    IntersectionNode node;
    node.node_id = id;
    node.location = at;
    node.incident_segments = std::move(ways);
    node.merged_from = {id};
    return node;
}

bool nodes_equal(const IntersectionNode& a, const IntersectionNode& b) {
    return a.node_id == b.node_id && a.location == b.location &&
           a.incident_segments == b.incident_segments &&
           a.merged_from == b.merged_from;
}

} // namespace

TEST_CASE("merge_close collapses clusters and respects the threshold") {
    SUBCASE("pair within threshold merges at the midpoint") {
        auto merged = network::merge_close(
            {plain_node(5, {0.0, 0.0}, {1}), plain_node(3, {0.0001, 0.0}, {2})},
            0.0003);
        REQUIRE(merged.size() == 1);
        CHECK(merged[0].node_id == 3);
        CHECK(merged[0].location.lon == doctest::Approx(0.00005).epsilon(1e-12));
        CHECK(merged[0].location.lat == 0.0);
        CHECK(merged[0].incident_segments == std::vector<std::int64_t>{1, 2});
        CHECK(merged[0].merged_from == std::vector<std::int64_t>{3, 5});
    }
    SUBCASE("pair beyond threshold stays apart") {
        const auto merged = network::merge_close(
            {plain_node(5, {0.0, 0.0}), plain_node(3, {0.0004, 0.0})}, 0.0003);
        CHECK(merged.size() == 2);
        CHECK(merged[0].node_id == 3);
        CHECK(merged[1].node_id == 5);
    }
    SUBCASE("single-linkage chains collapse even when the ends are far") {
        const auto merged = network::merge_close(
            {plain_node(1, {0.0, 0.0}), plain_node(2, {0.00025, 0.0}),
             plain_node(3, {0.0005, 0.0})},
            0.0003);
        REQUIRE(merged.size() == 1);
        CHECK(merged[0].node_id == 1);
        CHECK(merged[0].location.lon == doctest::Approx(0.00025).epsilon(1e-12));
        CHECK(merged[0].merged_from == std::vector<std::int64_t>{1, 2, 3});
    }
    SUBCASE("output is independent of input order") {
        std::vector<IntersectionNode> nodes;
        std::mt19937 rng(1723);
        std::uniform_real_distribution<double> coord(0.0, 0.01);
        for (int i = 0; i < 40; ++i) {
            nodes.push_back(plain_node(100 + i, {coord(rng), coord(rng)},
                                       {i % 7, i % 5}));
        }
        const auto reference = network::merge_close(nodes, 0.0012);
        for (int trial = 0; trial < 5; ++trial) {
            std::shuffle(nodes.begin(), nodes.end(), rng);
            const auto shuffled = network::merge_close(nodes, 0.0012);
            REQUIRE(shuffled.size() == reference.size());
            for (std::size_t i = 0; i < reference.size(); ++i) {
                CHECK(nodes_equal(shuffled[i], reference[i]));
            }
        }
    }
    SUBCASE("invalid threshold is rejected") {
        CHECK_THROWS_AS(network::merge_close({}, 0.0), ValidationError);
    }
}

TEST_CASE("classification follows the any-primary-arm rule") {
    const std::vector<ingest::RoadSegment> ways{
        make_way(1, HighwayClass::primary, {{1, {0.0, 0.0}}, {2, {1.0, 0.0}}}),
        make_way(2, HighwayClass::other, {{1, {0.0, 0.0}}, {3, {0.0, 1.0}}}),
        make_way(3, HighwayClass::secondary, {{1, {0.0, 0.0}}, {4, {0.0, -1.0}}}),
        make_way(4, HighwayClass::other, {{1, {0.0, 0.0}}, {5, {-1.0, 0.0}}})};

    CHECK(network::classify(plain_node(1, {0.0, 0.0}, {1, 2}), ways) ==
          RoadType::primary);
    CHECK(network::classify(plain_node(1, {0.0, 0.0}, {3, 3}), ways) ==
          RoadType::secondary);
    CHECK(network::classify(plain_node(1, {0.0, 0.0}, {2, 4}), ways) ==
          RoadType::secondary);
    CHECK_THROWS_AS(network::classify(plain_node(1, {0.0, 0.0}, {}), ways),
                    ValidationError);

    // Monotone: adding a primary arm never demotes a primary node.
    auto node = plain_node(1, {0.0, 0.0}, {3});
    CHECK(network::classify(node, ways) == RoadType::secondary);
    node.incident_segments.push_back(1);
    CHECK(network::classify(node, ways) == RoadType::primary);
    node.incident_segments.push_back(2);
    CHECK(network::classify(node, ways) == RoadType::primary);
}

TEST_CASE("apply_road_attributes sets speeds, types, and modeling eligibility") {
    using ingest::MaxSpeed;
    using ingest::SpeedUnit;
    const std::vector<ingest::RoadSegment> ways{
        make_way(1, HighwayClass::primary, {{1, {0.0, 0.0}}, {2, {1.0, 0.0}}},
                 MaxSpeed{30.0, SpeedUnit::mph}),
        make_way(2, HighwayClass::secondary, {{1, {0.0, 0.0}}, {3, {0.0, 1.0}}},
                 MaxSpeed{20.0, SpeedUnit::mph}),
        make_way(3, HighwayClass::other, {{4, {5.0, 5.0}}, {5, {6.0, 5.0}}}),
        make_way(4, HighwayClass::other, {{4, {5.0, 5.0}}, {6, {5.0, 6.0}}},
                 MaxSpeed{20.0, SpeedUnit::mph})};

    std::vector<IntersectionNode> nodes{plain_node(1, {0.0, 0.0}, {1, 2}),
                                        plain_node(4, {5.0, 5.0}, {3}),
                                        plain_node(9, {9.0, 9.0}, {3})};
    network::apply_road_attributes(nodes, ways);

    CHECK(nodes[0].road_type == RoadType::primary);
    CHECK(nodes[0].has_major_arm);
    CHECK(nodes[0].max_speed == 30.0); // max over incident arms

    CHECK(nodes[1].road_type == RoadType::secondary);
    CHECK_FALSE(nodes[1].has_major_arm);
    // Way 3 has no value: the modal study-area speed fills in. Values 30,
    // 20, 20 appear, so the mode is 20.
    CHECK(nodes[1].max_speed == 20.0);
    CHECK(nodes[2].max_speed == 20.0);

    SUBCASE("modal tie breaks to the smallest value") {
        const std::vector<ingest::RoadSegment> tied{
            make_way(1, HighwayClass::primary, {{1, {0.0, 0.0}}, {2, {1.0, 0.0}}},
                     MaxSpeed{40.0, SpeedUnit::mph}),
            make_way(2, HighwayClass::primary, {{3, {2.0, 0.0}}, {4, {3.0, 0.0}}},
                     MaxSpeed{30.0, SpeedUnit::mph})};
        std::vector<IntersectionNode> bare{plain_node(7, {9.0, 9.0}, {99})};
        network::apply_road_attributes(bare, tied);
        CHECK(bare[0].max_speed == 30.0);
    }
    SUBCASE("no speed data anywhere is an error") {
        const std::vector<ingest::RoadSegment> silent{
            make_way(1, HighwayClass::primary, {{1, {0.0, 0.0}}, {2, {1.0, 0.0}}})};
        std::vector<IntersectionNode> bare{plain_node(1, {0.0, 0.0}, {1})};
        CHECK_THROWS_AS(network::apply_road_attributes(bare, silent), ValidationError);
    }
}

namespace {

ingest::AccidentRecord accident_at(GeoPoint where) {
    ingest::AccidentRecord rec;
    rec.accident_id = "x";
    rec.location = where;
    rec.year = 2015;
    return rec;
}

} // namespace

TEST_CASE("assign_accidents increments only the nearest node within radius") {
    std::vector<IntersectionNode> nodes{plain_node(7, {0.0, 0.0}),
                                        plain_node(9, {0.0005, 0.0})};

    SUBCASE("nearest node wins") {
        const auto result = network::assign_accidents(
            nodes, {accident_at({0.0002, 0.0})}, 0.0003);
        CHECK(result.nodes[0].accident_count == 1);
        CHECK(result.nodes[1].accident_count == 0);
        CHECK(result.uncounted == 0);
    }
    SUBCASE("outside every radius stays uncounted") {
        const auto result = network::assign_accidents(
            nodes, {accident_at({0.0, 0.001})}, 0.0003);
        CHECK(result.nodes[0].accident_count == 0);
        CHECK(result.nodes[1].accident_count == 0);
        CHECK(result.uncounted == 1);
    }
    SUBCASE("exact tie goes to the smallest node_id") {
        std::vector<IntersectionNode> tied{plain_node(9, {0.0, 0.0}),
                                           plain_node(7, {0.5, 0.0})};
        const auto result =
            network::assign_accidents(tied, {accident_at({0.25, 0.0})}, 0.3);
        REQUIRE(result.nodes.size() == 2);
        for (const auto& node : result.nodes) {
            if (node.node_id == 7) CHECK(node.accident_count == 1);
            if (node.node_id == 9) CHECK(node.accident_count == 0);
        }
    }
    SUBCASE("boundary distance counts (inclusive radius)") {
        std::vector<IntersectionNode> one{plain_node(1, {0.0, 0.0})};
        const auto result =
            network::assign_accidents(one, {accident_at({0.0003, 0.0})}, 0.0003);
        CHECK(result.nodes[0].accident_count == 1);
    }
}

TEST_CASE("assign_accidents matches a brute-force oracle on a random fixture") {
    std::mt19937 rng(20111);
    std::uniform_real_distribution<double> coord(0.0, 0.01);
    std::vector<IntersectionNode> nodes;
    for (int i = 0; i < 30; ++i) {
        nodes.push_back(plain_node(1000 + i * 3, {coord(rng), coord(rng)}));
    }
    std::vector<ingest::AccidentRecord> accidents;
    for (int i = 0; i < 200; ++i) {
        accidents.push_back(accident_at({coord(rng), coord(rng)}));
    }
    const double radius = 0.0003;

    std::vector<int> expected(nodes.size(), 0);
    std::size_t expected_uncounted = 0;
    for (const auto& accident : accidents) {
        std::size_t best = nodes.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            const double d = geom::distance(accident.location, nodes[i].location);
            if (d > radius) continue;
            if (d < best_d ||
                (d == best_d && nodes[i].node_id < nodes[best].node_id)) {
                best_d = d;
                best = i;
            }
        }
        if (best == nodes.size()) {
            ++expected_uncounted;
        } else {
            ++expected[best];
        }
    }

    const auto result = network::assign_accidents(nodes, accidents, radius);
    CHECK(result.uncounted == expected_uncounted);
    std::size_t total = result.uncounted;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        CHECK(result.nodes[i].accident_count == expected[i]);
        total += static_cast<std::size_t>(result.nodes[i].accident_count);
    }
    // No accident is dropped or double-counted.
    CHECK(total == accidents.size());
}

TEST_CASE("assign_traffic takes the nearest count point with id tie-break") {
    auto nodes = std::vector<IntersectionNode>{plain_node(1, {0.0, 0.0}),
                                               plain_node(2, {1.0, 1.0})};

    SUBCASE("single point feeds every node") {
        const auto fed = network::assign_traffic(
            nodes, {ingest::TrafficCountPoint{50, {5.0, 5.0}, 12345.0}});
        CHECK(fed[0].traffic == 12345.0);
        CHECK(fed[1].traffic == 12345.0);
    }
    SUBCASE("nearer point wins") {
        const auto fed = network::assign_traffic(
            nodes, {ingest::TrafficCountPoint{1, {0.1, 0.0}, 1000.0},
                    ingest::TrafficCountPoint{2, {5.0, 0.0}, 9000.0}});
        CHECK(fed[0].traffic == 1000.0);
    }
    SUBCASE("exact tie resolves to the smallest count_point_id") {
        std::vector<IntersectionNode> centered{plain_node(1, {0.25, 0.0})};
        const auto fed = network::assign_traffic(
            centered, {ingest::TrafficCountPoint{5, {0.0, 0.0}, 111.0},
                       ingest::TrafficCountPoint{3, {0.5, 0.0}, 222.0}});
        CHECK(fed[0].traffic == 222.0);
    }
    SUBCASE("no count points is an error") {
        CHECK_THROWS_AS(network::assign_traffic(nodes, {}), ValidationError);
    }
}

TEST_CASE("assign_traffic equals exhaustive nearest-neighbor search") {
    std::mt19937 rng(4457);
    std::uniform_real_distribution<double> coord(-0.05, 0.05);
    std::uniform_int_distribution<std::int64_t> ids(1, 40);
    std::vector<IntersectionNode> nodes;
    for (int i = 0; i < 50; ++i) {
        nodes.push_back(plain_node(i + 1, {coord(rng), coord(rng)}));
    }
    std::vector<ingest::TrafficCountPoint> points;
    for (int i = 0; i < 20; ++i) {
        points.push_back(
            ingest::TrafficCountPoint{ids(rng), {coord(rng), coord(rng)},
                                      static_cast<double>(100 * i)});
    }

    const auto fed = network::assign_traffic(nodes, points);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < points.size(); ++j) {
            const double dj = geom::distance_sq(nodes[i].location, points[j].location);
            const double db = geom::distance_sq(nodes[i].location, points[best].location);
            if (dj < db || (dj == db &&
                            points[j].count_point_id < points[best].count_point_id)) {
                best = j;
            }
        }
        CHECK(fed[i].traffic == points[best].aadf);
    }
}

TEST_CASE("finalize_dataset filters, encodes, and sorts rows") {
    std::vector<IntersectionNode> nodes;
    for (int i = 0; i < 10; ++i) {
        auto node = plain_node(100 - i, {0.001 * i, 0.0});
        node.has_major_arm = true;
        node.road_type = i % 2 == 0 ? RoadType::primary : RoadType::secondary;
        node.accident_count = i < 3 ? 0 : i; // three zero-accident nodes
        node.traffic = 1000.0 * i;
        node.max_speed = 30.0;
        nodes.push_back(node);
    }
    std::unordered_map<std::int64_t, double> vis;
    for (const auto& node : nodes) vis[node.node_id] = 0.5;

    const auto table = network::finalize_dataset(nodes, vis);
    CHECK(table.rows.size() == 7);
    CHECK(std::is_sorted(table.rows.begin(), table.rows.end(),
                         [](const network::ModelingRow& a,
                            const network::ModelingRow& b) {
                             return a.node_id < b.node_id;
                         }));
    for (const auto& row : table.rows) {
        CHECK(row.accident_count >= 1);
        CHECK(row.road_type_primary + row.road_type_secondary == 1);
        CHECK(row.visible_percentage == 0.5);
    }

    SUBCASE("zero-accident and no-major-arm nodes are excluded") {
        auto minor = plain_node(7, {0.0, 0.0});
        minor.has_major_arm = false;
        minor.accident_count = 5;
        auto silent = plain_node(8, {0.0, 0.0});
        silent.has_major_arm = true;
        silent.accident_count = 0;
        CHECK_THROWS_AS(network::finalize_dataset({minor, silent}, {}),
                        ValidationError);
    }
    SUBCASE("missing visibility joins as NaN") {
        const auto sparse = network::finalize_dataset(nodes, {});
        CHECK(std::isnan(sparse.rows[0].visible_percentage));
    }
    SUBCASE("primary encoding") {
        auto node = plain_node(3, {0.0, 0.0});
        node.has_major_arm = true;
        node.road_type = RoadType::primary;
        node.accident_count = 2;
        const auto single = network::finalize_dataset({node}, {{3, 0.7}});
        REQUIRE(single.rows.size() == 1);
        CHECK(single.rows[0].accident_count == 2);
        CHECK(single.rows[0].road_type_primary == 1);
        CHECK(single.rows[0].road_type_secondary == 0);
    }
}
