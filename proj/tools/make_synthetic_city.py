#!/usr/bin/env python3
"""Generate the synthetic_city test fixture: a 5x5 road grid with corner
buildings, accident records clustered on the intersections, and a handful of
traffic count points. Deterministic for a fixed seed; the committed fixture
files under tests/fixtures/synthetic_city were produced by running this once
with the defaults."""

import argparse
import math
import random
from pathlib import Path

DEG_PER_M = 0.000133
CENTER_LON = -0.19123
CENTER_LAT = 51.50212

GRID = [-400.0, -200.0, 0.0, 200.0, 400.0]  # meters from center
VERTICAL_CLASS = ["tertiary", "secondary", "primary", "tertiary", "secondary"]
HORIZONTAL_CLASS = ["secondary", "secondary", "primary", "tertiary", "tertiary"]
ROAD_HALF_WIDTH_M = 7.4


def lon_of(x_m: float) -> float:
    return CENTER_LON + x_m * DEG_PER_M


def lat_of(y_m: float) -> float:
    return CENTER_LAT + y_m * DEG_PER_M


def grid_node_id(col: int, row: int) -> int:
    return 1000 + row * 10 + col


def build_roads():
    """Ways and the grid nodes they share. Vertical way per column, horizontal
    way per row; interior crossings have four incident segment endpoints."""
    nodes = {}
    for row in range(5):
        for col in range(5):
            nodes[grid_node_id(col, row)] = (lon_of(GRID[col]), lat_of(GRID[row]))

    ways = []
    for col in range(5):
        refs = [grid_node_id(col, row) for row in range(5)]
        tags = {"highway": VERTICAL_CLASS[col]}
        if VERTICAL_CLASS[col] == "primary":
            tags["maxspeed"] = "40 mph"
        elif VERTICAL_CLASS[col] == "secondary":
            tags["maxspeed"] = "30 mph"
        ways.append((100 + col, refs, tags))
    for row in range(5):
        refs = [grid_node_id(col, row) for col in range(5)]
        tags = {"highway": HORIZONTAL_CLASS[row]}
        if HORIZONTAL_CLASS[row] == "primary":
            tags["maxspeed"] = "40 mph"
        elif HORIZONTAL_CLASS[row] == "secondary":
            tags["maxspeed"] = "30 mph"
        ways.append((200 + row, refs, tags))
    # One secondary way tagged in km/h to exercise unit parsing.
    ways[5] = (ways[5][0], ways[5][1], {"highway": "secondary", "maxspeed": "48"})
    return nodes, ways


def building_rings(rng: random.Random):
    """Axis-aligned squares (some L-shaped) tucked into intersection corners,
    clear of the road corridors."""
    rings = []
    for row in range(5):
        for col in range(5):
            cx, cy = GRID[col], GRID[row]
            for sx in (-1.0, 1.0):
                for sy in (-1.0, 1.0):
                    if rng.random() > 0.5:
                        continue
                    dx = rng.uniform(25.0, 45.0)
                    dy = rng.uniform(25.0, 45.0)
                    w = rng.uniform(6.0, min(12.0, dx - ROAD_HALF_WIDTH_M - 5.0))
                    h = rng.uniform(6.0, min(12.0, dy - ROAD_HALF_WIDTH_M - 5.0))
                    bx, by = cx + sx * dx, cy + sy * dy
                    if rng.random() < 0.15:
                        # L-shape: the square minus its inner quadrant.
                        ring = [
                            (bx - w, by - h),
                            (bx + w, by - h),
                            (bx + w, by),
                            (bx, by),
                            (bx, by + h),
                            (bx - w, by + h),
                        ]
                    else:
                        ring = [
                            (bx - w, by - h),
                            (bx + w, by - h),
                            (bx + w, by + h),
                            (bx - w, by + h),
                        ]
                    rings.append(ring)
    return rings


def write_osm(path: Path, nodes, ways, rings):
    lines = ['<?xml version="1.0" encoding="UTF-8"?>', '<osm version="0.6">']
    for node_id in sorted(nodes):
        lon, lat = nodes[node_id]
        lines.append(f'  <node id="{node_id}" lat="{lat!r}" lon="{lon!r}"/>')

    next_node = 50000
    building_refs = []
    for ring in rings:
        refs = []
        for x_m, y_m in ring:
            lines.append(
                f'  <node id="{next_node}" lat="{lat_of(y_m)!r}" lon="{lon_of(x_m)!r}"/>'
            )
            refs.append(next_node)
            next_node += 1
        building_refs.append(refs)

    for way_id, refs, tags in ways:
        lines.append(f'  <way id="{way_id}">')
        for ref in refs:
            lines.append(f'    <nd ref="{ref}"/>')
        for key in sorted(tags):
            lines.append(f'    <tag k="{key}" v="{tags[key]}"/>')
        lines.append("  </way>")

    for i, refs in enumerate(building_refs):
        lines.append(f'  <way id="{5000 + i}">')
        for ref in refs + [refs[0]]:
            lines.append(f'    <nd ref="{ref}"/>')
        lines.append('    <tag k="building" v="yes"/>')
        lines.append("  </way>")

    lines.append("</osm>")
    path.write_text("\n".join(lines) + "\n")


def accident_rows(rng: random.Random):
    """Most accidents sit within ~2 m of an intersection so the 0.0003-degree
    buffer catches them; the rest are mid-block, too old, malformed, or
    outside the study area."""
    severities = ["Slight", "Slight", "Slight", "Serious", "Fatal"]
    rows = []

    def push(lon, lat, year):
        date = f"{year}-{rng.randint(1, 12):02d}-{rng.randint(1, 28):02d}"
        rows.append(
            [
                f"SYN{len(rows) + 1:05d}",
                repr(lon),
                repr(lat),
                str(year),
                date,
                rng.choice(severities),
            ]
        )

    # Interior and edge crossings get class-dependent counts; two eligible
    # nodes stay at zero so the at-least-one-accident filter has work to do.
    zero_nodes = {grid_node_id(1, 0), grid_node_id(4, 3)}
    for row in range(5):
        for col in range(5):
            endpoints = (1 if col in (0, 4) else 2) + (1 if row in (0, 4) else 2)
            if endpoints < 3:
                continue  # grid corner, not an intersection
            node_id = grid_node_id(col, row)
            if node_id in zero_nodes:
                continue
            on_primary = VERTICAL_CLASS[col] == "primary" or HORIZONTAL_CLASS[row] == "primary"
            count = rng.randint(10, 24) if on_primary else rng.randint(2, 12)
            for _ in range(count):
                r_deg = rng.uniform(0.0, 0.00026)
                theta = rng.uniform(0.0, 6.283185307179586)
                lon = lon_of(GRID[col]) + r_deg * math.cos(theta)
                lat = lat_of(GRID[row]) + r_deg * math.sin(theta)
                push(lon, lat, rng.randint(2010, 2023))

    # Mid-block accidents, far from every node.
    for _ in range(45):
        vertical = rng.random() < 0.5
        a = rng.randint(0, 4)
        b = rng.randint(0, 3)
        t = rng.uniform(0.3, 0.7)
        lateral = rng.uniform(-3.0, 3.0)
        if vertical:
            x = GRID[a] + lateral
            y = GRID[b] + t * (GRID[b + 1] - GRID[b])
        else:
            x = GRID[b] + t * (GRID[b + 1] - GRID[b])
            y = GRID[a] + lateral
        push(lon_of(x), lat_of(y), rng.randint(2010, 2023))

    # Too old for the min_year filter.
    for _ in range(12):
        col, row = rng.randint(0, 4), rng.randint(0, 4)
        push(lon_of(GRID[col]), lat_of(GRID[row]), rng.randint(2004, 2009))

    # Outside the 3000 m study disc.
    for _ in range(3):
        push(CENTER_LON + 0.6 + rng.random() * 0.1, CENTER_LAT, rng.randint(2012, 2020))

    # Malformed coordinates or year: rejected by the parser.
    rows.append(["SYNBAD01", "not-a-number", repr(CENTER_LAT), "2015", "2015-01-01", "Slight"])
    rows.append(["SYNBAD02", repr(CENTER_LON), "", "2016", "2016-01-01", "Serious"])
    rows.append(["SYNBAD03", repr(CENTER_LON), repr(CENTER_LAT), "n/a", "no date", "Slight"])

    rng.shuffle(rows)
    return rows


def traffic_rows(rng: random.Random):
    """Count points offset from a dozen distinct grid nodes."""
    rows = []
    spots = [(c, r) for r in range(5) for c in range(5)]
    rng.shuffle(spots)
    for i, (col, row) in enumerate(spots[:12]):
        along = rng.uniform(30.0, 80.0) * rng.choice([-1.0, 1.0])
        if rng.random() < 0.5:
            lon, lat = lon_of(GRID[col] + along), lat_of(GRID[row])
        else:
            lon, lat = lon_of(GRID[col]), lat_of(GRID[row] + along)
        flow = float(rng.randint(4000, 28000))
        rows.append([str(70001 + i), repr(lat), repr(lon), repr(flow)])
    return rows


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out",
        type=Path,
        default=Path(__file__).resolve().parent.parent
        / "tests"
        / "fixtures"
        / "synthetic_city",
    )
    parser.add_argument("--seed", type=int, default=20240815)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    rng = random.Random(args.seed)
    nodes, ways = build_roads()
    rings = building_rings(rng)
    write_osm(args.out / "extract.osm", nodes, ways, rings)

    accidents = accident_rows(rng)
    header = "accident_index,longitude,latitude,accident_year,date,accident_severity"
    (args.out / "accidents.csv").write_text(
        header + "\n" + "\n".join(",".join(r) for r in accidents) + "\n"
    )

    traffic = traffic_rows(rng)
    (args.out / "aadf.csv").write_text(
        "count_point_id,latitude,longitude,all_motor_vehicles\n"
        + "\n".join(",".join(r) for r in traffic)
        + "\n"
    )

    print(f"buildings: {len(rings)}")
    print(f"accident rows: {len(accidents)}")
    print(f"traffic rows: {len(traffic)}")


if __name__ == "__main__":
    main()
