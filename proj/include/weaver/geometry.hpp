#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "weaver/errors.hpp"
#include "weaver/rng.hpp"

namespace weaver {

/// A node position in the unit square.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double euclid(Point p, Point q) {
    const double dx = p.x - q.x;
    const double dy = p.y - q.y;
    return std::sqrt(dx * dx + dy * dy);
}

inline double linf(Point p, Point q) {
    return std::max(std::abs(p.x - q.x), std::abs(p.y - q.y));
}

/// Axis-aligned square of a given side length centered on a point, implicitly
/// clipped to the unit square (all member points live in [0,1]^2 anyway).
struct Box {
    Point center;
    double side = 0.0;

    bool contains(Point p) const { return linf(center, p) <= side / 2.0; }

    /// Area of the box after clipping to the unit square.
    double clipped_area() const {
        const double h = side / 2.0;
        const double w =
            std::min(center.x + h, 1.0) - std::max(center.x - h, 0.0);
        const double v =
            std::min(center.y + h, 1.0) - std::max(center.y - h, 0.0);
        return std::max(w, 0.0) * std::max(v, 0.0);
    }
};

inline bool box_contains(const Box& b, Point p) { return b.contains(p); }

/// One cell of the level-i partition of the unit square into a
/// (1/r)^i x (1/r)^i grid of equal squares.
struct GridSquare {
    int level = 1;
    int ix = 0;
    int iy = 0;

    friend bool operator==(const GridSquare&, const GridSquare&) = default;
    friend auto operator<=>(const GridSquare&, const GridSquare&) = default;
};

/// Ratio 1/r as an exact integer. Throws NonIntegerRatio otherwise.
inline int inverse_ratio(double r) {
    if (!(r > 0.0) || r > 1.0) throw NonIntegerRatio(r);
    const double inv = 1.0 / r;
    const double rounded = std::round(inv);
    if (std::abs(inv - rounded) > 1e-9) throw NonIntegerRatio(r);
    return static_cast<int>(rounded);
}

/// Number of grid cells per side at a level: (1/r)^level.
inline std::int64_t cells_per_side(double r, int level) {
    const std::int64_t base = inverse_ratio(r);
    std::int64_t m = 1;
    for (int i = 0; i < level; ++i) m *= base;
    return m;
}

/// The grid square containing p at the given level. Coordinates exactly 1.0
/// clamp to the last index so the partition stays total.
inline GridSquare square_of(Point p, int level, double r) {
    const std::int64_t m = cells_per_side(r, level);
    auto idx = [m](double c) {
        auto i = static_cast<std::int64_t>(std::floor(c * static_cast<double>(m)));
        return static_cast<int>(std::clamp<std::int64_t>(i, 0, m - 1));
    };
    return GridSquare{level, idx(p.x), idx(p.y)};
}

enum class Dir { North, South, East, West };

/// Neighboring square at the same level, or nullopt at the boundary.
inline std::optional<GridSquare> adjacent_square(const GridSquare& s, Dir dir,
                                                 double r) {
    const std::int64_t m = cells_per_side(r, s.level);
    int ix = s.ix;
    int iy = s.iy;
    switch (dir) {
        case Dir::North: ++iy; break;
        case Dir::South: --iy; break;
        case Dir::East: ++ix; break;
        case Dir::West: --ix; break;
    }
    if (ix < 0 || iy < 0 || ix >= m || iy >= m) return std::nullopt;
    return GridSquare{s.level, ix, iy};
}

/// Side length of a grid cell at a level (= r^level).
inline double cell_side(double r, int level) {
    return 1.0 / static_cast<double>(cells_per_side(r, level));
}

/// n i.i.d. uniform points in the unit square; identical output for
/// identical seed.
inline std::vector<Point> sample_points(std::size_t n, std::uint64_t seed) {
    Rng rng(stream_seed(seed, 0, 0, StreamPurpose::Coords));
    std::vector<Point> pts(n);
    for (auto& p : pts) {
        p.x = rng.next_double();
        p.y = rng.next_double();
    }
    return pts;
}

}  // namespace weaver
