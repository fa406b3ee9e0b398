#pragma once

// Linear text syntax for spherical areas:
//
//   CIRCLE J2000 ra dec radArcMin | CIRCLE CARTESIAN x y z radArcMin
//   RECT J2000 ra dec ra dec
//   POLY J2000 {ra dec}3+          | POLY CARTESIAN {x y z}3+
//   CHULL J2000 {ra dec}3+         | CHULL CARTESIAN {x y z}3+
//   CONVEX {x y z d}+
//   REGION {CONVEX {x y z d}*}*     (an empty CONVEX is the whole sphere)
//
// Keywords are case-insensitive, tokens are whitespace separated. Point lists
// run until the next keyword or the end of input.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "skysearch/geom.hpp"

namespace skysearch::lang {

enum class Frame { J2000, Cartesian };

/// A point as written: (ra, dec) for J2000, (x, y, z) for CARTESIAN.
struct SpecPoint {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    bool operator==(const SpecPoint&) const = default;
};

struct CircleSpec {
    Frame frame = Frame::J2000;
    SpecPoint center;
    double radiusArcMin = 0.0;

    bool operator==(const CircleSpec&) const = default;
};

struct RectSpec {
    SpecPoint corner1;
    SpecPoint corner2;

    bool operator==(const RectSpec&) const = default;
};

struct PolySpec {
    Frame frame = Frame::J2000;
    std::vector<SpecPoint> points;

    bool operator==(const PolySpec&) const = default;
};

struct HullSpec {
    Frame frame = Frame::J2000;
    std::vector<SpecPoint> points;

    bool operator==(const HullSpec&) const = default;
};

/// One "x y z d" tuple; d is the half-space length l.
struct ConstraintSpec {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double d = 0.0;

    bool operator==(const ConstraintSpec&) const = default;
};

struct ConvexSpec {
    std::vector<ConstraintSpec> constraints;

    bool operator==(const ConvexSpec&) const = default;
};

struct RegionSpec {
    std::vector<ConvexSpec> convexes;

    bool operator==(const RegionSpec&) const = default;
};

using RegionSpecAst = std::variant<CircleSpec, RectSpec, PolySpec, HullSpec, ConvexSpec, RegionSpec>;

/// Throws ParseError (with byte offset) on malformed input.
RegionSpecAst parseRegionSpec(std::string_view text);

/// Throws GeometryError for shapes that cannot be represented as described
/// (non-convex polygon, over-wide hull or rectangle, degenerate edges).
Region compileToRegion(const RegionSpecAst& ast);

/// parse + compile.
Region regionFromString(std::string_view text);

/// Canonical lossless form: "REGION CONVEX x y z l ... CONVEX ...".
std::string serializeRegion(const Region& r);

}  // namespace skysearch::lang
