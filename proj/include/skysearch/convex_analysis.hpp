#pragma once

// Exact geometric reasoning about convexes: circle crossings, emptiness,
// redundancy, containment and extremal distances. Shared by region
// simplification, bounding circles and segmentation.

#include <cstddef>
#include <optional>
#include <vector>

#include "skysearch/geom.hpp"

namespace skysearch {

/// Intersection point of the boundary circles of constraints `first` and `second`.
struct ConvexVertex {
    UnitVec3 point;
    std::size_t first = 0;
    std::size_t second = 0;
};

/// Points where the boundary circles of two half-spaces cross (0, 1 or 2 points).
std::vector<UnitVec3> circleCrossings(const HalfSpace& a, const HalfSpace& b);

/// Some point on the boundary circle of `h`.
UnitVec3 pointOnCircle(const HalfSpace& h);

/// Crossing points of constraint circles that satisfy every other constraint within `tolerance`.
std::vector<ConvexVertex> convexVertices(const Convex& c, double tolerance = 1e-12);

/// True when no point lies strictly inside every constraint (up to slivers thinner than ~1e-12).
bool convexIsEmpty(const Convex& c);

/// True when dropping constraint `index` leaves the convex unchanged.
bool constraintIsRedundant(const Convex& c, std::size_t index);

/// True when every point of `inner` lies in `outer` (edges aside).
bool convexContains(const Convex& outer, const Convex& inner);

/// Largest arc distance in degrees from `center` to any point of the convex; nullopt if empty.
std::optional<double> maxDistanceFrom(const Convex& c, const UnitVec3& center);

/// Boundary samples: vertices plus `perCircle` points on each constraint circle that are inside the rest.
std::vector<UnitVec3> boundarySamples(const Convex& c, int perCircle = 32);

/// True when p lies within `toleranceDeg` of the boundary circle of any constraint of r.
bool nearRegionEdge(const Region& r, const UnitVec3& p, double toleranceDeg);

}  // namespace skysearch
