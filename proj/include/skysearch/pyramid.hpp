#pragma once

// A zone pyramid indexes regions by their bounding circles. Scale s uses
// zones of height base * 2^s; an entry lives at the smallest scale whose
// zone height is at least its radius, so a query at any scale only has to
// look one zone height (plus its own radius) beyond its band.

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <unordered_map>
#include <vector>

#include "skysearch/geom.hpp"

namespace skysearch::pyramid {

struct PyramidConfig {
    double baseZoneHeight = 0.5 / 60.0;
    double epsilon = 1.0e-6;

    void validate() const;
    /// Smallest n with base * 2^n >= 180; scales are 0..maxScale.
    int maxScale() const;
    int scaleCount() const { return maxScale() + 1; }
    double zoneHeight(int scale) const;
};

/// Throws GeometryError for radius <= 0.
int scaleOf(double radiusDeg, const PyramidConfig& cfg);

struct PyramidEntry {
    int scale = 0;
    int zone = 0;
    double ra = 0.0;
    double dec = 0.0;
    double radius = 0.0;
    std::int64_t objId = 0;
    std::int64_t baseId = 0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool isMargin() const { return ra < 0.0 || ra >= 360.0; }
};

struct CandidateZone {
    int scale = 0;
    int zone = 0;
    double scaleRadius = 0.0;

    bool operator==(const CandidateZone&) const = default;
};

std::vector<CandidateZone> candidateZones(double decDeg, double radiusDeg, const PyramidConfig& cfg);

/// Result cardinality after each filter of one overlap query.
struct OverlapStages {
    std::size_t candidateZones = 0;
    std::size_t zone = 0;     ///< entries stored in the candidate zones
    std::size_t scanned = 0;  ///< distinct entries in the index ra windows
    std::size_t ra = 0;       ///< within the entry-specific ra half-width
    std::size_t dec = 0;      ///< |ddec| < R + r
    std::size_t planar = 0;   ///< cos-corrected planar circle test
    std::size_t exact = 0;    ///< spherical distance < R + r
};

struct EntryKeyLess {
    bool operator()(const PyramidEntry& a, const PyramidEntry& b) const;
};

class PyramidIndex {
public:
    explicit PyramidIndex(const PyramidConfig& cfg = {});

    /// Throws GeometryError on duplicate objId or radius <= 0. baseId < 0 means objId.
    void insert(std::int64_t objId, const SkyPoint& center, ArcAngle radius, std::int64_t baseId = -1);

    /// objIds whose bounding circles overlap the query circle, ascending.
    std::vector<std::int64_t> overlap(const SkyPoint& center, ArcAngle radius, OverlapStages* stages = nullptr) const;
    /// Distinct base ids of the overlapping entries, ascending.
    std::vector<std::int64_t> overlapBases(const SkyPoint& center, ArcAngle radius) const;

    const PyramidConfig& config() const { return cfg_; }
    std::size_t size() const { return byId_.size(); }
    /// Main (non-margin) entries in objId order.
    std::vector<PyramidEntry> entries() const;
    /// Every stored row, margins included, in key order.
    const std::set<PyramidEntry, EntryKeyLess>& rows() const { return rows_; }

private:
    PyramidConfig cfg_;
    std::set<PyramidEntry, EntryKeyLess> rows_;
    std::map<std::pair<int, int>, std::size_t> zoneCounts_;
    std::unordered_map<std::int64_t, PyramidEntry> byId_;
};

struct BoundingCircle {
    UnitVec3 center;
    double radiusDeg = 0.0;
};

/// Small cap holding the region. Exact for a single cap; otherwise the
/// center is the minimum enclosing cap of boundary samples and the radius is
/// the exact farthest distance from it. Throws GeometryError when empty.
BoundingCircle boundingCircle(const Region& r);

struct Segment {
    Region region;
    std::int64_t baseId = 0;
};

/// Splits a region whose bounding cap is much larger than its area into
/// pieces that all carry `baseId`. Aspect is cap area over region area.
std::vector<Segment> segmentElongatedRegion(const Region& r, double maxAspect, std::int64_t baseId,
                                            int maxDepth = 6);

}  // namespace skysearch::pyramid
