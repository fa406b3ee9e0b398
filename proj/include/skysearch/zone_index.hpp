#pragma once

// Zone bucketing: the catalog is cut into declination stripes of fixed
// height and every row is keyed (zone, ra, objID). A cone search scans a
// short ra interval in each zone of the query's dec band. Objects near
// ra = 0/360 are duplicated with ra shifted by +-360 (margin rows) so that
// queries crossing the meridian need only one contiguous interval per zone.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "skysearch/geom.hpp"

namespace skysearch::zones {

struct ZoneConfig {
    double zoneHeight = 4.0 / 60.0;
    /// Largest radius a query may use; margin rows are sized for it.
    double maxRadius = 1.0;
    double epsilon = 1.0e-6;

    /// Throws GeometryError on a non-positive height or negative radius.
    void validate() const;
};

int zoneOf(double decDeg, double zoneHeight);
int zoneCount(double zoneHeight);

/// Half-width in ra of the window holding every point within `radiusDeg` of
/// a point at `decDeg`. Returns 180 when the circle reaches a pole.
double raHalfWidth(double radiusDeg, double decDeg, double epsilon = 1.0e-6);

struct ObjectPosition {
    std::int64_t objID = 0;
    SkyPoint pos;
};

struct ZoneRow {
    int zone = 0;
    std::int64_t objID = 0;
    double ra = 0.0;
    double dec = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool isMargin() const { return ra < 0.0 || ra >= 360.0; }
    bool operator==(const ZoneRow&) const = default;
};

struct NearbyResult {
    std::int64_t objID = 0;
    double distanceDeg = 0.0;

    bool operator==(const NearbyResult&) const = default;
};

/// Per-query instrumentation.
struct NearbyStats {
    int minZone = 0;
    int maxZone = -1;
    std::size_t rowsScanned = 0;
    std::size_t decPassed = 0;
    std::size_t carefulPassed = 0;
};

class ZoneTable {
public:
    ZoneTable() = default;

    /// Throws GeometryError on duplicate objIDs.
    static ZoneTable build(const std::vector<ObjectPosition>& catalog, const ZoneConfig& cfg);
    /// Reassembles a table from rows already in key order (snapshot loading).
    static ZoneTable fromRows(const ZoneConfig& cfg, std::vector<ZoneRow> rows);

    const ZoneConfig& config() const { return cfg_; }
    const std::vector<ZoneRow>& rows() const { return rows_; }
    std::size_t mainRowCount() const { return mainRows_; }

    /// Rows of `zone` with lo <= ra <= hi, in key order.
    std::span<const ZoneRow> scan(int zone, double raLo, double raHi) const;
    std::span<const ZoneRow> zoneRows(int zone) const;

    /// Objects strictly closer than r to center, sorted by objID.
    /// Throws QueryError when r exceeds the configured maxRadius.
    std::vector<NearbyResult> nearby(const SkyPoint& center, ArcAngle r, NearbyStats* stats = nullptr) const;

private:
    void indexZones();

    ZoneConfig cfg_;
    std::vector<ZoneRow> rows_;
    std::vector<std::size_t> zoneStart_;
    std::size_t mainRows_ = 0;
};

struct NeighborRow {
    std::int64_t objID = 0;
    std::int64_t neighborObjID = 0;
    double distanceDeg = 0.0;

    bool operator==(const NeighborRow&) const = default;
};

struct NeighborStats {
    std::size_t candidatePairs = 0;
    std::size_t preMirrorPairs = 0;
};

class NeighborsTable {
public:
    NeighborsTable() = default;
    NeighborsTable(double radiusDeg, std::vector<NeighborRow> rows, NeighborStats stats = {});

    double radiusDeg() const { return radius_; }
    /// Sorted by (objID, neighborObjID).
    const std::vector<NeighborRow>& rows() const { return rows_; }
    const NeighborStats& stats() const { return stats_; }

    /// Neighbors of one object; empty for unknown ids.
    std::span<const NeighborRow> of(std::int64_t objID) const;

private:
    double radius_ = 0.0;
    std::vector<NeighborRow> rows_;
    NeighborStats stats_;
};

/// All pairs closer than r, both orientations. zoneHeight <= 0 means zoneHeight = r.
NeighborsTable buildNeighbors(const std::vector<ObjectPosition>& catalog, ArcAngle r, double zoneHeight = 0.0);

}  // namespace skysearch::zones
