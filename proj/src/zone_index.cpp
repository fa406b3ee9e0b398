#include "skysearch/zone_index.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "skysearch/error.hpp"

namespace skysearch::zones {

namespace {

ZoneRow makeRow(int zone, std::int64_t id, double ra, double dec, const UnitVec3& v) {
    return {zone, id, ra, dec, v.x(), v.y(), v.z()};
}

bool keyLess(const ZoneRow& a, const ZoneRow& b) {
    if (a.zone != b.zone) {
        return a.zone < b.zone;
    }
    if (a.ra != b.ra) {
        return a.ra < b.ra;
    }
    return a.objID < b.objID;
}

double chord2(const ZoneRow& row, const UnitVec3& c) {
    const double dx = row.x - c.x();
    const double dy = row.y - c.y();
    const double dz = row.z - c.z();
    return dx * dx + dy * dy + dz * dz;
}

double chord2(const ZoneRow& a, const ZoneRow& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return dx * dx + dy * dy + dz * dz;
}

double arcFromChord2(double c2) { return 2.0 * std::asin(std::min(1.0, std::sqrt(c2) / 2.0)) * kRadToDeg; }

void checkUnique(const std::vector<ObjectPosition>& catalog) {
    std::vector<std::int64_t> ids;
    ids.reserve(catalog.size());
    for (const ObjectPosition& o : catalog) {
        ids.push_back(o.objID);
    }
    std::sort(ids.begin(), ids.end());
    const auto dup = std::adjacent_find(ids.begin(), ids.end());
    if (dup != ids.end()) {
        throw GeometryError("duplicate objID " + std::to_string(*dup));
    }
}

}  // namespace

void ZoneConfig::validate() const {
    if (!(zoneHeight > 0.0) || !std::isfinite(zoneHeight)) {
        throw GeometryError("zone height must be positive");
    }
    if (!(maxRadius >= 0.0) || maxRadius > 180.0) {
        throw GeometryError("max radius must be in [0, 180]");
    }
    if (!(epsilon >= 0.0)) {
        throw GeometryError("epsilon must be non-negative");
    }
}

int zoneCount(double zoneHeight) { return std::max(1, static_cast<int>(std::ceil(180.0 / zoneHeight - 1e-9))); }

int zoneOf(double decDeg, double zoneHeight) {
    const int z = static_cast<int>(std::floor((decDeg + 90.0) / zoneHeight));
    return std::clamp(z, 0, zoneCount(zoneHeight) - 1);
}

// r / (cos|dec| + eps) is a good estimate away from the poles but falls
// short of the exact tangent half-width asin(sin r / cos dec) as the circle
// nears a pole, so the larger of the two is used.
double raHalfWidth(double radiusDeg, double decDeg, double epsilon) {
    if (radiusDeg <= 0.0) {
        return 0.0;
    }
    const double a = std::abs(decDeg);
    if (a + radiusDeg >= 90.0 - 1e-9) {
        return 180.0;
    }
    const double cosDec = std::cos(a * kDegToRad);
    const double estimate = radiusDeg / (cosDec + epsilon);
    const double exact = std::asin(std::min(1.0, std::sin(radiusDeg * kDegToRad) / cosDec)) * kRadToDeg;
    const double w = std::max(estimate, exact) * (1.0 + 1e-9) + 1e-9;
    return std::min(w, 180.0);
}

ZoneTable ZoneTable::build(const std::vector<ObjectPosition>& catalog, const ZoneConfig& cfg) {
    cfg.validate();
    checkUnique(catalog);
    ZoneTable t;
    t.cfg_ = cfg;
    t.rows_.reserve(catalog.size() + catalog.size() / 16);
    for (const ObjectPosition& o : catalog) {
        const double ra = o.pos.ra();
        const double dec = o.pos.dec();
        const int zone = zoneOf(dec, cfg.zoneHeight);
        const UnitVec3 v = skyToVec(o.pos);
        t.rows_.push_back(makeRow(zone, o.objID, ra, dec, v));
        const double w = raHalfWidth(cfg.maxRadius, dec, cfg.epsilon);
        if (w >= 180.0 || ra < w) {
            t.rows_.push_back(makeRow(zone, o.objID, ra + 360.0, dec, v));
        }
        if (w >= 180.0 || ra >= 360.0 - w) {
            t.rows_.push_back(makeRow(zone, o.objID, ra - 360.0, dec, v));
        }
    }
    t.mainRows_ = catalog.size();
    std::sort(t.rows_.begin(), t.rows_.end(), keyLess);
    t.indexZones();
    return t;
}

ZoneTable ZoneTable::fromRows(const ZoneConfig& cfg, std::vector<ZoneRow> rows) {
    cfg.validate();
    if (!std::is_sorted(rows.begin(), rows.end(), keyLess)) {
        throw GeometryError("zone rows are not in (zone, ra, objID) order");
    }
    ZoneTable t;
    t.cfg_ = cfg;
    t.rows_ = std::move(rows);
    t.mainRows_ = static_cast<std::size_t>(
        std::count_if(t.rows_.begin(), t.rows_.end(), [](const ZoneRow& r) { return !r.isMargin(); }));
    t.indexZones();
    return t;
}

void ZoneTable::indexZones() {
    const int n = zoneCount(cfg_.zoneHeight);
    zoneStart_.assign(static_cast<std::size_t>(n) + 1, rows_.size());
    std::size_t i = 0;
    for (int z = 0; z < n; ++z) {
        while (i < rows_.size() && rows_[i].zone < z) {
            ++i;
        }
        zoneStart_[static_cast<std::size_t>(z)] = i;
    }
}

std::span<const ZoneRow> ZoneTable::zoneRows(int zone) const {
    if (zone < 0 || zone + 1 >= static_cast<int>(zoneStart_.size())) {
        return {};
    }
    const std::size_t b = zoneStart_[static_cast<std::size_t>(zone)];
    const std::size_t e = zoneStart_[static_cast<std::size_t>(zone) + 1];
    return {rows_.data() + b, e - b};
}

std::span<const ZoneRow> ZoneTable::scan(int zone, double raLo, double raHi) const {
    const auto rows = zoneRows(zone);
    const auto lo = std::lower_bound(rows.begin(), rows.end(), raLo,
                                     [](const ZoneRow& r, double v) { return r.ra < v; });
    const auto hi =
        std::upper_bound(lo, rows.end(), raHi, [](double v, const ZoneRow& r) { return v < r.ra; });
    return {lo, hi};
}

std::vector<NearbyResult> ZoneTable::nearby(const SkyPoint& center, ArcAngle radius, NearbyStats* stats) const {
    const double r = radius.deg();
    if (r > cfg_.maxRadius) {
        throw QueryError("radius exceeds margin width (" + std::to_string(r) + " > " +
                         std::to_string(cfg_.maxRadius) + ")");
    }
    NearbyStats local;
    std::vector<NearbyResult> out;
    if (r <= 0.0) {
        if (stats) {
            *stats = local;
        }
        return out;
    }
    const double dec = center.dec();
    const double ra = center.ra();
    local.minZone = zoneOf(std::max(-90.0, dec - r), cfg_.zoneHeight);
    local.maxZone = zoneOf(std::min(90.0, dec + r), cfg_.zoneHeight);
    const double w = raHalfWidth(r, dec, cfg_.epsilon);
    const bool fullCircle = w >= 180.0;
    const double limit = chordSquaredForArc(r);
    const double decSlack = r + 1e-9;
    const UnitVec3 c = skyToVec(center);

    for (int z = local.minZone; z <= local.maxZone; ++z) {
        const auto rows = fullCircle ? scan(z, 0.0, std::nextafter(360.0, 0.0)) : scan(z, ra - w, ra + w);
        for (const ZoneRow& row : rows) {
            ++local.rowsScanned;
            if (std::abs(row.dec - dec) > decSlack) {
                continue;
            }
            ++local.decPassed;
            const double d2 = chord2(row, c);
            if (d2 < limit) {
                ++local.carefulPassed;
                out.push_back({row.objID, arcFromChord2(d2)});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const NearbyResult& a, const NearbyResult& b) { return a.objID < b.objID; });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const NearbyResult& a, const NearbyResult& b) { return a.objID == b.objID; }),
              out.end());
    if (stats) {
        *stats = local;
    }
    return out;
}

NeighborsTable::NeighborsTable(double radiusDeg, std::vector<NeighborRow> rows, NeighborStats stats)
    : radius_(radiusDeg), rows_(std::move(rows)), stats_(stats) {
    std::sort(rows_.begin(), rows_.end(), [](const NeighborRow& a, const NeighborRow& b) {
        return a.objID != b.objID ? a.objID < b.objID : a.neighborObjID < b.neighborObjID;
    });
}

std::span<const NeighborRow> NeighborsTable::of(std::int64_t objID) const {
    const auto lo = std::lower_bound(rows_.begin(), rows_.end(), objID,
                                     [](const NeighborRow& r, std::int64_t v) { return r.objID < v; });
    const auto hi =
        std::upper_bound(lo, rows_.end(), objID, [](std::int64_t v, const NeighborRow& r) { return v < r.objID; });
    return {lo, hi};
}

// Each main row o1 is joined against the rows of zones z-k..z+k inside its
// ra window. Taking o1 from main rows only means a pair is never found
// through two margin images, and objID ordering halves the work before the
// mirror pass restores both orientations.
NeighborsTable buildNeighbors(const std::vector<ObjectPosition>& catalog, ArcAngle radius, double zoneHeight) {
    const double r = radius.deg();
    if (!(r > 0.0)) {
        throw QueryError("neighbor radius must be positive");
    }
    ZoneConfig cfg;
    cfg.zoneHeight = zoneHeight > 0.0 ? zoneHeight : r;
    cfg.maxRadius = r;
    const ZoneTable table = ZoneTable::build(catalog, cfg);
    const int reach = static_cast<int>(std::ceil(r / cfg.zoneHeight - 1e-12));
    const int zones = zoneCount(cfg.zoneHeight);
    const double limit = chordSquaredForArc(r);

    NeighborStats stats;
    std::vector<NeighborRow> rows;
    for (int z1 = 0; z1 < zones; ++z1) {
        for (const ZoneRow& o1 : table.zoneRows(z1)) {
            if (o1.isMargin()) {
                continue;
            }
            const double w = raHalfWidth(r, o1.dec, cfg.epsilon);
            const bool full = w >= 180.0;
            for (int z2 = std::max(0, z1 - reach); z2 <= std::min(zones - 1, z1 + reach); ++z2) {
                const auto cand = full ? table.scan(z2, 0.0, std::nextafter(360.0, 0.0))
                                       : table.scan(z2, o1.ra - w, o1.ra + w);
                for (const ZoneRow& o2 : cand) {
                    ++stats.candidatePairs;
                    if (o1.objID >= o2.objID) {
                        continue;
                    }
                    const double d2 = chord2(o1, o2);
                    if (d2 < limit) {
                        rows.push_back({o1.objID, o2.objID, arcFromChord2(d2)});
                    }
                }
            }
        }
    }
    stats.preMirrorPairs = rows.size();
    const std::size_t half = rows.size();
    rows.reserve(2 * half);
    for (std::size_t i = 0; i < half; ++i) {
        rows.push_back({rows[i].neighborObjID, rows[i].objID, rows[i].distanceDeg});
    }
    return NeighborsTable(r, std::move(rows), stats);
}

}  // namespace skysearch::zones
