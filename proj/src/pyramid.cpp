#include "skysearch/pyramid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "skysearch/algebra.hpp"
#include "skysearch/convex_analysis.hpp"
#include "skysearch/error.hpp"
#include "skysearch/zone_index.hpp"

namespace skysearch::pyramid {

namespace {

constexpr std::int64_t kMinId = std::numeric_limits<std::int64_t>::min();

double wrappedRaDelta(double a, double b) {
    const double d = std::abs(normalizeRa(a) - normalizeRa(b));
    return std::min(d, 360.0 - d);
}

// Gilbert's iteration for the point of conv(points) nearest the origin. Its
// direction is the center of the smallest cap holding every point.
Vec3 minNormPoint(const std::vector<UnitVec3>& points) {
    Vec3 x = points.front().vec();
    for (int iter = 0; iter < 4000; ++iter) {
        const UnitVec3* best = &points.front();
        double bestDot = x.dot(best->vec());
        for (const UnitVec3& p : points) {
            const double d = x.dot(p.vec());
            if (d < bestDot) {
                bestDot = d;
                best = &p;
            }
        }
        const double gap = x.dot(x) - bestDot;
        if (gap <= 1e-14) {
            break;
        }
        const Vec3 step = best->vec() - x;
        const double t = std::clamp(-x.dot(step) / step.dot(step), 0.0, 1.0);
        x = x + step * t;
    }
    return x;
}

// Fraction of a cap's area that falls inside `r`, by uniform sampling in the cap.
double coveredFraction(const Region& r, const BoundingCircle& bc, std::mt19937_64& rng, int samples) {
    const Vec3 n = bc.center.vec();
    const Vec3 axis = std::abs(n.x) < 0.6 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    const Vec3 e1 = n.cross(axis) * (1.0 / n.cross(axis).norm());
    const Vec3 e2 = n.cross(e1);
    const double cosR = std::cos(bc.radiusDeg * kDegToRad);
    int hits = 0;
    for (int i = 0; i < samples; ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double z = 1.0 - u * (1.0 - cosR);
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = 2.0 * std::numbers::pi * v;
        const UnitVec3 p = UnitVec3::normalize(n * z + (e1 * std::cos(phi) + e2 * std::sin(phi)) * s);
        if (insideRegion(r, p)) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / samples;
}

std::vector<UnitVec3> regionBoundary(const Region& r) {
    std::vector<UnitVec3> out;
    for (const Convex& c : r.convexes) {
        auto s = boundarySamples(c, 64);
        out.insert(out.end(), s.begin(), s.end());
    }
    return out;
}

}  // namespace

void PyramidConfig::validate() const {
    if (!(baseZoneHeight > 0.0) || !std::isfinite(baseZoneHeight) || baseZoneHeight > 180.0) {
        throw GeometryError("base zone height must be in (0, 180]");
    }
}

int PyramidConfig::maxScale() const {
    int n = 0;
    while (std::ldexp(baseZoneHeight, n) < 180.0 * (1.0 - 1e-12)) {
        ++n;
    }
    return n;
}

double PyramidConfig::zoneHeight(int scale) const { return std::ldexp(baseZoneHeight, scale); }

int scaleOf(double radiusDeg, const PyramidConfig& cfg) {
    if (!(radiusDeg > 0.0)) {
        throw GeometryError("bounding radius must be positive");
    }
    const int top = cfg.maxScale();
    const double ratio = std::ceil(radiusDeg / cfg.baseZoneHeight - 1e-12);
    if (ratio > std::ldexp(1.0, top)) {
        return top;
    }
    const auto q = static_cast<std::uint64_t>(std::max(1.0, ratio));
    int s = std::bit_width(q - 1);
    while (s < top && cfg.zoneHeight(s) < radiusDeg) {
        ++s;
    }
    return std::min(s, top);
}

std::vector<CandidateZone> candidateZones(double decDeg, double radiusDeg, const PyramidConfig& cfg) {
    std::vector<CandidateZone> out;
    const int top = cfg.maxScale();
    for (int s = 0; s <= top; ++s) {
        const double h = cfg.zoneHeight(s);
        const int lo = zones::zoneOf(std::max(-90.0, decDeg - radiusDeg - h), h);
        const int hi = zones::zoneOf(std::min(90.0, decDeg + radiusDeg + h), h);
        for (int z = lo; z <= hi; ++z) {
            out.push_back({s, z, h});
        }
    }
    return out;
}

bool EntryKeyLess::operator()(const PyramidEntry& a, const PyramidEntry& b) const {
    if (a.scale != b.scale) {
        return a.scale < b.scale;
    }
    if (a.zone != b.zone) {
        return a.zone < b.zone;
    }
    if (a.ra != b.ra) {
        return a.ra < b.ra;
    }
    return a.objId < b.objId;
}

PyramidIndex::PyramidIndex(const PyramidConfig& cfg) : cfg_(cfg) { cfg_.validate(); }

void PyramidIndex::insert(std::int64_t objId, const SkyPoint& center, ArcAngle radius, std::int64_t baseId) {
    if (byId_.count(objId) != 0) {
        throw GeometryError("duplicate pyramid objId " + std::to_string(objId));
    }
    PyramidEntry e;
    e.scale = scaleOf(radius.deg(), cfg_);
    const double h = cfg_.zoneHeight(e.scale);
    e.zone = zones::zoneOf(center.dec(), h);
    e.ra = center.ra();
    e.dec = center.dec();
    e.radius = radius.deg();
    e.objId = objId;
    e.baseId = baseId < 0 ? objId : baseId;
    const UnitVec3 v = skyToVec(center);
    e.x = v.x();
    e.y = v.y();
    e.z = v.z();

    rows_.insert(e);
    const double w = zones::raHalfWidth(h, e.dec, cfg_.epsilon);
    if (w >= 180.0 || e.ra < w) {
        PyramidEntry m = e;
        m.ra += 360.0;
        rows_.insert(m);
    }
    if (w >= 180.0 || e.ra >= 360.0 - w) {
        PyramidEntry m = e;
        m.ra -= 360.0;
        rows_.insert(m);
    }
    ++zoneCounts_[{e.scale, e.zone}];
    byId_.emplace(objId, e);
}

// Cascade: candidate zones, index ra window, per-entry ra window, dec band,
// planar circle test, exact spherical test. The planar test scales ra by the
// cosine of the most poleward latitude the connecting arc can reach, which
// keeps it a lower bound on the true distance.
std::vector<std::int64_t> PyramidIndex::overlap(const SkyPoint& center, ArcAngle radius, OverlapStages* stages) const {
    const double R = radius.deg();
    const double raC = center.ra();
    const double decC = center.dec();
    const UnitVec3 c = skyToVec(center);
    OverlapStages st;

    std::vector<const PyramidEntry*> cand;
    auto scanRange = [&](int scale, int zone, double lo, double hi, bool mainOnly) {
        PyramidEntry probe;
        probe.scale = scale;
        probe.zone = zone;
        probe.ra = lo;
        probe.objId = kMinId;
        for (auto it = rows_.lower_bound(probe); it != rows_.end(); ++it) {
            if (it->scale != scale || it->zone != zone || it->ra > hi) {
                break;
            }
            if (!mainOnly || !it->isMargin()) {
                cand.push_back(&*it);
            }
        }
    };

    const auto zonesList = candidateZones(decC, R, cfg_);
    st.candidateZones = zonesList.size();
    for (const CandidateZone& cz : zonesList) {
        const auto count = zoneCounts_.find({cz.scale, cz.zone});
        if (count == zoneCounts_.end()) {
            continue;
        }
        st.zone += count->second;
        const double w = zones::raHalfWidth(R + cz.scaleRadius, decC, cfg_.epsilon);
        if (w >= 180.0) {
            scanRange(cz.scale, cz.zone, 0.0, std::nextafter(360.0, 0.0), true);
            continue;
        }
        const double lo = raC - w;
        const double hi = raC + w;
        scanRange(cz.scale, cz.zone, lo, hi, false);
        // Margin rows only reach one zone height past the meridian.
        if (hi - 360.0 > cz.scaleRadius) {
            scanRange(cz.scale, cz.zone, 0.0, hi - 360.0, true);
        }
        if (lo < -cz.scaleRadius) {
            scanRange(cz.scale, cz.zone, lo + 360.0, std::nextafter(360.0, 0.0), true);
        }
    }
    std::sort(cand.begin(), cand.end(), [](const PyramidEntry* a, const PyramidEntry* b) { return a->objId < b->objId; });
    cand.erase(std::unique(cand.begin(), cand.end(),
                           [](const PyramidEntry* a, const PyramidEntry* b) { return a->objId == b->objId; }),
               cand.end());
    st.scanned = cand.size();

    std::vector<std::int64_t> out;
    for (const PyramidEntry* e : cand) {
        const double D = R + e->radius;
        const double dra = wrappedRaDelta(e->ra, raC);
        if (dra > zones::raHalfWidth(D, decC, cfg_.epsilon)) {
            continue;
        }
        ++st.ra;
        const double ddec = std::abs(e->dec - decC);
        if (ddec > D * (1.0 + 1e-12) + 1e-12) {
            continue;
        }
        ++st.dec;
        const double poleward = std::max(std::abs(decC), std::abs(e->dec)) + D / 2.0;
        const double cmin = poleward >= 90.0 ? 0.0 : std::cos(poleward * kDegToRad);
        const double planar = (dra * cmin) * (dra * cmin) + ddec * ddec;
        if (!(planar < D * D * (1.0 + 1e-9) + 1e-15)) {
            continue;
        }
        ++st.planar;
        if (D < 180.0) {
            const double dx = e->x - c.x();
            const double dy = e->y - c.y();
            const double dz = e->z - c.z();
            if (!(dx * dx + dy * dy + dz * dz < chordSquaredForArc(D))) {
                continue;
            }
        }
        ++st.exact;
        out.push_back(e->objId);
    }
    if (stages) {
        *stages = st;
    }
    return out;
}

std::vector<std::int64_t> PyramidIndex::overlapBases(const SkyPoint& center, ArcAngle radius) const {
    std::vector<std::int64_t> bases;
    for (std::int64_t id : overlap(center, radius)) {
        bases.push_back(byId_.at(id).baseId);
    }
    std::sort(bases.begin(), bases.end());
    bases.erase(std::unique(bases.begin(), bases.end()), bases.end());
    return bases;
}

std::vector<PyramidEntry> PyramidIndex::entries() const {
    std::vector<PyramidEntry> out;
    out.reserve(byId_.size());
    for (const auto& [id, e] : byId_) {
        out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const PyramidEntry& a, const PyramidEntry& b) { return a.objId < b.objId; });
    return out;
}

BoundingCircle boundingCircle(const Region& r) {
    const Region s = algebra::simplifyRegion(r);
    if (s.convexes.empty()) {
        throw GeometryError("bounding circle of an empty region");
    }
    for (const Convex& c : s.convexes) {
        if (c.constraints.empty()) {
            return {UnitVec3(), 180.0};
        }
    }
    if (s.convexes.size() == 1 && s.convexes.front().constraints.size() == 1) {
        const HalfSpace& h = s.convexes.front().constraints.front();
        return {h.normal(), std::acos(std::clamp(h.l(), -1.0, 1.0)) * kRadToDeg};
    }
    const std::vector<UnitVec3> samples = regionBoundary(s);
    UnitVec3 center;
    if (!samples.empty()) {
        const Vec3 q = minNormPoint(samples);
        if (q.norm() > 1e-9) {
            center = UnitVec3::normalize(q);
        } else {
            Vec3 sum;
            for (const UnitVec3& p : samples) {
                sum += p.vec();
            }
            if (sum.norm() > 1e-9) {
                center = UnitVec3::normalize(sum);
            }
        }
    }
    double radius = 0.0;
    for (const Convex& c : s.convexes) {
        radius = std::max(radius, maxDistanceFrom(c, center).value_or(0.0));
    }
    return {center, std::min(180.0, radius + 1e-9)};
}

std::vector<Segment> segmentElongatedRegion(const Region& r, double maxAspect, std::int64_t baseId, int maxDepth) {
    std::vector<Segment> out;
    std::mt19937_64 rng(0x5e9e47u);
    constexpr int kSamples = 2000;

    auto recurse = [&](auto&& self, const Region& piece, int depth) -> void {
        const BoundingCircle bc = boundingCircle(piece);
        const double frac = coveredFraction(piece, bc, rng, kSamples);
        const double aspect = frac > 0.0 ? 1.0 / frac : std::numeric_limits<double>::infinity();
        if (aspect <= maxAspect || depth >= maxDepth) {
            out.push_back({piece, baseId});
            return;
        }
        UnitVec3 far = bc.center;
        double farDist = -1.0;
        for (const UnitVec3& p : regionBoundary(algebra::simplifyRegion(piece))) {
            const double d = arcDistanceDeg(bc.center, p);
            if (d > farDist) {
                farDist = d;
                far = p;
            }
        }
        const Vec3 n = far.vec() - bc.center.vec() * far.dot(bc.center);
        if (n.norm() < 1e-12) {
            out.push_back({piece, baseId});
            return;
        }
        const UnitVec3 cut = UnitVec3::normalize(n);
        for (const UnitVec3& side : {cut, -cut}) {
            const Region half = algebra::simplifyRegion(algebra::andRegions(piece, Region::single(HalfSpace(side, 0.0))));
            if (!half.convexes.empty()) {
                self(self, half, depth + 1);
            }
        }
    };
    recurse(recurse, r, 0);
    return out;
}

}  // namespace skysearch::pyramid
