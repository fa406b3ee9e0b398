#include "skysearch/fixtures.hpp"

#include <algorithm>
#include <cmath>

namespace skysearch::fixtures {

namespace {

double chord2(const UnitVec3& a, const UnitVec3& b) {
    const Vec3 d = a.vec() - b.vec();
    return d.dot(d);
}

}  // namespace

SkyPoint randomSkyPoint(Rng& rng) {
    const double z = rng.uniform(-1.0, 1.0);
    const double ra = rng.uniform(0.0, 360.0);
    return SkyPoint(ra, std::asin(z) * kRadToDeg);
}

std::vector<zones::ObjectPosition> randomCatalog(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<zones::ObjectPosition> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back({static_cast<std::int64_t>(i + 1), randomSkyPoint(rng)});
    }
    return out;
}

std::vector<ConeQuery> coneQueries(std::size_t k, std::uint64_t seed, double maxRadius) {
    Rng rng(seed);
    std::vector<ConeQuery> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        const double r = maxRadius * (1.0 - rng.uniform());
        SkyPoint c;
        switch (i % 10) {
            case 0: {
                const double dec = 89.0 + rng.uniform();
                c = SkyPoint(rng.uniform(0.0, 360.0), rng.uniform() < 0.5 ? dec : -dec);
                break;
            }
            case 1: {
                const double dec = rng.uniform(-80.0, 80.0);
                c = SkyPoint(rng.uniform(-r, r), dec);
                break;
            }
            default:
                c = randomSkyPoint(rng);
                break;
        }
        out.push_back({c, r});
    }
    return out;
}

std::vector<CircleEntry> randomCircles(std::size_t n, std::uint64_t seed, double minRadius, double maxRadius) {
    Rng rng(seed);
    std::vector<CircleEntry> out;
    out.reserve(n);
    const double span = std::log(maxRadius / minRadius);
    for (std::size_t i = 0; i < n; ++i) {
        const SkyPoint c = randomSkyPoint(rng);
        const double r = minRadius * std::exp(span * rng.uniform());
        out.push_back({static_cast<std::int64_t>(i + 1), c, r});
    }
    return out;
}

std::vector<zones::NearbyResult> bruteNearby(const std::vector<zones::ObjectPosition>& catalog,
                                             const SkyPoint& center, double radiusDeg) {
    std::vector<zones::NearbyResult> out;
    const UnitVec3 c = skyToVec(center);
    const double limit = chordSquaredForArc(radiusDeg);
    for (const zones::ObjectPosition& o : catalog) {
        const UnitVec3 p = skyToVec(o.pos);
        if (chord2(p, c) < limit) {
            out.push_back({o.objID, arcDistanceDeg(p, c)});
        }
    }
    std::sort(out.begin(), out.end(),
              [](const zones::NearbyResult& a, const zones::NearbyResult& b) { return a.objID < b.objID; });
    return out;
}

std::vector<zones::NeighborRow> bruteNeighbors(const std::vector<zones::ObjectPosition>& catalog, double radiusDeg) {
    std::vector<UnitVec3> v;
    v.reserve(catalog.size());
    for (const zones::ObjectPosition& o : catalog) {
        v.push_back(skyToVec(o.pos));
    }
    const double limit = chordSquaredForArc(radiusDeg);
    std::vector<zones::NeighborRow> out;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        for (std::size_t j = i + 1; j < catalog.size(); ++j) {
            if (chord2(v[i], v[j]) < limit) {
                const double d = arcDistanceDeg(v[i], v[j]);
                out.push_back({catalog[i].objID, catalog[j].objID, d});
                out.push_back({catalog[j].objID, catalog[i].objID, d});
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const zones::NeighborRow& a, const zones::NeighborRow& b) {
        return a.objID != b.objID ? a.objID < b.objID : a.neighborObjID < b.neighborObjID;
    });
    return out;
}

std::vector<std::int64_t> bruteOverlap(const std::vector<CircleEntry>& entries, const SkyPoint& center,
                                       double radiusDeg) {
    std::vector<std::int64_t> out;
    const UnitVec3 c = skyToVec(center);
    for (const CircleEntry& e : entries) {
        if (arcDistanceDeg(skyToVec(e.center), c) < radiusDeg + e.radiusDeg) {
            out.push_back(e.id);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace skysearch::fixtures
