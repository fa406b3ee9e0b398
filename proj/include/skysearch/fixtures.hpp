#pragma once

// Seeded random fixtures and brute-force reference scans used by the bench
// harness. The generator is mt19937_64; a double is drawn as the top 53 bits
// of one output scaled by 2^-53, so fixtures are reproducible anywhere.

#include <cstdint>
#include <random>
#include <vector>

#include "skysearch/geom.hpp"
#include "skysearch/pyramid.hpp"
#include "skysearch/zone_index.hpp"

namespace skysearch::fixtures {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

/// Uniform on the sphere: z uniform in [-1, 1), ra uniform in [0, 360).
SkyPoint randomSkyPoint(Rng& rng);

/// Objects 1..n at uniform random positions.
std::vector<zones::ObjectPosition> randomCatalog(std::size_t n, std::uint64_t seed);

struct ConeQuery {
    SkyPoint center;
    double radiusDeg = 0.0;
};

/// k queries with radius in (0, maxRadius]. One in ten is centered within
/// 1 degree of a pole and one in ten straddles ra = 0.
std::vector<ConeQuery> coneQueries(std::size_t k, std::uint64_t seed, double maxRadius);

struct CircleEntry {
    std::int64_t id = 0;
    SkyPoint center;
    double radiusDeg = 0.0;
};

/// n circles with log-uniform radii in [minRadius, maxRadius].
std::vector<CircleEntry> randomCircles(std::size_t n, std::uint64_t seed, double minRadius, double maxRadius);

/// Linear scans with the chord distance; results sorted by id.
std::vector<zones::NearbyResult> bruteNearby(const std::vector<zones::ObjectPosition>& catalog,
                                             const SkyPoint& center, double radiusDeg);
std::vector<zones::NeighborRow> bruteNeighbors(const std::vector<zones::ObjectPosition>& catalog, double radiusDeg);
std::vector<std::int64_t> bruteOverlap(const std::vector<CircleEntry>& entries, const SkyPoint& center,
                                       double radiusDeg);

}  // namespace skysearch::fixtures
