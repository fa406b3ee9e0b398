#pragma once

// Reference computations shared by the test suites. Everything here is
// written independently of the library's own geometry code: distances use
// long double atan2 of cross and dot products, membership uses plain dot
// products, and point generation uses its own seeded engine.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "skysearch/convex_analysis.hpp"
#include "skysearch/geom.hpp"

namespace testsupport {

using skysearch::Convex;
using skysearch::Region;
using skysearch::UnitVec3;
using skysearch::Vec3;

struct LVec {
    long double x, y, z;
};

inline LVec lvec(const UnitVec3& v) { return {v.x(), v.y(), v.z()}; }

inline LVec radecL(long double raDeg, long double decDeg) {
    const long double k = 3.14159265358979323846264338327950288L / 180.0L;
    const long double ra = raDeg * k;
    const long double dec = decDeg * k;
    return {std::cos(dec) * std::cos(ra), std::cos(dec) * std::sin(ra), std::sin(dec)};
}

/// Angle in degrees between two directions, atan2(|a x b|, a . b) in extended precision.
inline long double oracleArcDeg(const LVec& a, const LVec& b) {
    const long double cx = a.y * b.z - a.z * b.y;
    const long double cy = a.z * b.x - a.x * b.z;
    const long double cz = a.x * b.y - a.y * b.x;
    const long double s = std::sqrt(cx * cx + cy * cy + cz * cz);
    const long double c = a.x * b.x + a.y * b.y + a.z * b.z;
    return std::atan2(s, c) * 180.0L / 3.14159265358979323846264338327950288L;
}

inline long double oracleArcDeg(const UnitVec3& a, const UnitVec3& b) { return oracleArcDeg(lvec(a), lvec(b)); }

/// Squared chord, the quantity the strict cone predicate compares.
inline double chord2(const UnitVec3& a, const UnitVec3& b) {
    const double dx = a.x() - b.x();
    const double dy = a.y() - b.y();
    const double dz = a.z() - b.z();
    return dx * dx + dy * dy + dz * dz;
}

class TestRng {
public:
    explicit TestRng(std::uint64_t seed) : e_(seed) {}
    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(e_); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(e_); }
    std::uint64_t raw() { return e_(); }

    /// Marsaglia-style Gaussian direction, then normalized.
    UnitVec3 direction() {
        std::normal_distribution<double> n(0.0, 1.0);
        for (;;) {
            const Vec3 v{n(e_), n(e_), n(e_)};
            if (v.norm() > 1e-6) {
                return UnitVec3::normalize(v);
            }
        }
    }

private:
    std::mt19937_64 e_;
};

inline std::vector<UnitVec3> samplePoints(std::size_t n, std::uint64_t seed) {
    TestRng rng(seed);
    std::vector<UnitVec3> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(rng.direction());
    }
    return out;
}

/// Membership by direct dot products on the raw constraint list.
inline bool oracleInside(const Region& r, const UnitVec3& p) {
    for (const Convex& c : r.convexes) {
        bool in = true;
        for (const auto& h : c.constraints) {
            const double d = h.normal().x() * p.x() + h.normal().y() * p.y() + h.normal().z() * p.z();
            if (!(d > h.l())) {
                in = false;
                break;
            }
        }
        if (in) {
            return true;
        }
    }
    return false;
}

/// Smallest angular distance in degrees from p to any constraint circle of r.
inline double edgeDistanceDeg(const Region& r, const UnitVec3& p) {
    double best = 1e300;
    for (const Convex& c : r.convexes) {
        for (const auto& h : c.constraints) {
            const double d = h.normal().dot(p);
            const double a = std::acos(std::clamp(d, -1.0, 1.0)) * 180.0 / 3.14159265358979323846;
            const double b = std::acos(std::clamp(h.l(), -1.0, 1.0)) * 180.0 / 3.14159265358979323846;
            best = std::min(best, std::abs(a - b));
        }
    }
    return best;
}

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void raDec(const Vec3& v, double& ra, double& dec) {
    ra = std::atan2(v.y, v.x) * 180.0 / 3.14159265358979323846;
    if (ra < 0) {
        ra += 360.0;
    }
    if (ra >= 360.0) {
        ra -= 360.0;
    }
    dec = std::asin(std::clamp(v.z / v.norm(), -1.0, 1.0)) * 180.0 / 3.14159265358979323846;
}

/// k points at angular radius rho around c, in angular order.
inline std::vector<Vec3> ringAround(const UnitVec3& c, double rhoDeg, int k, double phase) {
    const Vec3 cv = c.vec();
    Vec3 seed = std::abs(cv.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    Vec3 u = seed - cv * seed.dot(cv);
    u = u * (1.0 / u.norm());
    const Vec3 w = cv.cross(u);
    const double rho = rhoDeg * 3.14159265358979323846 / 180.0;
    std::vector<Vec3> out;
    for (int i = 0; i < k; ++i) {
        const double t = phase + 2.0 * 3.14159265358979323846 * i / k;
        out.push_back(cv * std::cos(rho) + (u * std::cos(t) + w * std::sin(t)) * std::sin(rho));
    }
    return out;
}

/// Uniform point inside the cap of angular radius rho around c.
inline UnitVec3 pointInCap(TestRng& rng, const Vec3& c, double rhoRad) {
    Vec3 seed = std::abs(c.z) < 0.9 ? Vec3{0, 0, 1} : Vec3{1, 0, 0};
    Vec3 u = seed - c * seed.dot(c);
    u = u * (1.0 / u.norm());
    const Vec3 w = c.cross(u);
    const double zmin = std::cos(rhoRad);
    const double z = zmin + (1.0 - zmin) * rng.uniform();
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double t = rng.uniform(0.0, 2.0 * 3.14159265358979323846);
    return UnitVec3::normalize(c * z + (u * std::cos(t) + w * std::sin(t)) * s);
}

/// Up to n points strictly inside r. Each convex is sampled from a cap that
/// encloses its boundary, so small regions get points too.
inline std::vector<UnitVec3> sampleInRegion(const Region& r, std::size_t n, std::uint64_t seed) {
    TestRng rng(seed);
    std::vector<UnitVec3> out;
    if (r.convexes.empty()) {
        return out;
    }
    const std::size_t perConvex = n / r.convexes.size() + 1;
    for (const Convex& c : r.convexes) {
        const auto edge = skysearch::boundarySamples(c, 16);
        Vec3 center;
        double rho = 3.14159265358979323846;
        if (!edge.empty()) {
            for (const UnitVec3& e : edge) {
                center += e.vec();
            }
            if (center.norm() > 1e-6) {
                center = center * (1.0 / center.norm());
                rho = 0.0;
                for (const UnitVec3& e : edge) {
                    rho = std::max(rho, std::acos(std::clamp(e.vec().dot(center), -1.0, 1.0)));
                }
                rho = std::min(3.14159265358979323846, rho * 1.05 + 1e-9);
            } else {
                center = {0, 0, 1};
            }
        } else {
            center = {0, 0, 1};
        }
        std::size_t got = 0;
        for (std::size_t tries = 0; got < perConvex && tries < perConvex * 200; ++tries) {
            const UnitVec3 p = pointInCap(rng, center, rho);
            if (oracleInside(Region{{c}}, p)) {
                out.push_back(p);
                ++got;
            }
        }
    }
    if (out.size() > n) {
        out.resize(n);
    }
    return out;
}

/// Random region of 1-3 convexes with 1-3 caps each, sized to overlap often.
inline Region randomRegion(TestRng& rng) {
    Region r;
    const int m = rng.integer(1, 3);
    for (int i = 0; i < m; ++i) {
        Convex c;
        const int k = rng.integer(1, 3);
        for (int j = 0; j < k; ++j) {
            c.constraints.emplace_back(rng.direction(), rng.uniform(-0.5, 0.7));
        }
        r.convexes.push_back(c);
    }
    return r;
}

/// Region-grammar corpus: the two example strings plus generated specs of every form.
inline std::vector<std::string> grammarCorpus() {
    std::vector<std::string> out{"CIRCLE J2000 30 20 3", "POLY J2000 0 0 0 90 180 0", "CIRCLE CARTESIAN 1 0 0 3"};
    TestRng rng(20240601);
    for (int i = 0; i < 6; ++i) {
        double ra, dec;
        raDec(rng.direction().vec(), ra, dec);
        out.push_back("CIRCLE J2000 " + num(ra) + " " + num(dec) + " " + num(rng.uniform(1.0, 3000.0)));
    }
    for (int i = 0; i < 3; ++i) {
        const UnitVec3 d = rng.direction();
        out.push_back("circle cartesian " + num(d.x() * 2.5) + " " + num(d.y() * 2.5) + " " + num(d.z() * 2.5) + " " +
                      num(rng.uniform(10.0, 600.0)));
    }
    for (int i = 0; i < 5; ++i) {
        const double ra1 = rng.uniform(0.0, 300.0);
        const double ra2 = ra1 + rng.uniform(1.0, 59.0);
        const double d1 = rng.uniform(-80.0, 70.0);
        const double d2 = d1 + rng.uniform(0.5, 20.0);
        out.push_back("RECT J2000 " + num(ra2) + " " + num(d1) + " " + num(ra1) + " " + num(d2));
    }
    for (int i = 0; i < 6; ++i) {
        const UnitVec3 c = rng.direction();
        const int k = rng.integer(3, 7);
        auto ring = ringAround(c, rng.uniform(0.5, 40.0), k, rng.uniform(0.0, 6.0));
        if (i % 2 == 1) {
            std::reverse(ring.begin(), ring.end());
        }
        std::string s = "POLY J2000";
        for (const Vec3& v : ring) {
            double ra, dec;
            raDec(v, ra, dec);
            s += " " + num(ra) + " " + num(dec);
        }
        out.push_back(s);
    }
    for (int i = 0; i < 3; ++i) {
        const UnitVec3 c = rng.direction();
        auto ring = ringAround(c, rng.uniform(1.0, 30.0), 4, 0.3);
        std::string s = "POLY CARTESIAN";
        for (const Vec3& v : ring) {
            s += " " + num(v.x) + " " + num(v.y) + " " + num(v.z);
        }
        out.push_back(s);
    }
    for (int i = 0; i < 4; ++i) {
        const UnitVec3 c = rng.direction();
        const double spread = rng.uniform(2.0, 35.0);
        std::string s = i % 2 == 0 ? "CHULL J2000" : "CHULL CARTESIAN";
        for (int j = 0; j < 7; ++j) {
            auto one = ringAround(c, spread * rng.uniform(0.2, 1.0), 1, rng.uniform(0.0, 6.3));
            if (i % 2 == 0) {
                double ra, dec;
                raDec(one[0], ra, dec);
                s += " " + num(ra) + " " + num(dec);
            } else {
                s += " " + num(one[0].x) + " " + num(one[0].y) + " " + num(one[0].z);
            }
        }
        out.push_back(s);
    }
    for (int i = 0; i < 4; ++i) {
        std::string s = "CONVEX";
        const int k = rng.integer(1, 4);
        for (int j = 0; j < k; ++j) {
            const UnitVec3 n = rng.direction();
            s += " " + num(n.x()) + " " + num(n.y()) + " " + num(n.z()) + " " + num(rng.uniform(-0.6, 0.6));
        }
        out.push_back(s);
    }
    for (int i = 0; i < 4; ++i) {
        std::string s = "REGION";
        const int m = rng.integer(1, 3);
        for (int j = 0; j < m; ++j) {
            s += " CONVEX";
            const int k = rng.integer(1, 3);
            for (int t = 0; t < k; ++t) {
                const UnitVec3 n = rng.direction();
                s += " " + num(n.x()) + " " + num(n.y()) + " " + num(n.z()) + " " + num(rng.uniform(-0.3, 0.8));
            }
        }
        out.push_back(s);
    }
    out.push_back("REGION CONVEX");
    out.push_back("REGION");
    return out;
}

}  // namespace testsupport
