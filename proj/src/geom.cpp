#include "skysearch/geom.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "skysearch/error.hpp"

namespace skysearch {

namespace {

constexpr double kPoleTolerance = 1e-12;
constexpr double kUnitTolerance = 1e-9;

// cos of an angle in degrees, exact at the right angles where rounding of pi would leak.
double cosDeg(double deg) {
    if (deg == 90.0) {
        return 0.0;
    }
    if (deg == 180.0) {
        return -1.0;
    }
    return std::cos(deg * kDegToRad);
}

}  // namespace

UnitVec3 UnitVec3::normalize(const Vec3& v) {
    const double n = v.norm();
    if (!std::isfinite(n) || n == 0.0) {
        throw GeometryError("cannot normalize a zero or non-finite vector");
    }
    // Leave vectors that are already unit to rounding untouched so that
    // normalizing is idempotent and serialized normals reload bit-exactly.
    if (std::abs(n - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) {
        return UnitVec3(v);
    }
    return UnitVec3(v * (1.0 / n));
}

UnitVec3 UnitVec3::fromUnit(const Vec3& v) {
    const double n = v.norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > kUnitTolerance) {
        throw GeometryError("vector is not unit length (|v| = " + std::to_string(n) + ")");
    }
    return UnitVec3(v * (1.0 / n));
}

double normalizeRa(double raDeg) {
    double ra = std::fmod(raDeg, 360.0);
    if (ra < 0.0) {
        ra += 360.0;
    }
    // fmod of a tiny negative number can round back up to exactly 360.
    if (ra >= 360.0) {
        ra = 0.0;
    }
    return ra;
}

SkyPoint::SkyPoint(double raDeg, double decDeg) {
    if (!std::isfinite(raDeg) || !std::isfinite(decDeg)) {
        throw GeometryError("ra/dec must be finite");
    }
    if (decDeg < -90.0 || decDeg > 90.0) {
        throw GeometryError("dec " + std::to_string(decDeg) + " outside [-90, 90]");
    }
    ra_ = normalizeRa(raDeg);
    dec_ = decDeg;
}

ArcAngle ArcAngle::degrees(double deg) {
    if (!std::isfinite(deg) || deg < 0.0 || deg > 360.0) {
        throw GeometryError("arc angle " + std::to_string(deg) + " outside [0, 360] degrees");
    }
    return ArcAngle(deg);
}

HalfSpace::HalfSpace(const UnitVec3& normal, double l) : normal_(normal), l_(l) {
    if (!(l >= -1.0 && l <= 1.0)) {
        throw GeometryError("half-space length " + std::to_string(l) + " outside [-1, 1]");
    }
}

UnitVec3 skyToVec(const SkyPoint& p) {
    const double ra = p.ra() * kDegToRad;
    const double dec = p.dec() * kDegToRad;
    const double cd = std::cos(dec);
    return UnitVec3::normalize({cd * std::cos(ra), cd * std::sin(ra), std::sin(dec)});
}

SkyPoint vecToSky(const UnitVec3& v) {
    if (std::abs(v.z()) >= 1.0 - kPoleTolerance) {
        return SkyPoint(0.0, v.z() > 0.0 ? 90.0 : -90.0);
    }
    const double ra = std::atan2(v.y(), v.x()) * kRadToDeg;
    const double dec = std::atan2(v.z(), std::hypot(v.x(), v.y())) * kRadToDeg;
    return SkyPoint(normalizeRa(ra), std::clamp(dec, -90.0, 90.0));
}

SkyPoint vecToSky(const Vec3& v) { return vecToSky(UnitVec3::fromUnit(v)); }

bool insideConvex(const Convex& c, const UnitVec3& p) {
    return std::all_of(c.constraints.begin(), c.constraints.end(),
                       [&](const HalfSpace& h) { return h.contains(p); });
}

bool insideRegion(const Region& r, const UnitVec3& p) {
    return std::any_of(r.convexes.begin(), r.convexes.end(),
                       [&](const Convex& c) { return insideConvex(c, p); });
}

double arcDistanceDeg(const UnitVec3& a, const UnitVec3& b) {
    const double chord = (a.vec() - b.vec()).norm();
    return 2.0 * std::asin(std::min(1.0, chord / 2.0)) * kRadToDeg;
}

double chordSquaredForArc(double deg) {
    const double s = std::sin(deg * kDegToRad / 2.0);
    return 4.0 * s * s;
}

HalfSpace bufferHalfSpace(const HalfSpace& h, ArcAngle theta) {
    if (theta.deg() == 0.0) {
        return h;
    }
    const double opening = std::acos(h.l()) + theta.rad();
    if (opening >= std::numbers::pi) {
        return HalfSpace(h.normal(), -1.0);
    }
    return HalfSpace(h.normal(), std::clamp(std::cos(opening), -1.0, 1.0));
}

Region bufferRegion(const Region& r, ArcAngle theta) {
    Region out = r;
    for (Convex& c : out.convexes) {
        for (HalfSpace& h : c.constraints) {
            h = bufferHalfSpace(h, theta);
        }
    }
    return out;
}

HalfSpace negateHalfSpace(const HalfSpace& h) { return HalfSpace(-h.normal(), -h.l()); }

HalfSpace circleToHalfSpace(const UnitVec3& center, ArcAngle radius) {
    if (radius.deg() > 180.0) {
        throw GeometryError("circle radius exceeds 180 degrees");
    }
    return HalfSpace(center, std::clamp(cosDeg(radius.deg()), -1.0, 1.0));
}

}  // namespace skysearch
