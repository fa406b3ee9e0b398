#pragma once

// Spherical geometry on the unit sphere. Angles are degrees everywhere;
// radians appear only inside trigonometric calls.

#include <cmath>
#include <numbers>
#include <vector>

namespace skysearch {

inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;

/// Plain 3-vector used for intermediate arithmetic.
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3 operator-() const { return {-x, -y, -z}; }
    constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3& operator+=(const Vec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
    constexpr bool operator==(const Vec3&) const = default;

    constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3 cross(const Vec3& o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    double norm() const { return std::sqrt(dot(*this)); }
};

/// A point on the unit sphere. Construction always yields |v| = 1 to rounding.
class UnitVec3 {
public:
    /// The north pole.
    constexpr UnitVec3() = default;

    /// Normalizes `v`; throws GeometryError when `v` is zero or not finite.
    static UnitVec3 normalize(const Vec3& v);

    /// Accepts a vector that is already unit length (|v|-1 within 1e-9); throws otherwise.
    static UnitVec3 fromUnit(const Vec3& v);

    constexpr double x() const { return v_.x; }
    constexpr double y() const { return v_.y; }
    constexpr double z() const { return v_.z; }
    constexpr const Vec3& vec() const { return v_; }

    constexpr double dot(const UnitVec3& o) const { return v_.dot(o.v_); }
    constexpr UnitVec3 operator-() const { return UnitVec3(-v_); }
    constexpr bool operator==(const UnitVec3&) const = default;

private:
    constexpr explicit UnitVec3(const Vec3& v) : v_(v) {}

    Vec3 v_{0.0, 0.0, 1.0};
};

/// Equatorial position: ra in [0, 360), dec in [-90, 90], degrees.
class SkyPoint {
public:
    constexpr SkyPoint() = default;
    /// Normalizes ra into [0, 360); throws GeometryError for dec outside [-90, 90] or non-finite input.
    SkyPoint(double raDeg, double decDeg);

    constexpr double ra() const { return ra_; }
    constexpr double dec() const { return dec_; }
    constexpr bool operator==(const SkyPoint&) const = default;

private:
    double ra_ = 0.0;
    double dec_ = 0.0;
};

/// Wraps any finite ra into [0, 360).
double normalizeRa(double raDeg);

/// Non-negative angle in degrees, at most 360.
class ArcAngle {
public:
    constexpr ArcAngle() = default;

    static ArcAngle degrees(double deg);
    static ArcAngle arcminutes(double arcmin) { return degrees(arcmin / 60.0); }
    static ArcAngle arcseconds(double arcsec) { return degrees(arcsec / 3600.0); }

    constexpr double deg() const { return deg_; }
    double rad() const { return deg_ * kDegToRad; }
    constexpr auto operator<=>(const ArcAngle&) const = default;

private:
    constexpr explicit ArcAngle(double deg) : deg_(deg) {}

    double deg_ = 0.0;
};

/// The open cap { p : p . normal > l }.
class HalfSpace {
public:
    constexpr HalfSpace() = default;
    /// Throws GeometryError unless -1 <= l <= 1.
    HalfSpace(const UnitVec3& normal, double l);

    constexpr const UnitVec3& normal() const { return normal_; }
    constexpr double l() const { return l_; }
    constexpr bool contains(const UnitVec3& p) const { return p.dot(normal_) > l_; }
    constexpr bool operator==(const HalfSpace&) const = default;

private:
    UnitVec3 normal_;
    double l_ = 0.0;
};

/// Conjunction of half-spaces. No constraints means the whole sphere.
struct Convex {
    std::vector<HalfSpace> constraints;

    bool operator==(const Convex&) const = default;
};

/// Disjunction of convexes. No convexes means the empty region.
struct Region {
    std::vector<Convex> convexes;

    bool operator==(const Region&) const = default;

    static Region empty() { return {}; }
    static Region wholeSphere() { return Region{{Convex{}}}; }
    static Region single(const HalfSpace& h) { return Region{{Convex{{h}}}}; }
};

UnitVec3 skyToVec(const SkyPoint& p);
SkyPoint vecToSky(const UnitVec3& v);
/// Checked variant for raw input; throws GeometryError if |v| is not 1 within 1e-9.
SkyPoint vecToSky(const Vec3& v);

inline bool insideHalfSpace(const HalfSpace& h, const UnitVec3& p) { return h.contains(p); }
bool insideConvex(const Convex& c, const UnitVec3& p);
bool insideRegion(const Region& r, const UnitVec3& p);

/// Arc distance in degrees via the chord: 2 asin(|a-b| / 2). Stable for tiny separations.
double arcDistanceDeg(const UnitVec3& a, const UnitVec3& b);

/// Squared chord length corresponding to an arc of `deg` degrees: 4 sin^2(deg / 2).
double chordSquaredForArc(double deg);

/// Grows the cap by `theta`: l' = cos(acos(l) + theta), clamped to -1 past the antipode.
HalfSpace bufferHalfSpace(const HalfSpace& h, ArcAngle theta);
Region bufferRegion(const Region& r, ArcAngle theta);

/// (-x, -y, -z, -l): the complement cap, sharing the edge.
HalfSpace negateHalfSpace(const HalfSpace& h);

/// Cap of points strictly closer than `radius` to `center`. Throws if radius > 180.
HalfSpace circleToHalfSpace(const UnitVec3& center, ArcAngle radius);

}  // namespace skysearch
