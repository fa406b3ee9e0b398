#include "skysearch/convex_analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace skysearch {

namespace {

// Margin a witness point must clear on every non-defining constraint.
constexpr double kWitnessMargin = 1e-12;
// Below this |n1 x n2| two constraint planes are treated as parallel.
constexpr double kParallel = 1e-14;

Vec3 anyPerpendicular(const Vec3& n) {
    const Vec3 axis = std::abs(n.x) < 0.6 ? Vec3{1, 0, 0} : (std::abs(n.y) < 0.6 ? Vec3{0, 1, 0} : Vec3{0, 0, 1});
    const Vec3 t = n.cross(axis);
    return t * (1.0 / t.norm());
}

bool clearsAllExcept(const Convex& c, const UnitVec3& p, std::size_t skipA, std::size_t skipB, double margin) {
    for (std::size_t k = 0; k < c.constraints.size(); ++k) {
        if (k == skipA || k == skipB) {
            continue;
        }
        const HalfSpace& h = c.constraints[k];
        if (!(p.dot(h.normal()) > h.l() + margin)) {
            return false;
        }
    }
    return true;
}

bool satisfiesAllExcept(const Convex& c, const UnitVec3& p, std::size_t skipA, std::size_t skipB, double tol) {
    for (std::size_t k = 0; k < c.constraints.size(); ++k) {
        if (k == skipA || k == skipB) {
            continue;
        }
        const HalfSpace& h = c.constraints[k];
        if (p.dot(h.normal()) < h.l() - tol) {
            return false;
        }
    }
    return true;
}

constexpr std::size_t kNone = static_cast<std::size_t>(-1);

}  // namespace

std::vector<UnitVec3> circleCrossings(const HalfSpace& a, const HalfSpace& b) {
    const Vec3& n1 = a.normal().vec();
    const Vec3& n2 = b.normal().vec();
    const Vec3 u = n1.cross(n2);
    const double u2 = u.dot(u);
    if (u2 < kParallel * kParallel) {
        return {};
    }
    // Point on the line of intersection of the two planes, as a combination of the normals.
    const double d = n1.dot(n2);
    const double det = 1.0 - d * d;
    const double c1 = (a.l() - b.l() * d) / det;
    const double c2 = (b.l() - a.l() * d) / det;
    const Vec3 p0 = n1 * c1 + n2 * c2;
    const double rest = 1.0 - p0.dot(p0);
    if (rest < 0.0) {
        return {};
    }
    const double t = std::sqrt(rest / u2);
    if (t == 0.0) {
        return {UnitVec3::normalize(p0)};
    }
    return {UnitVec3::normalize(p0 + u * t), UnitVec3::normalize(p0 - u * t)};
}

UnitVec3 pointOnCircle(const HalfSpace& h) {
    const Vec3& n = h.normal().vec();
    const double s = std::sqrt(std::max(0.0, 1.0 - h.l() * h.l()));
    return UnitVec3::normalize(n * h.l() + anyPerpendicular(n) * s);
}

std::vector<ConvexVertex> convexVertices(const Convex& c, double tolerance) {
    std::vector<ConvexVertex> out;
    const auto& hs = c.constraints;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        for (std::size_t j = i + 1; j < hs.size(); ++j) {
            for (const UnitVec3& p : circleCrossings(hs[i], hs[j])) {
                if (satisfiesAllExcept(c, p, i, j, tolerance)) {
                    out.push_back({p, i, j});
                }
            }
        }
    }
    return out;
}

namespace {

// Tangential part of n at p, i.e. the direction in which n . p grows fastest.
Vec3 tangentPart(const Vec3& n, const UnitVec3& p) { return n - p.vec() * n.dot(p.vec()); }

bool strictlyInside(const Convex& c, const Vec3& q, double margin) {
    const double len = q.norm();
    if (!(len > 0.0)) {
        return false;
    }
    const Vec3 u = q * (1.0 / len);
    return std::all_of(c.constraints.begin(), c.constraints.end(),
                       [&](const HalfSpace& h) { return u.dot(h.normal().vec()) > h.l() + margin; });
}

}  // namespace

// A non-empty convex that is not the whole sphere has a boundary made of
// circle arcs. Every arc either ends in vertices or is a complete circle, so
// an interior point exists next to some vertex or next to some circle point.
// Candidates are pushed a small step off the boundary into the interior
// (along the wedge bisector at a vertex, along the inward normal on a circle)
// and tested strictly against every constraint. Stepping off the boundary
// keeps coincident circles and several circles through one vertex from
// hiding the interior. A candidate that passes is a genuine interior point,
// so "not empty" answers are always backed by a witness.
bool convexIsEmpty(const Convex& c) {
    const auto& hs = c.constraints;
    if (hs.empty()) {
        return false;
    }
    for (const HalfSpace& h : hs) {
        if (h.l() >= 1.0) {
            return true;
        }
    }
    constexpr std::array<double, 3> kSteps{1e-6, 1e-9, 1e-11};
    constexpr double kMargin = 1e-15;
    constexpr int kCirclePoints = 8;

    for (const HalfSpace& h : hs) {
        if (strictlyInside(c, h.normal().vec(), kMargin)) {
            return false;
        }
    }
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const Vec3& n = hs[i].normal().vec();
        const Vec3 e1 = anyPerpendicular(n);
        const Vec3 e2 = n.cross(e1);
        const double r = std::sqrt(std::max(0.0, 1.0 - hs[i].l() * hs[i].l()));
        for (int k = 0; k < kCirclePoints; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / kCirclePoints;
            const UnitVec3 p = UnitVec3::normalize(n * hs[i].l() + (e1 * std::cos(phi) + e2 * std::sin(phi)) * r);
            if (k == 0 && clearsAllExcept(c, p, i, kNone, kWitnessMargin)) {
                return false;
            }
            const Vec3 g = tangentPart(n, p);
            const double gn = g.norm();
            if (gn == 0.0) {
                continue;
            }
            for (const double step : kSteps) {
                if (strictlyInside(c, p.vec() + g * (step / gn), kMargin)) {
                    return false;
                }
            }
        }
    }
    for (std::size_t i = 0; i < hs.size(); ++i) {
        for (std::size_t j = i + 1; j < hs.size(); ++j) {
            for (const UnitVec3& p : circleCrossings(hs[i], hs[j])) {
                if (clearsAllExcept(c, p, i, j, kWitnessMargin)) {
                    return false;
                }
                const Vec3 gi = tangentPart(hs[i].normal().vec(), p);
                const Vec3 gj = tangentPart(hs[j].normal().vec(), p);
                const double ni = gi.norm();
                const double nj = gj.norm();
                if (ni == 0.0 || nj == 0.0) {
                    continue;
                }
                const Vec3 d = gi * (1.0 / ni) + gj * (1.0 / nj);
                const double dn = d.norm();
                if (dn == 0.0) {
                    continue;
                }
                for (const double step : kSteps) {
                    if (strictlyInside(c, p.vec() + d * (step / dn), kMargin)) {
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

bool constraintIsRedundant(const Convex& c, std::size_t index) {
    Convex probe;
    probe.constraints.reserve(c.constraints.size());
    for (std::size_t k = 0; k < c.constraints.size(); ++k) {
        if (k != index) {
            probe.constraints.push_back(c.constraints[k]);
        }
    }
    probe.constraints.push_back(negateHalfSpace(c.constraints[index]));
    return convexIsEmpty(probe);
}

bool convexContains(const Convex& outer, const Convex& inner) {
    for (const HalfSpace& h : outer.constraints) {
        Convex probe = inner;
        probe.constraints.push_back(negateHalfSpace(h));
        if (!convexIsEmpty(probe)) {
            return false;
        }
    }
    return true;
}

std::optional<double> maxDistanceFrom(const Convex& c, const UnitVec3& center) {
    if (convexIsEmpty(c)) {
        return std::nullopt;
    }
    constexpr double tol = 1e-12;
    const UnitVec3 anti = -center;
    if (satisfiesAllExcept(c, anti, kNone, kNone, tol)) {
        return 180.0;
    }
    double best = 0.0;
    const auto& hs = c.constraints;
    for (const ConvexVertex& v : convexVertices(c, tol)) {
        best = std::max(best, arcDistanceDeg(center, v.point));
    }
    // On each circle the distance from `center` peaks at the point farthest from it.
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const Vec3& n = hs[i].normal().vec();
        const Vec3 t = center.vec() - n * center.dot(hs[i].normal());
        const double tn = t.norm();
        const double s = std::sqrt(std::max(0.0, 1.0 - hs[i].l() * hs[i].l()));
        const UnitVec3 far = tn < 1e-15 ? pointOnCircle(hs[i])
                                         : UnitVec3::normalize(n * hs[i].l() - t * (s / tn));
        if (satisfiesAllExcept(c, far, i, kNone, tol)) {
            best = std::max(best, arcDistanceDeg(center, far));
        }
    }
    return best;
}

std::vector<UnitVec3> boundarySamples(const Convex& c, int perCircle) {
    std::vector<UnitVec3> out;
    constexpr double tol = 1e-12;
    for (const ConvexVertex& v : convexVertices(c, tol)) {
        out.push_back(v.point);
    }
    const auto& hs = c.constraints;
    for (std::size_t i = 0; i < hs.size(); ++i) {
        const Vec3& n = hs[i].normal().vec();
        const Vec3 e1 = anyPerpendicular(n);
        const Vec3 e2 = n.cross(e1);
        const double s = std::sqrt(std::max(0.0, 1.0 - hs[i].l() * hs[i].l()));
        for (int k = 0; k < perCircle; ++k) {
            const double phi = 2.0 * std::numbers::pi * k / perCircle;
            const UnitVec3 p =
                UnitVec3::normalize(n * hs[i].l() + (e1 * std::cos(phi) + e2 * std::sin(phi)) * s);
            if (satisfiesAllExcept(c, p, i, kNone, tol)) {
                out.push_back(p);
            }
        }
    }
    return out;
}

bool nearRegionEdge(const Region& r, const UnitVec3& p, double toleranceDeg) {
    for (const Convex& c : r.convexes) {
        for (const HalfSpace& h : c.constraints) {
            const double angleToNormal = arcDistanceDeg(p, h.normal());
            const double capRadius = std::acos(h.l()) * kRadToDeg;
            if (std::abs(angleToNormal - capRadius) <= toleranceDeg) {
                return true;
            }
        }
    }
    return false;
}

}  // namespace skysearch
