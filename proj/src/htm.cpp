#include "skysearch/htm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

#include "skysearch/error.hpp"

namespace skysearch::htm {

namespace {

// Slack applied to exact inside/outside claims in classifyTrixel.
constexpr double kClassifyTolerance = 1e-13;

UnitVec3 axis(double x, double y, double z) { return UnitVec3::normalize({x, y, z}); }

UnitVec3 midpoint(const UnitVec3& a, const UnitVec3& b) { return UnitVec3::normalize(a.vec() + b.vec()); }

// Smallest signed edge-plane distance; >= 0 means inside (edges included).
double insideMargin(const Trixel& t, const UnitVec3& p) {
    double m = 1.0;
    for (int i = 0; i < 3; ++i) {
        const Vec3 e = t.corners[i].vec().cross(t.corners[(i + 1) % 3].vec());
        m = std::min(m, e.dot(p.vec()));
    }
    return m;
}

// Maximum of n . p over the minor great-circle arc from a to b.
double arcMaxDot(const UnitVec3& a, const UnitVec3& b, const Vec3& n) {
    const double endpoints = std::max(a.vec().dot(n), b.vec().dot(n));
    Vec3 u = a.vec().cross(b.vec());
    const double un = u.norm();
    if (un == 0.0) {
        return endpoints;
    }
    u = u * (1.0 / un);
    const Vec3 m = n - u * n.dot(u);
    const double mn = m.norm();
    if (mn < 1e-15) {
        return endpoints;
    }
    // The in-plane maximum sits at m; it counts only if m lies between a and b.
    if (a.vec().cross(m).dot(u) >= 0.0 && m.cross(b.vec()).dot(u) >= 0.0) {
        return mn;
    }
    return endpoints;
}

double maxDot(const Trixel& t, const UnitVec3& n) {
    if (insideMargin(t, n) >= 0.0) {
        return 1.0;
    }
    double best = -1.0;
    for (int i = 0; i < 3; ++i) {
        best = std::max(best, arcMaxDot(t.corners[i], t.corners[(i + 1) % 3], n.vec()));
    }
    return best;
}

double minDot(const Trixel& t, const UnitVec3& n) { return -maxDot(t, -n); }

int pickChild(const std::array<Trixel, 4>& kids, const UnitVec3& p) {
    for (int k = 0; k < 4; ++k) {
        if (insideMargin(kids[k], p) >= 0.0) {
            return k;
        }
    }
    // Rounding left the point just outside every child; take the nearest one.
    int best = 0;
    double bestMargin = insideMargin(kids[0], p);
    for (int k = 1; k < 4; ++k) {
        const double m = insideMargin(kids[k], p);
        if (m > bestMargin) {
            best = k;
            bestMargin = m;
        }
    }
    return best;
}

std::vector<HtmRange> coalesce(const std::vector<HtmId>& ids, int depth) {
    std::vector<HtmRange> ranges;
    ranges.reserve(ids.size());
    for (HtmId id : ids) {
        ranges.push_back({id.firstDescendant(depth), id.lastDescendant(depth)});
    }
    std::sort(ranges.begin(), ranges.end(),
              [](const HtmRange& a, const HtmRange& b) { return a.begin < b.begin; });
    std::vector<HtmRange> out;
    for (const HtmRange& r : ranges) {
        if (!out.empty() && r.begin.value() <= out.back().end.value() + 1) {
            out.back().end = std::max(out.back().end, r.end);
        } else {
            out.push_back(r);
        }
    }
    return out;
}

// Merges the ranges separated by the smallest gaps until at most maxRanges remain.
std::vector<HtmRange> mergeSmallestGaps(std::vector<HtmRange> ranges, std::size_t maxRanges) {
    while (ranges.size() > std::max<std::size_t>(maxRanges, 1)) {
        std::size_t best = 0;
        std::uint64_t bestGap = ~std::uint64_t{0};
        for (std::size_t i = 0; i + 1 < ranges.size(); ++i) {
            const std::uint64_t gap = ranges[i + 1].begin.value() - ranges[i].end.value();
            if (gap < bestGap) {
                bestGap = gap;
                best = i;
            }
        }
        ranges[best].end = ranges[best + 1].end;
        ranges.erase(ranges.begin() + static_cast<std::ptrdiff_t>(best) + 1);
    }
    return ranges;
}

}  // namespace

bool isValidHtmId(std::uint64_t value) {
    if (value < 8) {
        return false;
    }
    const int width = std::bit_width(value);
    return width % 2 == 0 && (width - 4) / 2 <= kMaxDepth;
}

HtmId HtmId::checked(std::uint64_t value) {
    if (!isValidHtmId(value)) {
        throw GeometryError("malformed htm id " + std::to_string(value));
    }
    return HtmId(value);
}

int HtmId::depth() const {
    if (!isValidHtmId(value_)) {
        throw GeometryError("malformed htm id " + std::to_string(value_));
    }
    return (std::bit_width(value_) - 4) / 2;
}

int HtmId::faceIndex() const { return static_cast<int>((value_ >> (2 * depth())) & 7u); }

int HtmId::digit(int level) const { return static_cast<int>((value_ >> (2 * (depth() - level))) & 3u); }

HtmId HtmId::parent() const {
    if (depth() == 0) {
        throw GeometryError("a base face has no parent");
    }
    return HtmId(value_ >> 2);
}

HtmId HtmId::firstDescendant(int d) const { return HtmId(value_ << (2 * (d - depth()))); }

HtmId HtmId::lastDescendant(int d) const {
    const int shift = 2 * (d - depth());
    return HtmId((value_ << shift) | ((std::uint64_t{1} << shift) - 1));
}

UnitVec3 Trixel::centroid() const {
    return UnitVec3::normalize(corners[0].vec() + corners[1].vec() + corners[2].vec());
}

double Trixel::area() const {
    const Vec3& a = corners[0].vec();
    const Vec3& b = corners[1].vec();
    const Vec3& c = corners[2].vec();
    const double triple = std::abs(a.dot(b.cross(c)));
    const double denom = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    return 2.0 * std::atan2(triple, denom);
}

bool Trixel::contains(const UnitVec3& p, double tolerance) const { return insideMargin(*this, p) >= -tolerance; }

double Trixel::maxEdgeDeg() const {
    return std::max({arcDistanceDeg(corners[0], corners[1]), arcDistanceDeg(corners[1], corners[2]),
                     arcDistanceDeg(corners[2], corners[0])});
}

std::array<Trixel, 8> baseTrixels() {
    const UnitVec3 v0 = axis(0, 0, 1);
    const UnitVec3 v1 = axis(1, 0, 0);
    const UnitVec3 v2 = axis(0, 1, 0);
    const UnitVec3 v3 = axis(-1, 0, 0);
    const UnitVec3 v4 = axis(0, -1, 0);
    const UnitVec3 v5 = axis(0, 0, -1);
    return {{
        {{v1, v0, v4}},  // face 0, id 8
        {{v4, v0, v3}},  // face 1, id 9
        {{v3, v0, v2}},  // face 2, id 10
        {{v2, v0, v1}},  // face 3, id 11
        {{v1, v5, v2}},  // face 4, id 12
        {{v2, v5, v3}},  // face 5, id 13
        {{v3, v5, v4}},  // face 6, id 14
        {{v4, v5, v1}},  // face 7, id 15
    }};
}

std::array<Trixel, 4> subdivide(const Trixel& t) {
    const auto& [v0, v1, v2] = t.corners;
    const UnitVec3 w0 = midpoint(v1, v2);
    const UnitVec3 w1 = midpoint(v0, v2);
    const UnitVec3 w2 = midpoint(v0, v1);
    return {{
        {{v0, w2, w1}},
        {{v1, w0, w2}},
        {{v2, w1, w0}},
        {{w0, w1, w2}},
    }};
}

HtmId pointToHtmId(const UnitVec3& p, int depth) {
    if (depth < 0 || depth > kMaxDepth) {
        throw GeometryError("htm depth " + std::to_string(depth) + " outside 0..30");
    }
    const auto faces = baseTrixels();
    int face = -1;
    for (int f = 0; f < 8 && face < 0; ++f) {
        if (insideMargin(faces[f], p) >= 0.0) {
            face = f;
        }
    }
    if (face < 0) {
        face = 0;
        for (int f = 1; f < 8; ++f) {
            if (insideMargin(faces[f], p) > insideMargin(faces[face], p)) {
                face = f;
            }
        }
    }
    std::uint64_t id = 8u + static_cast<std::uint64_t>(face);
    Trixel t = faces[face];
    for (int level = 0; level < depth; ++level) {
        const auto kids = subdivide(t);
        const int k = pickChild(kids, p);
        id = id * 4 + static_cast<std::uint64_t>(k);
        t = kids[k];
    }
    return HtmId(id);
}

Trixel htmIdToTrixel(HtmId id) {
    const int depth = id.depth();
    Trixel t = baseTrixels()[id.faceIndex()];
    for (int level = 1; level <= depth; ++level) {
        t = subdivide(t)[id.digit(level)];
    }
    return t;
}

bool prefixContains(HtmId a, HtmId b) {
    const int da = a.depth();
    const int db = b.depth();
    return da <= db && (b.value() >> (2 * (db - da))) == a.value();
}

// A cap {n . p > l} holds the whole trixel when the trixel's minimum of n . p
// clears l, and misses it when the maximum stays at or below l. Extremes of a
// linear function over a spherical triangle occur at n (or -n) when inside,
// otherwise on an edge arc, which handles small holes that no corner sees.
Coverage classifyTrixel(const Trixel& t, const Convex& c) {
    bool allInside = true;
    for (const HalfSpace& h : c.constraints) {
        if (maxDot(t, h.normal()) <= h.l() - kClassifyTolerance) {
            return Coverage::Outside;
        }
        if (allInside && !(minDot(t, h.normal()) > h.l() + kClassifyTolerance)) {
            allInside = false;
        }
    }
    return allInside ? Coverage::Inside : Coverage::Partial;
}

Coverage classifyTrixel(const Trixel& t, const Region& r) {
    bool allOutside = true;
    for (const Convex& c : r.convexes) {
        const Coverage k = classifyTrixel(t, c);
        if (k == Coverage::Inside) {
            return Coverage::Inside;
        }
        if (k == Coverage::Partial) {
            allOutside = false;
        }
    }
    return allOutside ? Coverage::Outside : Coverage::Partial;
}

// Breadth-first refinement. After each level the cover is the accepted
// trixels plus the still-partial ones; the deepest level whose coalesced
// range list fits the budget wins.
std::vector<HtmRange> htmCover(const Region& r, const CoverBudget& budget) {
    struct Node {
        HtmId id;
        Trixel t;
    };
    const std::size_t maxPending = 4 * static_cast<std::size_t>(std::max(budget.maxRanges, 1));
    const int maxDepth = std::clamp(budget.maxDepth, 0, kMaxDepth);

    std::vector<HtmId> accepted;
    std::vector<Node> pending;
    const auto faces = baseTrixels();
    for (int f = 0; f < 8; ++f) {
        const Coverage k = classifyTrixel(faces[f], r);
        if (k == Coverage::Inside) {
            accepted.push_back(HtmId::face(f));
        } else if (k == Coverage::Partial) {
            pending.push_back({HtmId::face(f), faces[f]});
        }
    }

    auto snapshot = [&](int depth) {
        std::vector<HtmId> ids = accepted;
        for (const Node& n : pending) {
            ids.push_back(n.id);
        }
        return coalesce(ids, depth);
    };

    int depth = 0;
    std::vector<HtmRange> best = snapshot(0);
    const bool fitsAtTop = best.size() <= static_cast<std::size_t>(budget.maxRanges);
    while (depth < maxDepth && !pending.empty()) {
        std::vector<HtmId> newlyAccepted;
        std::vector<Node> next;
        for (const Node& n : pending) {
            const auto kids = subdivide(n.t);
            for (int k = 0; k < 4; ++k) {
                const Coverage c = classifyTrixel(kids[k], r);
                if (c == Coverage::Inside) {
                    newlyAccepted.push_back(n.id.child(k));
                } else if (c == Coverage::Partial) {
                    next.push_back({n.id.child(k), kids[k]});
                }
            }
        }
        if (next.size() > maxPending) {
            break;
        }
        accepted.insert(accepted.end(), newlyAccepted.begin(), newlyAccepted.end());
        pending = std::move(next);
        ++depth;
        std::vector<HtmRange> candidate = snapshot(depth);
        if (candidate.size() <= static_cast<std::size_t>(budget.maxRanges)) {
            best = std::move(candidate);
        }
    }
    if (!fitsAtTop && best.size() > static_cast<std::size_t>(budget.maxRanges)) {
        best = mergeSmallestGaps(std::move(best), static_cast<std::size_t>(budget.maxRanges));
    }
    return best;
}

int coverDepth(const std::vector<HtmRange>& ranges) { return ranges.empty() ? 0 : ranges.front().begin.depth(); }

std::vector<HtmId> rangeToTrixels(const HtmRange& range) {
    const int depth = range.begin.depth();
    std::vector<HtmId> out;
    std::uint64_t b = range.begin.value();
    const std::uint64_t e = range.end.value();
    while (b <= e) {
        int k = 0;
        while (k < depth) {
            const std::uint64_t block = std::uint64_t{1} << (2 * (k + 1));
            if (b % block != 0 || b + block - 1 > e) {
                break;
            }
            ++k;
        }
        out.emplace_back(b >> (2 * k));
        b += std::uint64_t{1} << (2 * k);
    }
    return out;
}

HtmRange rangeAtDepth(const HtmRange& range, int depth) {
    return {range.begin.firstDescendant(depth), range.end.lastDescendant(depth)};
}

}  // namespace skysearch::htm
