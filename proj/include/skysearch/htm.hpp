#pragma once

// Hierarchical Triangular Mesh.
//
// The sphere starts as the 8 faces of the octahedron with corners at the
// coordinate axes; each trixel splits into 4 children by joining its edge
// midpoints. Child i (0..2) keeps parent corner i, child 3 is the midpoint
// triangle.
//
// Identifier layout for a depth-d trixel (4 + 2d bits):
//
//     1 | face (3 bits) | t1 | t2 | ... | td      (each ti is 2 bits)
//
// so depth-0 faces are 8..15, parent(id) = id >> 2 and the children of id are
// 4 id + 0..3. Faces 0..3 (ids 8..11) cover the northern hemisphere, faces
// 4..7 (ids 12..15) the southern one.

#include <array>
#include <cstdint>
#include <vector>

#include "skysearch/geom.hpp"

namespace skysearch::htm {

inline constexpr int kMaxDepth = 30;

class HtmId {
public:
    constexpr HtmId() = default;
    constexpr explicit HtmId(std::uint64_t value) : value_(value) {}

    /// Throws GeometryError when the value lacks the leading marker or is too deep.
    static HtmId checked(std::uint64_t value);
    static constexpr HtmId face(int f) { return HtmId(8u + static_cast<std::uint64_t>(f)); }

    constexpr std::uint64_t value() const { return value_; }
    int depth() const;
    int faceIndex() const;
    /// Two-bit child digit at `level` (1-based, 1..depth).
    int digit(int level) const;

    HtmId parent() const;
    constexpr HtmId child(int k) const { return HtmId(value_ * 4 + static_cast<std::uint64_t>(k)); }
    /// First and last descendant at `depth` (>= this depth).
    HtmId firstDescendant(int depth) const;
    HtmId lastDescendant(int depth) const;

    constexpr auto operator<=>(const HtmId&) const = default;

private:
    std::uint64_t value_ = 0;
};

bool isValidHtmId(std::uint64_t value);

/// Spherical triangle with corners in counter-clockwise order seen from outside.
struct Trixel {
    std::array<UnitVec3, 3> corners;

    UnitVec3 centroid() const;
    /// Spherical excess, steradians.
    double area() const;
    /// Non-strict containment with a small tolerance on each edge plane.
    bool contains(const UnitVec3& p, double tolerance = 1e-15) const;
    /// Largest corner-to-corner arc length, degrees.
    double maxEdgeDeg() const;
};

std::array<Trixel, 8> baseTrixels();
std::array<Trixel, 4> subdivide(const Trixel& t);

/// Throws GeometryError when depth is outside 0..30.
HtmId pointToHtmId(const UnitVec3& p, int depth);
Trixel htmIdToTrixel(HtmId id);
/// True iff trixel a contains trixel b (a's id is a prefix of b's).
bool prefixContains(HtmId a, HtmId b);

/// Inclusive id interval at a single depth.
struct HtmRange {
    HtmId begin;
    HtmId end;

    bool operator==(const HtmRange&) const = default;
};

struct CoverBudget {
    int maxRanges = 20;
    int maxDepth = 20;
};

enum class Coverage { Inside, Outside, Partial };

/// Conservative: Inside and Outside are exact claims, Partial may hide either.
Coverage classifyTrixel(const Trixel& t, const Convex& c);
Coverage classifyTrixel(const Trixel& t, const Region& r);

/// Sorted, disjoint, coalesced id ranges (all at one depth) whose trixels cover `r`.
std::vector<HtmRange> htmCover(const Region& r, const CoverBudget& budget = {});

/// Depth shared by the ranges of a cover (0 for an empty list).
int coverDepth(const std::vector<HtmRange>& ranges);

/// Splits a range into the fewest aligned trixels whose union is exactly the range.
std::vector<HtmId> rangeToTrixels(const HtmRange& range);

/// Re-expresses a range at a finer depth.
HtmRange rangeAtDepth(const HtmRange& range, int depth);

}  // namespace skysearch::htm
