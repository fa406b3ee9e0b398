#pragma once

// Named regions in disjunctive normal form and the Boolean algebra over them.
//
// A region is an OR of convexes, a convex an AND of half-spaces. The store
// keeps each region with a short type tag and a free-text comment and hands
// out ids that are never reused, mirroring a Region/Convex/HalfSpace table
// layout. The pure functions below operate on geometry alone.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "skysearch/geom.hpp"

namespace skysearch::algebra {

inline constexpr std::size_t kMaxTypeLength = 16;

// ---- pure geometry ------------------------------------------------------

/// Concatenation of the convex lists.
Region orRegions(const Region& a, const Region& b);
/// Pairwise intersection: |a| * |b| convexes.
Region andRegions(const Region& a, const Region& b);
/// Disjoint complement of one convex: {~a1}, {a1, ~a2}, {a1, a2, ~a3}, ...
Region notConvex(const Convex& c);
/// Complement of a region; convex complements are folded with andRegions,
/// simplifying between steps.
Region notRegion(const Region& r);
/// Drops empty convexes and redundant constraints, removes convexes
/// contained in others and merges A.B + A.~B pairs. Membership is preserved
/// off edges and the result is a fixpoint (simplifying again is a no-op).
Region simplifyRegion(const Region& r);
/// Per-convex cleanup used by simplifyRegion: drops trivial, duplicate and
/// redundant constraints and sorts the rest. Returns false when c is empty.
bool simplifyConvex(Convex& c);

/// Membership test hoisted into flat arrays, with a textual rendering.
class CompiledPredicate {
public:
    CompiledPredicate() = default;
    explicit CompiledPredicate(const Region& r);

    bool operator()(const UnitVec3& p) const;
    std::vector<std::size_t> filter(const std::vector<UnitVec3>& points) const;

    std::size_t convexCount() const { return ends_.size(); }
    std::size_t constraintCount() const { return l_.size(); }
    /// "((p.x*a + p.y*b + p.z*c > l) and ...) or (...)"; "false" when empty.
    std::string text() const;

private:
    std::vector<double> nx_, ny_, nz_, l_;
    std::vector<std::size_t> ends_;
};

// ---- store --------------------------------------------------------------

struct StoredHalfSpace {
    std::int64_t id = 0;
    HalfSpace h;
};

struct StoredConvex {
    std::int64_t id = 0;
    std::vector<StoredHalfSpace> halfSpaces;
    std::int64_t nextHalfSpaceId = 1;
};

struct StoredRegion {
    std::int64_t id = 0;
    std::string type;
    std::string comment;
    std::vector<StoredConvex> convexes;
    std::int64_t nextConvexId = 1;

    Region geometry() const;
};

/// (regionID, convexID)
using RegionConvexRef = std::pair<std::int64_t, std::int64_t>;

class RegionStore {
public:
    /// Throws QueryError when type is longer than 16 characters.
    std::int64_t regionNew(const std::string& type, const std::string& comment);
    std::int64_t regionNewConvex(std::int64_t regionID);
    /// Normalizes (x, y, z). Throws GeometryError on a zero normal or l outside [-1, 1].
    std::int64_t regionNewConvexConstraint(std::int64_t regionID, std::int64_t convexID, double x, double y,
                                           double z, double l);
    /// Stores existing geometry as a new region.
    std::int64_t regionFromGeometry(const Region& r, const std::string& type, const std::string& comment);
    void regionDrop(std::int64_t regionID);

    std::int64_t regionOr(std::int64_t a, std::int64_t b, const std::string& type, const std::string& comment);
    std::int64_t regionAnd(std::int64_t a, std::int64_t b, const std::string& type, const std::string& comment);
    std::int64_t regionNot(std::int64_t a, const std::string& type, const std::string& comment);
    void regionSimplify(std::int64_t regionID);

    std::vector<RegionConvexRef> regionsOnPoint(const UnitVec3& p) const;
    std::vector<std::int64_t> pointsInRegion(const std::vector<std::pair<std::int64_t, UnitVec3>>& points,
                                             std::int64_t regionID) const;
    CompiledPredicate regionPredicate(std::int64_t regionID) const;

    /// Throws QueryError for unknown ids.
    const StoredRegion& get(std::int64_t regionID) const;
    Region geometry(std::int64_t regionID) const { return get(regionID).geometry(); }
    bool contains(std::int64_t regionID) const { return regions_.count(regionID) != 0; }

    const std::map<std::int64_t, StoredRegion>& regions() const { return regions_; }
    std::int64_t nextRegionId() const { return nextRegionId_; }

    /// Rebuilds a store from persisted parts; validates id bookkeeping.
    static RegionStore restore(std::vector<StoredRegion> regions, std::int64_t nextRegionId);

private:
    StoredRegion& mutableGet(std::int64_t regionID);
    static void assign(StoredRegion& dst, const Region& r);

    std::map<std::int64_t, StoredRegion> regions_;
    std::int64_t nextRegionId_ = 1;
};

}  // namespace skysearch::algebra
