#include "skysearch/algebra.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <numeric>
#include <string>

#include "skysearch/convex_analysis.hpp"
#include "skysearch/error.hpp"

namespace skysearch::algebra {

namespace {

constexpr double kSameTolerance = 1e-12;
constexpr int kMaxSimplifyRounds = 64;

bool canonicalLess(const HalfSpace& a, const HalfSpace& b) {
    const auto ka = std::array{a.normal().x(), a.normal().y(), a.normal().z(), a.l()};
    const auto kb = std::array{b.normal().x(), b.normal().y(), b.normal().z(), b.l()};
    return ka < kb;
}

bool nearlySame(const HalfSpace& a, const HalfSpace& b) {
    return std::abs(a.normal().x() - b.normal().x()) <= kSameTolerance &&
           std::abs(a.normal().y() - b.normal().y()) <= kSameTolerance &&
           std::abs(a.normal().z() - b.normal().z()) <= kSameTolerance && std::abs(a.l() - b.l()) <= kSameTolerance;
}

std::size_t countMatches(const std::vector<HalfSpace>& from, const std::vector<HalfSpace>& in,
                         std::size_t& unmatchedIndex) {
    std::size_t unmatched = 0;
    for (std::size_t i = 0; i < from.size(); ++i) {
        const bool found =
            std::any_of(in.begin(), in.end(), [&](const HalfSpace& h) { return nearlySame(from[i], h); });
        if (!found) {
            ++unmatched;
            unmatchedIndex = i;
        }
    }
    return unmatched;
}

// P = A.h and Q = A.~h collapse to A.
bool tryMerge(const Convex& p, const Convex& q, Convex& merged) {
    if (p.constraints.size() != q.constraints.size() || p.constraints.empty()) {
        return false;
    }
    std::size_t ip = 0;
    std::size_t iq = 0;
    if (countMatches(p.constraints, q.constraints, ip) != 1 || countMatches(q.constraints, p.constraints, iq) != 1) {
        return false;
    }
    if (!nearlySame(negateHalfSpace(p.constraints[ip]), q.constraints[iq])) {
        return false;
    }
    merged = p;
    merged.constraints.erase(merged.constraints.begin() + static_cast<std::ptrdiff_t>(ip));
    return true;
}

std::string number(double v) {
    if (v == 0.0) {
        v = 0.0;
    }
    std::array<char, 32> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

void checkType(const std::string& type) {
    if (type.size() > kMaxTypeLength) {
        throw QueryError("region type '" + type + "' is longer than 16 characters");
    }
}

}  // namespace

Region orRegions(const Region& a, const Region& b) {
    Region out = a;
    out.convexes.insert(out.convexes.end(), b.convexes.begin(), b.convexes.end());
    return out;
}

Region andRegions(const Region& a, const Region& b) {
    Region out;
    out.convexes.reserve(a.convexes.size() * b.convexes.size());
    for (const Convex& ca : a.convexes) {
        for (const Convex& cb : b.convexes) {
            Convex c = ca;
            c.constraints.insert(c.constraints.end(), cb.constraints.begin(), cb.constraints.end());
            out.convexes.push_back(std::move(c));
        }
    }
    return out;
}

Region notConvex(const Convex& c) {
    Region out;
    for (std::size_t j = 0; j < c.constraints.size(); ++j) {
        Convex piece;
        piece.constraints.assign(c.constraints.begin(), c.constraints.begin() + static_cast<std::ptrdiff_t>(j));
        piece.constraints.push_back(negateHalfSpace(c.constraints[j]));
        out.convexes.push_back(std::move(piece));
    }
    return out;
}

Region notRegion(const Region& r) {
    if (r.convexes.empty()) {
        return Region::wholeSphere();
    }
    Region acc = notConvex(r.convexes.front());
    for (std::size_t i = 1; i < r.convexes.size(); ++i) {
        acc = simplifyRegion(andRegions(acc, notConvex(r.convexes[i])));
    }
    return acc;
}

bool simplifyConvex(Convex& c) {
    std::vector<HalfSpace> hs;
    hs.reserve(c.constraints.size());
    for (const HalfSpace& h : c.constraints) {
        if (h.l() >= 1.0) {
            return false;
        }
        if (h.l() > -1.0) {
            hs.push_back(h);
        }
    }
    std::sort(hs.begin(), hs.end(), canonicalLess);
    hs.erase(std::unique(hs.begin(), hs.end()), hs.end());

    Convex cur{hs};
    if (convexIsEmpty(cur)) {
        return false;
    }
    // Loose limits go first so that of two nested caps the smaller survives.
    std::vector<HalfSpace> order = cur.constraints;
    std::stable_sort(order.begin(), order.end(), [](const HalfSpace& a, const HalfSpace& b) { return a.l() < b.l(); });
    for (const HalfSpace& h : order) {
        const auto it = std::find(cur.constraints.begin(), cur.constraints.end(), h);
        const auto pos = static_cast<std::size_t>(it - cur.constraints.begin());
        if (cur.constraints.size() > 1 && constraintIsRedundant(cur, pos)) {
            cur.constraints.erase(it);
        }
    }
    std::sort(cur.constraints.begin(), cur.constraints.end(), canonicalLess);
    c = std::move(cur);
    return true;
}

Region simplifyRegion(const Region& r) {
    Region cur = r;
    for (int round = 0; round < kMaxSimplifyRounds; ++round) {
        Region next;
        for (const Convex& c : cur.convexes) {
            Convex cc = c;
            if (simplifyConvex(cc)) {
                next.convexes.push_back(std::move(cc));
            }
        }

        const std::size_t n = next.convexes.size();
        std::vector<bool> drop(n, false);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n && !drop[i]; ++j) {
                if (i == j || drop[j]) {
                    continue;
                }
                if (convexContains(next.convexes[j], next.convexes[i]) &&
                    (j < i || !convexContains(next.convexes[i], next.convexes[j]))) {
                    drop[i] = true;
                }
            }
        }
        Region kept;
        for (std::size_t i = 0; i < n; ++i) {
            if (!drop[i]) {
                kept.convexes.push_back(std::move(next.convexes[i]));
            }
        }

        bool merged = false;
        for (std::size_t i = 0; i < kept.convexes.size() && !merged; ++i) {
            for (std::size_t j = i + 1; j < kept.convexes.size() && !merged; ++j) {
                Convex m;
                if (tryMerge(kept.convexes[i], kept.convexes[j], m)) {
                    kept.convexes[i] = std::move(m);
                    kept.convexes.erase(kept.convexes.begin() + static_cast<std::ptrdiff_t>(j));
                    merged = true;
                }
            }
        }

        if (kept == cur) {
            break;
        }
        cur = std::move(kept);
    }
    return cur;
}

CompiledPredicate::CompiledPredicate(const Region& r) {
    for (const Convex& c : r.convexes) {
        for (const HalfSpace& h : c.constraints) {
            nx_.push_back(h.normal().x());
            ny_.push_back(h.normal().y());
            nz_.push_back(h.normal().z());
            l_.push_back(h.l());
        }
        ends_.push_back(l_.size());
    }
}

bool CompiledPredicate::operator()(const UnitVec3& p) const {
    const double px = p.x();
    const double py = p.y();
    const double pz = p.z();
    std::size_t k = 0;
    for (const std::size_t end : ends_) {
        bool inside = true;
        for (; k < end; ++k) {
            if (!(px * nx_[k] + py * ny_[k] + pz * nz_[k] > l_[k])) {
                inside = false;
                k = end;
                break;
            }
        }
        if (inside) {
            return true;
        }
    }
    return false;
}

std::vector<std::size_t> CompiledPredicate::filter(const std::vector<UnitVec3>& points) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if ((*this)(points[i])) {
            out.push_back(i);
        }
    }
    return out;
}

std::string CompiledPredicate::text() const {
    if (ends_.empty()) {
        return "false";
    }
    std::string out;
    std::size_t k = 0;
    for (std::size_t c = 0; c < ends_.size(); ++c) {
        if (c > 0) {
            out += " or ";
        }
        if (k == ends_[c]) {
            out += "(true)";
            continue;
        }
        out += "(";
        for (bool first = true; k < ends_[c]; ++k, first = false) {
            if (!first) {
                out += " and ";
            }
            out += "(p.x*" + number(nx_[k]) + " + p.y*" + number(ny_[k]) + " + p.z*" + number(nz_[k]) + " > " +
                   number(l_[k]) + ")";
        }
        out += ")";
    }
    return out;
}

Region StoredRegion::geometry() const {
    Region r;
    r.convexes.reserve(convexes.size());
    for (const StoredConvex& c : convexes) {
        Convex cc;
        cc.constraints.reserve(c.halfSpaces.size());
        for (const StoredHalfSpace& h : c.halfSpaces) {
            cc.constraints.push_back(h.h);
        }
        r.convexes.push_back(std::move(cc));
    }
    return r;
}

std::int64_t RegionStore::regionNew(const std::string& type, const std::string& comment) {
    checkType(type);
    const std::int64_t id = nextRegionId_++;
    StoredRegion& r = regions_[id];
    r.id = id;
    r.type = type;
    r.comment = comment;
    return id;
}

std::int64_t RegionStore::regionNewConvex(std::int64_t regionID) {
    StoredRegion& r = mutableGet(regionID);
    StoredConvex c;
    c.id = r.nextConvexId++;
    r.convexes.push_back(c);
    return c.id;
}

std::int64_t RegionStore::regionNewConvexConstraint(std::int64_t regionID, std::int64_t convexID, double x, double y,
                                                    double z, double l) {
    StoredRegion& r = mutableGet(regionID);
    const auto it = std::find_if(r.convexes.begin(), r.convexes.end(),
                                 [&](const StoredConvex& c) { return c.id == convexID; });
    if (it == r.convexes.end()) {
        throw QueryError("region " + std::to_string(regionID) + " has no convex " + std::to_string(convexID));
    }
    const HalfSpace h(UnitVec3::normalize({x, y, z}), l);
    const std::int64_t id = it->nextHalfSpaceId++;
    it->halfSpaces.push_back({id, h});
    return id;
}

void RegionStore::assign(StoredRegion& dst, const Region& r) {
    dst.convexes.clear();
    for (const Convex& c : r.convexes) {
        StoredConvex sc;
        sc.id = dst.nextConvexId++;
        for (const HalfSpace& h : c.constraints) {
            sc.halfSpaces.push_back({sc.nextHalfSpaceId++, h});
        }
        dst.convexes.push_back(std::move(sc));
    }
}

std::int64_t RegionStore::regionFromGeometry(const Region& r, const std::string& type, const std::string& comment) {
    const std::int64_t id = regionNew(type, comment);
    assign(regions_.at(id), r);
    return id;
}

void RegionStore::regionDrop(std::int64_t regionID) {
    if (regions_.erase(regionID) == 0) {
        throw QueryError("unknown region " + std::to_string(regionID));
    }
}

std::int64_t RegionStore::regionOr(std::int64_t a, std::int64_t b, const std::string& type,
                                   const std::string& comment) {
    checkType(type);
    return regionFromGeometry(orRegions(geometry(a), geometry(b)), type, comment);
}

std::int64_t RegionStore::regionAnd(std::int64_t a, std::int64_t b, const std::string& type,
                                    const std::string& comment) {
    checkType(type);
    return regionFromGeometry(andRegions(geometry(a), geometry(b)), type, comment);
}

std::int64_t RegionStore::regionNot(std::int64_t a, const std::string& type, const std::string& comment) {
    checkType(type);
    return regionFromGeometry(notRegion(geometry(a)), type, comment);
}

void RegionStore::regionSimplify(std::int64_t regionID) {
    StoredRegion& r = mutableGet(regionID);
    assign(r, simplifyRegion(r.geometry()));
}

std::vector<RegionConvexRef> RegionStore::regionsOnPoint(const UnitVec3& p) const {
    std::vector<RegionConvexRef> out;
    for (const auto& [id, r] : regions_) {
        for (const StoredConvex& c : r.convexes) {
            const bool excluded = std::any_of(c.halfSpaces.begin(), c.halfSpaces.end(),
                                              [&](const StoredHalfSpace& h) { return !h.h.contains(p); });
            if (!excluded) {
                out.emplace_back(id, c.id);
            }
        }
    }
    return out;
}

std::vector<std::int64_t> RegionStore::pointsInRegion(const std::vector<std::pair<std::int64_t, UnitVec3>>& points,
                                                      std::int64_t regionID) const {
    const CompiledPredicate pred(geometry(regionID));
    std::vector<std::int64_t> out;
    for (const auto& [id, p] : points) {
        if (pred(p)) {
            out.push_back(id);
        }
    }
    return out;
}

CompiledPredicate RegionStore::regionPredicate(std::int64_t regionID) const {
    return CompiledPredicate(geometry(regionID));
}

const StoredRegion& RegionStore::get(std::int64_t regionID) const {
    const auto it = regions_.find(regionID);
    if (it == regions_.end()) {
        throw QueryError("unknown region " + std::to_string(regionID));
    }
    return it->second;
}

StoredRegion& RegionStore::mutableGet(std::int64_t regionID) {
    const auto it = regions_.find(regionID);
    if (it == regions_.end()) {
        throw QueryError("unknown region " + std::to_string(regionID));
    }
    return it->second;
}

RegionStore RegionStore::restore(std::vector<StoredRegion> regions, std::int64_t nextRegionId) {
    RegionStore s;
    s.nextRegionId_ = nextRegionId;
    for (StoredRegion& r : regions) {
        if (r.id <= 0 || r.id >= nextRegionId || s.regions_.count(r.id) != 0) {
            throw SnapshotError("inconsistent region id " + std::to_string(r.id));
        }
        checkType(r.type);
        const std::int64_t id = r.id;
        s.regions_.emplace(id, std::move(r));
    }
    return s;
}

}  // namespace skysearch::algebra
