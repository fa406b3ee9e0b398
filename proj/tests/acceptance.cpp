// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Informational lines start with '#'.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "skysearch/algebra.hpp"
#include "skysearch/catalog.hpp"
#include "skysearch/error.hpp"
#include "skysearch/fixtures.hpp"
#include "skysearch/htm.hpp"
#include "skysearch/pyramid.hpp"
#include "skysearch/region_lang.hpp"
#include "skysearch/zone_index.hpp"
#include "support.hpp"

using namespace skysearch;
using testsupport::edgeDistanceDeg;
using testsupport::oracleInside;

namespace {

constexpr double kPi = 3.14159265358979323846;
using Clock = std::chrono::steady_clock;
using Ids = std::vector<std::int64_t>;
using Pair = std::pair<std::int64_t, std::int64_t>;

double secondsSince(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v.empty() ? 0.0 : v[v.size() / 2];
}

struct Outcome {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void report(int n, const std::string& name, Outcome& o) {
    std::printf("criterion %2d: %s  %s:%s\n", n, o.ok ? "PASS" : "FAIL", name.c_str(), o.detail.str().c_str());
    std::fflush(stdout);
    failures += o.ok ? 0 : 1;
}

void run(int n, const std::string& name, const std::function<void(Outcome&)>& body) {
    Outcome o;
    try {
        body(o);
    } catch (const std::exception& e) {
        o.require(false, std::string("exception: ") + e.what());
    }
    report(n, name, o);
}

// Strict chord test against the squared chord of the radius, scanning every object.
struct ChordScan {
    std::vector<std::int64_t> ids;
    std::vector<UnitVec3> vecs;

    explicit ChordScan(const std::vector<zones::ObjectPosition>& cat) {
        for (const auto& o : cat) {
            ids.push_back(o.objID);
            vecs.push_back(skyToVec(o.pos));
        }
    }

    Ids query(const SkyPoint& c, double r) const {
        const UnitVec3 cv = skyToVec(c);
        const double half = std::sin(r * kPi / 360.0);
        const double limit = 4.0 * half * half;
        Ids out;
        for (std::size_t i = 0; i < vecs.size(); ++i) {
            if (testsupport::chord2(vecs[i], cv) < limit) {
                out.push_back(ids[i]);
            }
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

Ids idsOf(const std::vector<zones::NearbyResult>& rs) {
    Ids out;
    for (const auto& r : rs) {
        out.push_back(r.objID);
    }
    return out;
}

// ---- shared fixtures ------------------------------------------------------

struct ConeFixture {
    std::vector<zones::ObjectPosition> catalog;
    std::vector<fixtures::ConeQuery> queries;
    std::vector<Ids> expected;
};

ConeFixture makeConeFixture() {
    ConeFixture f;
    f.catalog = fixtures::randomCatalog(10000, 1001);
    f.queries = fixtures::coneQueries(200, 1002, 1.0);
    const ChordScan scan(f.catalog);
    for (const auto& q : f.queries) {
        f.expected.push_back(scan.query(q.center, q.radiusDeg));
    }
    return f;
}

// Runs every query through the zone table; returns the number matching the oracle.
std::size_t coneMatches(const zones::ZoneTable& t, const ConeFixture& f, std::vector<Ids>* results) {
    std::size_t matches = 0;
    for (std::size_t i = 0; i < f.queries.size(); ++i) {
        const auto& q = f.queries[i];
        Ids got = idsOf(t.nearby(q.center, ArcAngle::degrees(q.radiusDeg)));
        matches += got == f.expected[i] ? 1 : 0;
        if (results) {
            results->push_back(std::move(got));
        }
    }
    return matches;
}

struct NeighborFixture {
    std::vector<zones::ObjectPosition> catalog;
    std::vector<Pair> expected;
    std::size_t wrapPairs = 0;
};

NeighborFixture makeNeighborFixture() {
    NeighborFixture f;
    f.catalog = fixtures::randomCatalog(4990, 1003);
    // Five close pairs straddling ra = 0 so wraparound is always exercised.
    const double decs[5] = {-60.0, -20.0, 0.0, 35.0, 70.0};
    for (int k = 0; k < 5; ++k) {
        f.catalog.push_back({4991 + 2 * k, SkyPoint(359.9, decs[k])});
        f.catalog.push_back({4992 + 2 * k, SkyPoint(0.05, decs[k] + 0.01)});
    }
    const double half = std::sin(0.5 * kPi / 360.0);
    const double limit = 4.0 * half * half;
    std::vector<UnitVec3> v;
    for (const auto& o : f.catalog) {
        v.push_back(skyToVec(o.pos));
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        for (std::size_t j = 0; j < v.size(); ++j) {
            if (i != j && testsupport::chord2(v[i], v[j]) < limit) {
                f.expected.emplace_back(f.catalog[i].objID, f.catalog[j].objID);
                if (std::abs(f.catalog[i].pos.ra() - f.catalog[j].pos.ra()) > 180.0) {
                    ++f.wrapPairs;
                }
            }
        }
    }
    std::sort(f.expected.begin(), f.expected.end());
    return f;
}

std::vector<Pair> pairsOf(const zones::NeighborsTable& t) {
    std::vector<Pair> out;
    for (const auto& row : t.rows()) {
        out.emplace_back(row.objID, row.neighborObjID);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void checkNeighbors(Outcome& o, const zones::NeighborsTable& t, const NeighborFixture& f) {
    const auto got = pairsOf(t);
    o.require(got == f.expected, "row multiset equals all pairs");
    std::set<Pair> s(got.begin(), got.end());
    bool symmetric = s.size() == got.size();
    for (const Pair& p : got) {
        symmetric = symmetric && s.count({p.second, p.first}) == 1;
    }
    o.require(symmetric, "symmetric closure");
    o.require(2 * t.stats().preMirrorPairs == t.rows().size(), "pre-mirror count is half the rows");
}

struct OverlapFixture {
    pyramid::PyramidConfig cfg;
    std::vector<fixtures::CircleEntry> entries;
    struct Query {
        SkyPoint c;
        double r;
    };
    std::vector<Query> queries;
    std::vector<Ids> expected;
};

Ids oracleOverlap(const std::vector<fixtures::CircleEntry>& es, const std::vector<UnitVec3>& centers,
                  const SkyPoint& q, double R) {
    const UnitVec3 qv = skyToVec(q);
    Ids out;
    for (std::size_t i = 0; i < es.size(); ++i) {
        if (testsupport::oracleArcDeg(centers[i], qv) < static_cast<long double>(R + es[i].radiusDeg)) {
            out.push_back(es[i].id);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

OverlapFixture makeOverlapFixture() {
    OverlapFixture f;
    f.cfg.baseZoneHeight = 180.0 / 512.0;
    f.entries = fixtures::randomCircles(100000, 1004, 0.01, 2.0);
    std::vector<UnitVec3> centers;
    for (const auto& e : f.entries) {
        centers.push_back(skyToVec(e.center));
    }
    testsupport::TestRng rng(1005);
    for (int i = 0; i < 100; ++i) {
        double ra, dec;
        testsupport::raDec(rng.direction().vec(), ra, dec);
        if (i % 10 == 0) {
            dec = rng.uniform(89.0, 90.0) * (i % 20 == 0 ? 1.0 : -1.0);
        } else if (i % 10 == 1) {
            ra = rng.uniform(0.0, 0.5);
        }
        f.queries.push_back({SkyPoint(ra, dec), rng.uniform(0.05, 1.0)});
        f.expected.push_back(oracleOverlap(f.entries, centers, f.queries.back().c, f.queries.back().r));
    }
    return f;
}

pyramid::PyramidIndex buildPyramid(const OverlapFixture& f) {
    pyramid::PyramidIndex idx(f.cfg);
    for (const auto& e : f.entries) {
        idx.insert(e.id, e.center, ArcAngle::degrees(e.radiusDeg));
    }
    return idx;
}

void checkOverlap(Outcome& o, const pyramid::PyramidIndex& idx, const OverlapFixture& f, std::vector<Ids>* results,
                  double* passRatio) {
    std::size_t matches = 0;
    bool monotone = true;
    std::size_t dec = 0;
    std::size_t exact = 0;
    std::size_t falseNeg = 0;
    for (std::size_t i = 0; i < f.queries.size(); ++i) {
        pyramid::OverlapStages st;
        Ids got = idx.overlap(f.queries[i].c, ArcAngle::degrees(f.queries[i].r), &st);
        matches += got == f.expected[i] ? 1 : 0;
        for (std::int64_t id : f.expected[i]) {
            falseNeg += std::binary_search(got.begin(), got.end(), id) ? 0 : 1;
        }
        monotone = monotone && st.zone >= st.scanned && st.scanned >= st.ra && st.ra >= st.dec &&
                   st.dec >= st.planar && st.planar >= st.exact && st.exact == got.size();
        dec += st.dec;
        exact += st.exact;
        if (results) {
            results->push_back(std::move(got));
        }
    }
    const double ratio = dec ? static_cast<double>(exact) / static_cast<double>(dec) : 0.0;
    if (passRatio) {
        *passRatio = ratio;
    }
    o.detail << " oracle " << matches << "/" << f.queries.size() << ", false negatives " << falseNeg
             << ", geometry-pass ratio " << ratio;
    o.require(matches == f.queries.size(), "overlap equals brute force");
    o.require(monotone, "cascade monotone");
    o.require(std::abs(ratio - kPi / 4) <= 0.15, "geometry-pass ratio within pi/4 +- 0.15");
}

bool inCover(const std::vector<htm::HtmRange>& cover, htm::HtmId id) {
    for (const auto& r : cover) {
        if (r.begin <= id && id <= r.end) {
            return true;
        }
    }
    return false;
}

bool offEdges(std::initializer_list<const Region*> rs, const UnitVec3& p) {
    for (const Region* r : rs) {
        if (edgeDistanceDeg(*r, p) < 1e-9) {
            return false;
        }
    }
    return true;
}

HalfSpace hs(double x, double y, double z, double l) { return HalfSpace(UnitVec3::normalize({x, y, z}), l); }

// Van Oosterom-Strackee spherical excess.
double triangleArea(const htm::Trixel& t) {
    const Vec3 a = t.corners[0].vec();
    const Vec3 b = t.corners[1].vec();
    const Vec3 c = t.corners[2].vec();
    return 2.0 * std::atan2(std::abs(a.dot(b.cross(c))), 1.0 + a.dot(b) + b.dot(c) + c.dot(a));
}

bool planeContains(const htm::Trixel& t, const Vec3& p, double tol) {
    for (int i = 0; i < 3; ++i) {
        if (t.corners[i].vec().cross(t.corners[(i + 1) % 3].vec()).dot(p) < -tol) {
            return false;
        }
    }
    return true;
}

htm::HtmId randomId(testsupport::TestRng& rng, int depth) {
    std::uint64_t v = 8u + static_cast<std::uint64_t>(rng.integer(0, 7));
    for (int i = 0; i < depth; ++i) {
        v = v * 4 + static_cast<std::uint64_t>(rng.integer(0, 3));
    }
    return htm::HtmId(v);
}

catalog::Catalog toCatalog(const std::vector<zones::ObjectPosition>& cat) {
    catalog::Catalog c;
    for (const auto& o : cat) {
        c.rows.push_back(catalog::makeRow(o.objID, o.pos));
    }
    return c;
}

}  // namespace

int main() {
    const auto corpus = testsupport::grammarCorpus();

    std::printf("# building cone-search fixture\n");
    const ConeFixture cone = makeConeFixture();
    zones::ZoneTable zoneTable;
    std::vector<Ids> coneResults;

    run(1, "cone search, zones vs brute force", [&](Outcome& o) {
        const auto t0 = Clock::now();
        std::size_t pole = 0;
        std::size_t wrap = 0;
        for (const auto& q : cone.queries) {
            pole += 90.0 - std::abs(q.center.dec()) <= 1.0 ? 1 : 0;
            const Vec3 v = skyToVec(q.center).vec();
            // Distance to the ra = 0 half meridian (the x > 0 half of the y = 0 plane).
            const double toMeridian = v.x > 0 ? std::asin(std::min(1.0, std::abs(v.y))) * 180.0 / kPi
                                              : std::acos(std::clamp(std::abs(v.z), 0.0, 1.0)) * 180.0 / kPi;
            wrap += toMeridian < q.radiusDeg ? 1 : 0;
        }
        zoneTable = zones::ZoneTable::build(cone.catalog, zones::ZoneConfig{});
        const std::size_t matches = coneMatches(zoneTable, cone, &coneResults);
        const double dt = secondsSince(t0);
        o.detail << " " << matches << "/200 match, " << pole << " polar, " << wrap << " crossing ra=0, " << dt
                 << " s";
        o.require(pole >= 20, ">= 20 polar queries");
        o.require(wrap >= 20, ">= 20 queries crossing ra = 0");
        o.require(matches == 200, "200/200");
        o.require(dt < 60.0, "runtime < 60 s");
    });

    run(2, "htm cover path vs brute force, cover soundness", [&](Outcome& o) {
        const catalog::HtmPointIndex idx(toCatalog(cone.catalog));
        std::size_t matches = 0;
        for (std::size_t i = 0; i < cone.queries.size(); ++i) {
            const auto& q = cone.queries[i];
            matches += idsOf(idx.coneSearch(q.center, ArcAngle::degrees(q.radiusDeg))) == cone.expected[i] ? 1 : 0;
        }
        std::size_t misses = 0;
        std::size_t tested = 0;
        for (std::size_t s = 0; s < corpus.size(); ++s) {
            const Region r = lang::regionFromString(corpus[s]);
            const auto cover = htm::htmCover(r);
            const int d = htm::coverDepth(cover);
            auto pts = testsupport::sampleInRegion(r, 1000, 300 + s);
            for (const UnitVec3& p : testsupport::samplePoints(1000, 400 + s)) {
                if (oracleInside(r, p)) {
                    pts.push_back(p);
                }
            }
            for (const UnitVec3& p : pts) {
                misses += inCover(cover, htm::pointToHtmId(p, d)) ? 0 : 1;
            }
            tested += pts.size();
        }
        o.detail << " " << matches << "/200 match, " << misses << " uncovered of " << tested << " in-region samples over "
                 << corpus.size() << " regions";
        o.require(matches == 200, "200/200");
        o.require(misses == 0, "cover soundness");
    });

    std::printf("# building neighbors fixture\n");
    const NeighborFixture nb = makeNeighborFixture();
    zones::NeighborsTable neighbors;

    run(3, "neighbors vs all pairs", [&](Outcome& o) {
        neighbors = zones::buildNeighbors(nb.catalog, ArcAngle::degrees(0.5), 0.5);
        o.detail << " " << neighbors.rows().size() << " rows (" << nb.expected.size() << " expected, " << nb.wrapPairs
                 << " across ra=0), pre-mirror " << neighbors.stats().preMirrorPairs;
        o.require(nb.wrapPairs >= 10, "wraparound pairs present");
        checkNeighbors(o, neighbors, nb);
    });

    run(4, "grammar round trip", [&](Outcome& o) {
        std::size_t disagreements = 0;
        std::size_t compared = 0;
        const bool exampleStrings = corpus.size() >= 32 && corpus[0] == "CIRCLE J2000 30 20 3" &&
                                  corpus[1] == "POLY J2000 0 0 0 90 180 0";
        for (std::size_t s = 0; s < corpus.size(); ++s) {
            const Region first = lang::compileToRegion(lang::parseRegionSpec(corpus[s]));
            const Region second = lang::compileToRegion(lang::parseRegionSpec(lang::serializeRegion(first)));
            auto pts = testsupport::samplePoints(1000, 500 + s);
            const auto inner = testsupport::sampleInRegion(first, 200, 600 + s);
            pts.insert(pts.end(), inner.begin(), inner.end());
            for (const UnitVec3& p : pts) {
                if (edgeDistanceDeg(first, p) < 1e-9) {
                    continue;
                }
                ++compared;
                disagreements += insideRegion(first, p) != insideRegion(second, p) ? 1 : 0;
            }
        }
        o.detail << " " << corpus.size() << " specs, " << disagreements << " disagreements in " << compared
                 << " comparisons";
        o.require(exampleStrings, "corpus holds both example strings and >= 30 generated specs");
        o.require(disagreements == 0, "zero disagreements");
    });

    run(5, "region algebra laws", [&](Outcome& o) {
        testsupport::TestRng rng(2025);
        const auto pts = testsupport::samplePoints(1000, 1006);
        std::size_t violations = 0;
        std::size_t countErrors = 0;
        for (int trial = 0; trial < 50; ++trial) {
            const Region a = testsupport::randomRegion(rng);
            const Region b = testsupport::randomRegion(rng);
            const Region u = algebra::orRegions(a, b);
            const Region i = algebra::andRegions(a, b);
            const Region na = algebra::notRegion(a);
            countErrors += i.convexes.size() == a.convexes.size() * b.convexes.size() ? 0 : 1;
            for (const UnitVec3& p : pts) {
                if (!offEdges({&a, &b}, p)) {
                    continue;
                }
                const bool ia = oracleInside(a, p);
                const bool ib = oracleInside(b, p);
                violations += oracleInside(u, p) != (ia || ib) ? 1 : 0;
                violations += oracleInside(i, p) != (ia && ib) ? 1 : 0;
                violations += oracleInside(na, p) != !ia ? 1 : 0;
            }
        }
        std::size_t notErrors = 0;
        for (int k = 1; k <= 6; ++k) {
            Convex c;
            for (int j = 0; j < k; ++j) {
                c.constraints.emplace_back(rng.direction(), rng.uniform(-0.5, 0.5));
            }
            const Region n = algebra::notConvex(c);
            notErrors += n.convexes.size() == static_cast<std::size_t>(k) ? 0 : 1;
            const Region cr{{c}};
            for (const UnitVec3& p : pts) {
                int hits = 0;
                for (const Convex& piece : n.convexes) {
                    hits += oracleInside(Region{{piece}}, p) ? 1 : 0;
                }
                notErrors += hits > 1 ? 1 : 0;
                if (edgeDistanceDeg(cr, p) > 1e-9) {
                    notErrors += (hits == 1) != !oracleInside(cr, p) ? 1 : 0;
                }
            }
        }
        o.detail << " " << violations << " pointwise violations, " << countErrors << " N*M count errors, "
                 << notErrors << " NOT-convex errors";
        o.require(violations == 0, "pointwise identities");
        o.require(countErrors == 0, "AND convex count N*M");
        o.require(notErrors == 0, "NOT of k constraints is k disjoint convexes");
    });

    run(6, "simplify", [&](Outcome& o) {
        const auto pts = testsupport::samplePoints(1000, 1007);
        std::size_t changed = 0;
        std::size_t notIdempotent = 0;
        for (std::size_t s = 0; s < corpus.size(); ++s) {
            const Region r = lang::regionFromString(corpus[s]);
            const Region once = algebra::simplifyRegion(r);
            notIdempotent += algebra::simplifyRegion(once) == once ? 0 : 1;
            auto sample = pts;
            const auto inner = testsupport::sampleInRegion(r, 300, 700 + s);
            sample.insert(sample.end(), inner.begin(), inner.end());
            for (const UnitVec3& p : sample) {
                if (offEdges({&r}, p)) {
                    changed += oracleInside(once, p) != oracleInside(r, p) ? 1 : 0;
                }
            }
        }
        Convex redundant{{hs(0, 0, 1, 0), hs(0, 0, 1, -0.5)}};
        const bool redundantOk = algebra::simplifyConvex(redundant) && redundant.constraints.size() == 1 &&
                                 redundant.constraints[0].l() == 0.0;
        const Region contra{{Convex{{hs(0, 0, 1, 0), hs(0, 0, -1, 0)}}, Convex{{hs(1, 0, 0, 0.5)}}}};
        const Region contraS = algebra::simplifyRegion(contra);
        const bool contraOk = contraS.convexes.size() == 1 && contraS.convexes[0] == Convex{{hs(1, 0, 0, 0.5)}};
        const HalfSpace a = hs(0, 0, 1, 0.2);
        const HalfSpace b = hs(1, 1, 0, 0.1);
        const Region merged =
            algebra::simplifyRegion(Region{{Convex{{a, b}}, Convex{{a, negateHalfSpace(b)}}}});
        const bool mergeOk = merged == Region::single(a);
        o.detail << " " << changed << " membership changes, " << notIdempotent << " non-idempotent, fixtures "
                 << (redundantOk ? "ok" : "bad") << "/" << (contraOk ? "ok" : "bad") << "/"
                 << (mergeOk ? "ok" : "bad");
        o.require(changed == 0, "membership preserved");
        o.require(notIdempotent == 0, "idempotent");
        o.require(redundantOk, "redundant-limit fixture");
        o.require(contraOk, "contradiction fixture");
        o.require(mergeOk, "A.B + A.~B fixture");
    });

    run(7, "htm structure", [&](Outcome& o) {
        testsupport::TestRng rng(1008);
        std::size_t prefixErrors = 0;
        for (int i = 0; i < 10000; ++i) {
            const int da = rng.integer(0, 10);
            const htm::HtmId a = randomId(rng, da);
            htm::HtmId b;
            if (i % 2 == 0) {
                b = a;
                const int extra = rng.integer(0, 6);
                for (int k = 0; k < extra; ++k) {
                    b = b.child(rng.integer(0, 3));
                }
            } else {
                b = randomId(rng, rng.integer(da, 16));
            }
            const htm::Trixel tb = htm::htmIdToTrixel(b);
            const Vec3 s = tb.corners[0].vec() + tb.corners[1].vec() + tb.corners[2].vec();
            const bool geometric = planeContains(htm::htmIdToTrixel(a), s * (1.0 / s.norm()), 0.0);
            prefixErrors += htm::prefixContains(a, b) != geometric ? 1 : 0;
        }

        double minEdge = 1e9;
        double maxEdge = 0.0;
        for (int i = 0; i < 20000; ++i) {
            const htm::Trixel t = htm::htmIdToTrixel(i % 2 ? randomId(rng, 20)
                                                           : htm::pointToHtmId(rng.direction(), 20));
            for (int k = 0; k < 3; ++k) {
                const double e =
                    static_cast<double>(testsupport::oracleArcDeg(t.corners[k], t.corners[(k + 1) % 3])) * 3600.0;
                minEdge = std::min(minEdge, e);
                maxEdge = std::max(maxEdge, e);
            }
        }

        std::vector<double> lo(9, 1e9);
        std::vector<double> hi(9, 0.0);
        std::function<void(const htm::Trixel&, int)> walk = [&](const htm::Trixel& t, int depth) {
            if (depth > 0) {
                const double a = triangleArea(t);
                lo[depth] = std::min(lo[depth], a);
                hi[depth] = std::max(hi[depth], a);
            }
            if (depth < 8) {
                for (const htm::Trixel& c : htm::subdivide(t)) {
                    walk(c, depth + 1);
                }
            }
        };
        for (const htm::Trixel& f : htm::baseTrixels()) {
            walk(f, 0);
        }
        double worst = 0.0;
        std::printf("# area ratio max/min by depth:");
        for (int d = 1; d <= 8; ++d) {
            std::printf(" %d:%.4f", d, hi[d] / lo[d]);
            worst = std::max(worst, hi[d] / lo[d]);
        }
        std::printf("\n");

        o.detail << " " << prefixErrors << " prefix/containment disagreements, depth-20 edges " << minEdge << ".."
                 << maxEdge << " arcsec, max area ratio " << worst;
        o.require(prefixErrors == 0, "prefix containment <=> geometric containment");
        o.require(minEdge >= 0.15 && maxEdge <= 0.7, "depth-20 edges within [0.15, 0.7] arcsec");
        o.require(worst <= 2.1, "area ratio <= 2.1");
    });

    std::printf("# building overlap fixture\n");
    const OverlapFixture ov = makeOverlapFixture();
    pyramid::PyramidIndex pyr;
    std::vector<Ids> overlapResults;
    double passRatio = 0.0;

    run(8, "pyramid overlap", [&](Outcome& o) {
        pyr = buildPyramid(ov);
        o.detail << " " << pyr.size() << " entries, " << pyr.config().scaleCount() << " scales,";
        o.require(pyr.config().scaleCount() == 10, "10 scales");
        checkOverlap(o, pyr, ov, &overlapResults, &passRatio);
    });

    run(9, "relative performance direction", [&](Outcome& o) {
        const auto cat = fixtures::randomCatalog(1000000, 1009);
        const ChordScan scan(cat);
        const auto t = zones::ZoneTable::build(cat, zones::ZoneConfig{});
        testsupport::TestRng rng(1010);
        std::vector<double> tz;
        std::vector<double> tb;
        std::size_t agree = 0;
        const int k = 51;
        for (int i = 0; i < k; ++i) {
            double ra, dec;
            testsupport::raDec(rng.direction().vec(), ra, dec);
            const SkyPoint c(ra, dec);
            auto t0 = Clock::now();
            const Ids z = idsOf(t.nearby(c, ArcAngle::degrees(0.1)));
            tz.push_back(secondsSince(t0));
            t0 = Clock::now();
            const Ids b = scan.query(c, 0.1);
            tb.push_back(secondsSince(t0));
            agree += z == b ? 1 : 0;
        }
        const double speedup = median(tb) / std::max(median(tz), 1e-12);
        std::printf("# %-12s %16s %10s\n", "method", "median query us", "speedup");
        std::printf("# %-12s %16.2f %10.1f\n", "brute force", median(tb) * 1e6, 1.0);
        std::printf("# %-12s %16.2f %10.1f\n", "zones", median(tz) * 1e6, speedup);

        const auto narrow = zones::buildNeighbors(nb.catalog, ArcAngle::degrees(0.5), 0.5);
        const auto wide = zones::buildNeighbors(nb.catalog, ArcAngle::degrees(0.5), 2.0);
        o.detail << " zone median " << median(tz) * 1e6 << " us vs brute " << median(tb) * 1e6 << " us ("
                 << speedup << "x), " << agree << "/" << k << " agree; candidate pairs h=r "
                 << narrow.stats().candidatePairs << " vs h=4r " << wide.stats().candidatePairs;
        o.require(agree == static_cast<std::size_t>(k), "zone results equal the scan");
        o.require(speedup >= 5.0, "zones >= 5x faster");
        o.require(narrow.stats().candidatePairs < wide.stats().candidatePairs, "h=r examines fewer pairs");
        o.require(narrow.rows() == wide.rows(), "same neighbors at both heights");
    });

    run(10, "numerical stability", [&](Outcome& o) {
        testsupport::TestRng rng(1011);
        double worst = 0.0;
        double sumChord = 0.0;
        double sumAcos = 0.0;
        int trials = 0;
        for (double sep = 1e-7; sep <= 1.001e-1; sep *= 10.0) {
            for (int k = 0; k < 100; ++k) {
                const UnitVec3 a = rng.direction();
                Vec3 tangent = a.vec().cross(rng.direction().vec());
                tangent = tangent * (1.0 / tangent.norm());
                const double th = sep * kPi / 180.0;
                const UnitVec3 b = UnitVec3::normalize(a.vec() * std::cos(th) + tangent * std::sin(th));
                const long double ref = testsupport::oracleArcDeg(a, b);
                const double chordErr =
                    static_cast<double>(std::abs(static_cast<long double>(arcDistanceDeg(a, b)) - ref) / ref);
                const double acosDeg = std::acos(std::clamp(a.dot(b), -1.0, 1.0)) * 180.0 / kPi;
                const double acosErr = static_cast<double>(std::abs(static_cast<long double>(acosDeg) - ref) / ref);
                worst = std::max(worst, chordErr);
                sumChord += chordErr;
                sumAcos += acosErr;
                ++trials;
            }
        }
        o.detail << " " << trials << " trials, worst relative error " << worst << ", mean chord "
                 << sumChord / trials << " vs acos " << sumAcos / trials;
        o.require(worst <= 1e-6, "relative error <= 1e-6");
        o.require(sumChord < sumAcos, "smaller than the acos formula");
    });

    run(11, "snapshot fidelity", [&](Outcome& o) {
        const auto dir = std::filesystem::temp_directory_path() / "skysearch_acceptance";
        std::filesystem::create_directories(dir);
        const std::string conePath = (dir / "cone.snap").string();
        const std::string pairPath = (dir / "pairs.snap").string();

        catalog::State a;
        a.catalog = toCatalog(cone.catalog);
        a.zoneTable = zoneTable;
        a.pyramid = pyr;
        catalog::saveSnapshot(a, conePath);
        catalog::State b;
        b.catalog = toCatalog(nb.catalog);
        b.neighbors = neighbors;
        catalog::saveSnapshot(b, pairPath);

        const catalog::State la = catalog::loadSnapshot(conePath);
        const catalog::State lb = catalog::loadSnapshot(pairPath);
        o.require(la.zoneTable && la.pyramid && lb.neighbors, "indexes survive the round trip");
        if (!o.ok) {
            return;
        }
        std::vector<Ids> cone2;
        const std::size_t matches = coneMatches(*la.zoneTable, cone, &cone2);
        o.require(matches == 200 && cone2 == coneResults, "criterion 1 identical");

        Outcome n;
        checkNeighbors(n, *lb.neighbors, nb);
        o.require(n.ok && lb.neighbors->rows() == neighbors.rows(), "criterion 3 identical");

        Outcome p;
        std::vector<Ids> overlap2;
        double ratio2 = 0.0;
        checkOverlap(p, *la.pyramid, ov, &overlap2, &ratio2);
        o.require(p.ok && overlap2 == overlapResults && ratio2 == passRatio, "criterion 8 identical");
        o.detail << " cone " << matches << "/200, neighbors " << lb.neighbors->rows().size() << " rows, overlap"
                 << p.detail.str();
        std::filesystem::remove_all(dir);
    });

    std::printf("%d of 11 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
