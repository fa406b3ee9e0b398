// skysearch command-line front end.
//
// State lives in a snapshot file (--snapshot). Commands that build or modify
// something load it, apply the change and write it back. Output is either
// aligned tables (--format human) or one JSON object per line
// (--format machine), each tagged with a "record" field.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "skysearch/algebra.hpp"
#include "skysearch/catalog.hpp"
#include "skysearch/error.hpp"
#include "skysearch/fixtures.hpp"
#include "skysearch/htm.hpp"
#include "skysearch/pyramid.hpp"
#include "skysearch/region_lang.hpp"
#include "skysearch/zone_index.hpp"

using json = nlohmann::ordered_json;
using namespace skysearch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInput = 3;
constexpr int kExitQuery = 4;
constexpr int kExitOracle = 5;

struct OracleMismatch : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Globals {
    std::string snapshot = "skysearch.snap";
    std::string format = "human";
    double zoneHeight = zones::ZoneConfig{}.zoneHeight;
    double maxRadius = zones::ZoneConfig{}.maxRadius;
    double epsilon = zones::ZoneConfig{}.epsilon;
    int htmDepth = catalog::kDefaultHtmDepth;
    double baseZoneHeight = pyramid::PyramidConfig{}.baseZoneHeight;
    bool timings = false;
};

// Collects named tables of records and prints them in the chosen format.
class Output {
public:
    explicit Output(bool machine) : machine_(machine) {}

    void add(const std::string& table, json row) {
        if (machine_) {
            json tagged;
            tagged["record"] = table;
            for (auto& [k, v] : row.items()) {
                tagged[k] = v;
            }
            std::cout << tagged.dump() << '\n';
            return;
        }
        if (tables_.empty() || tables_.back().first != table) {
            tables_.push_back({table, {}});
        }
        tables_.back().second.push_back(std::move(row));
    }

    void flush() {
        for (const auto& [name, rows] : tables_) {
            printTable(name, rows);
        }
        tables_.clear();
        std::cout.flush();
    }

private:
    static std::string cell(const json& v) {
        if (v.is_string()) {
            return v.get<std::string>();
        }
        if (v.is_number_float()) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
            return buf;
        }
        return v.dump();
    }

    static void printTable(const std::string& name, const std::vector<json>& rows) {
        std::cout << "# " << name << '\n';
        if (rows.empty()) {
            return;
        }
        std::vector<std::string> keys;
        for (const auto& [k, v] : rows.front().items()) {
            keys.push_back(k);
        }
        std::vector<std::size_t> width(keys.size());
        for (std::size_t i = 0; i < keys.size(); ++i) {
            width[i] = keys[i].size();
            for (const json& r : rows) {
                width[i] = std::max(width[i], cell(r.value(keys[i], json())).size());
            }
        }
        auto line = [&](auto&& get) {
            for (std::size_t i = 0; i < keys.size(); ++i) {
                const std::string s = get(i);
                std::cout << s << std::string(width[i] - s.size() + (i + 1 < keys.size() ? 2 : 0), ' ');
            }
            std::cout << '\n';
        };
        line([&](std::size_t i) { return keys[i]; });
        for (const json& r : rows) {
            line([&](std::size_t i) { return cell(r.value(keys[i], json())); });
        }
    }

    bool machine_;
    std::vector<std::pair<std::string, std::vector<json>>> tables_;
};

zones::ZoneConfig zoneConfig(const Globals& g) {
    zones::ZoneConfig cfg;
    cfg.zoneHeight = g.zoneHeight;
    cfg.maxRadius = g.maxRadius;
    cfg.epsilon = g.epsilon;
    return cfg;
}

pyramid::PyramidConfig pyramidConfig(const Globals& g) {
    pyramid::PyramidConfig cfg;
    cfg.baseZoneHeight = g.baseZoneHeight;
    cfg.epsilon = g.epsilon;
    return cfg;
}

catalog::State loadState(const Globals& g, bool mustExist) {
    if (!std::filesystem::exists(g.snapshot)) {
        if (mustExist) {
            throw SnapshotError("missing snapshot " + g.snapshot + " (run 'ingest' or a build command first)");
        }
        return {};
    }
    return catalog::loadSnapshot(g.snapshot);
}

json configRecord(const Globals& g, const std::string& command) {
    return json{{"command", command},      {"snapshot", g.snapshot},   {"format", g.format},
                {"zone_height", g.zoneHeight}, {"max_radius", g.maxRadius}, {"epsilon", g.epsilon},
                {"htm_depth", g.htmDepth},   {"base_zone_height", g.baseZoneHeight}};
}

double seconds(std::chrono::steady_clock::duration d) { return std::chrono::duration<double>(d).count(); }

double median(std::vector<double> v) {
    if (v.empty()) {
        return 0.0;
    }
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <typename F>
double timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return seconds(std::chrono::steady_clock::now() - t0);
}

std::vector<std::int64_t> ids(const std::vector<zones::NearbyResult>& rs) {
    std::vector<std::int64_t> out;
    out.reserve(rs.size());
    for (const auto& r : rs) {
        out.push_back(r.objID);
    }
    return out;
}

json regionJson(const algebra::StoredRegion& r) {
    return json{{"region_id", r.id},
                {"type", r.type},
                {"comment", r.comment},
                {"convexes", r.convexes.size()},
                {"spec", lang::serializeRegion(r.geometry())}};
}

// ---- bench --------------------------------------------------------------

void benchNearby(const Globals& g, Output& out, std::size_t n, std::size_t k, std::uint64_t seed,
                 std::optional<double> fixedRadius) {
    const auto cat = fixtures::randomCatalog(n, seed);
    auto queries = fixtures::coneQueries(k, seed + 1, fixedRadius.value_or(g.maxRadius));
    if (fixedRadius) {
        for (auto& q : queries) {
            q.radiusDeg = *fixedRadius;
        }
    }
    zones::ZoneConfig cfg = zoneConfig(g);
    cfg.maxRadius = std::max(cfg.maxRadius, fixedRadius.value_or(0.0));
    zones::ZoneTable table;
    const double buildZone = timed([&] { table = zones::ZoneTable::build(cat, cfg); });
    catalog::Catalog c;
    c.htmDepth = g.htmDepth;
    for (const auto& o : cat) {
        c.rows.push_back(catalog::makeRow(o.objID, o.pos, g.htmDepth));
    }
    catalog::HtmPointIndex htmIndex;
    const double buildHtm = timed([&] { htmIndex = catalog::HtmPointIndex(c); });

    std::size_t zoneMatch = 0;
    std::size_t htmMatch = 0;
    std::vector<double> tZone, tHtm, tBrute;
    for (const auto& q : queries) {
        std::vector<zones::NearbyResult> a, b, o;
        tZone.push_back(timed([&] { a = table.nearby(q.center, ArcAngle::degrees(q.radiusDeg)); }));
        tHtm.push_back(timed([&] { b = htmIndex.coneSearch(q.center, ArcAngle::degrees(q.radiusDeg)); }));
        tBrute.push_back(timed([&] { o = fixtures::bruteNearby(cat, q.center, q.radiusDeg); }));
        zoneMatch += ids(a) == ids(o) ? 1 : 0;
        htmMatch += ids(b) == ids(o) ? 1 : 0;
    }
    out.add("bench", {{"bench", "nearby"}, {"n", n}, {"queries", k}, {"seed", seed},
                      {"zone_oracle_match", std::to_string(zoneMatch) + "/" + std::to_string(k)},
                      {"htm_oracle_match", std::to_string(htmMatch) + "/" + std::to_string(k)}});
    if (g.timings || g.format == "human") {
        const double brute = median(tBrute);
        out.add("speedup", {{"method", "brute force"}, {"build_s", 0.0}, {"median_query_us", brute * 1e6},
                            {"speedup", 1.0}});
        out.add("speedup", {{"method", "zones"}, {"build_s", buildZone}, {"median_query_us", median(tZone) * 1e6},
                            {"speedup", brute / std::max(median(tZone), 1e-12)}});
        out.add("speedup", {{"method", "htm"}, {"build_s", buildHtm}, {"median_query_us", median(tHtm) * 1e6},
                            {"speedup", brute / std::max(median(tHtm), 1e-12)}});
    }
    out.flush();
    if (g.format == "human") {
        std::cout << "oracle match: " << zoneMatch << "/" << k << '\n';
    }
    if (zoneMatch != k || htmMatch != k) {
        throw OracleMismatch("nearby results differ from the brute-force scan");
    }
}

void benchNeighbors(const Globals& g, Output& out, std::size_t n, std::uint64_t seed, double r) {
    const auto cat = fixtures::randomCatalog(n, seed);
    zones::NeighborsTable table;
    const double tZone = timed([&] { table = zones::buildNeighbors(cat, ArcAngle::degrees(r), r); });
    std::vector<zones::NeighborRow> brute;
    const double tBrute = timed([&] { brute = fixtures::bruteNeighbors(cat, r); });
    const auto tall = zones::buildNeighbors(cat, ArcAngle::degrees(r), 4.0 * r);
    auto key = [](const std::vector<zones::NeighborRow>& rows) {
        std::vector<std::pair<std::int64_t, std::int64_t>> k;
        for (const auto& row : rows) {
            k.emplace_back(row.objID, row.neighborObjID);
        }
        return k;
    };
    const bool match = key(table.rows()) == key(brute);
    out.add("bench", {{"bench", "neighbors"}, {"n", n}, {"seed", seed}, {"radius", r},
                      {"rows", table.rows().size()}, {"pre_mirror", table.stats().preMirrorPairs},
                      {"candidates_h_eq_r", table.stats().candidatePairs},
                      {"candidates_h_eq_4r", tall.stats().candidatePairs},
                      {"oracle_match", match ? "1/1" : "0/1"}});
    if (g.timings || g.format == "human") {
        out.add("speedup", {{"method", "brute force"}, {"seconds", tBrute}, {"speedup", 1.0}});
        out.add("speedup", {{"method", "zones"}, {"seconds", tZone}, {"speedup", tBrute / std::max(tZone, 1e-12)}});
    }
    out.flush();
    if (!match) {
        throw OracleMismatch("neighbors table differs from the brute-force pairs");
    }
}

void benchOverlap(const Globals& g, Output& out, std::size_t n, std::size_t k, std::uint64_t seed) {
    const auto entries = fixtures::randomCircles(n, seed, 0.01, 2.0);
    pyramid::PyramidIndex index(pyramidConfig(g));
    for (const auto& e : entries) {
        index.insert(e.id, e.center, ArcAngle::degrees(e.radiusDeg));
    }
    fixtures::Rng rng(seed + 1);
    std::size_t matches = 0;
    pyramid::OverlapStages total;
    std::vector<double> tPyr, tBrute;
    for (std::size_t i = 0; i < k; ++i) {
        const SkyPoint c = fixtures::randomSkyPoint(rng);
        const double r = rng.uniform(0.05, 1.0);
        pyramid::OverlapStages st;
        std::vector<std::int64_t> a, b;
        tPyr.push_back(timed([&] { a = index.overlap(c, ArcAngle::degrees(r), &st); }));
        tBrute.push_back(timed([&] { b = fixtures::bruteOverlap(entries, c, r); }));
        matches += a == b ? 1 : 0;
        total.candidateZones += st.candidateZones;
        total.zone += st.zone;
        total.scanned += st.scanned;
        total.ra += st.ra;
        total.dec += st.dec;
        total.planar += st.planar;
        total.exact += st.exact;
    }
    out.add("bench", {{"bench", "overlap"}, {"n", n}, {"queries", k}, {"seed", seed},
                      {"scales", index.config().scaleCount()},
                      {"oracle_match", std::to_string(matches) + "/" + std::to_string(k)},
                      {"geometry_pass_ratio",
                       total.dec ? static_cast<double>(total.exact) / static_cast<double>(total.dec) : 0.0}});
    for (const auto& [stage, count] : std::vector<std::pair<std::string, std::size_t>>{
             {"zone", total.zone}, {"index ra window", total.scanned}, {"ra", total.ra},
             {"dec", total.dec}, {"planar", total.planar}, {"exact", total.exact}}) {
        out.add("cascade", {{"stage", stage}, {"rows", count}});
    }
    if (g.timings || g.format == "human") {
        const double brute = median(tBrute);
        out.add("speedup", {{"method", "brute force"}, {"median_query_us", brute * 1e6}, {"speedup", 1.0}});
        out.add("speedup", {{"method", "pyramid"}, {"median_query_us", median(tPyr) * 1e6},
                            {"speedup", brute / std::max(median(tPyr), 1e-12)}});
    }
    out.flush();
    if (matches != k) {
        throw OracleMismatch("overlap results differ from the brute-force scan");
    }
}

std::int64_t parseId(const std::string& s) { return std::stoll(s); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spherical search over point catalogs and regions"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--snapshot", g.snapshot, "Snapshot file holding the session state");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"human", "machine"}));
    app.add_option("--zone-height", g.zoneHeight, "Zone height in degrees");
    app.add_option("--max-radius", g.maxRadius, "Largest cone-search radius in degrees (margin width)");
    app.add_option("--epsilon", g.epsilon, "Guard added to cos(dec) in ra window widths");
    app.add_option("--htm-depth", g.htmDepth, "HTM depth of catalog ids")->check(CLI::Range(0, 30));
    app.add_option("--base-zone-height", g.baseZoneHeight, "Finest pyramid zone height in degrees");
    app.add_flag("--timings", g.timings, "Include wall-clock figures in machine output");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Load an objID,ra,dec CSV into the snapshot");
    std::string csvPath;
    ingest->add_option("csv", csvPath)->required();

    // zone
    auto* zone = app.add_subcommand("zone", "Zone table build and cone search");
    zone->require_subcommand(1);
    auto* zoneBuild = zone->add_subcommand("build", "Bucket the catalog into zones");
    auto* zoneNearby = zone->add_subcommand("nearby", "Objects within r of (ra, dec)");
    double qRa = 0, qDec = 0, qR = 0;
    zoneNearby->add_option("--ra", qRa)->required();
    zoneNearby->add_option("--dec", qDec)->required();
    zoneNearby->add_option("--r", qR, "Radius in degrees")->required();

    // neighbors
    auto* nb = app.add_subcommand("neighbors", "Pairs of objects within a fixed radius");
    nb->require_subcommand(1);
    auto* nbBuild = nb->add_subcommand("build", "Materialize the neighbors table");
    double nbR = 0;
    std::optional<double> nbHeight;
    nbBuild->add_option("--r", nbR, "Radius in degrees")->required();
    nbBuild->add_option("--zone-height", nbHeight, "Zone height for the join (default r)");
    auto* nbOf = nb->add_subcommand("of", "Neighbors of one object");
    std::int64_t objid = 0;
    nbOf->add_option("--objid", objid)->required();

    // htm
    auto* htmCmd = app.add_subcommand("htm", "Hierarchical triangular mesh");
    htmCmd->require_subcommand(1);
    auto* htmId = htmCmd->add_subcommand("id", "Trixel id of a point");
    int depth = catalog::kDefaultHtmDepth;
    htmId->add_option("--ra", qRa)->required();
    htmId->add_option("--dec", qDec)->required();
    htmId->add_option("--depth", depth)->check(CLI::Range(0, 30));
    auto* htmCover = htmCmd->add_subcommand("cover", "Trixel ranges covering a region");
    std::string spec;
    htm::CoverBudget budget;
    htmCover->add_option("--region", spec, "Region in the text grammar")->required();
    htmCover->add_option("--max-ranges", budget.maxRanges)->check(CLI::PositiveNumber);
    htmCover->add_option("--max-depth", budget.maxDepth)->check(CLI::Range(0, 30));

    // region
    auto* reg = app.add_subcommand("region", "Named regions and their algebra");
    reg->require_subcommand(1);
    std::string type = "region", comment;
    std::string idA, idB, convexId;
    double cx = 0, cy = 0, cz = 0, cl = 0;
    auto* regNew = reg->add_subcommand("new", "Create a region, empty or from --spec");
    regNew->add_option("--type", type);
    regNew->add_option("--comment", comment);
    regNew->add_option("--spec", spec, "Initial geometry in the text grammar");
    auto* regConvex = reg->add_subcommand("convex", "Append an empty convex");
    regConvex->add_option("--id", idA)->required();
    auto* regCons = reg->add_subcommand("constraint", "Append a half-space x y z l to a convex");
    regCons->add_option("--id", idA)->required();
    regCons->add_option("--convex", convexId)->required();
    regCons->add_option("--x", cx)->required();
    regCons->add_option("--y", cy)->required();
    regCons->add_option("--z", cz)->required();
    regCons->add_option("--l", cl)->required();
    auto* regOr = reg->add_subcommand("or", "Union of two regions");
    auto* regAnd = reg->add_subcommand("and", "Intersection of two regions");
    for (auto* sub : {regOr, regAnd}) {
        sub->add_option("--a", idA)->required();
        sub->add_option("--b", idB)->required();
        sub->add_option("--type", type);
        sub->add_option("--comment", comment);
    }
    auto* regNot = reg->add_subcommand("not", "Complement of a region");
    regNot->add_option("--a", idA)->required();
    regNot->add_option("--type", type);
    regNot->add_option("--comment", comment);
    auto* regSimplify = reg->add_subcommand("simplify", "Simplify a region in place");
    regSimplify->add_option("--id", idA)->required();
    auto* regContains = reg->add_subcommand("contains", "Regions and convexes containing a point");
    regContains->add_option("--ra", qRa)->required();
    regContains->add_option("--dec", qDec)->required();
    auto* regPoints = reg->add_subcommand("points-in", "Catalog objects inside a region");
    regPoints->add_option("--id", idA)->required();
    auto* regPred = reg->add_subcommand("predicate", "Compiled membership predicate");
    regPred->add_option("--id", idA)->required();
    auto* regShow = reg->add_subcommand("show", "Show one region, or all");
    regShow->add_option("--id", idA);
    auto* regDrop = reg->add_subcommand("drop", "Delete a region");
    regDrop->add_option("--id", idA)->required();

    // pyramid
    auto* pyr = app.add_subcommand("pyramid", "Zone pyramid over region bounding circles");
    pyr->require_subcommand(1);
    auto* pyrBuild = pyr->add_subcommand("build", "Index every stored region");
    double maxAspect = 4.0;
    pyrBuild->add_option("--max-aspect", maxAspect, "Split regions whose bounding cap exceeds this area ratio");
    auto* pyrOverlap = pyr->add_subcommand("overlap", "Regions whose bounding circles meet a query circle");
    bool stageCounts = false;
    pyrOverlap->add_option("--ra", qRa)->required();
    pyrOverlap->add_option("--dec", qDec)->required();
    pyrOverlap->add_option("--r", qR)->required();
    pyrOverlap->add_flag("--stage-counts", stageCounts);

    // bench
    auto* bench = app.add_subcommand("bench", "Indexed paths against brute-force scans");
    bench->require_subcommand(1);
    std::size_t benchN = 10000, benchQ = 200;
    std::uint64_t seed = 7;
    std::optional<double> benchR;
    auto* bNearby = bench->add_subcommand("nearby", "Cone search: zones and HTM");
    auto* bNeighbors = bench->add_subcommand("neighbors", "Neighbors self-join");
    auto* bOverlap = bench->add_subcommand("overlap", "Pyramid overlap search");
    for (auto* sub : {bNearby, bNeighbors, bOverlap}) {
        sub->add_option("--n", benchN, "Catalog size");
        sub->add_option("--queries", benchQ, "Query count");
        sub->add_option("--seed", seed);
        sub->add_option("--radius", benchR, "Fixed radius in degrees");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    Output out(g.format == "machine");
    try {
        std::string command;
        for (const CLI::App* sub = app.get_subcommands().front(); sub;) {
            command += (command.empty() ? "" : " ") + sub->get_name();
            const auto subs = sub->get_subcommands();
            sub = subs.empty() ? nullptr : subs.front();
        }
        if (g.format == "machine") {
            out.add("config", configRecord(g, command));
        }

        if (*ingest) {
            catalog::State s = loadState(g, false);
            s.catalog = catalog::ingestCsv(csvPath, g.htmDepth);
            s.zoneTable.reset();
            s.neighbors.reset();
            catalog::saveSnapshot(s, g.snapshot);
            out.add("ingest", {{"rows", s.catalog.rows.size()}, {"htm_depth", s.catalog.htmDepth}});
        } else if (*zoneBuild) {
            catalog::State s = loadState(g, true);
            s.zoneTable = zones::ZoneTable::build(s.catalog.positions(), zoneConfig(g));
            catalog::saveSnapshot(s, g.snapshot);
            out.add("zone_build", {{"objects", s.zoneTable->mainRowCount()},
                                   {"rows", s.zoneTable->rows().size()},
                                   {"zones", zones::zoneCount(g.zoneHeight)}});
        } else if (*zoneNearby) {
            const catalog::State s = loadState(g, true);
            if (!s.zoneTable) {
                throw QueryError("snapshot has no zone table (run 'zone build')");
            }
            zones::NearbyStats st;
            const auto rs = s.zoneTable->nearby(SkyPoint(qRa, qDec), ArcAngle::degrees(qR), &st);
            for (const auto& r : rs) {
                out.add("nearby", {{"objID", r.objID}, {"distance_deg", r.distanceDeg}});
            }
            out.add("nearby_summary", {{"count", rs.size()}, {"min_zone", st.minZone}, {"max_zone", st.maxZone},
                                       {"rows_scanned", st.rowsScanned}, {"dec_passed", st.decPassed}});
        } else if (*nbBuild) {
            catalog::State s = loadState(g, true);
            s.neighbors = zones::buildNeighbors(s.catalog.positions(), ArcAngle::degrees(nbR), nbHeight.value_or(nbR));
            catalog::saveSnapshot(s, g.snapshot);
            out.add("neighbors_build", {{"radius", nbR}, {"zone_height", nbHeight.value_or(nbR)},
                                        {"rows", s.neighbors->rows().size()},
                                        {"pre_mirror", s.neighbors->stats().preMirrorPairs},
                                        {"candidate_pairs", s.neighbors->stats().candidatePairs}});
        } else if (*nbOf) {
            const catalog::State s = loadState(g, true);
            if (!s.neighbors) {
                throw QueryError("snapshot has no neighbors table (run 'neighbors build')");
            }
            const auto rows = s.neighbors->of(objid);
            for (const auto& r : rows) {
                out.add("neighbor", {{"objID", r.objID}, {"neighborObjID", r.neighborObjID},
                                     {"distance_deg", r.distanceDeg}});
            }
            out.add("neighbor_summary", {{"objID", objid}, {"count", rows.size()}});
        } else if (*htmId) {
            const UnitVec3 p = skyToVec(SkyPoint(qRa, qDec));
            const htm::HtmId id = htm::pointToHtmId(p, depth);
            out.add("htm_id", {{"ra", qRa}, {"dec", qDec}, {"depth", depth}, {"htm_id", id.value()}});
        } else if (*htmCover) {
            const Region r = lang::regionFromString(spec);
            const auto ranges = htm::htmCover(r, budget);
            for (const auto& range : ranges) {
                out.add("htm_range", {{"begin", range.begin.value()}, {"end", range.end.value()}});
            }
            out.add("htm_cover", {{"ranges", ranges.size()}, {"depth", htm::coverDepth(ranges)}});
        } else if (*reg) {
            catalog::State s = loadState(g, false);
            auto& store = s.regions;
            bool dirty = true;
            if (*regNew) {
                const std::int64_t id = spec.empty() ? store.regionNew(type, comment)
                                                     : store.regionFromGeometry(lang::regionFromString(spec), type, comment);
                out.add("region", regionJson(store.get(id)));
            } else if (*regConvex) {
                const std::int64_t cid = store.regionNewConvex(parseId(idA));
                out.add("convex", {{"region_id", parseId(idA)}, {"convex_id", cid}});
            } else if (*regCons) {
                const std::int64_t hid = store.regionNewConvexConstraint(parseId(idA), parseId(convexId), cx, cy, cz, cl);
                out.add("constraint", {{"region_id", parseId(idA)}, {"convex_id", parseId(convexId)}, {"halfspace_id", hid}});
            } else if (*regOr) {
                out.add("region", regionJson(store.get(store.regionOr(parseId(idA), parseId(idB), type, comment))));
            } else if (*regAnd) {
                out.add("region", regionJson(store.get(store.regionAnd(parseId(idA), parseId(idB), type, comment))));
            } else if (*regNot) {
                out.add("region", regionJson(store.get(store.regionNot(parseId(idA), type, comment))));
            } else if (*regSimplify) {
                store.regionSimplify(parseId(idA));
                out.add("region", regionJson(store.get(parseId(idA))));
            } else if (*regDrop) {
                store.regionDrop(parseId(idA));
                out.add("dropped", {{"region_id", parseId(idA)}});
            } else {
                dirty = false;
                if (*regContains) {
                    const auto hits = store.regionsOnPoint(skyToVec(SkyPoint(qRa, qDec)));
                    for (const auto& [rid, cid] : hits) {
                        out.add("contains", {{"region_id", rid}, {"convex_id", cid}});
                    }
                    out.add("contains_summary", {{"count", hits.size()}});
                } else if (*regPoints) {
                    std::vector<std::pair<std::int64_t, UnitVec3>> pts;
                    for (const auto& row : s.catalog.rows) {
                        pts.emplace_back(row.objID, UnitVec3::fromUnit({row.x, row.y, row.z}));
                    }
                    const auto hits = store.pointsInRegion(pts, parseId(idA));
                    for (std::int64_t id : hits) {
                        out.add("point", {{"objID", id}});
                    }
                    out.add("points_summary", {{"region_id", parseId(idA)}, {"count", hits.size()}});
                } else if (*regPred) {
                    const auto pred = store.regionPredicate(parseId(idA));
                    out.add("predicate", {{"region_id", parseId(idA)}, {"convexes", pred.convexCount()},
                                          {"constraints", pred.constraintCount()}, {"text", pred.text()}});
                } else if (*regShow) {
                    if (idA.empty()) {
                        for (const auto& [id, r] : store.regions()) {
                            out.add("region", regionJson(r));
                        }
                    } else {
                        out.add("region", regionJson(store.get(parseId(idA))));
                    }
                }
            }
            if (dirty) {
                catalog::saveSnapshot(s, g.snapshot);
            }
        } else if (*pyrBuild) {
            catalog::State s = loadState(g, true);
            pyramid::PyramidIndex index(pyramidConfig(g));
            std::int64_t nextEntry = 1;
            for (const auto& [id, r] : s.regions.regions()) {
                const Region geom = r.geometry();
                if (algebra::simplifyRegion(geom).convexes.empty()) {
                    continue;
                }
                for (const auto& seg : pyramid::segmentElongatedRegion(geom, maxAspect, id)) {
                    const auto bc = pyramid::boundingCircle(seg.region);
                    index.insert(nextEntry++, vecToSky(bc.center), ArcAngle::degrees(std::max(bc.radiusDeg, 1e-9)),
                                 seg.baseId);
                }
            }
            s.pyramid = std::move(index);
            catalog::saveSnapshot(s, g.snapshot);
            out.add("pyramid_build", {{"entries", s.pyramid->size()}, {"scales", s.pyramid->config().scaleCount()}});
        } else if (*pyrOverlap) {
            const catalog::State s = loadState(g, true);
            if (!s.pyramid) {
                throw QueryError("snapshot has no pyramid (run 'pyramid build')");
            }
            pyramid::OverlapStages st;
            const SkyPoint c(qRa, qDec);
            s.pyramid->overlap(c, ArcAngle::degrees(qR), &st);
            for (std::int64_t base : s.pyramid->overlapBases(c, ArcAngle::degrees(qR))) {
                out.add("overlap", {{"region_id", base}});
            }
            if (stageCounts) {
                for (const auto& [stage, count] : std::vector<std::pair<std::string, std::size_t>>{
                         {"zone", st.zone}, {"index ra window", st.scanned}, {"ra", st.ra}, {"dec", st.dec},
                         {"planar", st.planar}, {"exact", st.exact}}) {
                    out.add("cascade", {{"stage", stage}, {"rows", count}});
                }
            }
        } else if (*bNearby) {
            benchNearby(g, out, benchN, benchQ, seed, benchR);
        } else if (*bNeighbors) {
            benchNeighbors(g, out, benchN, seed, benchR.value_or(0.5));
        } else if (*bOverlap) {
            benchOverlap(g, out, benchN, benchQ, seed);
        }
        out.flush();
        return kExitOk;
    } catch (const OracleMismatch& e) {
        out.flush();
        std::cerr << "oracle mismatch: " << e.what() << '\n';
        return kExitOracle;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitInput;
    } catch (const IngestError& e) {
        std::cerr << "ingest error: " << e.what() << '\n';
        return kExitInput;
    } catch (const GeometryError& e) {
        std::cerr << "geometry error: " << e.what() << '\n';
        return kExitInput;
    } catch (const QueryError& e) {
        std::cerr << "query error: " << e.what() << '\n';
        return kExitQuery;
    } catch (const SnapshotError& e) {
        std::cerr << "snapshot error: " << e.what() << '\n';
        return kExitQuery;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage error: bad id (" << e.what() << ")\n";
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "usage error: id out of range\n";
        return kExitUsage;
    }
}
