#include "skysearch/catalog.hpp"

#include <zlib.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <unordered_set>

#include "skysearch/error.hpp"

namespace skysearch::catalog {

namespace {

constexpr char kMagic[8] = {'S', 'K', 'Y', 'S', 'N', 'A', 'P', '\0'};
constexpr std::size_t kHeaderSize = 8 + 4 + 8 + 4;

// ---- CSV ----------------------------------------------------------------

struct Field {
    std::string_view text;
    std::size_t column;
};

std::vector<Field> splitFields(std::string_view line) {
    std::vector<Field> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::size_t end = comma == std::string_view::npos ? line.size() : comma;
        out.push_back({line.substr(start, end - start), start + 1});
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
        s.remove_suffix(1);
    }
    return s;
}

template <typename T>
T parseField(const Field& f, std::size_t line, const char* what) {
    const std::string_view t = trim(f.text);
    T value{};
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') {
        ++first;
    }
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (t.empty() || ec != std::errc() || ptr != last) {
        throw IngestError(std::string("malformed ") + what + " '" + std::string(t) + "'", line, f.column);
    }
    return value;
}

// ---- binary encoding ----------------------------------------------------

class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) {
            buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
        }
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) {
            buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
        }
    }
    void i64(std::int64_t v) { u64(static_cast<std::uint64_t>(v)); }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(const std::string& s) {
        u64(s.size());
        buf_.append(s);
    }
    std::string& bytes() { return buf_; }

private:
    std::string buf_;
};

class Reader {
public:
    explicit Reader(std::string_view data) : data_(data) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
    std::uint32_t u32() {
        const auto b = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) {
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        }
        return v;
    }
    std::uint64_t u64() {
        const auto b = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) {
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        }
        return v;
    }
    std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        const std::uint64_t n = count(1);
        return std::string(take(n));
    }
    /// Element count checked against the bytes left, so corrupt lengths fail early.
    std::uint64_t count(std::size_t minElementSize) {
        const std::uint64_t n = u64();
        if (minElementSize > 0 && n > (data_.size() - pos_) / minElementSize) {
            throw SnapshotError("snapshot payload is corrupt (count " + std::to_string(n) + ")");
        }
        return n;
    }
    bool done() const { return pos_ == data_.size(); }

private:
    std::string_view take(std::size_t n) {
        if (n > data_.size() - pos_) {
            throw SnapshotError("snapshot payload ends early");
        }
        const std::string_view s = data_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    std::string_view data_;
    std::size_t pos_ = 0;
};

std::uint32_t checksum(std::string_view payload) {
    uLong crc = crc32(0L, Z_NULL, 0);
    std::size_t off = 0;
    while (off < payload.size()) {
        const std::size_t chunk = std::min<std::size_t>(payload.size() - off, 1u << 30);
        crc = crc32(crc, reinterpret_cast<const Bytef*>(payload.data() + off), static_cast<uInt>(chunk));
        off += chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

}  // namespace

CatalogRow makeRow(std::int64_t objID, const SkyPoint& p, int htmDepth) {
    const UnitVec3 v = skyToVec(p);
    return {objID, p.ra(), p.dec(), v.x(), v.y(), v.z(), htm::pointToHtmId(v, htmDepth).value()};
}

std::vector<zones::ObjectPosition> Catalog::positions() const {
    std::vector<zones::ObjectPosition> out;
    out.reserve(rows.size());
    for (const CatalogRow& r : rows) {
        out.push_back({r.objID, SkyPoint(r.ra, r.dec)});
    }
    return out;
}

Catalog ingestCsvText(std::string_view text, int htmDepth) {
    if (htmDepth < 0 || htmDepth > htm::kMaxDepth) {
        throw GeometryError("htm depth " + std::to_string(htmDepth) + " outside 0..30");
    }
    Catalog cat;
    cat.htmDepth = htmDepth;
    std::unordered_set<std::int64_t> seen;
    std::size_t lineNo = 0;
    bool header = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t nl = text.find('\n', pos);
        if (nl == std::string_view::npos) {
            nl = text.size();
        }
        std::string_view line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++lineNo;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = splitFields(line);
        if (!header) {
            if (fields.size() != 3 || trim(fields[0].text) != "objID" || trim(fields[1].text) != "ra" ||
                trim(fields[2].text) != "dec") {
                throw IngestError("expected header 'objID,ra,dec'", lineNo, 1);
            }
            header = true;
            continue;
        }
        if (fields.size() != 3) {
            const std::size_t col = fields.size() > 3 ? fields[3].column : line.size() + 1;
            throw IngestError("expected 3 fields, found " + std::to_string(fields.size()), lineNo, col);
        }
        const auto id = parseField<std::int64_t>(fields[0], lineNo, "objID");
        const auto ra = parseField<double>(fields[1], lineNo, "ra");
        const auto dec = parseField<double>(fields[2], lineNo, "dec");
        if (!std::isfinite(ra)) {
            throw IngestError("ra must be finite", lineNo, fields[1].column);
        }
        if (!std::isfinite(dec) || dec < -90.0 || dec > 90.0) {
            throw IngestError("dec outside [-90, 90]", lineNo, fields[2].column);
        }
        if (!seen.insert(id).second) {
            throw IngestError("duplicate objID " + std::to_string(id), lineNo, fields[0].column);
        }
        cat.rows.push_back(makeRow(id, SkyPoint(ra, dec), htmDepth));
    }
    if (!header) {
        throw IngestError("missing header 'objID,ra,dec'", std::max<std::size_t>(lineNo, 1), 1);
    }
    return cat;
}

Catalog ingestCsv(const std::string& path, int htmDepth) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IngestError("cannot open " + path, 0, 0);
    }
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return ingestCsvText(text, htmDepth);
}

HtmPointIndex::HtmPointIndex(const Catalog& catalog) : depth_(catalog.htmDepth), rows_(catalog.rows) {
    std::sort(rows_.begin(), rows_.end(), [](const CatalogRow& a, const CatalogRow& b) {
        return a.htmID != b.htmID ? a.htmID < b.htmID : a.objID < b.objID;
    });
}

std::vector<zones::NearbyResult> HtmPointIndex::coneSearch(const SkyPoint& center, ArcAngle r,
                                                           const htm::CoverBudget& budget,
                                                           std::size_t* candidates) const {
    std::vector<zones::NearbyResult> out;
    std::size_t seen = 0;
    if (r.deg() > 0.0) {
        const UnitVec3 c = skyToVec(center);
        const Region region = Region::single(circleToHalfSpace(c, r));
        htm::CoverBudget b = budget;
        b.maxDepth = std::min(b.maxDepth, depth_);
        const double limit = chordSquaredForArc(r.deg());
        for (const htm::HtmRange& range : htm::htmCover(region, b)) {
            const htm::HtmRange fine = htm::rangeAtDepth(range, depth_);
            auto it = std::lower_bound(rows_.begin(), rows_.end(), fine.begin.value(),
                                       [](const CatalogRow& row, std::uint64_t v) { return row.htmID < v; });
            for (; it != rows_.end() && it->htmID <= fine.end.value(); ++it) {
                ++seen;
                const double dx = it->x - c.x();
                const double dy = it->y - c.y();
                const double dz = it->z - c.z();
                const double d2 = dx * dx + dy * dy + dz * dz;
                if (d2 < limit) {
                    out.push_back({it->objID, 2.0 * std::asin(std::min(1.0, std::sqrt(d2) / 2.0)) * kRadToDeg});
                }
            }
        }
        std::sort(out.begin(), out.end(),
                  [](const zones::NearbyResult& a, const zones::NearbyResult& b) { return a.objID < b.objID; });
    }
    if (candidates) {
        *candidates = seen;
    }
    return out;
}

std::string encodeSnapshot(const State& s) {
    Writer w;
    w.u32(static_cast<std::uint32_t>(s.catalog.htmDepth));
    w.u64(s.catalog.rows.size());
    for (const CatalogRow& r : s.catalog.rows) {
        w.i64(r.objID);
        w.f64(r.ra);
        w.f64(r.dec);
        w.f64(r.x);
        w.f64(r.y);
        w.f64(r.z);
        w.u64(r.htmID);
    }

    w.u8(s.zoneTable ? 1 : 0);
    if (s.zoneTable) {
        const auto& cfg = s.zoneTable->config();
        w.f64(cfg.zoneHeight);
        w.f64(cfg.maxRadius);
        w.f64(cfg.epsilon);
        w.u64(s.zoneTable->rows().size());
        for (const zones::ZoneRow& r : s.zoneTable->rows()) {
            w.i32(r.zone);
            w.i64(r.objID);
            w.f64(r.ra);
            w.f64(r.dec);
            w.f64(r.x);
            w.f64(r.y);
            w.f64(r.z);
        }
    }

    w.u8(s.neighbors ? 1 : 0);
    if (s.neighbors) {
        w.f64(s.neighbors->radiusDeg());
        w.u64(s.neighbors->stats().candidatePairs);
        w.u64(s.neighbors->stats().preMirrorPairs);
        w.u64(s.neighbors->rows().size());
        for (const zones::NeighborRow& r : s.neighbors->rows()) {
            w.i64(r.objID);
            w.i64(r.neighborObjID);
            w.f64(r.distanceDeg);
        }
    }

    w.i64(s.regions.nextRegionId());
    w.u64(s.regions.regions().size());
    for (const auto& [id, r] : s.regions.regions()) {
        w.i64(r.id);
        w.str(r.type);
        w.str(r.comment);
        w.i64(r.nextConvexId);
        w.u64(r.convexes.size());
        for (const algebra::StoredConvex& c : r.convexes) {
            w.i64(c.id);
            w.i64(c.nextHalfSpaceId);
            w.u64(c.halfSpaces.size());
            for (const algebra::StoredHalfSpace& h : c.halfSpaces) {
                w.i64(h.id);
                w.f64(h.h.normal().x());
                w.f64(h.h.normal().y());
                w.f64(h.h.normal().z());
                w.f64(h.h.l());
            }
        }
    }

    w.u8(s.pyramid ? 1 : 0);
    if (s.pyramid) {
        w.f64(s.pyramid->config().baseZoneHeight);
        w.f64(s.pyramid->config().epsilon);
        const auto entries = s.pyramid->entries();
        w.u64(entries.size());
        for (const pyramid::PyramidEntry& e : entries) {
            w.i64(e.objId);
            w.i64(e.baseId);
            w.f64(e.ra);
            w.f64(e.dec);
            w.f64(e.radius);
        }
    }

    const std::string payload = std::move(w.bytes());
    Writer out;
    out.bytes().append(kMagic, sizeof kMagic);
    out.u32(kSnapshotVersion);
    out.u64(payload.size());
    out.u32(checksum(payload));
    out.bytes().append(payload);
    return std::move(out.bytes());
}

State decodeSnapshot(std::string_view bytes) {
    if (bytes.size() < kHeaderSize || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
        throw SnapshotError("not a skysearch snapshot");
    }
    Reader head(bytes.substr(sizeof kMagic, kHeaderSize - sizeof kMagic));
    const std::uint32_t version = head.u32();
    if (version != kSnapshotVersion) {
        throw SnapshotError("unsupported snapshot version " + std::to_string(version) + " (expected " +
                            std::to_string(kSnapshotVersion) + ")");
    }
    const std::uint64_t length = head.u64();
    const std::uint32_t crc = head.u32();
    const std::string_view payload = bytes.substr(kHeaderSize);
    if (payload.size() != length) {
        throw SnapshotError("snapshot checksum failed: payload is " + std::to_string(payload.size()) +
                            " bytes, header says " + std::to_string(length));
    }
    if (checksum(payload) != crc) {
        throw SnapshotError("snapshot checksum failed");
    }

    Reader r(payload);
    State s;
    s.catalog.htmDepth = static_cast<int>(r.u32());
    const std::uint64_t nrows = r.count(56);
    s.catalog.rows.reserve(nrows);
    for (std::uint64_t i = 0; i < nrows; ++i) {
        CatalogRow row;
        row.objID = r.i64();
        row.ra = r.f64();
        row.dec = r.f64();
        row.x = r.f64();
        row.y = r.f64();
        row.z = r.f64();
        row.htmID = r.u64();
        s.catalog.rows.push_back(row);
    }

    if (r.u8() != 0) {
        zones::ZoneConfig cfg;
        cfg.zoneHeight = r.f64();
        cfg.maxRadius = r.f64();
        cfg.epsilon = r.f64();
        const std::uint64_t n = r.count(52);
        std::vector<zones::ZoneRow> rows;
        rows.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            zones::ZoneRow z;
            z.zone = r.i32();
            z.objID = r.i64();
            z.ra = r.f64();
            z.dec = r.f64();
            z.x = r.f64();
            z.y = r.f64();
            z.z = r.f64();
            rows.push_back(z);
        }
        try {
            s.zoneTable = zones::ZoneTable::fromRows(cfg, std::move(rows));
        } catch (const GeometryError& e) {
            throw SnapshotError(std::string("zone table: ") + e.what());
        }
    }

    if (r.u8() != 0) {
        const double radius = r.f64();
        zones::NeighborStats st;
        st.candidatePairs = r.u64();
        st.preMirrorPairs = r.u64();
        const std::uint64_t n = r.count(24);
        std::vector<zones::NeighborRow> rows;
        rows.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            zones::NeighborRow nr;
            nr.objID = r.i64();
            nr.neighborObjID = r.i64();
            nr.distanceDeg = r.f64();
            rows.push_back(nr);
        }
        s.neighbors = zones::NeighborsTable(radius, std::move(rows), st);
    }

    const std::int64_t nextId = r.i64();
    const std::uint64_t nregions = r.count(32);
    std::vector<algebra::StoredRegion> regions;
    try {
        for (std::uint64_t i = 0; i < nregions; ++i) {
            algebra::StoredRegion reg;
            reg.id = r.i64();
            reg.type = r.str();
            reg.comment = r.str();
            reg.nextConvexId = r.i64();
            const std::uint64_t nc = r.count(24);
            for (std::uint64_t j = 0; j < nc; ++j) {
                algebra::StoredConvex c;
                c.id = r.i64();
                c.nextHalfSpaceId = r.i64();
                const std::uint64_t nh = r.count(40);
                for (std::uint64_t k = 0; k < nh; ++k) {
                    const std::int64_t hid = r.i64();
                    const double x = r.f64();
                    const double y = r.f64();
                    const double z = r.f64();
                    const double l = r.f64();
                    c.halfSpaces.push_back({hid, HalfSpace(UnitVec3::fromUnit({x, y, z}), l)});
                }
                reg.convexes.push_back(std::move(c));
            }
            regions.push_back(std::move(reg));
        }
        s.regions = algebra::RegionStore::restore(std::move(regions), nextId);
    } catch (const GeometryError& e) {
        throw SnapshotError(std::string("region store: ") + e.what());
    } catch (const QueryError& e) {
        throw SnapshotError(std::string("region store: ") + e.what());
    }

    if (r.u8() != 0) {
        pyramid::PyramidConfig cfg;
        cfg.baseZoneHeight = r.f64();
        cfg.epsilon = r.f64();
        const std::uint64_t n = r.count(40);
        try {
            pyramid::PyramidIndex index(cfg);
            for (std::uint64_t i = 0; i < n; ++i) {
                const std::int64_t id = r.i64();
                const std::int64_t base = r.i64();
                const double ra = r.f64();
                const double dec = r.f64();
                const double radius = r.f64();
                index.insert(id, SkyPoint(ra, dec), ArcAngle::degrees(radius), base);
            }
            s.pyramid = std::move(index);
        } catch (const GeometryError& e) {
            throw SnapshotError(std::string("pyramid: ") + e.what());
        }
    }
    if (!r.done()) {
        throw SnapshotError("snapshot payload has trailing bytes");
    }
    return s;
}

void saveSnapshot(const State& state, const std::string& path) {
    const std::string bytes = encodeSnapshot(state);
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw SnapshotError("cannot write " + tmp);
        }
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) {
            throw SnapshotError("write failed for " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        throw SnapshotError("cannot replace " + path + ": " + ec.message());
    }
}

State loadSnapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw SnapshotError("cannot open snapshot " + path);
    }
    const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decodeSnapshot(bytes);
}

}  // namespace skysearch::catalog
