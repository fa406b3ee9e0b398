#pragma once

// Point catalog with derived columns, an htmID-ordered point index, and the
// binary snapshot that persists every index built over it.
//
// Snapshot layout (all integers and floats little-endian):
//
//   "SKYSNAP\0"  u32 version  u64 payload-bytes  u32 crc32(payload)  payload
//
// The payload holds, in order: catalog rows, an optional zone table, an
// optional neighbors table, the region store and an optional pyramid.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skysearch/algebra.hpp"
#include "skysearch/geom.hpp"
#include "skysearch/htm.hpp"
#include "skysearch/pyramid.hpp"
#include "skysearch/zone_index.hpp"

namespace skysearch::catalog {

inline constexpr int kDefaultHtmDepth = 20;
inline constexpr std::uint32_t kSnapshotVersion = 1;

struct CatalogRow {
    std::int64_t objID = 0;
    double ra = 0.0;
    double dec = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    std::uint64_t htmID = 0;

    bool operator==(const CatalogRow&) const = default;
};

/// Derives (x, y, z) and htmID for one object.
CatalogRow makeRow(std::int64_t objID, const SkyPoint& p, int htmDepth = kDefaultHtmDepth);

struct Catalog {
    int htmDepth = kDefaultHtmDepth;
    std::vector<CatalogRow> rows;

    std::vector<zones::ObjectPosition> positions() const;
};

/// Parses "objID,ra,dec" CSV text. Throws IngestError with line and column.
Catalog ingestCsvText(std::string_view text, int htmDepth = kDefaultHtmDepth);
Catalog ingestCsv(const std::string& path, int htmDepth = kDefaultHtmDepth);

/// Catalog sorted by htmID for range scans over covers.
class HtmPointIndex {
public:
    HtmPointIndex() = default;
    explicit HtmPointIndex(const Catalog& catalog);

    /// Objects strictly within r of center: cover ranges, then the chord test. Sorted by objID.
    std::vector<zones::NearbyResult> coneSearch(const SkyPoint& center, ArcAngle r,
                                                const htm::CoverBudget& budget = {},
                                                std::size_t* candidates = nullptr) const;

private:
    int depth_ = kDefaultHtmDepth;
    std::vector<CatalogRow> rows_;
};

/// Everything a session persists.
struct State {
    Catalog catalog;
    std::optional<zones::ZoneTable> zoneTable;
    std::optional<zones::NeighborsTable> neighbors;
    algebra::RegionStore regions;
    std::optional<pyramid::PyramidIndex> pyramid;
};

std::string encodeSnapshot(const State& state);
/// Throws SnapshotError on bad magic, unsupported version, truncation or checksum mismatch.
State decodeSnapshot(std::string_view bytes);

void saveSnapshot(const State& state, const std::string& path);
State loadSnapshot(const std::string& path);

}  // namespace skysearch::catalog
