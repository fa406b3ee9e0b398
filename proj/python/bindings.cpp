#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "skysearch/algebra.hpp"
#include "skysearch/catalog.hpp"
#include "skysearch/error.hpp"
#include "skysearch/geom.hpp"
#include "skysearch/htm.hpp"
#include "skysearch/pyramid.hpp"
#include "skysearch/region_lang.hpp"
#include "skysearch/zone_index.hpp"

namespace py = pybind11;
using namespace skysearch;

namespace {

using Obj = std::tuple<std::int64_t, double, double>;

std::vector<zones::ObjectPosition> positions(const std::vector<Obj>& objs) {
    std::vector<zones::ObjectPosition> out;
    out.reserve(objs.size());
    for (const auto& [id, ra, dec] : objs) {
        out.push_back({id, SkyPoint(ra, dec)});
    }
    return out;
}

std::vector<std::pair<std::int64_t, double>> hits(const std::vector<zones::NearbyResult>& rs) {
    std::vector<std::pair<std::int64_t, double>> out;
    for (const auto& r : rs) {
        out.emplace_back(r.objID, r.distanceDeg);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_skysearch, m) {
    m.doc() = "Spherical indexing and region algebra";

    auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
    py::register_exception<GeometryError>(m, "GeometryError", error);
    py::register_exception<ParseError>(m, "ParseError", error);
    py::register_exception<IngestError>(m, "IngestError", error);
    py::register_exception<QueryError>(m, "QueryError", error);
    py::register_exception<SnapshotError>(m, "SnapshotError", error);

    m.def("sky_to_vec", [](double ra, double dec) {
        const UnitVec3 v = skyToVec(SkyPoint(ra, dec));
        return std::make_tuple(v.x(), v.y(), v.z());
    });
    m.def("vec_to_sky", [](double x, double y, double z) {
        const SkyPoint p = vecToSky(Vec3{x, y, z});
        return std::make_pair(p.ra(), p.dec());
    });
    m.def("arc_distance_deg", [](double ra1, double dec1, double ra2, double dec2) {
        return arcDistanceDeg(skyToVec(SkyPoint(ra1, dec1)), skyToVec(SkyPoint(ra2, dec2)));
    });

    py::class_<Region>(m, "Region")
        .def_static("parse", [](const std::string& spec) { return lang::regionFromString(spec); })
        .def_static("empty", &Region::empty)
        .def_static("whole_sphere", &Region::wholeSphere)
        .def("contains", [](const Region& r, double ra, double dec) { return insideRegion(r, skyToVec(SkyPoint(ra, dec))); })
        .def("simplify", [](const Region& r) { return algebra::simplifyRegion(r); })
        .def("__or__", [](const Region& a, const Region& b) { return algebra::orRegions(a, b); })
        .def("__and__", [](const Region& a, const Region& b) { return algebra::andRegions(a, b); })
        .def("__invert__", [](const Region& a) { return algebra::notRegion(a); })
        .def("__eq__", [](const Region& a, const Region& b) { return a == b; })
        .def("__str__", [](const Region& r) { return lang::serializeRegion(r); })
        .def("__repr__", [](const Region& r) { return "Region('" + lang::serializeRegion(r) + "')"; })
        .def_property_readonly("convex_count", [](const Region& r) { return r.convexes.size(); })
        .def_property_readonly("constraints", [](const Region& r) {
            std::vector<std::vector<std::tuple<double, double, double, double>>> out;
            for (const Convex& c : r.convexes) {
                auto& row = out.emplace_back();
                for (const HalfSpace& h : c.constraints) {
                    row.emplace_back(h.normal().x(), h.normal().y(), h.normal().z(), h.l());
                }
            }
            return out;
        });

    m.def("htm_id", [](double ra, double dec, int depth) {
        return htm::pointToHtmId(skyToVec(SkyPoint(ra, dec)), depth).value();
    }, py::arg("ra"), py::arg("dec"), py::arg("depth") = 20);
    m.def("htm_cover", [](const Region& r, int maxRanges, int maxDepth) {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
        for (const auto& range : htm::htmCover(r, {maxRanges, maxDepth})) {
            out.emplace_back(range.begin.value(), range.end.value());
        }
        return out;
    }, py::arg("region"), py::arg("max_ranges") = 20, py::arg("max_depth") = 20);

    py::class_<zones::ZoneTable>(m, "ZoneTable")
        .def(py::init([](const std::vector<Obj>& objs, double zoneHeight, double maxRadius) {
                 zones::ZoneConfig cfg;
                 cfg.zoneHeight = zoneHeight;
                 cfg.maxRadius = maxRadius;
                 return zones::ZoneTable::build(positions(objs), cfg);
             }),
             py::arg("objects"), py::arg("zone_height") = 4.0 / 60.0, py::arg("max_radius") = 1.0)
        .def("nearby", [](const zones::ZoneTable& t, double ra, double dec, double r) {
            return hits(t.nearby(SkyPoint(ra, dec), ArcAngle::degrees(r)));
        })
        .def("__len__", [](const zones::ZoneTable& t) { return t.mainRowCount(); });

    m.def("neighbors", [](const std::vector<Obj>& objs, double r, double zoneHeight) {
        std::vector<std::tuple<std::int64_t, std::int64_t, double>> out;
        const auto table = zones::buildNeighbors(positions(objs), ArcAngle::degrees(r), zoneHeight);
        for (const auto& row : table.rows()) {
            out.emplace_back(row.objID, row.neighborObjID, row.distanceDeg);
        }
        return out;
    }, py::arg("objects"), py::arg("r"), py::arg("zone_height") = 0.0);

    py::class_<pyramid::PyramidIndex>(m, "PyramidIndex")
        .def(py::init([](double baseZoneHeight) {
                 pyramid::PyramidConfig cfg;
                 cfg.baseZoneHeight = baseZoneHeight;
                 return pyramid::PyramidIndex(cfg);
             }),
             py::arg("base_zone_height") = 0.5 / 60.0)
        .def("insert", [](pyramid::PyramidIndex& p, std::int64_t id, double ra, double dec, double r) {
            p.insert(id, SkyPoint(ra, dec), ArcAngle::degrees(r));
        })
        .def("overlap", [](const pyramid::PyramidIndex& p, double ra, double dec, double r) {
            return p.overlap(SkyPoint(ra, dec), ArcAngle::degrees(r));
        })
        .def("__len__", &pyramid::PyramidIndex::size);

    m.def("ingest_csv_text", [](const std::string& text) {
        std::vector<std::tuple<std::int64_t, double, double, std::uint64_t>> out;
        const auto cat = catalog::ingestCsvText(text);
        for (const auto& row : cat.rows) {
            out.emplace_back(row.objID, row.ra, row.dec, row.htmID);
        }
        return out;
    });
}
