#pragma once

#include <fstream>
#include <nlohmann/json.hpp>
#include <string>

#include "isatk/common.hpp"
#include "isatk/geom.hpp"

namespace isatk::geojson {

inline nlohmann::json ring_coords(const geom::BRing& ring) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : ring) arr.push_back({p.x(), p.y()});
    return arr;
}

inline nlohmann::json geometry_json(const geom::MultiPolygon& mp) {
    nlohmann::json coords = nlohmann::json::array();
    for (const auto& poly : mp) {
        nlohmann::json rings = nlohmann::json::array();
        rings.push_back(ring_coords(poly.outer()));
        for (const auto& inner : poly.inners()) rings.push_back(ring_coords(inner));
        coords.push_back(rings);
    }
    return {{"type", "MultiPolygon"}, {"coordinates", coords}};
}

inline nlohmann::json feature_json(const geom::MultiPolygon& mp,
                                   const nlohmann::json& properties) {
    return {{"type", "Feature"}, {"geometry", geometry_json(mp)}, {"properties", properties}};
}

inline void write_feature(const std::string& path, const geom::MultiPolygon& mp,
                          const nlohmann::json& properties) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write GeoJSON file: " + path);
    out << feature_json(mp, properties).dump(2) << "\n";
}

struct Feature {
    geom::MultiPolygon geometry;
    nlohmann::json properties;
};

inline geom::MultiPolygon geometry_from_json(const nlohmann::json& g) {
    geom::MultiPolygon mp;
    const std::string type = g.at("type").get<std::string>();
    auto parse_poly = [](const nlohmann::json& rings) {
        geom::BPolygon poly;
        bool outer = true;
        for (const auto& ring : rings) {
            geom::BRing* target;
            if (outer) {
                target = &poly.outer();
                outer = false;
            } else {
                poly.inners().emplace_back();
                target = &poly.inners().back();
            }
            for (const auto& pt : ring)
                boost::geometry::append(*target,
                                        geom::BPoint(pt[0].get<double>(), pt[1].get<double>()));
        }
        boost::geometry::correct(poly);
        return poly;
    };
    if (type == "MultiPolygon") {
        for (const auto& rings : g.at("coordinates")) mp.push_back(parse_poly(rings));
    } else if (type == "Polygon") {
        mp.push_back(parse_poly(g.at("coordinates")));
    } else {
        throw Error("GeoJSON geometry type '" + type + "' is not supported");
    }
    return mp;
}

inline Feature read_feature(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open GeoJSON file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw Error(path + ": invalid JSON: " + e.what());
    }
    Feature f;
    f.geometry = geometry_from_json(j.at("geometry"));
    f.properties = j.value("properties", nlohmann::json::object());
    return f;
}

}  // namespace isatk::geojson
