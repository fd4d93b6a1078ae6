#pragma once

#include <algorithm>
#include <boost/geometry.hpp>
#include <boost/geometry/geometries/multi_polygon.hpp>
#include <boost/geometry/geometries/point_xy.hpp>
#include <boost/geometry/geometries/polygon.hpp>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "isatk/common.hpp"

namespace isatk::geom {

namespace bg = boost::geometry;

using BPoint = bg::model::d2::point_xy<double>;
using BRing = bg::model::ring<BPoint, false, true>;        // ccw, closed
using BPolygon = bg::model::polygon<BPoint, false, true>;  // ccw outer, cw holes
using MultiPolygon = bg::model::multi_polygon<BPolygon>;

struct Pt {
    double x = 0.0, y = 0.0;
    bool operator<(const Pt& o) const { return x != o.x ? x < o.x : y < o.y; }
    bool operator==(const Pt& o) const { return x == o.x && y == o.y; }
};

inline double cross(const Pt& o, const Pt& a, const Pt& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Monotone chain. Returns the hull CCW starting from the lexicographically
// smallest point; collinear inputs give a 2-point (or smaller) chain.
inline std::vector<Pt> convex_hull(std::vector<Pt> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n <= 2) return pts;
    std::vector<Pt> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    for (std::size_t i = n - 1, t = k + 1; i-- > 0;) {
        while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

inline double polygon_area(const std::vector<Pt>& ring) {
    double a = 0.0;
    const std::size_t n = ring.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Pt& p = ring[i];
        const Pt& q = ring[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

inline BPolygon polygon_from_points(const std::vector<Pt>& ring) {
    BPolygon poly;
    for (const Pt& p : ring) bg::append(poly.outer(), BPoint(p.x, p.y));
    bg::correct(poly);
    return poly;
}

inline MultiPolygon multipolygon_from_points(const std::vector<Pt>& ring) {
    MultiPolygon mp;
    if (ring.size() >= 3) mp.push_back(polygon_from_points(ring));
    return mp;
}

inline double area(const MultiPolygon& mp) { return bg::area(mp); }

// Boundary-inclusive containment.
inline bool covered(double x, double y, const MultiPolygon& mp) {
    return bg::covered_by(BPoint(x, y), mp);
}

inline bool covered(double x, double y, const BPolygon& poly) {
    return bg::covered_by(BPoint(x, y), poly);
}

inline MultiPolygon intersect(const MultiPolygon& a, const MultiPolygon& b) {
    MultiPolygon out;
    bg::intersection(a, b, out);
    return out;
}

inline MultiPolygon subtract(const MultiPolygon& a, const MultiPolygon& b) {
    MultiPolygon out;
    bg::difference(a, b, out);
    return out;
}

inline MultiPolygon unite(const MultiPolygon& a, const MultiPolygon& b) {
    MultiPolygon out;
    bg::union_(a, b, out);
    return out;
}

// ---- Delaunay triangulation (Bowyer-Watson) ----

struct Triangle {
    int a = 0, b = 0, c = 0;   // ccw vertex indices
    double circumradius = 0.0;
};

namespace detail {

struct Circum {
    double cx = 0.0, cy = 0.0, r2 = 0.0;
    bool degenerate = false;
};

inline Circum circumcircle(const Pt& a, const Pt& b, const Pt& c) {
    Circum cc;
    double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    double scale = std::max({std::abs(a.x), std::abs(a.y), std::abs(b.x), std::abs(b.y),
                             std::abs(c.x), std::abs(c.y), 1.0});
    if (std::abs(d) <= 1e-12 * scale * scale) {
        cc.degenerate = true;
        cc.r2 = std::numeric_limits<double>::infinity();
        return cc;
    }
    double a2 = a.x * a.x + a.y * a.y;
    double b2 = b.x * b.x + b.y * b.y;
    double c2 = c.x * c.x + c.y * c.y;
    cc.cx = (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d;
    cc.cy = (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d;
    double dx = a.x - cc.cx, dy = a.y - cc.cy;
    cc.r2 = dx * dx + dy * dy;
    return cc;
}

}  // namespace detail

// Triangulates the distinct points among `pts`; returns triangles over the
// deduplicated point list written to `unique_out`. Collinear input yields an
// empty triangle list.
inline std::vector<Triangle> delaunay(const std::vector<Pt>& pts, std::vector<Pt>& unique_out) {
    std::vector<Pt> u(pts);
    std::sort(u.begin(), u.end());
    u.erase(std::unique(u.begin(), u.end()), u.end());
    unique_out = u;
    const int n = static_cast<int>(u.size());
    if (n < 3) return {};

    double lox = u.front().x, hix = u.back().x;
    double loy = u[0].y, hiy = u[0].y;
    for (const Pt& p : u) {
        loy = std::min(loy, p.y);
        hiy = std::max(hiy, p.y);
    }
    double span = std::max({hix - lox, hiy - loy, 1e-9});
    double cx = (lox + hix) / 2.0, cy = (loy + hiy) / 2.0;
    std::vector<Pt> v(u);
    v.push_back({cx - 40.0 * span, cy - 20.0 * span});
    v.push_back({cx + 40.0 * span, cy - 20.0 * span});
    v.push_back({cx, cy + 40.0 * span});

    struct Tri {
        int a, b, c;
        detail::Circum cc;
    };
    std::vector<Tri> tris;
    auto make_tri = [&](int a, int b, int c) {
        if (cross(v[a], v[b], v[c]) < 0.0) std::swap(b, c);  // keep ccw
        return Tri{a, b, c, detail::circumcircle(v[a], v[b], v[c])};
    };
    tris.push_back(make_tri(n, n + 1, n + 2));

    for (int p = 0; p < n; ++p) {
        const Pt& pt = v[p];
        std::vector<int> bad;
        for (std::size_t t = 0; t < tris.size(); ++t) {
            const auto& cc = tris[t].cc;
            if (cc.degenerate) {
                bad.push_back(static_cast<int>(t));
                continue;
            }
            double dx = pt.x - cc.cx, dy = pt.y - cc.cy;
            if (dx * dx + dy * dy < cc.r2 * (1.0 - 1e-12)) bad.push_back(static_cast<int>(t));
        }
        if (bad.empty()) continue;  // cocircular/duplicate guard; u is deduped so rare
        std::map<std::pair<int, int>, int> edge_count;
        for (int t : bad) {
            const Tri& tr = tris[static_cast<std::size_t>(t)];
            for (auto [x, y] : {std::pair{tr.a, tr.b}, {tr.b, tr.c}, {tr.c, tr.a}})
                edge_count[{std::min(x, y), std::max(x, y)}]++;
        }
        std::vector<std::pair<int, int>> boundary;
        for (int t : bad) {
            const Tri& tr = tris[static_cast<std::size_t>(t)];
            for (auto [x, y] : {std::pair{tr.a, tr.b}, {tr.b, tr.c}, {tr.c, tr.a}})
                if (edge_count[{std::min(x, y), std::max(x, y)}] == 1)
                    boundary.push_back({x, y});
        }
        std::sort(bad.rbegin(), bad.rend());
        for (int t : bad) tris.erase(tris.begin() + t);
        for (auto [x, y] : boundary) tris.push_back(make_tri(x, y, p));
    }

    std::vector<Triangle> out;
    for (const auto& t : tris) {
        if (t.a >= n || t.b >= n || t.c >= n) continue;
        if (t.cc.degenerate) continue;
        out.push_back({t.a, t.b, t.c, std::sqrt(t.cc.r2)});
    }
    return out;
}

// ---- alpha shape ----

struct AlphaShape {
    MultiPolygon shape;
    double radius = 0.0;   // circumradius cutoff actually used
    bool degenerate = false;
    std::string note;
};

namespace detail {

// Union of ccw triangles via boundary-edge walk; exact because shared edges
// share vertex indices. Falls back to pairwise boolean union if the stitched
// result fails validation (pinch topologies).
inline MultiPolygon union_triangles(const std::vector<Pt>& v, const std::vector<Triangle>& kept) {
    MultiPolygon mp;
    if (kept.empty()) return mp;

    std::map<std::pair<int, int>, int> third;  // directed edge -> opposite vertex
    for (const auto& t : kept) {
        third[{t.a, t.b}] = t.c;
        third[{t.b, t.c}] = t.a;
        third[{t.c, t.a}] = t.b;
    }
    auto is_boundary = [&](int a, int b) { return third.count({b, a}) == 0; };

    std::set<std::pair<int, int>> used;
    std::vector<std::vector<int>> loops;
    for (const auto& [edge, w0] : third) {
        if (!is_boundary(edge.first, edge.second) || used.count(edge)) continue;
        std::vector<int> loop;
        std::pair<int, int> cur = edge;
        while (!used.count(cur)) {
            used.insert(cur);
            loop.push_back(cur.first);
            // rotate around cur.second to the next boundary edge
            int w = third.at(cur);
            while (third.count({w, cur.second})) w = third.at({w, cur.second});
            cur = {cur.second, w};
        }
        loops.push_back(std::move(loop));
    }

    struct RingInfo {
        std::vector<Pt> ring;
        double signed_area;
    };
    std::vector<RingInfo> outers, holes;
    for (const auto& loop : loops) {
        RingInfo ri;
        for (int i : loop) ri.ring.push_back(v[static_cast<std::size_t>(i)]);
        ri.signed_area = polygon_area(ri.ring);
        (ri.signed_area > 0.0 ? outers : holes).push_back(std::move(ri));
    }
    for (const auto& o : outers) {
        BPolygon poly = polygon_from_points(o.ring);
        mp.push_back(std::move(poly));
    }
    // attach each hole to the smallest enclosing outer
    std::sort(mp.begin(), mp.end(), [](const BPolygon& a, const BPolygon& b) {
        return bg::area(a) < bg::area(b);
    });
    for (const auto& h : holes) {
        for (auto& poly : mp) {
            bool inside = true;
            for (const Pt& p : h.ring)
                if (!bg::covered_by(BPoint(p.x, p.y), poly)) {
                    inside = false;
                    break;
                }
            if (inside) {
                poly.inners().emplace_back();
                for (const Pt& p : h.ring) bg::append(poly.inners().back(), BPoint(p.x, p.y));
                bg::correct(poly);
                break;
            }
        }
    }

    bg::validity_failure_type failure{};
    if (!bg::is_valid(mp, failure)) {
        // pairwise-union fallback
        MultiPolygon acc;
        for (const auto& t : kept) {
            BPolygon tri;
            for (int i : {t.a, t.b, t.c})
                bg::append(tri.outer(), BPoint(v[static_cast<std::size_t>(i)].x,
                                               v[static_cast<std::size_t>(i)].y));
            bg::correct(tri);
            MultiPolygon next;
            bg::union_(acc, tri, next);
            acc = std::move(next);
        }
        return acc;
    }
    return mp;
}

}  // namespace detail

// Delaunay triangles with circumradius <= cutoff, unioned into polygons. The
// default cutoff is the smallest circumradius that yields a single connected
// region covering every distinct input point.
inline AlphaShape alpha_shape(const std::vector<Pt>& pts,
                              std::optional<double> alpha_radius = std::nullopt) {
    AlphaShape out;
    std::vector<Pt> u;
    auto tris = delaunay(pts, u);
    if (u.size() < 3) {
        out.degenerate = true;
        out.note = "fewer than 3 distinct points";
        return out;
    }
    if (tris.empty()) {
        out.degenerate = true;
        out.note = "collinear points";
        return out;
    }

    auto kept_at = [&](double R) {
        std::vector<Triangle> kept;
        for (const auto& t : tris)
            if (t.circumradius <= R * (1.0 + 1e-12)) kept.push_back(t);
        return kept;
    };
    auto acceptable = [&](const std::vector<Triangle>& kept) {
        if (kept.empty()) return false;
        // every point covered
        std::vector<char> seen(u.size(), 0);
        for (const auto& t : kept) seen[t.a] = seen[t.b] = seen[t.c] = 1;
        if (std::count(seen.begin(), seen.end(), 1) != static_cast<long>(u.size()))
            return false;
        // single edge-connected component over shared edges
        std::map<std::pair<int, int>, std::vector<int>> edge_tris;
        for (std::size_t ti = 0; ti < kept.size(); ++ti) {
            const auto& t = kept[ti];
            for (auto [x, y] : {std::pair{t.a, t.b}, {t.b, t.c}, {t.c, t.a}})
                edge_tris[{std::min(x, y), std::max(x, y)}].push_back(static_cast<int>(ti));
        }
        std::vector<int> comp(kept.size(), -1);
        std::vector<int> stack{0};
        comp[0] = 0;
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            const auto& tr = kept[static_cast<std::size_t>(t)];
            for (auto [x, y] : {std::pair{tr.a, tr.b}, {tr.b, tr.c}, {tr.c, tr.a}})
                for (int o : edge_tris[{std::min(x, y), std::max(x, y)}])
                    if (comp[static_cast<std::size_t>(o)] < 0) {
                        comp[static_cast<std::size_t>(o)] = 0;
                        stack.push_back(o);
                    }
        }
        return std::count(comp.begin(), comp.end(), -1) == 0;
    };

    double R;
    if (alpha_radius) {
        R = *alpha_radius;
    } else {
        std::vector<double> radii;
        for (const auto& t : tris) radii.push_back(t.circumradius);
        std::sort(radii.begin(), radii.end());
        radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
        if (!acceptable(kept_at(radii.back()))) {
            R = radii.back();  // disconnected even with everything: take all
        } else {
            std::size_t lo = 0, hi = radii.size() - 1;
            while (lo < hi) {
                std::size_t mid = (lo + hi) / 2;
                if (acceptable(kept_at(radii[mid])))
                    hi = mid;
                else
                    lo = mid + 1;
            }
            R = radii[lo];
        }
    }
    out.radius = R;
    auto kept = kept_at(R);
    if (kept.empty()) {
        out.degenerate = true;
        out.note = "alpha radius keeps no triangle";
        return out;
    }
    out.shape = detail::union_triangles(u, kept);
    return out;
}

}  // namespace isatk::geom
