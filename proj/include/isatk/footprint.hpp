#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "isatk/common.hpp"
#include "isatk/csv.hpp"
#include "isatk/dbscan.hpp"
#include "isatk/geom.hpp"

namespace isatk::footprint {

enum class Kind { Good, Best };

inline std::string kind_name(Kind k) { return k == Kind::Good ? "good" : "best"; }

struct SpaceBaseline {
    std::vector<geom::Pt> hull;  // ccw from lexicographically smallest
    geom::MultiPolygon hull_poly;
    double alpha_s = 0.0;  // hull area
    double d_s = 0.0;      // instances / area
    int instance_count = 0;
};

struct Footprint {
    std::string technique;
    Kind kind = Kind::Good;
    geom::MultiPolygon polygons;
    double area = 0.0;
    int enclosed = 0;
    int enclosed_labeled = 0;
    double density = 0.0;  // enclosed / area
    double purity = 0.0;   // enclosed_labeled / enclosed
    double alpha_n = 0.0;  // 100 * area / alpha_s
    double d_n = 0.0;      // 100 * density / d_s
    double p_n = 0.0;      // 100 * purity
    double label_rate = 0.0;  // labeled instances / all instances (recommend fallback)
    bool empty = false;
    std::string note;
};

inline SpaceBaseline compute_baseline(const Eigen::MatrixXd& Z) {
    if (Z.rows() != 2) throw Error("compute_baseline: Z must be 2 x i");
    SpaceBaseline b;
    b.instance_count = static_cast<int>(Z.cols());
    std::vector<geom::Pt> pts;
    for (Eigen::Index c = 0; c < Z.cols(); ++c) pts.push_back({Z(0, c), Z(1, c)});
    b.hull = geom::convex_hull(pts);
    if (b.hull.size() < 3)
        throw Error("compute_baseline: instance coordinates are collinear, hull has no area");
    b.hull_poly = geom::multipolygon_from_points(b.hull);
    b.alpha_s = geom::area(b.hull_poly);
    if (!(b.alpha_s > 0.0)) throw Error("compute_baseline: degenerate hull area");
    b.d_s = static_cast<double>(b.instance_count) / b.alpha_s;
    return b;
}

// Area, density and purity of a polygon set against the whole-space baseline.
// Instances on polygon boundaries count as enclosed.
inline Footprint measure(const std::string& technique, Kind kind, geom::MultiPolygon polygons,
                         const Eigen::MatrixXd& Z, const std::vector<int>& labeled,
                         const SpaceBaseline& baseline) {
    Footprint f;
    f.technique = technique;
    f.kind = kind;
    f.polygons = std::move(polygons);
    f.area = geom::area(f.polygons);
    int labeled_total = 0;
    for (Eigen::Index c = 0; c < Z.cols(); ++c)
        labeled_total += labeled[static_cast<std::size_t>(c)] ? 1 : 0;
    f.label_rate = Z.cols() ? static_cast<double>(labeled_total) / Z.cols() : 0.0;
    if (!(f.area > 0.0)) {
        f.empty = true;
        f.note = f.note.empty() ? "zero-area footprint" : f.note;
        return f;
    }
    for (Eigen::Index c = 0; c < Z.cols(); ++c) {
        if (geom::covered(Z(0, c), Z(1, c), f.polygons)) {
            ++f.enclosed;
            if (labeled[static_cast<std::size_t>(c)]) ++f.enclosed_labeled;
        }
    }
    f.density = f.enclosed / f.area;
    f.purity = f.enclosed ? static_cast<double>(f.enclosed_labeled) / f.enclosed : 0.0;
    f.alpha_n = 100.0 * f.area / baseline.alpha_s;
    f.d_n = 100.0 * f.density / baseline.d_s;
    f.p_n = 100.0 * f.purity;
    return f;
}

struct BuildOptions {
    std::optional<double> alpha_radius;
    dbscan::EpsilonScale epsilon_scale = dbscan::EpsilonScale::Area;
};

// DBSCAN the labeled instances, alpha-shape each cluster, clip to the
// baseline hull and measure. `labeled` holds one 0/1 flag per instance.
inline Footprint build(const std::string& technique, Kind kind, const Eigen::MatrixXd& Z,
                       const std::vector<int>& labeled, const SpaceBaseline& baseline,
                       const BuildOptions& opt = {},
                       std::vector<std::string>* warnings = nullptr) {
    std::vector<geom::Pt> pts;
    for (Eigen::Index c = 0; c < Z.cols(); ++c)
        if (labeled[static_cast<std::size_t>(c)]) pts.push_back({Z(0, c), Z(1, c)});

    geom::MultiPolygon shape;
    std::string note;
    if (pts.size() >= 3) {
        // r counts unique labeled instances; ranges span the full space
        std::set<std::pair<double, double>> uniq;
        for (const auto& p : pts) uniq.insert({p.x, p.y});
        double r1 = Z.row(0).maxCoeff() - Z.row(0).minCoeff();
        double r2 = Z.row(1).maxCoeff() - Z.row(1).minCoeff();
        auto params = dbscan::auto_params(uniq.size(), r1, r2, opt.epsilon_scale);
        auto labels = dbscan::cluster(pts, params.k, params.epsilon);
        int n_clusters = 0;
        for (int l : labels) n_clusters = std::max(n_clusters, l);
        for (int c = 1; c <= n_clusters; ++c) {
            std::vector<geom::Pt> cluster_pts;
            for (std::size_t p = 0; p < pts.size(); ++p)
                if (labels[p] == c) cluster_pts.push_back(pts[p]);
            auto as = geom::alpha_shape(cluster_pts, opt.alpha_radius);
            if (as.degenerate) {
                if (warnings)
                    warnings->push_back("footprint " + technique + "/" + kind_name(kind) +
                                        " cluster " + std::to_string(c) + ": " + as.note +
                                        ", no polygon");
                continue;
            }
            shape = geom::unite(shape, as.shape);
        }
        if (n_clusters == 0) note = "no dense cluster";
    } else {
        note = "fewer than 3 labeled instances";
        if (warnings)
            warnings->push_back("footprint " + technique + "/" + kind_name(kind) + ": " + note);
    }
    // footprints may not spill outside the instance-space hull
    shape = geom::intersect(shape, baseline.hull_poly);
    Footprint f = measure(technique, kind, std::move(shape), Z, labeled, baseline);
    if (!note.empty()) f.note = note;
    return f;
}

inline double purity_in_region(const geom::MultiPolygon& region, const Eigen::MatrixXd& Z,
                               const std::vector<int>& labeled) {
    int inside = 0, inside_labeled = 0;
    for (Eigen::Index c = 0; c < Z.cols(); ++c)
        if (geom::covered(Z(0, c), Z(1, c), region)) {
            ++inside;
            inside_labeled += labeled[static_cast<std::size_t>(c)] ? 1 : 0;
        }
    return inside ? static_cast<double>(inside_labeled) / inside : 0.0;
}

inline constexpr double kPurityTie = 1e-9;

// Overlap resolution between best footprints: in each overlapping pair the
// footprint with lower purity inside the overlap loses it; ties keep the
// region in both. Pairs are processed in technique order and the pass is
// repeated until stable, so a later trim cannot leave a stale tie behind.
inline void resolve_conflicts(std::vector<Footprint>& fps, const Eigen::MatrixXd& Z,
                              const std::vector<std::vector<int>>& labels_per_fp,
                              const SpaceBaseline& baseline) {
    if (fps.size() != labels_per_fp.size())
        throw Error("resolve_conflicts: label set per footprint required");
    const double area_floor = 1e-12 * std::max(baseline.alpha_s, 1e-300);
    bool changed = true;
    for (int pass = 0; pass < 16 && changed; ++pass) {
        changed = false;
        for (std::size_t a = 0; a < fps.size(); ++a) {
            for (std::size_t b = a + 1; b < fps.size(); ++b) {
                geom::MultiPolygon overlap;
                try {
                    overlap = geom::intersect(fps[a].polygons, fps[b].polygons);
                } catch (const std::exception& e) {
                    throw Error("resolve_conflicts: boolean operation failed between '" +
                                fps[a].technique + "' and '" + fps[b].technique + "': " +
                                e.what());
                }
                if (geom::area(overlap) <= area_floor) continue;
                double pa = purity_in_region(overlap, Z, labels_per_fp[a]);
                double pb = purity_in_region(overlap, Z, labels_per_fp[b]);
                if (std::abs(pa - pb) <= kPurityTie) continue;  // both keep the overlap
                std::size_t loser = pa < pb ? a : b;
                try {
                    fps[loser].polygons = geom::subtract(fps[loser].polygons, overlap);
                } catch (const std::exception& e) {
                    throw Error("resolve_conflicts: boolean operation failed between '" +
                                fps[a].technique + "' and '" + fps[b].technique + "': " +
                                e.what());
                }
                changed = true;
            }
        }
    }
    // metrics change once polygons are trimmed
    for (std::size_t a = 0; a < fps.size(); ++a)
        fps[a] = measure(fps[a].technique, fps[a].kind, std::move(fps[a].polygons), Z,
                         labels_per_fp[a], baseline);
}

// footprint_summary.csv: one row per technique with the good and best
// metrics side by side, plus a plain-mean Average row.
inline csv::Table summary_table(const std::vector<std::string>& techniques,
                                const std::map<std::string, Footprint>& good,
                                const std::map<std::string, Footprint>& best) {
    csv::Table t;
    t.header = {"technique", "alpha_N_G", "d_N_G", "p_N_G", "alpha_N_B", "d_N_B", "p_N_B"};
    std::vector<double> sums(6, 0.0);
    for (const auto& tech : techniques) {
        const Footprint& g = good.at(tech);
        const Footprint& b = best.at(tech);
        std::vector<double> vals{g.alpha_n, g.d_n, g.p_n, b.alpha_n, b.d_n, b.p_n};
        std::vector<std::string> row{tech};
        for (std::size_t i = 0; i < vals.size(); ++i) {
            sums[i] += vals[i];
            row.push_back(fmt_full(vals[i]));
        }
        t.rows.push_back(std::move(row));
    }
    std::vector<std::string> avg{"Average"};
    for (double s : sums) avg.push_back(fmt_full(s / static_cast<double>(techniques.size())));
    t.rows.push_back(std::move(avg));
    return t;
}

}  // namespace isatk::footprint
