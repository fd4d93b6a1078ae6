#pragma once

#include <Eigen/Dense>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "isatk/common.hpp"
#include "isatk/csv.hpp"
#include "isatk/metadata.hpp"
#include "isatk/stats.hpp"

namespace isatk::prep {

// Per-feature transform state. Enough to replay the exact preprocessing on a
// new raw point (clamp -> shift -> box-cox -> z-score).
struct FeaturePrep {
    std::string name;
    bool clamped = false;  // false when IQR == 0
    double clamp_lo = 0.0, clamp_hi = 0.0;
    double shift = 0.0;    // applied only when min <= 0
    bool transformed = false;  // false for constant features (passed through)
    double lambda = 1.0;
    double mean = 0.0, stddev = 1.0;
    bool retained = false;
    std::string reason;  // ok | low_correlation | duplicate_of:<name> | constant
    double max_abs_rho = 0.0;
};

struct PrepReport {
    std::vector<FeaturePrep> features;          // one entry per input feature
    Eigen::MatrixXd rho_feature_technique;      // f x t Spearman matrix
    std::vector<std::string> warnings;
};

struct PrepResult {
    meta::Metadata transformed;  // retained features only, techniques untouched
    PrepReport report;
};

namespace detail {

inline std::vector<double> row_vector(const Eigen::MatrixXd& m, Eigen::Index r) {
    std::vector<double> v(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index c = 0; c < m.cols(); ++c) v[static_cast<std::size_t>(c)] = m(r, c);
    return v;
}

}  // namespace detail

// Clamp each feature to [median - 5*IQR, median + 5*IQR]; quartiles by linear
// interpolation of order statistics. IQR == 0 features are left alone.
inline Eigen::MatrixXd bound_outliers(const Eigen::MatrixXd& F,
                                      std::vector<FeaturePrep>& report,
                                      std::vector<std::string>* warnings = nullptr) {
    Eigen::MatrixXd out = F;
    for (Eigen::Index r = 0; r < F.rows(); ++r) {
        auto x = detail::row_vector(F, r);
        std::vector<double> s(x);
        std::sort(s.begin(), s.end());
        double q1 = stats::quantile_sorted(s, 0.25);
        double q3 = stats::quantile_sorted(s, 0.75);
        double med = stats::quantile_sorted(s, 0.5);
        double iqr = q3 - q1;
        auto& fp = report[static_cast<std::size_t>(r)];
        if (iqr <= 0.0) {
            fp.clamped = false;
            if (warnings)
                warnings->push_back("feature '" + fp.name + "': IQR is 0, outlier bounding skipped");
            continue;
        }
        fp.clamped = true;
        fp.clamp_lo = med - 5.0 * iqr;
        fp.clamp_hi = med + 5.0 * iqr;
        for (Eigen::Index c = 0; c < F.cols(); ++c)
            out(r, c) = std::clamp(F(r, c), fp.clamp_lo, fp.clamp_hi);
    }
    return out;
}

// Shift to positivity when needed, Box-Cox with grid-search lambda, then
// z-standardize with the population std. Constant features pass through.
inline Eigen::MatrixXd boxcox_normalize(const Eigen::MatrixXd& F,
                                        std::vector<FeaturePrep>& report,
                                        std::vector<std::string>* warnings = nullptr) {
    Eigen::MatrixXd out = F;
    for (Eigen::Index r = 0; r < F.rows(); ++r) {
        auto& fp = report[static_cast<std::size_t>(r)];
        auto x = detail::row_vector(F, r);
        double lo = *std::min_element(x.begin(), x.end());
        double hi = *std::max_element(x.begin(), x.end());
        if (lo == hi) {
            fp.transformed = false;
            fp.reason = "constant";
            if (warnings)
                warnings->push_back("feature '" + fp.name + "': constant, passed through untransformed");
            continue;
        }
        fp.shift = lo <= 0.0 ? -lo + 1.0 : 0.0;
        for (auto& v : x) v += fp.shift;
        auto fit = stats::boxcox_fit(x);
        fp.lambda = fit.lambda;
        auto y = stats::boxcox_apply(x, fit.lambda);
        fp.mean = stats::mean(y);
        fp.stddev = stats::stddev_pop(y);
        if (!(fp.stddev > 0.0) || !std::isfinite(fp.stddev))
            throw Error("feature '" + fp.name + "': non-finite or zero variance after Box-Cox");
        fp.transformed = true;
        for (Eigen::Index c = 0; c < F.cols(); ++c) {
            double v = (y[static_cast<std::size_t>(c)] - fp.mean) / fp.stddev;
            if (!std::isfinite(v))
                throw Error("feature '" + fp.name + "': non-finite value after normalization");
            out(r, c) = v;
        }
    }
    return out;
}

struct SpearmanFilterResult {
    std::vector<int> retained;              // feature indices, ascending
    Eigen::MatrixXd rho_feature_technique;  // f x t
};

// Keep features whose best |rho| against any technique reaches the floor,
// then drop near-duplicate pairs (|rho| >= duplicate_rho), keeping the member
// with the stronger performance correlation.
inline SpearmanFilterResult spearman_filter(const Eigen::MatrixXd& F, const Eigen::MatrixXd& Y,
                                            const std::vector<std::string>& feature_names,
                                            std::vector<FeaturePrep>& report,
                                            double floor = 0.3, double duplicate_rho = 0.95) {
    if (F.cols() < 3) throw Error("spearman_filter: need at least 3 instances");
    const Eigen::Index f = F.rows(), t = Y.rows();
    SpearmanFilterResult res;
    res.rho_feature_technique.resize(f, t);
    std::vector<double> max_abs(static_cast<std::size_t>(f), 0.0);
    for (Eigen::Index r = 0; r < f; ++r) {
        auto xf = detail::row_vector(F, r);
        for (Eigen::Index k = 0; k < t; ++k) {
            double rho = stats::spearman(xf, detail::row_vector(Y, k));
            res.rho_feature_technique(r, k) = rho;
            max_abs[static_cast<std::size_t>(r)] =
                std::max(max_abs[static_cast<std::size_t>(r)], std::abs(rho));
        }
        report[static_cast<std::size_t>(r)].max_abs_rho = max_abs[static_cast<std::size_t>(r)];
    }

    std::vector<int> alive;
    for (Eigen::Index r = 0; r < f; ++r) {
        auto& fp = report[static_cast<std::size_t>(r)];
        if (fp.reason == "constant") continue;
        if (max_abs[static_cast<std::size_t>(r)] >= floor) {
            alive.push_back(static_cast<int>(r));
        } else {
            fp.reason = "low_correlation";
        }
    }

    // pairwise rho among survivors; greedily resolve the strongest duplicate
    // pair first, deterministic tie-breaks
    auto pair_rho = [&](int a, int b) {
        return stats::spearman(detail::row_vector(F, a), detail::row_vector(F, b));
    };
    bool changed = true;
    while (changed && alive.size() > 1) {
        changed = false;
        double best_abs = 0.0;
        int best_a = -1, best_b = -1;
        for (std::size_t ia = 0; ia < alive.size(); ++ia)
            for (std::size_t ib = ia + 1; ib < alive.size(); ++ib) {
                double rho = std::abs(pair_rho(alive[ia], alive[ib]));
                if (rho >= duplicate_rho && rho > best_abs) {
                    best_abs = rho;
                    best_a = alive[ia];
                    best_b = alive[ib];
                }
            }
        if (best_a >= 0) {
            int drop, keep;
            double ma = max_abs[static_cast<std::size_t>(best_a)];
            double mb = max_abs[static_cast<std::size_t>(best_b)];
            if (ma != mb) {
                drop = ma < mb ? best_a : best_b;
            } else {
                // tie: lexicographically smaller name stays
                drop = feature_names[static_cast<std::size_t>(best_a)] <
                               feature_names[static_cast<std::size_t>(best_b)]
                           ? best_b
                           : best_a;
            }
            keep = drop == best_a ? best_b : best_a;
            report[static_cast<std::size_t>(drop)].reason =
                "duplicate_of:" + feature_names[static_cast<std::size_t>(keep)];
            alive.erase(std::remove(alive.begin(), alive.end(), drop), alive.end());
            changed = true;
        }
    }

    for (int r : alive) {
        report[static_cast<std::size_t>(r)].retained = true;
        report[static_cast<std::size_t>(r)].reason = "ok";
    }
    res.retained = alive;
    return res;
}

// Full section-3.3 chain over a loaded Metadata.
inline PrepResult run_prep(const meta::Metadata& md, double spearman_floor = 0.3,
                           double duplicate_rho = 0.95) {
    PrepResult res;
    res.report.features.resize(md.n_features());
    for (std::size_t r = 0; r < md.n_features(); ++r)
        res.report.features[r].name = md.feature_names[r];

    Eigen::MatrixXd bounded = bound_outliers(md.F, res.report.features, &res.report.warnings);
    Eigen::MatrixXd normed = boxcox_normalize(bounded, res.report.features, &res.report.warnings);
    auto filt = spearman_filter(normed, md.Y, md.feature_names, res.report.features,
                                spearman_floor, duplicate_rho);
    res.report.rho_feature_technique = filt.rho_feature_technique;

    meta::Metadata& out = res.transformed;
    out.instance_ids = md.instance_ids;
    out.source_labels = md.source_labels;
    out.technique_names = md.technique_names;
    out.Y = md.Y;
    out.F.resize(static_cast<Eigen::Index>(filt.retained.size()), md.F.cols());
    for (std::size_t k = 0; k < filt.retained.size(); ++k) {
        out.feature_names.push_back(md.feature_names[static_cast<std::size_t>(filt.retained[k])]);
        out.F.row(static_cast<Eigen::Index>(k)) = normed.row(filt.retained[k]);
    }
    if (filt.retained.empty())
        throw Error("prep: no feature passed the Spearman filter (floor " +
                    fmt_full(spearman_floor) + ")");
    return res;
}

// Replay the stored transform on one raw feature value.
inline double apply_feature_prep(const FeaturePrep& fp, double raw) {
    double v = raw;
    if (fp.clamped) v = std::clamp(v, fp.clamp_lo, fp.clamp_hi);
    if (!fp.transformed) return v;
    v += fp.shift;
    if (v <= 0.0) v = 1e-12;  // below the training range; keep the transform finite
    double y = std::abs(fp.lambda) < 1e-8 ? std::log(v) : (std::pow(v, fp.lambda) - 1.0) / fp.lambda;
    return (y - fp.mean) / fp.stddev;
}

inline csv::Table report_table(const PrepReport& rep) {
    csv::Table t;
    t.header = {"feature", "lambda", "clamp_lo", "clamp_hi", "retained", "reason", "max_abs_rho"};
    for (const auto& fp : rep.features) {
        std::vector<std::string> row;
        row.push_back(fp.name);
        row.push_back(fp.transformed ? fmt_full(fp.lambda) : "");
        row.push_back(fp.clamped ? fmt_full(fp.clamp_lo) : "");
        row.push_back(fp.clamped ? fmt_full(fp.clamp_hi) : "");
        row.push_back(fp.retained ? "1" : "0");
        row.push_back(fp.reason);
        row.push_back(fmt_full(fp.max_abs_rho));
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline nlohmann::json params_json(const PrepReport& rep) {
    nlohmann::json j;
    j["features"] = nlohmann::json::array();
    for (const auto& fp : rep.features) {
        nlohmann::json e;
        e["name"] = fp.name;
        e["clamped"] = fp.clamped;
        e["clamp_lo"] = fp.clamp_lo;
        e["clamp_hi"] = fp.clamp_hi;
        e["shift"] = fp.shift;
        e["transformed"] = fp.transformed;
        e["lambda"] = fp.lambda;
        e["mean"] = fp.mean;
        e["stddev"] = fp.stddev;
        e["retained"] = fp.retained;
        e["reason"] = fp.reason;
        e["max_abs_rho"] = fp.max_abs_rho;
        j["features"].push_back(e);
    }
    return j;
}

inline std::vector<FeaturePrep> params_from_json(const nlohmann::json& j) {
    std::vector<FeaturePrep> out;
    for (const auto& e : j.at("features")) {
        FeaturePrep fp;
        fp.name = e.at("name").get<std::string>();
        fp.clamped = e.at("clamped").get<bool>();
        fp.clamp_lo = e.at("clamp_lo").get<double>();
        fp.clamp_hi = e.at("clamp_hi").get<double>();
        fp.shift = e.at("shift").get<double>();
        fp.transformed = e.at("transformed").get<bool>();
        fp.lambda = e.at("lambda").get<double>();
        fp.mean = e.at("mean").get<double>();
        fp.stddev = e.at("stddev").get<double>();
        fp.retained = e.at("retained").get<bool>();
        fp.reason = e.at("reason").get<std::string>();
        fp.max_abs_rho = e.at("max_abs_rho").get<double>();
        out.push_back(std::move(fp));
    }
    return out;
}

}  // namespace isatk::prep
