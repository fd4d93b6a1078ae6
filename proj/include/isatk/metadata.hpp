#pragma once

#include <Eigen/Dense>
#include <set>
#include <string>
#include <vector>

#include "isatk/common.hpp"
#include "isatk/csv.hpp"

namespace isatk::meta {

// Meta-data model: F holds one feature per row, Y one technique per row,
// instances are columns of both.
struct Metadata {
    std::vector<std::string> instance_ids;
    std::vector<std::string> source_labels;  // empty, or one per instance
    std::vector<std::string> feature_names;
    std::vector<std::string> technique_names;
    Eigen::MatrixXd F;  // f x i
    Eigen::MatrixXd Y;  // t x i, coverage fractions in [0,1]

    std::size_t n_features() const { return feature_names.size(); }
    std::size_t n_techniques() const { return technique_names.size(); }
    std::size_t n_instances() const { return instance_ids.size(); }

    int feature_index(const std::string& name) const {
        for (std::size_t j = 0; j < feature_names.size(); ++j)
            if (feature_names[j] == name) return static_cast<int>(j);
        return -1;
    }
    int technique_index(const std::string& name) const {
        for (std::size_t j = 0; j < technique_names.size(); ++j)
            if (technique_names[j] == name) return static_cast<int>(j);
        return -1;
    }
};

struct MetadataLoad {
    Metadata md;
    std::vector<std::string> rejected_rows;  // one diagnostic per rejected row
};

enum class EpsilonMode { Absolute, Relative };

inline EpsilonMode epsilon_mode_from_string(const std::string& s) {
    if (s == "absolute") return EpsilonMode::Absolute;
    if (s == "relative") return EpsilonMode::Relative;
    throw Error("unknown epsilon mode '" + s + "' (expected absolute or relative)");
}

struct GoodnessMatrix {
    Eigen::MatrixXi good;  // t x i, 0/1
    Eigen::MatrixXi best;  // t x i, 0/1
    double epsilon_good = 0.05;
    EpsilonMode mode = EpsilonMode::Absolute;
};

inline constexpr double kBestTieTolerance = 1e-9;

// metadata-CSV: first column `instance`, optional `source`, feature columns
// prefixed `feature_`, technique columns prefixed `algo_`.
inline MetadataLoad load_metadata(const std::string& path) {
    csv::Table t = csv::read(path);
    if (t.header.empty() || t.header[0] != "instance")
        throw Error(path + ": first column must be 'instance'");

    MetadataLoad out;
    Metadata& md = out.md;
    int source_col = -1;
    std::vector<int> feat_cols, tech_cols;
    for (std::size_t c = 1; c < t.header.size(); ++c) {
        const std::string& h = t.header[c];
        if (h == "source") {
            if (source_col >= 0) throw Error(path + ": duplicate 'source' column");
            source_col = static_cast<int>(c);
        } else if (h.rfind("feature_", 0) == 0) {
            md.feature_names.push_back(h.substr(8));
            feat_cols.push_back(static_cast<int>(c));
        } else if (h.rfind("algo_", 0) == 0) {
            md.technique_names.push_back(h.substr(5));
            tech_cols.push_back(static_cast<int>(c));
        } else {
            throw Error(path + ": unrecognized column '" + h +
                        "' (expected source, feature_* or algo_*)");
        }
    }
    if (feat_cols.empty()) throw Error(path + ": no feature_* columns");
    if (tech_cols.empty()) throw Error(path + ": no algo_* columns");
    {
        std::set<std::string> uniq(md.feature_names.begin(), md.feature_names.end());
        if (uniq.size() != md.feature_names.size())
            throw Error(path + ": duplicate feature column");
        std::set<std::string> uniqt(md.technique_names.begin(), md.technique_names.end());
        if (uniqt.size() != md.technique_names.size())
            throw Error(path + ": duplicate technique column");
    }

    std::vector<std::vector<double>> fcols, ycols;  // per accepted instance
    std::set<std::string> seen_ids;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        const std::string rowname = "row " + std::to_string(r + 1);
        if (row.size() != t.header.size()) {
            out.rejected_rows.push_back(rowname + ": expected " +
                                        std::to_string(t.header.size()) + " cells, got " +
                                        std::to_string(row.size()));
            continue;
        }
        if (row[0].empty()) {
            out.rejected_rows.push_back(rowname + ": empty instance id");
            continue;
        }
        std::vector<double> f(feat_cols.size()), y(tech_cols.size());
        bool ok = true;
        for (std::size_t j = 0; j < feat_cols.size() && ok; ++j) {
            auto v = csv::parse_double(row[feat_cols[j]]);
            if (!v) {
                out.rejected_rows.push_back(rowname + " (id '" + row[0] + "'): cell '" +
                                            row[feat_cols[j]] + "' in column 'feature_" +
                                            md.feature_names[j] + "' is not a finite number");
                ok = false;
            } else {
                f[j] = *v;
            }
        }
        for (std::size_t j = 0; j < tech_cols.size() && ok; ++j) {
            auto v = csv::parse_double(row[tech_cols[j]]);
            if (!v) {
                out.rejected_rows.push_back(rowname + " (id '" + row[0] + "'): cell '" +
                                            row[tech_cols[j]] + "' in column 'algo_" +
                                            md.technique_names[j] + "' is not a finite number");
                ok = false;
            } else if (*v < 0.0 || *v > 1.0) {
                throw Error(path + ": " + rowname + " (id '" + row[0] + "'): coverage " +
                            row[tech_cols[j]] + " in column 'algo_" + md.technique_names[j] +
                            "' is outside [0,1]");
            } else {
                y[j] = *v;
            }
        }
        if (!ok) continue;
        if (!seen_ids.insert(row[0]).second)
            throw Error(path + ": duplicate instance id '" + row[0] + "'");
        md.instance_ids.push_back(row[0]);
        if (source_col >= 0) md.source_labels.push_back(row[source_col]);
        fcols.push_back(std::move(f));
        ycols.push_back(std::move(y));
    }
    if (md.instance_ids.empty())
        throw Error(path + ": no loadable instance rows");

    const auto f = static_cast<Eigen::Index>(feat_cols.size());
    const auto tn = static_cast<Eigen::Index>(tech_cols.size());
    const auto i = static_cast<Eigen::Index>(md.instance_ids.size());
    md.F.resize(f, i);
    md.Y.resize(tn, i);
    for (Eigen::Index c = 0; c < i; ++c) {
        for (Eigen::Index rr = 0; rr < f; ++rr) md.F(rr, c) = fcols[c][rr];
        for (Eigen::Index rr = 0; rr < tn; ++rr) md.Y(rr, c) = ycols[c][rr];
    }
    return out;
}

inline void write_metadata(const std::string& path, const Metadata& md,
                           const std::string& fingerprint = "") {
    csv::Table t;
    if (!fingerprint.empty()) t.fingerprint = fingerprint;
    t.header.push_back("instance");
    const bool have_source = !md.source_labels.empty();
    if (have_source) t.header.push_back("source");
    for (const auto& n : md.feature_names) t.header.push_back("feature_" + n);
    for (const auto& n : md.technique_names) t.header.push_back("algo_" + n);
    for (std::size_t c = 0; c < md.n_instances(); ++c) {
        std::vector<std::string> row;
        row.push_back(md.instance_ids[c]);
        if (have_source) row.push_back(md.source_labels[c]);
        for (Eigen::Index r = 0; r < md.F.rows(); ++r)
            row.push_back(fmt_full(md.F(r, static_cast<Eigen::Index>(c))));
        for (Eigen::Index r = 0; r < md.Y.rows(); ++r)
            row.push_back(fmt_full(md.Y(r, static_cast<Eigen::Index>(c))));
        t.rows.push_back(std::move(row));
    }
    csv::write(path, t);
}

// Good/best labels under the epsilon-of-best rule. `best` flags every
// technique tied with the per-instance maximum (tolerance 1e-9); `good`
// flags coverage within epsilon of that maximum.
inline GoodnessMatrix compute_goodness(const Metadata& md, double epsilon_good,
                                       EpsilonMode mode = EpsilonMode::Absolute) {
    if (epsilon_good < 0.0) throw Error("compute_goodness: epsilon must be >= 0");
    const Eigen::Index t = md.Y.rows(), i = md.Y.cols();
    GoodnessMatrix g;
    g.epsilon_good = epsilon_good;
    g.mode = mode;
    g.good.setZero(t, i);
    g.best.setZero(t, i);
    for (Eigen::Index c = 0; c < i; ++c) {
        double m = md.Y.col(c).maxCoeff();
        double slack = mode == EpsilonMode::Absolute ? epsilon_good : epsilon_good * m;
        for (Eigen::Index r = 0; r < t; ++r) {
            double gap = m - md.Y(r, c);
            if (gap <= kBestTieTolerance) g.best(r, c) = 1;
            if (gap <= slack + kBestTieTolerance) g.good(r, c) = 1;
        }
    }
    return g;
}

}  // namespace isatk::meta
