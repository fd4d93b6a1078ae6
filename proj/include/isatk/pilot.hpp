#pragma once

#include <Eigen/Dense>
#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "isatk/common.hpp"
#include "isatk/stats.hpp"

namespace isatk::pilot {

// Best-of-restarts solution of the projection problem
//   min ||F - B Z||_F^2 + ||Y - C Z||_F^2   s.t.  Z = A F
// selected by topological preservation (correlation between high- and
// low-dimensional pairwise distances).
struct Projection {
    Eigen::MatrixXd A;  // 2 x n
    Eigen::MatrixXd B;  // n x 2
    Eigen::MatrixXd C;  // t x 2
    Eigen::MatrixXd Z;  // 2 x i, always recomputed as A * F
    double objective = 0.0;
    double topo_preservation = 0.0;
    int restart_id = -1;
    std::uint64_t seed = 0;
};

struct FitDiagnostics {
    std::vector<std::string> warnings;  // discarded restarts etc.
    std::vector<double> restart_topo;   // per completed restart
    std::vector<double> restart_objective;
};

namespace detail {

struct ObjGrad {
    double objective;
    Eigen::VectorXd grad;
};

// Pack order: A (2 x n row-major), B (n x 2 row-major), C (t x 2 row-major).
inline Eigen::VectorXd pack(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B,
                            const Eigen::MatrixXd& C) {
    const Eigen::Index n = A.cols(), t = C.rows();
    Eigen::VectorXd v(4 * n + 2 * t);
    Eigen::Index p = 0;
    for (Eigen::Index r = 0; r < 2; ++r)
        for (Eigen::Index c = 0; c < n; ++c) v(p++) = A(r, c);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < 2; ++c) v(p++) = B(r, c);
    for (Eigen::Index r = 0; r < t; ++r)
        for (Eigen::Index c = 0; c < 2; ++c) v(p++) = C(r, c);
    return v;
}

inline void unpack(const Eigen::VectorXd& v, Eigen::Index n, Eigen::Index t,
                   Eigen::MatrixXd& A, Eigen::MatrixXd& B, Eigen::MatrixXd& C) {
    A.resize(2, n);
    B.resize(n, 2);
    C.resize(t, 2);
    Eigen::Index p = 0;
    for (Eigen::Index r = 0; r < 2; ++r)
        for (Eigen::Index c = 0; c < n; ++c) A(r, c) = v(p++);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < 2; ++c) B(r, c) = v(p++);
    for (Eigen::Index r = 0; r < t; ++r)
        for (Eigen::Index c = 0; c < 2; ++c) C(r, c) = v(p++);
}

inline ObjGrad objective_and_gradient(const Eigen::VectorXd& theta, const Eigen::MatrixXd& F,
                                      const Eigen::MatrixXd& Y) {
    const Eigen::Index n = F.rows(), t = Y.rows();
    Eigen::MatrixXd A, B, C;
    unpack(theta, n, t, A, B, C);
    Eigen::MatrixXd Z = A * F;
    Eigen::MatrixXd Rf = F - B * Z;
    Eigen::MatrixXd Ry = Y - C * Z;
    ObjGrad og;
    og.objective = Rf.squaredNorm() + Ry.squaredNorm();
    Eigen::MatrixXd gB = -2.0 * Rf * Z.transpose();
    Eigen::MatrixXd gC = -2.0 * Ry * Z.transpose();
    Eigen::MatrixXd gA = -2.0 * (B.transpose() * Rf + C.transpose() * Ry) * F.transpose();
    og.grad = pack(gA, gB, gC);
    return og;
}

struct BfgsOutcome {
    Eigen::VectorXd x;
    double objective = 0.0;
    bool finite = true;
    int iterations = 0;
};

// BFGS with Armijo backtracking. Accepted iterates never increase the
// objective; that invariant is asserted below.
inline BfgsOutcome bfgs(Eigen::VectorXd x, const Eigen::MatrixXd& F, const Eigen::MatrixXd& Y,
                        int max_iter = 1000, double grad_tol = 1e-6) {
    const Eigen::Index d = x.size();
    Eigen::MatrixXd H = Eigen::MatrixXd::Identity(d, d);
    auto og = objective_and_gradient(x, F, Y);
    BfgsOutcome out;
    if (!std::isfinite(og.objective)) {
        out.finite = false;
        return out;
    }
    double f = og.objective;
    Eigen::VectorXd g = og.grad;
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it;
        if (g.lpNorm<Eigen::Infinity>() <= grad_tol) break;
        Eigen::VectorXd p = -(H * g);
        double slope = g.dot(p);
        if (slope >= 0.0) {  // lost positive definiteness; restart from steepest descent
            H.setIdentity();
            p = -g;
            slope = g.dot(p);
        }
        double step = 1.0;
        bool accepted = false;
        Eigen::VectorXd xn;
        ObjGrad ogn;
        for (int ls = 0; ls < 60; ++ls) {
            xn = x + step * p;
            ogn = objective_and_gradient(xn, F, Y);
            if (std::isfinite(ogn.objective) && ogn.objective <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        if (ogn.objective > f)
            throw Error("pilot: objective increased on an accepted iterate");
        Eigen::VectorXd s = xn - x;
        Eigen::VectorXd yv = ogn.grad - g;
        double sy = s.dot(yv);
        if (sy > 1e-12) {
            Eigen::MatrixXd I = Eigen::MatrixXd::Identity(d, d);
            Eigen::MatrixXd R = I - (s * yv.transpose()) / sy;
            H = R * H * R.transpose() + (s * s.transpose()) / sy;
        }
        x = xn;
        f = ogn.objective;
        g = ogn.grad;
    }
    out.x = x;
    out.objective = f;
    out.finite = std::isfinite(f);
    return out;
}

}  // namespace detail

// Pearson correlation between the condensed pairwise distance vectors of the
// columns of Hi (high-dimensional) and Lo (2D). Above `subsample_limit`
// instances a seeded subsample bounds the quadratic cost.
inline double topo_preservation(const Eigen::MatrixXd& Hi, const Eigen::MatrixXd& Lo,
                                std::uint64_t seed = 0, Eigen::Index subsample_limit = 5000) {
    if (Hi.cols() != Lo.cols()) throw Error("topo_preservation: column mismatch");
    Eigen::Index i = Hi.cols();
    if (i < 3) throw Error("topo_preservation: need at least 3 instances");
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(i));
    std::iota(idx.begin(), idx.end(), 0);
    if (i > subsample_limit) {
        Rng rng = Rng(seed).derive(0xd15);
        rng.shuffle(idx);
        idx.resize(static_cast<std::size_t>(subsample_limit));
        std::sort(idx.begin(), idx.end());
    }
    const std::size_t m = idx.size();
    std::vector<double> dh, dl;
    dh.reserve(m * (m - 1) / 2);
    dl.reserve(m * (m - 1) / 2);
    for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = a + 1; b < m; ++b) {
            dh.push_back((Hi.col(idx[a]) - Hi.col(idx[b])).norm());
            dl.push_back((Lo.col(idx[a]) - Lo.col(idx[b])).norm());
        }
    return stats::pearson(dh, dl);
}

// 30-restart fit; each restart initializes A, B, C with iid standard normal
// entries and minimizes the objective by BFGS. The restart with the highest
// topological preservation wins (ties: lower objective, then restart id).
inline Projection fit_projection(const Eigen::MatrixXd& F, const Eigen::MatrixXd& Y,
                                 int restarts, std::uint64_t seed,
                                 FitDiagnostics* diag = nullptr, int max_iter = 1000,
                                 double grad_tol = 1e-6) {
    const Eigen::Index n = F.rows(), t = Y.rows(), i = F.cols();
    if (n < 2) throw Error("fit_projection: need at least 2 features");
    if (i < 3) throw Error("fit_projection: need at least 3 instances");
    if (Y.cols() != i) throw Error("fit_projection: F and Y instance counts differ");
    if (restarts < 1) throw Error("fit_projection: need at least 1 restart");

    Rng root(seed);
    Projection best;
    bool have_best = false;
    for (int r = 0; r < restarts; ++r) {
        Rng rr = root.derive(0xb000 + static_cast<std::uint64_t>(r));
        Eigen::VectorXd x0(4 * n + 2 * t);
        for (Eigen::Index p = 0; p < x0.size(); ++p) x0(p) = rr.normal();
        auto outcome = detail::bfgs(std::move(x0), F, Y, max_iter, grad_tol);
        if (!outcome.finite) {
            if (diag)
                diag->warnings.push_back("restart " + std::to_string(r) +
                                         ": non-finite objective, discarded");
            continue;
        }
        Eigen::MatrixXd A, B, C;
        detail::unpack(outcome.x, n, t, A, B, C);
        Eigen::MatrixXd Z = A * F;
        double topo = topo_preservation(F, Z, seed);
        if (diag) {
            diag->restart_topo.push_back(topo);
            diag->restart_objective.push_back(outcome.objective);
        }
        bool better = !have_best || topo > best.topo_preservation ||
                      (topo == best.topo_preservation && outcome.objective < best.objective);
        if (better) {
            best.A = A;
            best.B = B;
            best.C = C;
            best.Z = Z;
            best.objective = outcome.objective;
            best.topo_preservation = topo;
            best.restart_id = r;
            best.seed = seed;
            have_best = true;
        }
    }
    if (!have_best) throw Error("fit_projection: every restart diverged");
    return best;
}

inline Eigen::Vector2d project_point(const Projection& p, const Eigen::VectorXd& x) {
    if (x.size() != p.A.cols())
        throw Error("project_point: expected " + std::to_string(p.A.cols()) +
                    " features, got " + std::to_string(x.size()));
    return p.A * x;
}

inline nlohmann::json to_json(const Projection& p) {
    auto mat = [](const Eigen::MatrixXd& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            nlohmann::json row = nlohmann::json::array();
            for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
            rows.push_back(row);
        }
        return rows;
    };
    nlohmann::json j;
    j["A"] = mat(p.A);
    j["B"] = mat(p.B);
    j["C"] = mat(p.C);
    j["objective"] = p.objective;
    j["topo_preservation"] = p.topo_preservation;
    j["restart_id"] = p.restart_id;
    j["seed"] = p.seed;
    return j;
}

inline Projection from_json(const nlohmann::json& j) {
    auto mat = [](const nlohmann::json& rows) {
        Eigen::MatrixXd m(rows.size(), rows.empty() ? 0 : rows[0].size());
        for (Eigen::Index r = 0; r < m.rows(); ++r)
            for (Eigen::Index c = 0; c < m.cols(); ++c)
                m(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)]
                              .get<double>();
        return m;
    };
    Projection p;
    p.A = mat(j.at("A"));
    p.B = mat(j.at("B"));
    p.C = mat(j.at("C"));
    p.objective = j.at("objective").get<double>();
    p.topo_preservation = j.at("topo_preservation").get<double>();
    p.restart_id = j.at("restart_id").get<int>();
    p.seed = j.at("seed").get<std::uint64_t>();
    return p;
}

}  // namespace isatk::pilot
