#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "isatk/common.hpp"

namespace isatk::pca {

// Top-2 principal components via covariance eigendecomposition.
// Sign convention: the largest-magnitude loading of each component is
// positive (first such index on exact ties).
struct Pca2 {
    Eigen::VectorXd mean;      // d
    Eigen::MatrixXd loadings;  // d x 2, orthonormal columns
    Eigen::Vector2d eigenvalues;

    // X is d x i (features as rows); returns 2 x i scores.
    Eigen::MatrixXd transform(const Eigen::MatrixXd& X) const {
        return loadings.transpose() * (X.colwise() - mean);
    }
};

inline Pca2 fit_pca2(const Eigen::MatrixXd& X) {
    const Eigen::Index d = X.rows(), i = X.cols();
    if (d < 2) throw Error("fit_pca2: need at least 2 dimensions");
    if (i < 2) throw Error("fit_pca2: need at least 2 samples");
    Pca2 p;
    p.mean = X.rowwise().mean();
    Eigen::MatrixXd centered = X.colwise() - p.mean;
    Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(i);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    if (es.info() != Eigen::Success) throw Error("fit_pca2: eigensolve failed");
    // eigenvalues ascending; take the last two in descending order
    p.loadings.resize(d, 2);
    for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd v = es.eigenvectors().col(d - 1 - c);
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < d; ++r)
            if (std::abs(v(r)) > best) {
                best = std::abs(v(r));
                arg = r;
            }
        if (v(arg) < 0.0) v = -v;
        p.loadings.col(c) = v;
        p.eigenvalues(c) = es.eigenvalues()(d - 1 - c);
    }
    return p;
}

}  // namespace isatk::pca
