#pragma once

#include <sepmetric/dataset.hpp>
#include <sepmetric/embedding.hpp>
#include <sepmetric/error.hpp>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <string>

namespace sepmetric {

/// Orthonormal PCA basis: top-d eigenvectors of the sample covariance,
/// ordered by descending eigenvalue.
struct PcaBasis {
    Eigen::VectorXd mean;        // D
    Eigen::MatrixXd components;  // D x d, columns orthonormal
    Eigen::VectorXd eigenvalues; // all D, descending, clamped at 0
    double retained_variance = 0.0;
};

inline PcaBasis pca_basis(const Eigen::MatrixXd& features, int target_dim) {
    const Eigen::Index n = features.rows();
    const Eigen::Index dim = features.cols();
    if (n < 2) {
        throw ValidationError("pca: need at least 2 rows");
    }
    if (target_dim < 1 || target_dim > std::min(n, dim)) {
        throw ValidationError("pca: target_dim must be in 1..min(N, D)");
    }
    PcaBasis basis;
    basis.mean = features.colwise().mean();
    const Eigen::MatrixXd centered = features.rowwise() - basis.mean.transpose();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    cov = 0.5 * (cov + cov.transpose()).eval();

    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw NumericError("pca: eigendecomposition failed");
    }
    // Eigen returns ascending order; flip to descending and clamp the
    // tiny negative values that show up from round-off.
    basis.eigenvalues = solver.eigenvalues().reverse().cwiseMax(0.0);
    const double total = basis.eigenvalues.sum();
    if (!(total > 0.0)) {
        throw NumericError("pca: zero total variance (all points identical)");
    }
    basis.components.resize(dim, target_dim);
    for (int j = 0; j < target_dim; ++j) {
        basis.components.col(j) = solver.eigenvectors().col(dim - 1 - j);
    }
    basis.retained_variance =
        std::min(1.0, basis.eigenvalues.head(target_dim).sum() / total);
    return basis;
}

/// Projects rows onto the top-d principal axes of the mean-centered
/// sample covariance. final_objective is the retained variance fraction.
inline Embedding pca_project(const Eigen::MatrixXd& features, int target_dim) {
    const PcaBasis basis = pca_basis(features, target_dim);
    Embedding embedding;
    embedding.method = EmbeddingMethod::pca;
    embedding.points =
        (features.rowwise() - basis.mean.transpose()) * basis.components;
    embedding.final_objective = basis.retained_variance;
    embedding.initial_objective = basis.retained_variance;
    embedding.pca_target_dim = target_dim;
    embedding.seed = 0;
    return embedding;
}

inline Embedding pca_project(const LabeledDataset& data, int target_dim) {
    return pca_project(data.features, target_dim);
}

} // namespace sepmetric
