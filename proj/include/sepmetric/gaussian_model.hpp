#pragma once

#include <sepmetric/embedding.hpp>
#include <sepmetric/error.hpp>
#include <sepmetric/rng.hpp>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

namespace sepmetric {

/// A fitted multivariate Gaussian N(mean, covariance) for one class,
/// with the Cholesky factor and log-determinant cached for stable
/// density evaluation. Immutable after construction.
struct ClassGaussian {
    Eigen::VectorXd mean;
    Eigen::MatrixXd covariance;
    Eigen::MatrixXd chol_lower; // L with L * L^T = covariance
    double log_det = 0.0;
    int class_id = 0;
    Eigen::Index sample_count = 0;

    Eigen::Index dim() const { return mean.size(); }
};

/// Builds a model from explicit parameters. The covariance must be
/// symmetric within 1e-12 and positive definite.
inline ClassGaussian make_class_gaussian(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                                         int class_id = 0, Eigen::Index sample_count = 0) {
    const Eigen::Index d = mean.size();
    if (covariance.rows() != d || covariance.cols() != d || d == 0) {
        throw ValidationError("covariance shape does not match mean dimension");
    }
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = i + 1; j < d; ++j) {
            if (std::abs(covariance(i, j) - covariance(j, i)) > 1e-12) {
                throw ValidationError("covariance is not symmetric within 1e-12 at (" +
                                      std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
    Eigen::MatrixXd sym = 0.5 * (covariance + covariance.transpose());
    const Eigen::LLT<Eigen::MatrixXd> llt(sym);
    if (llt.info() != Eigen::Success) {
        throw ValidationError("covariance is not positive definite (Cholesky failed)");
    }
    ClassGaussian model;
    model.mean = std::move(mean);
    model.covariance = std::move(sym);
    model.chol_lower = llt.matrixL();
    model.log_det = 2.0 * model.chol_lower.diagonal().array().log().sum();
    model.class_id = class_id;
    model.sample_count = sample_count;
    return model;
}

/// log N(z; mean, covariance) through the cached Cholesky factor.
/// Finite for every finite z.
inline double log_pdf(const ClassGaussian& model, const Eigen::VectorXd& z) {
    if (z.size() != model.dim()) {
        throw ValidationError("log_pdf: point dimension " + std::to_string(z.size()) +
                              " does not match model dimension " + std::to_string(model.dim()));
    }
    const Eigen::VectorXd w =
        model.chol_lower.triangularView<Eigen::Lower>().solve(z - model.mean);
    const double d = static_cast<double>(model.dim());
    return -0.5 * d * std::log(2.0 * std::numbers::pi) - 0.5 * model.log_det -
           0.5 * w.squaredNorm();
}

/// One draw z = mean + L * xi with xi standard normal.
inline Eigen::VectorXd sample(const ClassGaussian& model, Rng& rng) {
    Eigen::VectorXd xi(model.dim());
    for (Eigen::Index i = 0; i < model.dim(); ++i) {
        xi(i) = rng.gaussian();
    }
    return model.mean + model.chol_lower * xi;
}

/// One Gaussian per class id 0..K-1, all in the same d-dimensional space.
struct ClassGaussians {
    std::vector<ClassGaussian> models;
    std::vector<std::string> class_names;

    int num_classes() const { return static_cast<int>(models.size()); }
    Eigen::Index dim() const { return models.empty() ? 0 : models.front().dim(); }
};

/// Fits mean and unbiased covariance per class, then adds the ridge
/// eps*I with eps = 1e-6 * trace/d (1e-9 absolute when the trace is
/// zero) so the Cholesky factor always exists.
inline ClassGaussians fit_class_gaussians(const Eigen::MatrixXd& points,
                                          const std::vector<int>& labels,
                                          std::vector<std::string> class_names) {
    const Eigen::Index n = points.rows();
    const Eigen::Index d = points.cols();
    if (static_cast<Eigen::Index>(labels.size()) != n) {
        throw ValidationError("fit_class_gaussians: labels do not align with rows");
    }
    const int k = static_cast<int>(class_names.size());
    if (k == 0) {
        throw ValidationError("fit_class_gaussians: no classes");
    }
    for (int y : labels) {
        if (y < 0 || y >= k) {
            throw ValidationError("fit_class_gaussians: label id " + std::to_string(y) +
                                  " out of range 0.." + std::to_string(k - 1));
        }
    }
    ClassGaussians result;
    result.class_names = std::move(class_names);
    for (int c = 0; c < k; ++c) {
        std::vector<Eigen::Index> rows;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (labels[static_cast<std::size_t>(i)] == c) {
                rows.push_back(i);
            }
        }
        const auto n_c = static_cast<Eigen::Index>(rows.size());
        if (n_c < 2) {
            throw InsufficientClassDataError("class " + result.class_names[static_cast<std::size_t>(c)] +
                                             " has " + std::to_string(n_c) +
                                             (n_c == 1 ? " sample" : " samples") + ", need >= 2");
        }
        Eigen::MatrixXd class_points(n_c, d);
        for (Eigen::Index i = 0; i < n_c; ++i) {
            class_points.row(i) = points.row(rows[static_cast<std::size_t>(i)]);
        }
        const Eigen::VectorXd mean = class_points.colwise().mean();
        const Eigen::MatrixXd centered = class_points.rowwise() - mean.transpose();
        Eigen::MatrixXd cov =
            (centered.transpose() * centered) / static_cast<double>(n_c - 1);
        cov = 0.5 * (cov + cov.transpose()).eval();
        const double trace = cov.trace();
        const double eps = trace > 0.0 ? 1e-6 * trace / static_cast<double>(d) : 1e-9;
        cov += eps * Eigen::MatrixXd::Identity(d, d);

        const Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success) {
            throw NumericError("class " + result.class_names[static_cast<std::size_t>(c)] +
                               ": Cholesky failed after regularization");
        }
        ClassGaussian model;
        model.mean = mean;
        model.covariance = cov;
        model.chol_lower = llt.matrixL();
        model.log_det = 2.0 * model.chol_lower.diagonal().array().log().sum();
        model.class_id = c;
        model.sample_count = n_c;
        result.models.push_back(std::move(model));
    }
    return result;
}

inline ClassGaussians fit_class_gaussians(const Embedding& embedding,
                                          const std::vector<int>& labels,
                                          std::vector<std::string> class_names) {
    return fit_class_gaussians(embedding.points, labels, std::move(class_names));
}

} // namespace sepmetric
