#pragma once

#include <sepmetric/dataset.hpp>
#include <sepmetric/embedding.hpp>
#include <sepmetric/error.hpp>
#include <sepmetric/rng.hpp>

#include <Eigen/Dense>

#include <cmath>
#include <string>
#include <utility>
#include <vector>

namespace sepmetric {

/// Exact pairwise squared Euclidean distances, symmetric by construction.
inline Eigen::MatrixXd pairwise_squared_distances(const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (x.row(i) - x.row(j)).squaredNorm();
            d2(i, j) = v;
            d2(j, i) = v;
        }
    }
    return d2;
}

/// Row-conditional affinities p_{j|i} plus the chosen precisions
/// beta_i = 1 / (2 sigma_i^2).
struct ConditionalAffinities {
    Eigen::MatrixXd p_cond; // row i: p_{j|i}, zero diagonal, rows sum to 1
    Eigen::VectorXd betas;
};

namespace detail {

/// Evaluates one conditional row at precision beta. Distances are
/// shifted by their row minimum, which cancels in the normalization.
/// Returns the row perplexity 2^H.
inline double conditional_row(const Eigen::VectorXd& shifted_d2, Eigen::Index self,
                              double beta, Eigen::VectorXd& out_row) {
    const Eigen::Index n = shifted_d2.size();
    double sum = 0.0;
    double weighted_d2 = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
        if (j == self) {
            out_row(j) = 0.0;
            continue;
        }
        const double w = std::exp(-beta * shifted_d2(j));
        out_row(j) = w;
        sum += w;
        weighted_d2 += w * shifted_d2(j);
    }
    out_row /= sum;
    // Shannon entropy in nats; 2^{H_bits} == e^{H_nats}
    const double entropy = std::log(sum) + beta * weighted_d2 / sum;
    return std::exp(entropy);
}

} // namespace detail

/// Chooses each row's Gaussian bandwidth by bisection so the row
/// perplexity 2^H matches the target within 1e-5.
inline ConditionalAffinities tsne_conditional_affinities(const Eigen::MatrixXd& features,
                                                         double perplexity) {
    const Eigen::Index n = features.rows();
    if (!(perplexity >= 1.0) || !(perplexity < static_cast<double>(n))) {
        throw ValidationError("tsne: perplexity must satisfy 1 <= perplexity < N (N=" +
                              std::to_string(n) + ")");
    }
    const Eigen::MatrixXd d2 = pairwise_squared_distances(features);
    if (!d2.allFinite()) {
        throw ValidationError("tsne: non-finite pairwise distances");
    }

    constexpr double kTolerance = 1e-5;
    constexpr int kBisectionIters = 50;
    constexpr int kBracketSteps = 100;

    ConditionalAffinities result;
    result.p_cond = Eigen::MatrixXd::Zero(n, n);
    result.betas.resize(n);
    Eigen::VectorXd row(n);

    for (Eigen::Index i = 0; i < n; ++i) {
        double min_off = std::numeric_limits<double>::infinity();
        double max_off = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (j == i) continue;
            min_off = std::min(min_off, d2(i, j));
            max_off = std::max(max_off, d2(i, j));
        }
        if (max_off == 0.0) {
            throw ValidationError("tsne: row " + std::to_string(i + 1) +
                                  " has all pairwise distances zero (duplicate points)");
        }
        Eigen::VectorXd shifted = d2.row(i).transpose().array() - min_off;
        shifted(i) = 0.0;

        // Perplexity is strictly decreasing in beta, with supremum N-1 as
        // beta -> 0, so [0, hi] brackets the target once perp(hi) drops
        // below it.
        double lo = 0.0;
        double hi = 1.0;
        double beta = hi;
        double perp = detail::conditional_row(shifted, i, beta, row);
        for (int step = 0; step < kBracketSteps && perp > perplexity + kTolerance; ++step) {
            lo = hi;
            hi *= 2.0;
            beta = hi;
            perp = detail::conditional_row(shifted, i, beta, row);
        }
        for (int iter = 0; iter < kBisectionIters && std::abs(perp - perplexity) > kTolerance;
             ++iter) {
            if (perp > perplexity) {
                lo = beta;
            } else {
                hi = beta;
            }
            beta = 0.5 * (lo + hi);
            perp = detail::conditional_row(shifted, i, beta, row);
        }
        if (std::abs(perp - perplexity) > kTolerance) {
            throw NumericError("tsne: perplexity search for row " + std::to_string(i + 1) +
                               " did not converge after " + std::to_string(kBisectionIters) +
                               " bisection iterations; |2^H - perplexity| = " +
                               sepmetric::detail::format_double(std::abs(perp - perplexity)));
        }
        result.p_cond.row(i) = row.transpose();
        result.betas(i) = beta;
    }
    return result;
}

/// Joint affinities P = (P_cond + P_cond^T) / (2N): symmetric,
/// non-negative, zero diagonal, total mass 1.
inline Eigen::MatrixXd tsne_affinities(const Eigen::MatrixXd& features, double perplexity) {
    const ConditionalAffinities cond = tsne_conditional_affinities(features, perplexity);
    const Eigen::Index n = features.rows();
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    const double scale = 1.0 / (2.0 * static_cast<double>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v = (cond.p_cond(i, j) + cond.p_cond(j, i)) * scale;
            p(i, j) = v;
            p(j, i) = v;
        }
    }
    return p;
}

namespace detail {

/// Student-t kernel weights w_ij = (1 + ||y_i - y_j||^2)^-1 with zero
/// diagonal. Off-diagonal entries are floored at 1e-12 so coincident or
/// extremely distant points cannot zero out the normalization.
inline Eigen::MatrixXd student_t_weights(const Eigen::MatrixXd& y) {
    const Eigen::Index n = y.rows();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
            const double v =
                std::max(1.0 / (1.0 + (y.row(i) - y.row(j)).squaredNorm()), 1e-12);
            w(i, j) = v;
            w(j, i) = v;
        }
    }
    return w;
}

/// dC/dY for C = KL(p_scale * P || Q(Y)); p_scale folds in early
/// exaggeration without materializing a scaled copy of P.
inline Eigen::MatrixXd kl_gradient_scaled(const Eigen::MatrixXd& p, const Eigen::MatrixXd& y,
                                          double p_scale) {
    const Eigen::MatrixXd w = student_t_weights(y);
    const Eigen::MatrixXd q = w / w.sum();
    const Eigen::MatrixXd m = (p_scale * p - q).cwiseProduct(w);
    const Eigen::VectorXd row_sums = m.rowwise().sum();
    return 4.0 * (row_sums.asDiagonal() * y - m * y);
}

} // namespace detail

/// KL(P || Q) with Q the normalized Student-t affinities of Y.
inline double kl_objective(const Eigen::MatrixXd& p, const Eigen::MatrixXd& y) {
    const Eigen::Index n = y.rows();
    if (p.rows() != n || p.cols() != n) {
        throw ValidationError("kl_objective: P must be N x N matching Y rows");
    }
    const Eigen::MatrixXd w = detail::student_t_weights(y);
    const double log_sum = std::log(w.sum());
    double kl = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double pij = p(i, j);
            if (pij > 0.0) {
                kl += pij * (std::log(pij) - std::log(w(i, j)) + log_sum);
            }
        }
    }
    return kl;
}

/// Analytic gradient: dC/dy_i = 4 sum_j (p_ij - q_ij)(y_i - y_j)(1 + ||y_i - y_j||^2)^-1.
inline Eigen::MatrixXd kl_gradient(const Eigen::MatrixXd& p, const Eigen::MatrixXd& y) {
    if (p.rows() != y.rows() || p.cols() != y.rows()) {
        throw ValidationError("kl_gradient: P must be N x N matching Y rows");
    }
    return detail::kl_gradient_scaled(p, y, 1.0);
}

/// Exact t-SNE: momentum gradient descent on KL(P || Q) with early
/// exaggeration, from a seeded isotropic Gaussian start. Deterministic
/// given (features, config).
inline Embedding tsne_embed(const Eigen::MatrixXd& features, const TsneConfig& config) {
    const Eigen::Index n = features.rows();
    validate_tsne_config(config, n);

    const Eigen::MatrixXd p = tsne_affinities(features, config.perplexity);

    Rng rng(config.seed);
    Eigen::MatrixXd y(n, config.target_dim);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < config.target_dim; ++j) {
            y(i, j) = config.init_scale * rng.gaussian();
        }
    }

    Embedding embedding;
    embedding.method = EmbeddingMethod::tsne;
    embedding.seed = config.seed;
    embedding.tsne_config = config;
    embedding.initial_objective = kl_objective(p, y);
    embedding.objective_trace.emplace_back(0, embedding.initial_objective);

    Eigen::MatrixXd velocity = Eigen::MatrixXd::Zero(n, config.target_dim);
    for (int it = 1; it <= config.iterations; ++it) {
        const double p_scale =
            it <= config.early_exaggeration_iters ? config.early_exaggeration_factor : 1.0;
        const double momentum =
            it <= config.momentum_switch_iter ? config.initial_momentum : config.final_momentum;
        const Eigen::MatrixXd grad = detail::kl_gradient_scaled(p, y, p_scale);
        velocity = momentum * velocity - config.learning_rate * grad;
        y += velocity;
        y.rowwise() -= y.colwise().mean();
        if (!y.allFinite()) {
            throw NumericError("tsne: non-finite coordinates at iteration " + std::to_string(it));
        }
        if (it == config.early_exaggeration_iters || it % 250 == 0 || it == config.iterations) {
            if (embedding.objective_trace.back().first != it) {
                embedding.objective_trace.emplace_back(it, kl_objective(p, y));
            }
        }
    }
    embedding.points = std::move(y);
    embedding.final_objective = embedding.objective_trace.back().second;
    return embedding;
}

inline Embedding tsne_embed(const LabeledDataset& data, const TsneConfig& config) {
    return tsne_embed(data.features, config);
}

} // namespace sepmetric
