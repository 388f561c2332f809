#pragma once

#include <sepmetric/error.hpp>
#include <sepmetric/gaussian_model.hpp>
#include <sepmetric/rng.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace sepmetric {

/// Per-class accuracy estimates A_k over dominance regions, their mean
/// A, the pairwise confusion matrix A_{k,k'}, and Monte Carlo standard
/// errors. pairwise(k, k') is the probability mass class k's density
/// places on class k''s dominance region; its diagonal equals per_class
/// exactly because both come from the same draws.
struct MetricReport {
    std::vector<double> per_class;
    double overall = 0.0;
    Eigen::MatrixXd pairwise;
    std::vector<double> mc_stderr;
    long long n_samples = 0;
    std::uint64_t seed = 0;
    bool weighted = false;
};

namespace detail {

inline void check_class_id(const ClassGaussians& models, int k, const char* op) {
    if (k < 0 || k >= models.num_classes()) {
        throw ValidationError(std::string(op) + ": class id " + std::to_string(k) +
                              " out of range 0.." + std::to_string(models.num_classes() - 1));
    }
}

/// Draws n_samples from class k's Gaussian and tallies, per class k',
/// how many draws have their strict log-density argmax at k'. Draws
/// with a tied maximum are not counted anywhere.
inline std::vector<long long> dominance_counts(const ClassGaussians& models, int k,
                                               long long n_samples, std::uint64_t seed) {
    check_class_id(models, k, "dominance_counts");
    if (n_samples < 1000) {
        throw ValidationError("n_samples must be >= 1000");
    }
    const int num_classes = models.num_classes();
    std::vector<long long> counts(static_cast<std::size_t>(num_classes), 0);
    Rng rng(seed);
    const ClassGaussian& source = models.models[static_cast<std::size_t>(k)];
    for (long long s = 0; s < n_samples; ++s) {
        const Eigen::VectorXd z = sample(source, rng);
        double best = -std::numeric_limits<double>::infinity();
        int best_class = -1;
        bool unique = true;
        for (int c = 0; c < num_classes; ++c) {
            const double value = log_pdf(models.models[static_cast<std::size_t>(c)], z);
            if (value > best) {
                best = value;
                best_class = c;
                unique = true;
            } else if (value == best) {
                unique = false;
            }
        }
        if (unique) {
            ++counts[static_cast<std::size_t>(best_class)];
        }
    }
    return counts;
}

inline double binomial_stderr(double p, long long n) {
    return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

} // namespace detail

/// Monte Carlo estimate of A_k: the mass of N(mu_k, Sigma_k) on the
/// region where class k's density strictly exceeds every other class's.
/// Returns (A_k, binomial standard error). Deterministic given seed.
inline std::pair<double, double> estimate_class_accuracy(const ClassGaussians& models, int k,
                                                         long long n_samples,
                                                         std::uint64_t seed) {
    const std::vector<long long> counts = detail::dominance_counts(models, k, n_samples, seed);
    const double a = static_cast<double>(counts[static_cast<std::size_t>(k)]) /
                     static_cast<double>(n_samples);
    return {a, detail::binomial_stderr(a, n_samples)};
}

/// A_{k,k'}: the fraction of draws from class k whose strict argmax is
/// class k'. With k == k' this is estimate_class_accuracy.
inline double pairwise_confusion(const ClassGaussians& models, int k, int k_prime,
                                 long long n_samples, std::uint64_t seed) {
    detail::check_class_id(models, k_prime, "pairwise_confusion");
    const std::vector<long long> counts = detail::dominance_counts(models, k, n_samples, seed);
    return static_cast<double>(counts[static_cast<std::size_t>(k_prime)]) /
           static_cast<double>(n_samples);
}

/// Runs the per-class estimates with derived seeds (seed + k) and fills
/// per_class, pairwise, and mc_stderr jointly from the same draws.
/// overall is the unweighted mean of A_k by default; with weighted =
/// true it is weighted by each model's sample count.
inline MetricReport estimate_metric(const ClassGaussians& models, long long n_samples,
                                    std::uint64_t seed, bool weighted = false) {
    const int num_classes = models.num_classes();
    if (num_classes < 1) {
        throw ValidationError("estimate_metric: no class models");
    }
    MetricReport report;
    report.n_samples = n_samples;
    report.seed = seed;
    report.weighted = weighted;
    report.per_class.resize(static_cast<std::size_t>(num_classes));
    report.mc_stderr.resize(static_cast<std::size_t>(num_classes));
    report.pairwise.resize(num_classes, num_classes);
    for (int k = 0; k < num_classes; ++k) {
        const std::vector<long long> counts =
            detail::dominance_counts(models, k, n_samples, seed + static_cast<std::uint64_t>(k));
        for (int c = 0; c < num_classes; ++c) {
            report.pairwise(k, c) = static_cast<double>(counts[static_cast<std::size_t>(c)]) /
                                    static_cast<double>(n_samples);
        }
        report.per_class[static_cast<std::size_t>(k)] = report.pairwise(k, k);
        report.mc_stderr[static_cast<std::size_t>(k)] =
            detail::binomial_stderr(report.pairwise(k, k), n_samples);
    }
    if (weighted) {
        double total = 0.0;
        double acc = 0.0;
        for (int k = 0; k < num_classes; ++k) {
            const auto count =
                static_cast<double>(models.models[static_cast<std::size_t>(k)].sample_count);
            if (!(count > 0.0)) {
                throw ValidationError("estimate_metric: weighted mean needs per-class sample counts");
            }
            total += count;
            acc += count * report.per_class[static_cast<std::size_t>(k)];
        }
        report.overall = acc / total;
    } else {
        double acc = 0.0;
        for (double a : report.per_class) {
            acc += a;
        }
        report.overall = acc / static_cast<double>(num_classes);
    }
    return report;
}

/// Deterministic 2-D oracle for A_k: midpoint Riemann sum of class k's
/// density over the cells of a box covering all means +- 8 * the largest
/// class standard deviation, keeping only cells whose center lies in
/// class k's strict dominance region.
inline double grid_quadrature_accuracy(const ClassGaussians& models, int k, int resolution) {
    detail::check_class_id(models, k, "grid_quadrature_accuracy");
    if (models.dim() != 2) {
        throw ValidationError("grid_quadrature_accuracy: only defined for d = 2");
    }
    if (resolution < 100) {
        throw ValidationError("grid_quadrature_accuracy: resolution must be >= 100");
    }
    const int num_classes = models.num_classes();
    double sigma_max = 0.0;
    Eigen::Vector2d lo = Eigen::Vector2d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector2d hi = -lo;
    for (const ClassGaussian& model : models.models) {
        const double a = model.covariance(0, 0);
        const double b = model.covariance(0, 1);
        const double c = model.covariance(1, 1);
        const double lambda_max =
            0.5 * (a + c) + std::sqrt(0.25 * (a - c) * (a - c) + b * b);
        sigma_max = std::max(sigma_max, std::sqrt(lambda_max));
        lo = lo.cwiseMin(model.mean);
        hi = hi.cwiseMax(model.mean);
    }
    lo.array() -= 8.0 * sigma_max;
    hi.array() += 8.0 * sigma_max;

    const double dx = (hi.x() - lo.x()) / resolution;
    const double dy = (hi.y() - lo.y()) / resolution;
    std::vector<double> log_values(static_cast<std::size_t>(num_classes));
    Eigen::VectorXd z(2);
    double mass = 0.0;
    for (int i = 0; i < resolution; ++i) {
        z(0) = lo.x() + (i + 0.5) * dx;
        for (int j = 0; j < resolution; ++j) {
            z(1) = lo.y() + (j + 0.5) * dy;
            double best = -std::numeric_limits<double>::infinity();
            int best_class = -1;
            bool unique = true;
            for (int c = 0; c < num_classes; ++c) {
                const double value = log_pdf(models.models[static_cast<std::size_t>(c)], z);
                log_values[static_cast<std::size_t>(c)] = value;
                if (value > best) {
                    best = value;
                    best_class = c;
                    unique = true;
                } else if (value == best) {
                    unique = false;
                }
            }
            if (unique && best_class == k) {
                mass += std::exp(log_values[static_cast<std::size_t>(k)]);
            }
        }
    }
    return mass * dx * dy;
}

/// Standard Pearson correlation coefficient, clamped to [-1, 1].
inline double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) {
        throw ValidationError("pearson_correlation: length mismatch");
    }
    if (a.size() < 2) {
        throw ValidationError("pearson_correlation: need at least 2 points");
    }
    const auto n = static_cast<double>(a.size());
    double mean_a = 0.0;
    double mean_b = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        mean_a += a[i];
        mean_b += b[i];
    }
    mean_a /= n;
    mean_b /= n;
    double ss_a = 0.0;
    double ss_b = 0.0;
    double s_ab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - mean_a;
        const double db = b[i] - mean_b;
        ss_a += da * da;
        ss_b += db * db;
        s_ab += da * db;
    }
    if (ss_a == 0.0 || ss_b == 0.0) {
        throw ValidationError("pearson_correlation: constant input vector");
    }
    return std::clamp(s_ab / std::sqrt(ss_a * ss_b), -1.0, 1.0);
}

} // namespace sepmetric
