#pragma once

#include <sepmetric/dataset.hpp>
#include <sepmetric/detail/text.hpp>
#include <sepmetric/error.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sepmetric {

enum class EmbeddingMethod { tsne, pca };

inline const char* to_string(EmbeddingMethod method) {
    return method == EmbeddingMethod::tsne ? "tsne" : "pca";
}

/// Exact t-SNE hyperparameters. The defaults are the canonical recipe:
/// 2-D target, perplexity 30, 1000 iterations at learning rate 200,
/// early exaggeration x12 for 250 iterations, momentum 0.5 -> 0.8 at
/// iteration 250, isotropic Gaussian init with std 1e-4.
struct TsneConfig {
    int target_dim = 2;
    double perplexity = 30.0;
    int iterations = 1000;
    double learning_rate = 200.0;
    double early_exaggeration_factor = 12.0;
    int early_exaggeration_iters = 250;
    double initial_momentum = 0.5;
    double final_momentum = 0.8;
    int momentum_switch_iter = 250;
    double init_scale = 1e-4;
    std::uint64_t seed = 0;
};

inline void validate_tsne_config(const TsneConfig& config, Eigen::Index n) {
    if (config.target_dim < 1) {
        throw ValidationError("tsne: target_dim must be >= 1");
    }
    if (!(config.perplexity >= 1.0) || !(config.perplexity < static_cast<double>(n))) {
        throw ValidationError("tsne: perplexity must satisfy 1 <= perplexity < N (N=" +
                              std::to_string(n) + ")");
    }
    if (config.iterations < 1 || config.early_exaggeration_iters < 1 ||
        config.momentum_switch_iter < 1) {
        throw ValidationError("tsne: iteration counts must be positive");
    }
    if (!(config.learning_rate > 0.0)) {
        throw ValidationError("tsne: learning_rate must be positive");
    }
    if (!(config.early_exaggeration_factor >= 1.0)) {
        throw ValidationError("tsne: early_exaggeration_factor must be >= 1");
    }
    if (!(config.init_scale > 0.0)) {
        throw ValidationError("tsne: init_scale must be positive");
    }
}

/// Projected points z_n = f(x_n) plus projection metadata.
///
/// final_objective is the KL divergence for t-SNE and the retained
/// variance fraction for PCA. For t-SNE, objective_trace records the KL
/// (against the unexaggerated affinities) at iteration 0, at the end of
/// the exaggeration phase, every 250 iterations, and at the last iterate.
struct Embedding {
    Eigen::MatrixXd points; // N x d
    EmbeddingMethod method = EmbeddingMethod::tsne;
    double final_objective = 0.0;
    double initial_objective = 0.0;
    std::uint64_t seed = 0;
    TsneConfig tsne_config;
    int pca_target_dim = 0;
    std::vector<std::pair<int, double>> objective_trace;

    Eigen::Index n() const { return points.rows(); }
    Eigen::Index dim() const { return points.cols(); }
};

/// Embedding rows with their class labels, as read back from disk.
struct LabeledPoints {
    Eigen::MatrixXd points;
    std::vector<int> labels;
    std::vector<std::string> class_names;
};

/// Writes `z0,...,z{d-1},label` rows in input order, 17 significant digits.
inline void save_embedding(const Eigen::MatrixXd& points, const std::vector<int>& labels,
                           const std::vector<std::string>& class_names, const std::string& path) {
    if (points.rows() != static_cast<Eigen::Index>(labels.size())) {
        throw ValidationError("embedding rows and labels differ in count");
    }
    std::string out;
    for (Eigen::Index j = 0; j < points.cols(); ++j) {
        out += "z" + std::to_string(j) + ",";
    }
    out += "label\n";
    for (Eigen::Index i = 0; i < points.rows(); ++i) {
        for (Eigen::Index j = 0; j < points.cols(); ++j) {
            out += detail::format_double(points(i, j));
            out += ',';
        }
        out += class_names[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])];
        out += '\n';
    }
    detail::write_text_file(path, out);
}

inline LabeledPoints load_embedding(const std::string& path) {
    const std::vector<std::string> lines = detail::read_lines(path);
    if (lines.empty()) {
        throw ValidationError(path + ": file is empty");
    }
    const std::vector<std::string> header = detail::split_csv(lines[0]);
    if (header.size() < 2 || detail::strip(header.back()) != "label") {
        throw ValidationError(path + ": expected header z0,...,label");
    }
    const Eigen::Index dim = static_cast<Eigen::Index>(header.size()) - 1;
    const Eigen::Index n = static_cast<Eigen::Index>(lines.size()) - 1;
    if (n < 1) {
        throw ValidationError(path + ": no data rows");
    }
    LabeledPoints result;
    result.points.resize(n, dim);
    std::map<std::string, int> class_ids;
    for (Eigen::Index r = 0; r < n; ++r) {
        const std::vector<std::string> cells = detail::split_csv(lines[static_cast<std::size_t>(r) + 1]);
        if (cells.size() != header.size()) {
            throw ValidationError(path + ": row " + std::to_string(r + 1) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(header.size()));
        }
        for (Eigen::Index j = 0; j < dim; ++j) {
            const std::string where =
                path + ": row " + std::to_string(r + 1) + ", column 'z" + std::to_string(j) + "'";
            const double value = detail::parse_double_cell(cells[static_cast<std::size_t>(j)], where);
            if (!std::isfinite(value)) {
                throw ValidationError(where + ": non-finite value");
            }
            result.points(r, j) = value;
        }
        const std::string name = detail::strip(cells.back());
        auto [it, inserted] = class_ids.try_emplace(name, static_cast<int>(result.class_names.size()));
        if (inserted) {
            result.class_names.push_back(name);
        }
        result.labels.push_back(it->second);
    }
    return result;
}

} // namespace sepmetric
