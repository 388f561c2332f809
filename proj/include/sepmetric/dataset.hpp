#pragma once

#include <sepmetric/detail/text.hpp>
#include <sepmetric/error.hpp>
#include <sepmetric/rng.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace sepmetric {

/// N feature vectors in R^D with dense class labels 0..K-1.
///
/// Instances are immutable by convention once built through
/// make_labeled_dataset, which enforces: labels dense and each class
/// present with at least 2 samples, all feature values finite.
struct LabeledDataset {
    Eigen::MatrixXd features;              // N x D
    std::vector<int> labels;               // size N, values in 0..K-1
    std::vector<std::string> class_names;  // size K, original label strings

    Eigen::Index n() const { return features.rows(); }
    Eigen::Index dim() const { return features.cols(); }
    int num_classes() const { return static_cast<int>(class_names.size()); }

    std::vector<Eigen::Index> class_counts() const {
        std::vector<Eigen::Index> counts(class_names.size(), 0);
        for (int y : labels) {
            ++counts[static_cast<std::size_t>(y)];
        }
        return counts;
    }
};

inline LabeledDataset make_labeled_dataset(Eigen::MatrixXd features,
                                           std::vector<int> labels,
                                           std::vector<std::string> class_names) {
    const Eigen::Index n = features.rows();
    if (n == 0 || features.cols() == 0) {
        throw ValidationError("dataset is empty");
    }
    if (static_cast<Eigen::Index>(labels.size()) != n) {
        throw ValidationError("label count does not match feature row count");
    }
    const int k = static_cast<int>(class_names.size());
    if (k == 0) {
        throw ValidationError("dataset has no classes");
    }
    std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
        const int y = labels[static_cast<std::size_t>(i)];
        if (y < 0 || y >= k) {
            throw ValidationError("row " + std::to_string(i + 1) + ": label id " +
                                  std::to_string(y) + " out of range 0.." + std::to_string(k - 1));
        }
        ++counts[static_cast<std::size_t>(y)];
    }
    for (int c = 0; c < k; ++c) {
        const Eigen::Index count = counts[static_cast<std::size_t>(c)];
        if (count < 2) {
            throw InsufficientClassDataError("class " + class_names[static_cast<std::size_t>(c)] +
                                             " has " + std::to_string(count) +
                                             (count == 1 ? " sample" : " samples") + ", need >= 2");
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < features.cols(); ++j) {
            if (!std::isfinite(features(i, j))) {
                throw ValidationError("row " + std::to_string(i + 1) + ", column f" +
                                      std::to_string(j) + ": non-finite feature value");
            }
        }
    }
    return LabeledDataset{std::move(features), std::move(labels), std::move(class_names)};
}

/// Loads a comma-delimited feature file with a mandatory header row.
///
/// Every column except `label_column` must be numeric. Labels are
/// re-encoded to dense ids in order of first appearance; the original
/// strings are kept as class_names. Row numbers in error messages are
/// 1-based over data rows.
inline LabeledDataset load_dataset(const std::string& path,
                                   const std::string& label_column = "label") {
    const std::vector<std::string> lines = detail::read_lines(path);
    if (lines.empty()) {
        throw ValidationError(path + ": file is empty");
    }
    const std::vector<std::string> header = detail::split_csv(lines[0]);
    Eigen::Index label_col = -1;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (detail::strip(header[c]) == label_column) {
            if (label_col >= 0) {
                throw ValidationError(path + ": duplicate label column '" + label_column + "'");
            }
            label_col = static_cast<Eigen::Index>(c);
        }
    }
    if (label_col < 0) {
        throw ValidationError(path + ": label column '" + label_column + "' not found in header");
    }
    const Eigen::Index dim = static_cast<Eigen::Index>(header.size()) - 1;
    if (dim < 1) {
        throw ValidationError(path + ": no feature columns");
    }
    const Eigen::Index n = static_cast<Eigen::Index>(lines.size()) - 1;
    if (n < 1) {
        throw ValidationError(path + ": no data rows");
    }

    Eigen::MatrixXd features(n, dim);
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(n));
    std::vector<std::string> class_names;
    std::map<std::string, int> class_ids;

    for (Eigen::Index r = 0; r < n; ++r) {
        const std::string& line = lines[static_cast<std::size_t>(r) + 1];
        const std::vector<std::string> cells = detail::split_csv(line);
        if (cells.size() != header.size()) {
            throw ValidationError(path + ": row " + std::to_string(r + 1) + " has " +
                                  std::to_string(cells.size()) + " cells, expected " +
                                  std::to_string(header.size()));
        }
        Eigen::Index f = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
            if (static_cast<Eigen::Index>(c) == label_col) {
                continue;
            }
            const std::string where = path + ": row " + std::to_string(r + 1) +
                                      ", column '" + detail::strip(header[c]) + "'";
            const double value = detail::parse_double_cell(cells[c], where);
            if (!std::isfinite(value)) {
                throw ValidationError(where + ": non-finite value '" + cells[c] + "'");
            }
            features(r, f++) = value;
        }
        const std::string name = detail::strip(cells[static_cast<std::size_t>(label_col)]);
        auto [it, inserted] = class_ids.try_emplace(name, static_cast<int>(class_names.size()));
        if (inserted) {
            class_names.push_back(name);
        }
        labels.push_back(it->second);
    }
    return make_labeled_dataset(std::move(features), std::move(labels), std::move(class_names));
}

/// Writes the canonical feature file format: header f0..f{D-1} plus the
/// label column, 17 significant digits per value.
inline void save_dataset(const LabeledDataset& data, const std::string& path,
                         const std::string& label_column = "label") {
    std::string out;
    for (Eigen::Index j = 0; j < data.dim(); ++j) {
        out += "f" + std::to_string(j) + ",";
    }
    out += label_column;
    out += '\n';
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        for (Eigen::Index j = 0; j < data.dim(); ++j) {
            out += detail::format_double(data.features(i, j));
            out += ',';
        }
        out += data.class_names[static_cast<std::size_t>(data.labels[static_cast<std::size_t>(i)])];
        out += '\n';
    }
    detail::write_text_file(path, out);
}

/// Splits class-by-class so train proportions match `train_fraction`
/// within one sample per class. Row order within each part follows the
/// original dataset. Deterministic given the seed.
inline std::pair<LabeledDataset, LabeledDataset>
stratified_split(const LabeledDataset& data, double train_fraction, std::uint64_t seed) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ValidationError("train_fraction must be in (0, 1)");
    }
    Rng rng(seed);
    std::vector<Eigen::Index> train_rows;
    std::vector<Eigen::Index> test_rows;
    for (int c = 0; c < data.num_classes(); ++c) {
        std::vector<Eigen::Index> rows;
        for (Eigen::Index i = 0; i < data.n(); ++i) {
            if (data.labels[static_cast<std::size_t>(i)] == c) {
                rows.push_back(i);
            }
        }
        const auto n_class = static_cast<Eigen::Index>(rows.size());
        const auto n_train = static_cast<Eigen::Index>(
            std::llround(train_fraction * static_cast<double>(n_class)));
        if (n_train < 2 || n_class - n_train < 2) {
            throw InsufficientClassDataError(
                "class " + data.class_names[static_cast<std::size_t>(c)] + ": fraction " +
                detail::format_double(train_fraction) + " of " + std::to_string(n_class) +
                " samples leaves fewer than 2 on one side");
        }
        rng.shuffle(rows);
        train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + n_train);
        test_rows.insert(test_rows.end(), rows.begin() + n_train, rows.end());
    }
    std::sort(train_rows.begin(), train_rows.end());
    std::sort(test_rows.begin(), test_rows.end());

    const auto take = [&data](const std::vector<Eigen::Index>& rows) {
        Eigen::MatrixXd features(static_cast<Eigen::Index>(rows.size()), data.dim());
        std::vector<int> labels;
        labels.reserve(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            features.row(static_cast<Eigen::Index>(i)) = data.features.row(rows[i]);
            labels.push_back(data.labels[static_cast<std::size_t>(rows[i])]);
        }
        return make_labeled_dataset(std::move(features), std::move(labels), data.class_names);
    };
    return {take(train_rows), take(test_rows)};
}

} // namespace sepmetric
