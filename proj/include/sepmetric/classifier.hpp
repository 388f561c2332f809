#pragma once

#include <sepmetric/dataset.hpp>
#include <sepmetric/error.hpp>
#include <sepmetric/gaussian_model.hpp>
#include <sepmetric/separability.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace sepmetric {

enum class ClassifierKind { gaussian_discriminant, knn };

inline const char* to_string(ClassifierKind kind) {
    return kind == ClassifierKind::gaussian_discriminant ? "gaussian_discriminant" : "knn";
}

/// Deterministic reference classifier used to produce the test
/// accuracies that validate the metric. Gaussian discriminant fits
/// per-class Gaussians in the original feature space (same ridge as the
/// class models) plus log priors; knn keeps the training set.
struct Classifier {
    ClassifierKind kind = ClassifierKind::gaussian_discriminant;
    std::vector<std::string> class_names;
    // gaussian_discriminant
    ClassGaussians models;
    std::vector<double> log_priors;
    // knn
    int neighbors = 5;
    Eigen::MatrixXd train_features;
    std::vector<int> train_labels;

    int num_classes() const { return static_cast<int>(class_names.size()); }
    Eigen::Index dim() const {
        return kind == ClassifierKind::gaussian_discriminant ? models.dim()
                                                             : train_features.cols();
    }
};

inline Classifier fit_reference_classifier(const LabeledDataset& train, ClassifierKind kind,
                                           int knn_neighbors = 5) {
    Classifier classifier;
    classifier.kind = kind;
    classifier.class_names = train.class_names;
    if (kind == ClassifierKind::gaussian_discriminant) {
        classifier.models = fit_class_gaussians(train.features, train.labels, train.class_names);
        const auto counts = train.class_counts();
        for (Eigen::Index count : counts) {
            classifier.log_priors.push_back(
                std::log(static_cast<double>(count) / static_cast<double>(train.n())));
        }
    } else {
        if (knn_neighbors < 1) {
            throw ValidationError("knn: neighbor count must be >= 1");
        }
        classifier.neighbors = knn_neighbors;
        classifier.train_features = train.features;
        classifier.train_labels = train.labels;
    }
    return classifier;
}

namespace detail {

inline int predict_gda(const Classifier& classifier, const Eigen::VectorXd& x) {
    double best = -std::numeric_limits<double>::infinity();
    int best_class = 0;
    for (int c = 0; c < classifier.num_classes(); ++c) {
        const double score = classifier.log_priors[static_cast<std::size_t>(c)] +
                             log_pdf(classifier.models.models[static_cast<std::size_t>(c)], x);
        if (score > best) { // ties keep the lowest class id
            best = score;
            best_class = c;
        }
    }
    return best_class;
}

inline int predict_knn(const Classifier& classifier, const Eigen::VectorXd& x) {
    const Eigen::Index n = classifier.train_features.rows();
    const int k = std::min<int>(classifier.neighbors, static_cast<int>(n));
    std::vector<std::pair<double, Eigen::Index>> distances;
    distances.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        distances.emplace_back((classifier.train_features.row(i) - x.transpose()).squaredNorm(), i);
    }
    std::partial_sort(distances.begin(), distances.begin() + k, distances.end());

    const int num_classes = classifier.num_classes();
    std::vector<int> votes(static_cast<std::size_t>(num_classes), 0);
    std::vector<double> nearest(static_cast<std::size_t>(num_classes),
                                std::numeric_limits<double>::infinity());
    for (int i = 0; i < k; ++i) {
        const int label =
            classifier.train_labels[static_cast<std::size_t>(distances[static_cast<std::size_t>(i)].second)];
        ++votes[static_cast<std::size_t>(label)];
        nearest[static_cast<std::size_t>(label)] =
            std::min(nearest[static_cast<std::size_t>(label)], distances[static_cast<std::size_t>(i)].first);
    }
    // Majority vote; vote ties go to the class with the nearer selected
    // neighbor, then to the lower class id.
    int best_class = 0;
    for (int c = 1; c < num_classes; ++c) {
        const bool wins = votes[static_cast<std::size_t>(c)] > votes[static_cast<std::size_t>(best_class)] ||
                          (votes[static_cast<std::size_t>(c)] == votes[static_cast<std::size_t>(best_class)] &&
                           nearest[static_cast<std::size_t>(c)] < nearest[static_cast<std::size_t>(best_class)]);
        if (wins) {
            best_class = c;
        }
    }
    return best_class;
}

} // namespace detail

inline int predict_one(const Classifier& classifier, const Eigen::VectorXd& x) {
    if (x.size() != classifier.dim()) {
        throw ValidationError("predict: feature dimension " + std::to_string(x.size()) +
                              " does not match training dimension " +
                              std::to_string(classifier.dim()));
    }
    return classifier.kind == ClassifierKind::gaussian_discriminant
               ? detail::predict_gda(classifier, x)
               : detail::predict_knn(classifier, x);
}

inline std::vector<int> predict(const Classifier& classifier, const Eigen::MatrixXd& features) {
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(features.rows()));
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
        labels.push_back(predict_one(classifier, features.row(i).transpose()));
    }
    return labels;
}

/// Entry (i, j) counts samples with true class i predicted as j.
inline Eigen::MatrixXi confusion_matrix(const std::vector<int>& predicted,
                                        const std::vector<int>& truth, int num_classes) {
    if (predicted.size() != truth.size()) {
        throw ValidationError("confusion_matrix: length mismatch");
    }
    Eigen::MatrixXi confusion = Eigen::MatrixXi::Zero(num_classes, num_classes);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i];
        const int p = predicted[i];
        if (t < 0 || t >= num_classes || p < 0 || p >= num_classes) {
            throw ValidationError("confusion_matrix: label out of range at index " +
                                  std::to_string(i));
        }
        ++confusion(t, p);
    }
    return confusion;
}

/// Reference-classifier accuracy and confusion matrix on a test set.
struct EvalResult {
    double accuracy = 0.0;
    Eigen::MatrixXi confusion;
    ClassifierKind kind = ClassifierKind::gaussian_discriminant;
    int knn_neighbors = 0;
    Eigen::Index n_test = 0;
};

inline EvalResult evaluate(const Classifier& classifier, const LabeledDataset& test) {
    if (test.dim() != classifier.dim()) {
        throw ValidationError("evaluate: test dimension " + std::to_string(test.dim()) +
                              " does not match training dimension " +
                              std::to_string(classifier.dim()));
    }
    if (test.num_classes() != classifier.num_classes()) {
        throw ValidationError("evaluate: test has " + std::to_string(test.num_classes()) +
                              " classes, classifier was trained on " +
                              std::to_string(classifier.num_classes()));
    }
    // Train and test files encode ids by first appearance, so align the
    // test labels to the classifier's class order by name.
    std::vector<int> id_map(test.class_names.size());
    for (std::size_t c = 0; c < test.class_names.size(); ++c) {
        const auto it = std::find(classifier.class_names.begin(), classifier.class_names.end(),
                                  test.class_names[c]);
        if (it == classifier.class_names.end()) {
            throw ValidationError("evaluate: test class '" + test.class_names[c] +
                                  "' is not a training class");
        }
        id_map[c] = static_cast<int>(it - classifier.class_names.begin());
    }
    std::vector<int> truth;
    truth.reserve(test.labels.size());
    for (int y : test.labels) {
        truth.push_back(id_map[static_cast<std::size_t>(y)]);
    }
    EvalResult result;
    result.kind = classifier.kind;
    result.knn_neighbors = classifier.kind == ClassifierKind::knn ? classifier.neighbors : 0;
    result.n_test = test.n();
    const std::vector<int> predicted = predict(classifier, test.features);
    result.confusion = confusion_matrix(predicted, truth, classifier.num_classes());
    result.accuracy = static_cast<double>(result.confusion.trace()) /
                      static_cast<double>(result.n_test);
    return result;
}

/// One representation's (metric A, test accuracy) pair.
struct RepresentationRecord {
    std::string name;
    double metric_a = 0.0;
    double test_accuracy = 0.0;
};

struct CorrelationSummary {
    double r = 0.0;
    std::vector<RepresentationRecord> records;
};

/// Pearson r between the metric values and the test accuracies across
/// representations. Refuses fewer than 3 records.
inline CorrelationSummary correlate_runs(const std::vector<RepresentationRecord>& records) {
    if (records.size() < 3) {
        throw ValidationError("correlate_runs: need at least 3 records, got " +
                              std::to_string(records.size()));
    }
    std::vector<double> metric_values;
    std::vector<double> accuracies;
    for (const RepresentationRecord& record : records) {
        if (!(record.metric_a >= 0.0 && record.metric_a <= 1.0) ||
            !(record.test_accuracy >= 0.0 && record.test_accuracy <= 1.0)) {
            throw ValidationError("correlate_runs: record '" + record.name +
                                  "' has values outside [0, 1]");
        }
        metric_values.push_back(record.metric_a);
        accuracies.push_back(record.test_accuracy);
    }
    CorrelationSummary summary;
    summary.records = records;
    summary.r = pearson_correlation(metric_values, accuracies);
    return summary;
}

} // namespace sepmetric
