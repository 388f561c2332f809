#pragma once

#include <sepmetric/dataset.hpp>
#include <sepmetric/error.hpp>
#include <sepmetric/gaussian_model.hpp>
#include <sepmetric/rng.hpp>

#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

namespace sepmetric {

/// One mixture component of a synthetic dataset.
struct SynthClassSpec {
    std::string name;
    Eigen::VectorXd mean;
    Eigen::MatrixXd cov;
    Eigen::Index count = 0;
};

/// Desk-scale substitute for real feature corpora: labeled draws from
/// explicit per-class Gaussians.
struct SynthSpec {
    std::vector<SynthClassSpec> classes;
    std::uint64_t seed = 0;
};

inline void validate_synth_spec(const SynthSpec& spec) {
    if (spec.classes.empty()) {
        throw ValidationError("synth spec: no classes");
    }
    const Eigen::Index d = spec.classes.front().mean.size();
    if (d < 1) {
        throw ValidationError("synth spec: zero-dimensional mean");
    }
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        const SynthClassSpec& cls = spec.classes[c];
        if (cls.mean.size() != d) {
            throw ValidationError("synth spec: class " + cls.name + " has dimension " +
                                  std::to_string(cls.mean.size()) + ", expected " + std::to_string(d));
        }
        if (cls.cov.rows() != d || cls.cov.cols() != d) {
            throw ValidationError("synth spec: class " + cls.name + " covariance shape mismatch");
        }
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = i + 1; j < d; ++j) {
                if (std::abs(cls.cov(i, j) - cls.cov(j, i)) > 1e-12) {
                    throw ValidationError("synth spec: class " + cls.name +
                                          " covariance is not symmetric within 1e-12");
                }
            }
        }
        if (cls.count < 2) {
            throw ValidationError("synth spec: class " + cls.name + " has n=" +
                                  std::to_string(cls.count) + ", need >= 2");
        }
    }
}

/// Draws the classes in order from one seeded generator; deterministic
/// given the spec. Throws on a non-positive-definite covariance.
inline LabeledDataset synth_gaussian_mixture(const SynthSpec& spec) {
    validate_synth_spec(spec);
    const Eigen::Index d = spec.classes.front().mean.size();
    Eigen::Index total = 0;
    for (const SynthClassSpec& cls : spec.classes) {
        total += cls.count;
    }
    Eigen::MatrixXd features(total, d);
    std::vector<int> labels;
    labels.reserve(static_cast<std::size_t>(total));
    std::vector<std::string> class_names;

    Rng rng(spec.seed);
    Eigen::Index row = 0;
    for (std::size_t c = 0; c < spec.classes.size(); ++c) {
        const SynthClassSpec& cls = spec.classes[c];
        class_names.push_back(cls.name);
        const ClassGaussian model =
            make_class_gaussian(cls.mean, cls.cov, static_cast<int>(c), cls.count);
        for (Eigen::Index i = 0; i < cls.count; ++i) {
            features.row(row++) = sample(model, rng).transpose();
            labels.push_back(static_cast<int>(c));
        }
    }
    return make_labeled_dataset(std::move(features), std::move(labels), std::move(class_names));
}

/// Parses the spec document: {"seed": u64, "classes": [{"mean": [...],
/// "cov": [[...]], "n": int, "name": optional}, ...]}.
inline SynthSpec parse_synth_spec(const nlohmann::json& doc) {
    SynthSpec spec;
    try {
        spec.seed = doc.value("seed", std::uint64_t{0});
        if (!doc.contains("classes") || !doc["classes"].is_array()) {
            throw ValidationError("synth spec: missing 'classes' array");
        }
        int index = 0;
        for (const nlohmann::json& entry : doc["classes"]) {
            SynthClassSpec cls;
            cls.name = entry.value("name", "class_" + std::to_string(index));
            const auto& mean = entry.at("mean");
            cls.mean.resize(static_cast<Eigen::Index>(mean.size()));
            for (std::size_t i = 0; i < mean.size(); ++i) {
                cls.mean(static_cast<Eigen::Index>(i)) = mean.at(i).get<double>();
            }
            const auto& cov = entry.at("cov");
            const auto d = static_cast<Eigen::Index>(cov.size());
            cls.cov.resize(d, d);
            for (Eigen::Index i = 0; i < d; ++i) {
                const auto& cov_row = cov.at(static_cast<std::size_t>(i));
                if (static_cast<Eigen::Index>(cov_row.size()) != d) {
                    throw ValidationError("synth spec: class " + cls.name + " cov row " +
                                          std::to_string(i) + " has wrong length");
                }
                for (Eigen::Index j = 0; j < d; ++j) {
                    cls.cov(i, j) = cov_row.at(static_cast<std::size_t>(j)).get<double>();
                }
            }
            cls.count = entry.at("n").get<Eigen::Index>();
            spec.classes.push_back(std::move(cls));
            ++index;
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("synth spec: ") + e.what());
    }
    validate_synth_spec(spec);
    return spec;
}

inline SynthSpec load_synth_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open file: " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(path + ": " + e.what());
    }
    return parse_synth_spec(doc);
}

} // namespace sepmetric
