#pragma once

#include <sepmetric/classifier.hpp>
#include <sepmetric/detail/text.hpp>
#include <sepmetric/embedding.hpp>
#include <sepmetric/error.hpp>
#include <sepmetric/gaussian_model.hpp>
#include <sepmetric/separability.hpp>

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sepmetric {

using ordered_json = nlohmann::ordered_json;

inline ordered_json embedding_meta_json(const Embedding& embedding) {
    ordered_json meta;
    meta["method"] = to_string(embedding.method);
    if (embedding.method == EmbeddingMethod::tsne) {
        const TsneConfig& c = embedding.tsne_config;
        meta["config"] = ordered_json{{"target_dim", c.target_dim},
                                      {"perplexity", c.perplexity},
                                      {"iterations", c.iterations},
                                      {"learning_rate", c.learning_rate},
                                      {"early_exaggeration_factor", c.early_exaggeration_factor},
                                      {"early_exaggeration_iters", c.early_exaggeration_iters},
                                      {"initial_momentum", c.initial_momentum},
                                      {"final_momentum", c.final_momentum},
                                      {"momentum_switch_iter", c.momentum_switch_iter},
                                      {"init_scale", c.init_scale}};
    } else {
        meta["config"] = ordered_json{{"target_dim", embedding.pca_target_dim}};
    }
    meta["seed"] = embedding.seed;
    meta["initial_objective"] = embedding.initial_objective;
    meta["final_objective"] = embedding.final_objective;
    return meta;
}

inline ordered_json models_json(const ClassGaussians& models) {
    ordered_json out = ordered_json::array();
    for (std::size_t k = 0; k < models.models.size(); ++k) {
        const ClassGaussian& model = models.models[k];
        ordered_json entry;
        entry["class"] = models.class_names[k];
        entry["mean"] = std::vector<double>(model.mean.data(), model.mean.data() + model.mean.size());
        ordered_json cov = ordered_json::array();
        for (Eigen::Index i = 0; i < model.covariance.rows(); ++i) {
            ordered_json row = ordered_json::array();
            for (Eigen::Index j = 0; j < model.covariance.cols(); ++j) {
                row.push_back(model.covariance(i, j));
            }
            cov.push_back(row);
        }
        entry["cov"] = cov;
        entry["n"] = model.sample_count;
        out.push_back(entry);
    }
    return out;
}

inline ordered_json metric_report_json(const MetricReport& report,
                                       const std::vector<std::string>& class_names,
                                       const ordered_json& embedding_meta,
                                       const ClassGaussians* models = nullptr) {
    ordered_json doc;
    doc["overall"] = report.overall;
    doc["per_class"] = report.per_class;
    ordered_json pairwise = ordered_json::array();
    for (Eigen::Index i = 0; i < report.pairwise.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < report.pairwise.cols(); ++j) {
            row.push_back(report.pairwise(i, j));
        }
        pairwise.push_back(row);
    }
    doc["pairwise"] = pairwise;
    doc["mc_stderr"] = report.mc_stderr;
    doc["n_samples"] = report.n_samples;
    doc["seed"] = report.seed;
    doc["weighted"] = report.weighted;
    doc["embedding_meta"] = embedding_meta;
    doc["class_names"] = class_names;
    if (models != nullptr) {
        doc["models"] = models_json(*models);
    }
    return doc;
}

inline ordered_json eval_result_json(const EvalResult& result,
                                     const std::vector<std::string>& class_names) {
    ordered_json doc;
    doc["accuracy"] = result.accuracy;
    ordered_json confusion = ordered_json::array();
    for (Eigen::Index i = 0; i < result.confusion.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (Eigen::Index j = 0; j < result.confusion.cols(); ++j) {
            row.push_back(result.confusion(i, j));
        }
        confusion.push_back(row);
    }
    doc["confusion"] = confusion;
    doc["classifier"] = to_string(result.kind);
    if (result.kind == ClassifierKind::knn) {
        doc["knn_neighbors"] = result.knn_neighbors;
    }
    doc["n_test"] = result.n_test;
    doc["class_names"] = class_names;
    return doc;
}

inline void write_json_file(const std::string& path, const ordered_json& doc) {
    detail::write_text_file(path, doc.dump(2) + "\n");
}

/// Confusion matrix as delimited text with class-name headers.
inline std::string confusion_csv(const Eigen::MatrixXi& confusion,
                                 const std::vector<std::string>& class_names) {
    std::string out = "true_class";
    for (const std::string& name : class_names) {
        out += "," + name;
    }
    out += '\n';
    for (Eigen::Index i = 0; i < confusion.rows(); ++i) {
        out += class_names[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < confusion.cols(); ++j) {
            out += "," + std::to_string(confusion(i, j));
        }
        out += '\n';
    }
    return out;
}

/// One row of the cross-run collation file. Either side may be missing
/// until the corresponding subcommand fills it in.
struct RecordRow {
    std::string name;
    std::optional<double> metric_a;
    std::optional<double> accuracy;
};

inline std::vector<RecordRow> load_records(const std::string& path) {
    const std::vector<std::string> lines = detail::read_lines(path);
    if (lines.empty()) {
        throw ValidationError(path + ": file is empty");
    }
    if (detail::strip(lines[0]) != "representation,A,accuracy") {
        throw ValidationError(path + ": line 1: expected header 'representation,A,accuracy'");
    }
    std::vector<RecordRow> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const std::string where = path + ": line " + std::to_string(i + 1);
        const std::vector<std::string> cells = detail::split_csv(lines[i]);
        if (cells.size() != 3) {
            throw ValidationError(where + ": expected 3 fields, got " +
                                  std::to_string(cells.size()));
        }
        RecordRow row;
        row.name = detail::strip(cells[0]);
        if (row.name.empty()) {
            throw ValidationError(where + ": empty representation name");
        }
        if (!detail::strip(cells[1]).empty()) {
            row.metric_a = detail::parse_double_cell(cells[1], where + ", column 'A'");
        }
        if (!detail::strip(cells[2]).empty()) {
            row.accuracy = detail::parse_double_cell(cells[2], where + ", column 'accuracy'");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline void save_records(const std::string& path, const std::vector<RecordRow>& rows) {
    std::string out = "representation,A,accuracy\n";
    for (const RecordRow& row : rows) {
        out += row.name;
        out += ',';
        if (row.metric_a) {
            out += detail::format_double(*row.metric_a);
        }
        out += ',';
        if (row.accuracy) {
            out += detail::format_double(*row.accuracy);
        }
        out += '\n';
    }
    detail::write_text_file(path, out);
}

enum class RecordField { metric_a, accuracy };

/// Updates (or appends) one representation's A or accuracy value,
/// creating the file on first use. Row order is first-appearance.
inline void upsert_record(const std::string& path, const std::string& name, RecordField field,
                          double value) {
    std::vector<RecordRow> rows;
    if (std::filesystem::exists(path)) {
        rows = load_records(path);
    }
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&name](const RecordRow& row) { return row.name == name; });
    if (it == rows.end()) {
        rows.push_back(RecordRow{name, std::nullopt, std::nullopt});
        it = rows.end() - 1;
    }
    if (field == RecordField::metric_a) {
        it->metric_a = value;
    } else {
        it->accuracy = value;
    }
    save_records(path, rows);
}

/// All rows must carry both values; reports the first incomplete row.
inline std::vector<RepresentationRecord> complete_records(const std::vector<RecordRow>& rows,
                                                          const std::string& path) {
    std::vector<RepresentationRecord> records;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].metric_a || !rows[i].accuracy) {
            throw ValidationError(path + ": line " + std::to_string(i + 2) + ": record '" +
                                  rows[i].name + "' is missing " +
                                  (rows[i].metric_a ? "accuracy" : "A"));
        }
        records.push_back(RepresentationRecord{rows[i].name, *rows[i].metric_a, *rows[i].accuracy});
    }
    return records;
}

} // namespace sepmetric
