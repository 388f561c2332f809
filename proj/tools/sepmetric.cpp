// sepmetric: predict the test accuracy a feature representation will
// yield, from its training set alone. Subcommands wire ingestion ->
// embedding -> class models -> separability metric -> evaluation.

#include <sepmetric/sepmetric.hpp>

#include <CLI11.hpp>

#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace sepmetric;

std::uint64_t default_seed() {
    if (const char* env = std::getenv("SEPMETRIC_SEED")) {
        std::uint64_t value = 0;
        const std::string text(env);
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size()) {
            throw ValidationError("SEPMETRIC_SEED is not a non-negative integer: '" + text + "'");
        }
        return value;
    }
    return 42;
}

struct EmbeddingOptions {
    std::string method = "tsne";
    int dim = 2;
    TsneConfig tsne;
    std::optional<std::uint64_t> seed;

    std::uint64_t resolve_seed() const { return seed ? *seed : default_seed(); }
};

void add_embedding_flags(CLI::App* cmd, EmbeddingOptions& opts) {
    cmd->add_option("--method", opts.method, "Projection: tsne or pca")
        ->check(CLI::IsMember({"tsne", "pca"}))
        ->capture_default_str();
    cmd->add_option("--dim", opts.dim, "Target dimension")->capture_default_str();
    cmd->add_option("--perplexity", opts.tsne.perplexity, "t-SNE perplexity")
        ->capture_default_str();
    cmd->add_option("--iterations", opts.tsne.iterations, "t-SNE iterations")
        ->capture_default_str();
    cmd->add_option("--learning-rate", opts.tsne.learning_rate, "t-SNE learning rate")
        ->capture_default_str();
    cmd->add_option("--exaggeration", opts.tsne.early_exaggeration_factor,
                    "Early exaggeration factor")
        ->capture_default_str();
    cmd->add_option("--exaggeration-iters", opts.tsne.early_exaggeration_iters,
                    "Early exaggeration iterations")
        ->capture_default_str();
    cmd->add_option("--momentum-initial", opts.tsne.initial_momentum, "Initial momentum")
        ->capture_default_str();
    cmd->add_option("--momentum-final", opts.tsne.final_momentum, "Final momentum")
        ->capture_default_str();
    cmd->add_option("--momentum-switch-iter", opts.tsne.momentum_switch_iter,
                    "Iteration at which momentum switches")
        ->capture_default_str();
    cmd->add_option("--init-scale", opts.tsne.init_scale, "Std of the Gaussian init")
        ->capture_default_str();
    cmd->add_option("--seed", opts.seed, "RNG seed (default: SEPMETRIC_SEED or 42)");
}

Embedding run_projection(const LabeledDataset& data, const EmbeddingOptions& opts) {
    if (opts.method == "tsne") {
        TsneConfig config = opts.tsne;
        config.target_dim = opts.dim;
        config.seed = opts.resolve_seed();
        return tsne_embed(data, config);
    }
    return pca_project(data, opts.dim);
}

// ---------------------------------------------------------------- embed

struct EmbedArgs {
    std::string features;
    std::string label_column = "label";
    std::string out;
    std::string meta;
    EmbeddingOptions embedding;
};

void run_embed(const EmbedArgs& args) {
    const LabeledDataset data = load_dataset(args.features, args.label_column);
    const Embedding embedding = run_projection(data, args.embedding);
    save_embedding(embedding.points, data.labels, data.class_names, args.out);
    const std::string meta_path = args.meta.empty() ? args.out + ".meta.json" : args.meta;
    write_json_file(meta_path, embedding_meta_json(embedding));
}

// ------------------------------------------------------------- estimate

struct EstimateArgs {
    std::string features;
    std::string embedding_file;
    std::string label_column = "label";
    std::string out = "metric_report.json";
    long long samples = 100000;
    bool weighted = false;
    std::string collate;
    std::string name;
    EmbeddingOptions embedding;
};

void run_estimate(const EstimateArgs& args) {
    Eigen::MatrixXd points;
    std::vector<int> labels;
    std::vector<std::string> class_names;
    ordered_json meta;

    if (!args.embedding_file.empty()) {
        LabeledPoints loaded = load_embedding(args.embedding_file);
        points = std::move(loaded.points);
        labels = std::move(loaded.labels);
        class_names = std::move(loaded.class_names);
        const std::string sidecar = args.embedding_file + ".meta.json";
        if (std::filesystem::exists(sidecar)) {
            std::ifstream in(sidecar);
            try {
                in >> meta;
            } catch (const nlohmann::json::exception& e) {
                throw ValidationError(sidecar + ": " + e.what());
            }
        } else {
            meta["method"] = "file";
        }
        meta["path"] = args.embedding_file;
    } else {
        const LabeledDataset data = load_dataset(args.features, args.label_column);
        const Embedding embedding = run_projection(data, args.embedding);
        points = embedding.points;
        labels = data.labels;
        class_names = data.class_names;
        meta = embedding_meta_json(embedding);
    }

    const ClassGaussians models = fit_class_gaussians(points, labels, class_names);
    const std::uint64_t seed = args.embedding.resolve_seed();
    const MetricReport report = estimate_metric(models, args.samples, seed, args.weighted);
    write_json_file(args.out, metric_report_json(report, class_names, meta, &models));
    if (!args.collate.empty()) {
        upsert_record(args.collate, args.name, RecordField::metric_a, report.overall);
    }
    std::printf("A=%.17g\n", report.overall);
}

// ----------------------------------------------------------------- eval

struct EvalArgs {
    std::string train;
    std::string test;
    std::string label_column = "label";
    std::string classifier = "gaussian_discriminant";
    int knn_neighbors = 5;
    std::string out = "eval_report.json";
    std::string confusion_out;
    std::string collate;
    std::string name;
};

void run_eval(const EvalArgs& args) {
    const LabeledDataset train = load_dataset(args.train, args.label_column);
    const LabeledDataset test = load_dataset(args.test, args.label_column);
    if (train.dim() != test.dim()) {
        throw ValidationError("train has D=" + std::to_string(train.dim()) + " but test has D=" +
                              std::to_string(test.dim()));
    }
    if (train.num_classes() != test.num_classes()) {
        throw ValidationError("train has K=" + std::to_string(train.num_classes()) +
                              " but test has K=" + std::to_string(test.num_classes()));
    }
    const ClassifierKind kind = args.classifier == "knn" ? ClassifierKind::knn
                                                         : ClassifierKind::gaussian_discriminant;
    const Classifier classifier = fit_reference_classifier(train, kind, args.knn_neighbors);
    const EvalResult result = evaluate(classifier, test);
    write_json_file(args.out, eval_result_json(result, train.class_names));
    if (!args.confusion_out.empty()) {
        detail::write_text_file(args.confusion_out,
                                confusion_csv(result.confusion, train.class_names));
    }
    if (!args.collate.empty()) {
        upsert_record(args.collate, args.name, RecordField::accuracy, result.accuracy);
    }
    std::printf("accuracy=%.17g\n", result.accuracy);
}

// -------------------------------------------------------------- compare

struct CompareArgs {
    std::string records;
    std::string out = "correlation_report.json";
    std::string plot = "correlation_scatter.svg";
};

void run_compare(const CompareArgs& args) {
    const std::vector<RecordRow> rows = load_records(args.records);
    const std::vector<RepresentationRecord> records = complete_records(rows, args.records);
    const CorrelationSummary summary = correlate_runs(records);

    ordered_json doc;
    doc["r"] = summary.r;
    ordered_json table = ordered_json::array();
    for (const RepresentationRecord& record : summary.records) {
        table.push_back(ordered_json{{"representation", record.name},
                                     {"A", record.metric_a},
                                     {"accuracy", record.test_accuracy}});
    }
    doc["records"] = table;
    write_json_file(args.out, doc);
    write_correlation_scatter_svg(args.plot, summary.records);
    std::printf("r=%.17g\n", summary.r);
}

// ----------------------------------------------------------------- plot

struct PlotArgs {
    std::string embedding;
    std::string out;
};

void run_plot(const PlotArgs& args) {
    const LabeledPoints loaded = load_embedding(args.embedding);
    write_embedding_scatter_svg(args.out, loaded.points, loaded.labels, loaded.class_names);
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string spec;
    std::string out;
    std::string train_out;
    std::string test_out;
    double train_fraction = 0.5;
    std::optional<std::uint64_t> split_seed;
};

void run_synth(const SynthArgs& args) {
    const SynthSpec spec = load_synth_spec(args.spec);
    const LabeledDataset data = synth_gaussian_mixture(spec);
    save_dataset(data, args.out);
    if (!args.train_out.empty()) {
        const std::uint64_t seed = args.split_seed ? *args.split_seed : spec.seed;
        const auto [train, test] = stratified_split(data, args.train_fraction, seed);
        save_dataset(train, args.train_out);
        save_dataset(test, args.test_out);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Estimate the test accuracy a feature representation will yield, "
                 "from its training set alone"};
    app.require_subcommand(1);

    EmbedArgs embed_args;
    CLI::App* embed = app.add_subcommand("embed", "Project a feature file to low dimension");
    embed->add_option("--features", embed_args.features, "Feature file (csv with header)")
        ->required()
        ->check(CLI::ExistingFile);
    embed->add_option("--label-column", embed_args.label_column, "Label column name")
        ->capture_default_str();
    embed->add_option("--out", embed_args.out, "Embedding output file")->required();
    embed->add_option("--meta", embed_args.meta, "Metadata sidecar path (default: <out>.meta.json)");
    add_embedding_flags(embed, embed_args.embedding);

    EstimateArgs estimate_args;
    CLI::App* estimate =
        app.add_subcommand("estimate", "One-shot metric A estimate from training data");
    CLI::Option* est_features =
        estimate->add_option("--features", estimate_args.features, "Feature file (csv with header)")
            ->check(CLI::ExistingFile);
    estimate
        ->add_option("--embedding-file", estimate_args.embedding_file,
                     "Reuse an existing embedding instead of projecting")
        ->check(CLI::ExistingFile)
        ->excludes(est_features);
    estimate->add_option("--label-column", estimate_args.label_column, "Label column name")
        ->capture_default_str();
    estimate->add_option("--samples", estimate_args.samples, "Monte Carlo samples per class")
        ->capture_default_str();
    estimate->add_flag("--weighted", estimate_args.weighted,
                       "Weight the overall metric by class sample counts");
    estimate->add_option("--out", estimate_args.out, "Metric report path")->capture_default_str();
    CLI::Option* est_collate = estimate->add_option(
        "--collate", estimate_args.collate, "Records file to update with this run's A");
    estimate->add_option("--name", estimate_args.name, "Representation name for --collate")
        ->needs(est_collate);
    est_collate->needs(estimate->get_option("--name"));
    add_embedding_flags(estimate, estimate_args.embedding);

    EvalArgs eval_args;
    CLI::App* eval_cmd = app.add_subcommand("eval", "Reference-classifier accuracy on a test set");
    eval_cmd->add_option("--train", eval_args.train, "Training feature file")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--test", eval_args.test, "Test feature file")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--label-column", eval_args.label_column, "Label column name")
        ->capture_default_str();
    eval_cmd->add_option("--classifier", eval_args.classifier, "gaussian_discriminant or knn")
        ->check(CLI::IsMember({"gaussian_discriminant", "knn"}))
        ->capture_default_str();
    eval_cmd->add_option("--knn-k", eval_args.knn_neighbors, "k-NN neighbor count")
        ->capture_default_str();
    eval_cmd->add_option("--out", eval_args.out, "Eval report path")->capture_default_str();
    eval_cmd->add_option("--confusion-out", eval_args.confusion_out,
                         "Confusion matrix csv with class-name headers");
    CLI::Option* eval_collate = eval_cmd->add_option(
        "--collate", eval_args.collate, "Records file to update with this run's accuracy");
    eval_cmd->add_option("--name", eval_args.name, "Representation name for --collate")
        ->needs(eval_collate);
    eval_collate->needs(eval_cmd->get_option("--name"));

    CompareArgs compare_args;
    CLI::App* compare =
        app.add_subcommand("compare", "Correlate collected A values with test accuracies");
    compare->add_option("--records", compare_args.records, "Records file from --collate runs")
        ->required()
        ->check(CLI::ExistingFile);
    compare->add_option("--out", compare_args.out, "Correlation report path")
        ->capture_default_str();
    compare->add_option("--plot", compare_args.plot, "Scatter figure path (svg)")
        ->capture_default_str();

    PlotArgs plot_args;
    CLI::App* plot = app.add_subcommand("plot", "Scatter figure of a 2-D embedding");
    plot->add_option("--embedding", plot_args.embedding, "Embedding file")
        ->required()
        ->check(CLI::ExistingFile);
    plot->add_option("--out", plot_args.out, "Figure path (svg)")->required();

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "Generate a labeled Gaussian-mixture dataset");
    synth->add_option("--spec", synth_args.spec, "Synth spec document (json)")
        ->required()
        ->check(CLI::ExistingFile);
    synth->add_option("--out", synth_args.out, "Dataset output file")->required();
    CLI::Option* train_out = synth->add_option("--train-out", synth_args.train_out,
                                               "Also write a stratified train split here");
    CLI::Option* test_out =
        synth->add_option("--test-out", synth_args.test_out, "Test split for --train-out");
    train_out->needs(test_out);
    test_out->needs(train_out);
    synth->add_option("--train-fraction", synth_args.train_fraction, "Train fraction for the split")
        ->capture_default_str();
    synth->add_option("--split-seed", synth_args.split_seed,
                      "Split seed (default: the spec's seed)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(embed)) {
            run_embed(embed_args);
        } else if (app.got_subcommand(estimate)) {
            if (estimate_args.features.empty() && estimate_args.embedding_file.empty()) {
                std::cerr << "estimate: need --features or --embedding-file\n";
                return 2;
            }
            run_estimate(estimate_args);
        } else if (app.got_subcommand(eval_cmd)) {
            run_eval(eval_args);
        } else if (app.got_subcommand(compare)) {
            run_compare(compare_args);
        } else if (app.got_subcommand(plot)) {
            run_plot(plot_args);
        } else if (app.got_subcommand(synth)) {
            run_synth(synth_args);
        }
    } catch (const InsufficientClassDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
