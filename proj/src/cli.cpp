#include "convml/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "convml/conversation.hpp"
#include "convml/dataset_io.hpp"
#include "convml/evaluation.hpp"
#include "convml/pcap.hpp"
#include "convml/pipeline.hpp"
#include "convml/report.hpp"
#include "convml/synth.hpp"

namespace convml::cli {

namespace {

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write: " + path);
    out << content;
}

std::vector<ClassifierKind> parse_classifier_list(const std::string& text) {
    if (text == "all") return all_classifier_kinds();
    std::vector<ClassifierKind> kinds;
    size_t pos = 0;
    while (pos <= text.size()) {
        const size_t comma = text.find(',', pos);
        const std::string part =
            text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!part.empty()) kinds.push_back(classifier_kind_from_string(part));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    if (kinds.empty()) {
        throw Error("no classifiers selected");
    }
    return kinds;
}

FeatureMode parse_mode(const std::string& text) {
    if (text == "full") return FeatureMode::Full;
    if (text == "reduced") return FeatureMode::Reduced;
    throw Error("mode must be 'full' or 'reduced'");
}

Label lookup_label(const std::map<std::string, Label>& manifest, const std::string& basename,
                   const std::string& stem) {
    if (auto it = manifest.find(basename); it != manifest.end()) return it->second;
    if (auto it = manifest.find(stem); it != manifest.end()) return it->second;
    throw Error("capture '" + basename + "' is missing from the label manifest");
}

struct CommonState {
    bool progress = false;
    std::ostream& note() { return std::cerr; }
};

int cmd_synth(const std::string& out_dir, size_t per_class, uint64_t seed,
              const std::string& profile, CommonState& state) {
    ScenarioConfig goodware, malware;
    if (profile == "separable") {
        goodware = ScenarioConfig::goodware_profile(seed);
        malware = ScenarioConfig::malware_profile(seed);
    } else if (profile == "overlapping") {
        goodware = ScenarioConfig::goodware_overlapping(seed);
        malware = ScenarioConfig::malware_overlapping(seed);
    } else {
        throw Error("profile must be 'separable' or 'overlapping'");
    }
    const Corpus corpus = generate_corpus(goodware, malware, per_class, seed, out_dir);
    if (state.progress) {
        state.note() << "wrote " << corpus.entries.size() << " captures and "
                     << corpus.manifest_path << "\n";
    }
    return 0;
}

int cmd_extract(const std::vector<std::string>& pcaps, const std::string& labels_path,
                const std::string& out_path, CommonState& state) {
    const auto manifest = read_manifest(labels_path);
    std::vector<CleanRow> rows;
    std::map<std::string, Label> label_by_group;
    for (const std::string& pcap_path : pcaps) {
        const std::filesystem::path p(pcap_path);
        const std::string basename = p.filename().string();
        const std::string stem = p.stem().string();
        const Label label = lookup_label(manifest, basename, stem);
        if (auto it = label_by_group.find(stem);
            it != label_by_group.end() && it->second != label) {
            throw Error("captures named '" + stem + "' carry conflicting labels");
        }
        label_by_group[stem] = label;

        CaptureReader reader(pcap_path);
        ConversationTable table(stem);
        for (;;) {
            const auto n = reader.next();
            if (n.status == CaptureReader::Next::Status::End) break;
            if (n.status == CaptureReader::Next::Status::Packet) table.accumulate(n.packet);
        }
        const auto conversations = table.finalize();
        const auto cleaned = clean(conversations);
        rows.insert(rows.end(), cleaned.begin(), cleaned.end());
        if (state.progress) {
            uint64_t skipped = 0;
            for (const auto& [reason, count] : reader.skip_counts()) skipped += count;
            state.note() << basename << ": " << reader.packets_emitted() << " packets, "
                         << skipped << " skipped, " << conversations.size() << " conversations, "
                         << cleaned.size() << " rows kept\n";
        }
    }
    const Dataset dataset = make_dataset(rows, label_by_group);
    export_dataset(dataset, out_path);
    if (state.progress) {
        state.note() << "dataset: " << dataset.size() << " instances ("
                     << dataset.count(Label::Goodware) << " goodware, "
                     << dataset.count(Label::Malware) << " malware) -> " << out_path << "\n";
    }
    return 0;
}

int cmd_split(const std::string& input, const std::string& train_out,
              const std::string& test_out, double fraction, uint64_t seed, CommonState& state) {
    const Dataset dataset = import_dataset(input);
    const SplitResult result = grouped_split(dataset, fraction, seed);
    export_dataset(result.train, train_out);
    export_dataset(result.test, test_out);
    if (result.infeasible) {
        state.note() << "warning: split infeasible as requested: " << result.note << "\n";
    }
    if (state.progress) {
        state.note() << "train " << result.train.size() << " / test " << result.test.size()
                     << " instances (achieved fraction "
                     << result.train_fraction << ")\n";
    }
    return 0;
}

int cmd_train(const std::string& input, const std::string& classifier, const std::string& mode,
              uint64_t seed, const std::string& out_path, CommonState& state) {
    const Dataset dataset = select_features(import_dataset(input), parse_mode(mode));
    const ClassifierSpec spec =
        ClassifierSpec::defaults(classifier_kind_from_string(classifier), seed);
    const auto model = train(dataset, spec);
    model->save(out_path);
    if (state.progress) {
        state.note() << display_name(spec.kind) << " trained on " << dataset.size()
                     << " instances in " << model->build_time_s() << " s -> " << out_path << "\n";
    }
    return 0;
}

ReportOptions timing_options(const std::string& timing) {
    if (timing == "off") return {.measured_timing = false};
    if (timing == "wall") return {.measured_timing = true};
    throw Error("timing must be 'off' or 'wall'");
}

void write_metrics(const MetricsReport& report, const std::string& out_path,
                   const std::string& format, const std::string& title,
                   const ReportOptions& options) {
    if (format == "text") {
        write_text_file(out_path, render_metrics_text(report, title, options));
    } else if (format == "csv") {
        write_text_file(out_path, render_metrics_csv(report, options));
    } else if (format == "json") {
        write_text_file(out_path, render_metrics_json(report, options));
    } else {
        throw Error("format must be 'text', 'csv' or 'json'");
    }
}

int cmd_eval(const std::string& model_path, const std::string& test_path,
             const std::string& out_path, const std::string& format, const std::string& timing) {
    const auto model = Model::load(model_path);
    Dataset test = import_dataset(test_path);
    if (test.schema_fingerprint() != model->schema_fingerprint() &&
        test.mode() == FeatureMode::Full) {
        // The model may have been trained on the reduced schema.
        Dataset reduced = select_features(test, FeatureMode::Reduced);
        if (reduced.schema_fingerprint() == model->schema_fingerprint()) {
            test = std::move(reduced);
        }
    }
    const MetricsReport report = evaluate_holdout(*model, test);
    write_metrics(report, out_path, format,
                  std::string("Holdout evaluation, ") + display_name(model->kind()),
                  timing_options(timing));
    return 0;
}

int cmd_cv(const std::string& input, const std::string& classifier, int k,
           const std::string& mode, uint64_t seed, const std::string& out_path,
           const std::string& format, const std::string& timing) {
    const Dataset dataset = select_features(import_dataset(input), parse_mode(mode));
    const ClassifierSpec spec =
        ClassifierSpec::defaults(classifier_kind_from_string(classifier), seed);
    const MetricsReport report = cross_validate(dataset, spec, k, seed);
    write_metrics(report, out_path, format,
                  std::to_string(k) + "-fold cross-validation, " + display_name(spec.kind),
                  timing_options(timing));
    return 0;
}

int cmd_experiment(const std::string& train_path, const std::string& test_path,
                   const std::string& classifiers, int k, uint64_t seed,
                   const std::string& out_dir, const std::string& timing, CommonState& state) {
    const Dataset train_set = import_dataset(train_path);
    const Dataset test_set = import_dataset(test_path);
    std::vector<ClassifierSpec> specs;
    for (ClassifierKind kind : parse_classifier_list(classifiers)) {
        specs.push_back(ClassifierSpec::defaults(kind, seed));
    }
    const ExperimentReport report = run_experiment(train_set, test_set, specs, k, seed);

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create report directory: " + out_dir + ": " + ec.message());
    const auto base = std::filesystem::path(out_dir);
    const ReportOptions options = timing_options(timing);
    write_text_file((base / "report.txt").string(), render_experiment_text(report, options));
    write_text_file((base / "report.csv").string(), render_experiment_csv(report, options));
    write_text_file((base / "report.json").string(), render_experiment_json(report, options));
    if (state.progress) {
        state.note() << "experiment reports written to " << out_dir << "\n";
    }
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"Ransomware network-traffic detection toolkit: pcap conversation extraction, "
                 "dataset building and classifier evaluation"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonState state;
    app.add_flag("--progress", state.progress, "Print progress notes to stderr");

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a labelled synthetic pcap corpus");
    std::string synth_dir, synth_profile = "separable";
    size_t synth_per_class = 50;
    uint64_t synth_seed = kDefaultSeed;
    synth->add_option("--out-dir", synth_dir, "Corpus output directory")->required();
    synth->add_option("--per-class", synth_per_class, "Captures per class")
        ->capture_default_str();
    synth->add_option("--seed", synth_seed, "Corpus seed")->capture_default_str();
    synth->add_option("--profile", synth_profile, "separable or overlapping")
        ->capture_default_str();

    // extract
    auto* extract =
        app.add_subcommand("extract", "Decode pcaps into the cleaned conversation dataset");
    std::vector<std::string> extract_pcaps;
    std::string extract_labels, extract_out;
    extract->add_option("pcaps", extract_pcaps, "Capture files")->required();
    extract->add_option("--labels", extract_labels, "file,label manifest")->required();
    extract->add_option("-o,--output", extract_out, "Dataset path (.arff or .csv)")->required();

    // split
    auto* split = app.add_subcommand("split", "Group-respecting train/test split");
    std::string split_in, split_train, split_test;
    double split_fraction = 0.6091;
    uint64_t split_seed = kDefaultSeed;
    split->add_option("--input", split_in, "Dataset path")->required();
    split->add_option("--train-out", split_train, "Training dataset path")->required();
    split->add_option("--test-out", split_test, "Test dataset path")->required();
    split->add_option("--train-fraction", split_fraction, "Target train instance fraction")
        ->capture_default_str();
    split->add_option("--seed", split_seed, "Shuffle seed")->capture_default_str();

    // train
    auto* train_cmd = app.add_subcommand("train", "Train one classifier");
    std::string train_in, train_classifier, train_mode = "full", train_out;
    uint64_t train_seed = kDefaultSeed;
    train_cmd->add_option("--input", train_in, "Training dataset")->required();
    train_cmd->add_option("--classifier", train_classifier, "tree, knn, bayes, forest or mlp")
        ->required();
    train_cmd->add_option("--mode", train_mode, "full or reduced")->capture_default_str();
    train_cmd->add_option("--seed", train_seed, "Training seed")->capture_default_str();
    train_cmd->add_option("-o,--output", train_out, "Model path")->required();

    // eval
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model on a test dataset");
    std::string eval_model, eval_test, eval_out, eval_format = "text", eval_timing = "off";
    eval_cmd->add_option("--model", eval_model, "Model path")->required();
    eval_cmd->add_option("--test", eval_test, "Test dataset")->required();
    eval_cmd->add_option("-o,--output", eval_out, "Report path")->required();
    eval_cmd->add_option("--format", eval_format, "text, csv or json")->capture_default_str();
    eval_cmd->add_option("--timing", eval_timing, "off (reproducible) or wall")
        ->capture_default_str();

    // cv
    auto* cv_cmd = app.add_subcommand("cv", "Stratified k-fold cross-validation");
    std::string cv_in, cv_classifier, cv_mode = "full", cv_out, cv_format = "text",
                cv_timing = "off";
    int cv_k = 10;
    uint64_t cv_seed = kDefaultSeed;
    cv_cmd->add_option("--input", cv_in, "Dataset path")->required();
    cv_cmd->add_option("--classifier", cv_classifier, "tree, knn, bayes, forest or mlp")
        ->required();
    cv_cmd->add_option("--k", cv_k, "Fold count")->capture_default_str();
    cv_cmd->add_option("--mode", cv_mode, "full or reduced")->capture_default_str();
    cv_cmd->add_option("--seed", cv_seed, "Fold/classifier seed")->capture_default_str();
    cv_cmd->add_option("-o,--output", cv_out, "Report path")->required();
    cv_cmd->add_option("--format", cv_format, "text, csv or json")->capture_default_str();
    cv_cmd->add_option("--timing", cv_timing, "off (reproducible) or wall")
        ->capture_default_str();

    // experiment
    auto* exp_cmd = app.add_subcommand(
        "experiment", "Two-phase protocol over both feature modes, CV plus holdout");
    std::string exp_train, exp_test, exp_classifiers = "all", exp_dir, exp_timing = "off";
    int exp_k = 10;
    uint64_t exp_seed = kDefaultSeed;
    exp_cmd->add_option("--train", exp_train, "Training dataset")->required();
    exp_cmd->add_option("--test", exp_test, "Test dataset")->required();
    exp_cmd->add_option("--classifiers", exp_classifiers, "'all' or a comma list")
        ->capture_default_str();
    exp_cmd->add_option("--k", exp_k, "Fold count for the CV phase")->capture_default_str();
    exp_cmd->add_option("--seed", exp_seed, "Experiment seed")->capture_default_str();
    exp_cmd->add_option("--out-dir", exp_dir, "Directory for report.{txt,csv,json}")->required();
    exp_cmd->add_option("--timing", exp_timing, "off (reproducible) or wall")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (synth->parsed()) {
            return cmd_synth(synth_dir, synth_per_class, synth_seed, synth_profile, state);
        }
        if (extract->parsed()) {
            return cmd_extract(extract_pcaps, extract_labels, extract_out, state);
        }
        if (split->parsed()) {
            return cmd_split(split_in, split_train, split_test, split_fraction, split_seed,
                             state);
        }
        if (train_cmd->parsed()) {
            return cmd_train(train_in, train_classifier, train_mode, train_seed, train_out,
                             state);
        }
        if (eval_cmd->parsed()) {
            return cmd_eval(eval_model, eval_test, eval_out, eval_format, eval_timing);
        }
        if (cv_cmd->parsed()) {
            return cmd_cv(cv_in, cv_classifier, cv_k, cv_mode, cv_seed, cv_out, cv_format,
                          cv_timing);
        }
        if (exp_cmd->parsed()) {
            return cmd_experiment(exp_train, exp_test, exp_classifiers, exp_k, exp_seed, exp_dir,
                                  exp_timing, state);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace convml::cli
