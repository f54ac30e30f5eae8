#include "convml/classifier.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "convml/decision_tree.hpp"
#include "convml/knn.hpp"
#include "convml/mlp.hpp"
#include "convml/naive_bayes.hpp"
#include "convml/random_forest.hpp"
#include "textutil.hpp"

namespace convml {

const char* to_string(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::DecisionTree: return "decision_tree";
        case ClassifierKind::Knn: return "knn";
        case ClassifierKind::NaiveBayes: return "naive_bayes";
        case ClassifierKind::RandomForest: return "random_forest";
        case ClassifierKind::Mlp: return "mlp";
    }
    return "unknown";
}

const char* display_name(ClassifierKind kind) {
    switch (kind) {
        case ClassifierKind::DecisionTree: return "Decision Tree";
        case ClassifierKind::Knn: return "kNN";
        case ClassifierKind::NaiveBayes: return "Naive Bayes";
        case ClassifierKind::RandomForest: return "Random Forest";
        case ClassifierKind::Mlp: return "MLP";
    }
    return "unknown";
}

ClassifierKind classifier_kind_from_string(std::string_view text) {
    if (text == "decision_tree" || text == "tree") return ClassifierKind::DecisionTree;
    if (text == "knn") return ClassifierKind::Knn;
    if (text == "naive_bayes" || text == "bayes") return ClassifierKind::NaiveBayes;
    if (text == "random_forest" || text == "forest") return ClassifierKind::RandomForest;
    if (text == "mlp") return ClassifierKind::Mlp;
    throw Error("unknown classifier: '" + std::string(text) +
                "' (expected tree, knn, bayes, forest or mlp)");
}

std::vector<ClassifierKind> all_classifier_kinds() {
    return {ClassifierKind::DecisionTree, ClassifierKind::Knn, ClassifierKind::NaiveBayes,
            ClassifierKind::RandomForest, ClassifierKind::Mlp};
}

ClassifierSpec ClassifierSpec::defaults(ClassifierKind kind, uint64_t seed) {
    ClassifierSpec spec;
    spec.kind = kind;
    spec.seed = seed;
    switch (kind) {
        case ClassifierKind::DecisionTree: spec.params = DecisionTreeParams{}; break;
        case ClassifierKind::Knn: spec.params = KnnParams{}; break;
        case ClassifierKind::NaiveBayes: spec.params = NaiveBayesParams{}; break;
        case ClassifierKind::RandomForest: spec.params = RandomForestParams{}; break;
        case ClassifierKind::Mlp: spec.params = MlpParams{}; break;
    }
    return spec;
}

Model::Model(ClassifierKind kind, std::vector<std::string> feature_names)
    : kind_(kind),
      feature_names_(std::move(feature_names)),
      fingerprint_(schema_fingerprint_of(feature_names_)) {}

void set_build_time(Model& model, double seconds) { model.build_time_s_ = seconds; }

Prediction Model::predict(const Instance& instance) const {
    if (instance.values.size() != feature_count()) {
        throw SchemaMismatch("instance has " + std::to_string(instance.values.size()) +
                             " attributes, model expects " + std::to_string(feature_count()));
    }
    for (double v : instance.values) {
        if (!std::isfinite(v)) {
            throw SchemaMismatch("instance carries a non-finite attribute value");
        }
    }
    Prediction p = do_predict(instance.values);
    p.score = std::clamp(p.score, 0.0, 1.0);
    return p;
}

void Model::check_compatible(const Dataset& dataset) const {
    if (dataset.schema_fingerprint() != fingerprint_) {
        throw SchemaMismatch("dataset schema does not match the schema this model was trained on");
    }
}

void Model::save(std::ostream& out) const {
    out << "convml-model v1\n";
    out << "kind " << to_string(kind_) << "\n";
    out << "features " << feature_names_.size();
    for (const auto& name : feature_names_) out << ' ' << name;
    out << "\n";
    char fp[32];
    std::snprintf(fp, sizeof(fp), "%016llx", static_cast<unsigned long long>(fingerprint_));
    out << "fingerprint " << fp << "\n";
    save_body(out);
    out << "end\n";
}

void Model::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write model file: " + path);
    save(out);
}

namespace {

std::string next_token(std::istream& in) {
    std::string token;
    if (!(in >> token)) {
        throw Error("model file ended unexpectedly");
    }
    return token;
}

void expect_token(std::istream& in, std::string_view expected) {
    const std::string token = next_token(in);
    if (token != expected) {
        throw Error("malformed model file: expected '" + std::string(expected) + "', found '" +
                    token + "'");
    }
}

long long read_int(std::istream& in) {
    const std::string token = next_token(in);
    try {
        size_t used = 0;
        long long v = std::stoll(token, &used);
        if (used != token.size()) throw std::invalid_argument(token);
        return v;
    } catch (const std::exception&) {
        throw Error("malformed model file: expected an integer, found '" + token + "'");
    }
}

double read_double(std::istream& in) {
    const std::string token = next_token(in);
    char* end = nullptr;
    const double v = std::strtod(token.c_str(), &end);
    if (end == token.c_str() || *end != '\0') {
        throw Error("malformed model file: expected a number, found '" + token + "'");
    }
    return v;
}

/// Parses `key=value` where the key is fixed.
std::string read_kv(std::istream& in, std::string_view key) {
    const std::string token = next_token(in);
    const size_t eq = token.find('=');
    if (eq == std::string::npos || token.substr(0, eq) != key) {
        throw Error("malformed model file: expected '" + std::string(key) + "=...', found '" +
                    token + "'");
    }
    return token.substr(eq + 1);
}

long long kv_int(std::istream& in, std::string_view key) {
    const std::string v = read_kv(in, key);
    try {
        return std::stoll(v);
    } catch (const std::exception&) {
        throw Error("malformed model file: bad value for '" + std::string(key) + "': " + v);
    }
}

double kv_double(std::istream& in, std::string_view key) {
    const std::string v = read_kv(in, key);
    char* end = nullptr;
    const double parsed = std::strtod(v.c_str(), &end);
    if (end == v.c_str()) {
        throw Error("malformed model file: bad value for '" + std::string(key) + "': " + v);
    }
    return parsed;
}

FlatTree load_tree_nodes(std::istream& in) {
    expect_token(in, "nodes");
    const long long count = read_int(in);
    FlatTree tree;
    tree.nodes.resize(static_cast<size_t>(count));
    for (auto& node : tree.nodes) {
        node.attribute = static_cast<int>(read_int(in));
        node.threshold = read_double(in);
        node.left = static_cast<int>(read_int(in));
        node.right = static_cast<int>(read_int(in));
        node.counts[0] = static_cast<uint64_t>(read_int(in));
        node.counts[1] = static_cast<uint64_t>(read_int(in));
    }
    return tree;
}

std::unique_ptr<Model> load_decision_tree(std::istream& in, std::vector<std::string> names) {
    expect_token(in, "params");
    DecisionTreeParams params;
    params.pruning_confidence = kv_double(in, "confidence");
    params.min_leaf = static_cast<int>(kv_int(in, "min_leaf"));
    params.prune = kv_int(in, "prune") != 0;
    FlatTree tree = load_tree_nodes(in);
    return std::make_unique<DecisionTreeModel>(std::move(names), params, std::move(tree));
}

std::unique_ptr<Model> load_knn(std::istream& in, std::vector<std::string> names) {
    expect_token(in, "params");
    KnnParams params;
    params.k = static_cast<int>(kv_int(in, "k"));
    const size_t attrs = names.size();
    expect_token(in, "bounds");
    std::vector<double> minima(attrs), maxima(attrs);
    for (size_t a = 0; a < attrs; ++a) {
        minima[a] = read_double(in);
        maxima[a] = read_double(in);
    }
    expect_token(in, "instances");
    const long long count = read_int(in);
    std::vector<double> values(static_cast<size_t>(count) * attrs);
    std::vector<Label> labels(static_cast<size_t>(count));
    for (long long i = 0; i < count; ++i) {
        labels[static_cast<size_t>(i)] = label_from_string(next_token(in));
        for (size_t a = 0; a < attrs; ++a) {
            values[static_cast<size_t>(i) * attrs + a] = read_double(in);
        }
    }
    return std::make_unique<KnnModel>(std::move(names), params, std::move(values),
                                      std::move(labels), std::move(minima), std::move(maxima));
}

std::unique_ptr<Model> load_naive_bayes(std::istream& in, std::vector<std::string> names) {
    expect_token(in, "params");
    NaiveBayesParams params;
    params.bins = static_cast<int>(kv_int(in, "bins"));
    params.alpha = kv_double(in, "alpha");
    expect_token(in, "class_counts");
    std::array<uint64_t, kClassCount> class_counts{};
    class_counts[0] = static_cast<uint64_t>(read_int(in));
    class_counts[1] = static_cast<uint64_t>(read_int(in));
    const size_t attrs = names.size();
    expect_token(in, "bounds");
    std::vector<double> minima(attrs), widths(attrs);
    for (size_t a = 0; a < attrs; ++a) {
        minima[a] = read_double(in);
        widths[a] = read_double(in);
    }
    expect_token(in, "counts");
    std::vector<uint64_t> bin_counts(kClassCount * attrs * static_cast<size_t>(params.bins));
    for (auto& c : bin_counts) c = static_cast<uint64_t>(read_int(in));
    return std::make_unique<NaiveBayesModel>(std::move(names), params, class_counts,
                                             std::move(minima), std::move(widths),
                                             std::move(bin_counts));
}

std::unique_ptr<Model> load_random_forest(std::istream& in, std::vector<std::string> names) {
    expect_token(in, "params");
    RandomForestParams params;
    params.trees = static_cast<int>(kv_int(in, "trees"));
    params.features_per_split = static_cast<int>(kv_int(in, "features_per_split"));
    params.bootstrap = kv_int(in, "bootstrap") != 0;
    params.per_tree_seeds = kv_int(in, "per_tree_seeds") != 0;
    std::vector<FlatTree> trees;
    trees.reserve(static_cast<size_t>(params.trees));
    for (int t = 0; t < params.trees; ++t) {
        trees.push_back(load_tree_nodes(in));
    }
    return std::make_unique<RandomForestModel>(std::move(names), params, std::move(trees));
}

std::unique_ptr<Model> load_mlp(std::istream& in, std::vector<std::string> names) {
    expect_token(in, "params");
    MlpParams params;
    params.hidden = static_cast<int>(kv_int(in, "hidden"));
    params.learning_rate = kv_double(in, "learning_rate");
    params.momentum = kv_double(in, "momentum");
    params.epochs = static_cast<int>(kv_int(in, "epochs"));
    expect_token(in, "layout");
    MlpNetwork net;
    net.inputs = static_cast<size_t>(read_int(in));
    net.hidden = static_cast<size_t>(read_int(in));
    net.outputs = static_cast<size_t>(read_int(in));
    expect_token(in, "scale");
    std::vector<double> minima(net.inputs), widths(net.inputs);
    for (size_t a = 0; a < net.inputs; ++a) {
        minima[a] = read_double(in);
        widths[a] = read_double(in);
    }
    expect_token(in, "hidden_weights");
    net.hidden_weights.resize(net.hidden * (net.inputs + 1));
    for (double& w : net.hidden_weights) w = read_double(in);
    expect_token(in, "output_weights");
    net.output_weights.resize(net.outputs * (net.hidden + 1));
    for (double& w : net.output_weights) w = read_double(in);
    return std::make_unique<MlpModel>(std::move(names), params, std::move(net), std::move(minima),
                                      std::move(widths));
}

}  // namespace

std::unique_ptr<Model> Model::load(std::istream& in) {
    expect_token(in, "convml-model");
    const std::string version = next_token(in);
    if (version != "v1") {
        throw Error("unsupported model file version: " + version);
    }
    expect_token(in, "kind");
    const ClassifierKind kind = classifier_kind_from_string(next_token(in));
    expect_token(in, "features");
    const long long count = read_int(in);
    std::vector<std::string> names;
    names.reserve(static_cast<size_t>(count));
    for (long long i = 0; i < count; ++i) names.push_back(next_token(in));
    expect_token(in, "fingerprint");
    const std::string stored = next_token(in);
    char fp[32];
    std::snprintf(fp, sizeof(fp), "%016llx",
                  static_cast<unsigned long long>(schema_fingerprint_of(names)));
    if (stored != fp) {
        throw Error("model file fingerprint does not match its feature list");
    }

    std::unique_ptr<Model> model;
    switch (kind) {
        case ClassifierKind::DecisionTree: model = load_decision_tree(in, std::move(names)); break;
        case ClassifierKind::Knn: model = load_knn(in, std::move(names)); break;
        case ClassifierKind::NaiveBayes: model = load_naive_bayes(in, std::move(names)); break;
        case ClassifierKind::RandomForest: model = load_random_forest(in, std::move(names)); break;
        case ClassifierKind::Mlp: model = load_mlp(in, std::move(names)); break;
    }
    expect_token(in, "end");
    return model;
}

std::unique_ptr<Model> Model::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read model file: " + path);
    return load(in);
}

std::unique_ptr<Model> train(const Dataset& dataset, const ClassifierSpec& spec) {
    switch (spec.kind) {
        case ClassifierKind::DecisionTree:
            if (const auto* p = std::get_if<DecisionTreeParams>(&spec.params)) {
                return train_decision_tree(dataset, *p);
            }
            break;
        case ClassifierKind::Knn:
            if (const auto* p = std::get_if<KnnParams>(&spec.params)) {
                return train_knn(dataset, *p);
            }
            break;
        case ClassifierKind::NaiveBayes:
            if (const auto* p = std::get_if<NaiveBayesParams>(&spec.params)) {
                return train_naive_bayes(dataset, *p);
            }
            break;
        case ClassifierKind::RandomForest:
            if (const auto* p = std::get_if<RandomForestParams>(&spec.params)) {
                return train_random_forest(dataset, *p, spec.seed);
            }
            break;
        case ClassifierKind::Mlp:
            if (const auto* p = std::get_if<MlpParams>(&spec.params)) {
                return train_mlp(dataset, *p, spec.seed);
            }
            break;
    }
    throw Error("parameter record does not match the classifier kind");
}

}  // namespace convml
