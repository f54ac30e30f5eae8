#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "convml/dataset.hpp"

namespace convml {

enum class ClassifierKind { DecisionTree, Knn, NaiveBayes, RandomForest, Mlp };

const char* to_string(ClassifierKind kind);
const char* display_name(ClassifierKind kind);
ClassifierKind classifier_kind_from_string(std::string_view text);
std::vector<ClassifierKind> all_classifier_kinds();

// Per-kind parameter records. The defaults here are the fixed contract for
// "default" training runs and are what ClassifierSpec::defaults produces.

struct DecisionTreeParams {
    double pruning_confidence = 0.25;
    int min_leaf = 2;
    bool prune = true;
};

struct KnnParams {
    int k = 1;
};

struct NaiveBayesParams {
    int bins = 10;      // equal-width bins per numeric attribute
    double alpha = 0.5; // smoothing mass
};

struct RandomForestParams {
    int trees = 100;
    int features_per_split = 0;  // 0 -> floor(log2 F) + 1
    bool bootstrap = true;
    bool per_tree_seeds = true;  // false -> every tree reuses the forest seed
};

struct MlpParams {
    int hidden = 0;  // 0 -> floor((F + classes) / 2)
    double learning_rate = 0.3;
    double momentum = 0.2;
    int epochs = 500;
};

using ClassifierParams =
    std::variant<DecisionTreeParams, KnnParams, NaiveBayesParams, RandomForestParams, MlpParams>;

struct ClassifierSpec {
    ClassifierKind kind = ClassifierKind::DecisionTree;
    ClassifierParams params = DecisionTreeParams{};
    uint64_t seed = 0;

    static ClassifierSpec defaults(ClassifierKind kind, uint64_t seed = 0);
};

struct Prediction {
    Label label = Label::Goodware;
    double score = 0.0;  // confidence for the predicted label, in [0, 1]
};

/**
 * A trained classifier. Immutable after training; safe to score from
 * multiple threads.
 *
 * Models remember the schema they were trained on and refuse to score
 * instances or datasets that do not match it (SchemaMismatch). Serialization
 * is a versioned text container holding kind, parameters, schema and learned
 * structure; a reloaded model reproduces identical predictions. Wall-clock
 * build time is a training-run measurement and is deliberately not part of
 * the serialized form.
 */
class Model {
public:
    virtual ~Model() = default;

    ClassifierKind kind() const { return kind_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }
    size_t feature_count() const { return feature_names_.size(); }
    uint64_t schema_fingerprint() const { return fingerprint_; }
    double build_time_s() const { return build_time_s_; }

    /// Score one instance. Throws SchemaMismatch on arity or non-finite values.
    Prediction predict(const Instance& instance) const;

    /// Throws SchemaMismatch unless the dataset's schema matches the model's.
    void check_compatible(const Dataset& dataset) const;

    void save(std::ostream& out) const;
    void save(const std::string& path) const;
    static std::unique_ptr<Model> load(std::istream& in);
    static std::unique_ptr<Model> load(const std::string& path);

protected:
    Model(ClassifierKind kind, std::vector<std::string> feature_names);
    virtual Prediction do_predict(std::span<const double> values) const = 0;
    virtual void save_body(std::ostream& out) const = 0;

private:
    friend std::unique_ptr<Model> train(const Dataset&, const ClassifierSpec&);
    friend void set_build_time(Model&, double);

    ClassifierKind kind_;
    std::vector<std::string> feature_names_;
    uint64_t fingerprint_;
    double build_time_s_ = 0.0;
};

/// Train the classifier described by spec on the dataset, measuring build
/// time (training only, excluding any data loading done by the caller).
std::unique_ptr<Model> train(const Dataset& dataset, const ClassifierSpec& spec);

/// Stamps a measured training duration onto a freshly built model. Called by
/// the train_* functions; not meant for anything else.
void set_build_time(Model& model, double seconds);

/// Shannon entropy in bits of a class-count distribution.
/// Throws DegenerateDistribution when all counts are zero.
double entropy(std::span<const uint64_t> class_counts);
double entropy(std::initializer_list<uint64_t> class_counts);

}  // namespace convml
