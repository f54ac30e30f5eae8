#pragma once

#include <optional>

#include "convml/classifier.hpp"
#include "convml/pipeline.hpp"

namespace convml {

/// Counts with Malware fixed as the positive class.
struct ConfusionMatrix {
    uint64_t tp = 0;
    uint64_t fp = 0;
    uint64_t tn = 0;
    uint64_t fn = 0;

    void add(Label truth, Label predicted) {
        if (truth == Label::Malware) {
            (predicted == Label::Malware ? tp : fn) += 1;
        } else {
            (predicted == Label::Malware ? fp : tn) += 1;
        }
    }

    uint64_t total() const { return tp + fp + tn + fn; }

    ConfusionMatrix& operator+=(const ConfusionMatrix& other) {
        tp += other.tp;
        fp += other.fp;
        tn += other.tn;
        fn += other.fn;
        return *this;
    }

    bool operator==(const ConfusionMatrix&) const = default;
};

/// Metric values; a nullopt marks an undefined metric (zero denominator),
/// which is reported as such rather than coerced to 0.
struct MetricsReport {
    ConfusionMatrix matrix;

    // Malware as the positive class.
    std::optional<double> tpr;
    std::optional<double> fpr;
    std::optional<double> precision;
    std::optional<double> recall;  // identical to tpr by definition
    std::optional<double> f_measure;

    // Support-weighted averages over both classes.
    std::optional<double> weighted_tpr;
    std::optional<double> weighted_fpr;
    std::optional<double> weighted_precision;
    std::optional<double> weighted_recall;
    std::optional<double> weighted_f_measure;

    std::vector<ConfusionMatrix> folds;  // per-fold breakdown for cross-validation
    double build_time_s = 0.0;           // model build time (mean over folds for CV)
};

/// Exact evaluation of TPR = TP/(TP+FN), FPR = FP/(FP+TN),
/// Precision = TP/(TP+FP), Recall = TPR and
/// F = 2*Recall*Precision/(Recall+Precision), plus the weighted variants.
MetricsReport compute_metrics(const ConfusionMatrix& matrix);

/// Stratified fold assignment: per-class seeded shuffle, then round-robin.
/// Returns per-fold row index lists; per-class fold sizes differ by at most
/// one. Throws StratificationInfeasible when a class has < k instances.
std::vector<std::vector<size_t>> stratified_folds(const Dataset& dataset, int k, uint64_t seed);

/// k-fold cross-validation: pooled confusion matrix for the headline
/// metrics, per-fold matrices kept, build time averaged over folds.
MetricsReport cross_validate(const Dataset& dataset, const ClassifierSpec& spec, int k = 10,
                             uint64_t seed = 0);

/// Single confusion matrix over every test instance.
MetricsReport evaluate_holdout(const Model& model, const Dataset& test);

enum class EvalProtocol { CrossValidation, Holdout };
const char* to_string(EvalProtocol protocol);

struct ExperimentEntry {
    ClassifierKind classifier = ClassifierKind::DecisionTree;
    FeatureMode mode = FeatureMode::Full;
    EvalProtocol protocol = EvalProtocol::CrossValidation;
    MetricsReport metrics;
};

/// Best feature-selection choice per classifier, decided on cross-validation
/// TPR: "Without" when the full 10-attribute run wins, "With" when the
/// reduced 8-attribute run wins, "With/Without" on a tie.
struct BestChoice {
    ClassifierKind classifier = ClassifierKind::DecisionTree;
    FeatureMode chosen = FeatureMode::Full;
    std::string feature_selection;
    MetricsReport metrics;
};

struct ExperimentReport {
    std::vector<ExperimentEntry> entries;
    std::vector<ClassifierKind> classifiers;  // in run order

    const ExperimentEntry* find(ClassifierKind classifier, FeatureMode mode,
                                EvalProtocol protocol) const;
    std::vector<BestChoice> best_per_classifier() const;
};

/**
 * The two-phase protocol: for every spec and for both feature modes, 10-fold
 * cross-validation on the training set followed by a holdout evaluation of a
 * model trained on the whole training set. Both datasets must be in the full
 * schema (or already reduced, in which case only that phase is possible).
 */
ExperimentReport run_experiment(const Dataset& train, const Dataset& test,
                                const std::vector<ClassifierSpec>& specs, int k = 10,
                                uint64_t seed = 0);

}  // namespace convml
