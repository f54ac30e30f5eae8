#include "convml/evaluation.hpp"

#include <algorithm>

#include "convml/rng.hpp"

namespace convml {

namespace {

std::optional<double> ratio(uint64_t num, uint64_t denom) {
    if (denom == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(denom);
}

std::optional<double> f_of(std::optional<double> precision, std::optional<double> recall) {
    if (!precision || !recall) return std::nullopt;
    const double sum = *precision + *recall;
    if (sum <= 0.0) return std::nullopt;
    return 2.0 * (*recall * *precision) / sum;
}

struct ClassView {
    std::optional<double> tpr, fpr, precision, f;
    uint64_t support = 0;
};

// Metrics with `positive` treated as the positive class.
ClassView class_view(const ConfusionMatrix& m, Label positive) {
    uint64_t tp = m.tp, fp = m.fp, tn = m.tn, fn = m.fn;
    if (positive == Label::Goodware) {
        std::swap(tp, tn);
        std::swap(fp, fn);
    }
    ClassView v;
    v.tpr = ratio(tp, tp + fn);
    v.fpr = ratio(fp, fp + tn);
    v.precision = ratio(tp, tp + fp);
    v.f = f_of(v.precision, v.tpr);
    v.support = tp + fn;
    return v;
}

std::optional<double> weighted(std::optional<double> malware_value, uint64_t malware_support,
                               std::optional<double> goodware_value, uint64_t goodware_support) {
    const uint64_t total = malware_support + goodware_support;
    if (total == 0) return std::nullopt;
    double acc = 0.0;
    if (malware_support > 0) {
        if (!malware_value) return std::nullopt;
        acc += *malware_value * static_cast<double>(malware_support);
    }
    if (goodware_support > 0) {
        if (!goodware_value) return std::nullopt;
        acc += *goodware_value * static_cast<double>(goodware_support);
    }
    return acc / static_cast<double>(total);
}

}  // namespace

MetricsReport compute_metrics(const ConfusionMatrix& matrix) {
    MetricsReport r;
    r.matrix = matrix;

    const ClassView malware = class_view(matrix, Label::Malware);
    const ClassView goodware = class_view(matrix, Label::Goodware);

    r.tpr = malware.tpr;
    r.fpr = malware.fpr;
    r.precision = malware.precision;
    r.recall = r.tpr;
    r.f_measure = malware.f;

    r.weighted_tpr = weighted(malware.tpr, malware.support, goodware.tpr, goodware.support);
    r.weighted_fpr = weighted(malware.fpr, malware.support, goodware.fpr, goodware.support);
    r.weighted_precision =
        weighted(malware.precision, malware.support, goodware.precision, goodware.support);
    r.weighted_recall = r.weighted_tpr;
    r.weighted_f_measure = weighted(malware.f, malware.support, goodware.f, goodware.support);
    return r;
}

std::vector<std::vector<size_t>> stratified_folds(const Dataset& dataset, int k, uint64_t seed) {
    if (k < 2) {
        throw Error("cross-validation needs k >= 2");
    }
    for (Label label : {Label::Goodware, Label::Malware}) {
        const size_t n = dataset.count(label);
        if (n > 0 && n < static_cast<size_t>(k)) {
            throw StratificationInfeasible(std::string(to_string(label)) + " has " +
                                           std::to_string(n) + " instances, fewer than k=" +
                                           std::to_string(k));
        }
    }

    std::vector<std::vector<size_t>> folds(static_cast<size_t>(k));
    for (Label label : {Label::Goodware, Label::Malware}) {
        std::vector<size_t> rows;
        for (size_t i = 0; i < dataset.size(); ++i) {
            if (dataset.instances()[i].label == label) rows.push_back(i);
        }
        Engine engine(derive_seed(seed, std::string("cv/") + to_string(label)));
        engine.shuffle(rows);
        for (size_t i = 0; i < rows.size(); ++i) {
            folds[i % static_cast<size_t>(k)].push_back(rows[i]);
        }
    }
    for (auto& fold : folds) {
        std::sort(fold.begin(), fold.end());  // keep original row order inside a fold
    }
    return folds;
}

MetricsReport cross_validate(const Dataset& dataset, const ClassifierSpec& spec, int k,
                             uint64_t seed) {
    const auto folds = stratified_folds(dataset, k, seed);

    std::vector<int> fold_of(dataset.size(), -1);
    for (size_t f = 0; f < folds.size(); ++f) {
        for (size_t row : folds[f]) fold_of[row] = static_cast<int>(f);
    }

    ConfusionMatrix pooled;
    std::vector<ConfusionMatrix> per_fold;
    per_fold.reserve(folds.size());
    double build_total = 0.0;
    for (size_t f = 0; f < folds.size(); ++f) {
        std::vector<size_t> train_rows;
        train_rows.reserve(dataset.size() - folds[f].size());
        for (size_t i = 0; i < dataset.size(); ++i) {
            if (fold_of[i] != static_cast<int>(f)) train_rows.push_back(i);
        }
        const Dataset train_fold = dataset.subset(train_rows);
        const auto model = train(train_fold, spec);
        build_total += model->build_time_s();

        ConfusionMatrix cm;
        for (size_t row : folds[f]) {
            const Instance& inst = dataset.instances()[row];
            cm.add(inst.label, model->predict(inst).label);
        }
        per_fold.push_back(cm);
        pooled += cm;
    }

    MetricsReport report = compute_metrics(pooled);
    report.folds = std::move(per_fold);
    report.build_time_s = build_total / static_cast<double>(folds.size());
    return report;
}

MetricsReport evaluate_holdout(const Model& model, const Dataset& test) {
    model.check_compatible(test);
    ConfusionMatrix cm;
    for (const Instance& inst : test.instances()) {
        cm.add(inst.label, model.predict(inst).label);
    }
    MetricsReport report = compute_metrics(cm);
    report.build_time_s = model.build_time_s();
    return report;
}

const char* to_string(EvalProtocol protocol) {
    return protocol == EvalProtocol::CrossValidation ? "cv" : "holdout";
}

const ExperimentEntry* ExperimentReport::find(ClassifierKind classifier, FeatureMode mode,
                                              EvalProtocol protocol) const {
    for (const auto& entry : entries) {
        if (entry.classifier == classifier && entry.mode == mode &&
            entry.protocol == protocol) {
            return &entry;
        }
    }
    return nullptr;
}

std::vector<BestChoice> ExperimentReport::best_per_classifier() const {
    std::vector<BestChoice> out;
    for (ClassifierKind kind : classifiers) {
        const ExperimentEntry* full = find(kind, FeatureMode::Full, EvalProtocol::CrossValidation);
        const ExperimentEntry* reduced =
            find(kind, FeatureMode::Reduced, EvalProtocol::CrossValidation);
        if (full == nullptr || reduced == nullptr) continue;
        const double full_tpr = full->metrics.tpr.value_or(-1.0);
        const double reduced_tpr = reduced->metrics.tpr.value_or(-1.0);
        BestChoice choice;
        choice.classifier = kind;
        if (full_tpr > reduced_tpr) {
            choice.chosen = FeatureMode::Full;
            choice.feature_selection = "Without";
            choice.metrics = full->metrics;
        } else if (reduced_tpr > full_tpr) {
            choice.chosen = FeatureMode::Reduced;
            choice.feature_selection = "With";
            choice.metrics = reduced->metrics;
        } else {
            choice.chosen = FeatureMode::Full;
            choice.feature_selection = "With/Without";
            choice.metrics = full->metrics;
        }
        out.push_back(std::move(choice));
    }
    return out;
}

ExperimentReport run_experiment(const Dataset& train_set, const Dataset& test_set,
                                const std::vector<ClassifierSpec>& specs, int k, uint64_t seed) {
    ExperimentReport report;
    for (FeatureMode mode : {FeatureMode::Full, FeatureMode::Reduced}) {
        const Dataset train_mode = select_features(train_set, mode);
        const Dataset test_mode = select_features(test_set, mode);
        for (const ClassifierSpec& spec : specs) {
            ExperimentEntry cv_entry;
            cv_entry.classifier = spec.kind;
            cv_entry.mode = mode;
            cv_entry.protocol = EvalProtocol::CrossValidation;
            cv_entry.metrics = cross_validate(train_mode, spec, k, seed);
            report.entries.push_back(std::move(cv_entry));

            const auto model = train(train_mode, spec);
            ExperimentEntry holdout_entry;
            holdout_entry.classifier = spec.kind;
            holdout_entry.mode = mode;
            holdout_entry.protocol = EvalProtocol::Holdout;
            holdout_entry.metrics = evaluate_holdout(*model, test_mode);
            report.entries.push_back(std::move(holdout_entry));
        }
    }
    for (const ClassifierSpec& spec : specs) {
        report.classifiers.push_back(spec.kind);
    }
    return report;
}

}  // namespace convml
