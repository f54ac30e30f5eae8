#include <doctest.h>

#include <random>
#include <set>

#include "convml/evaluation.hpp"
#include "convml/knn.hpp"
#include "support/oracles.hpp"

using convml::ClassifierKind;
using convml::ClassifierSpec;
using convml::ConfusionMatrix;
using convml::Dataset;
using convml::EvalProtocol;
using convml::FeatureMode;
using convml::Label;
using convml::MetricsReport;

namespace {

Dataset separable_full(size_t per_class, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<convml::Instance> rows;
    for (size_t i = 0; i < 2 * per_class; ++i) {
        const bool malware = i % 2 == 1;
        convml::Instance inst;
        inst.label = malware ? Label::Malware : Label::Goodware;
        inst.group = "g" + std::to_string(i / 4);
        const double port_b = malware ? 4444 : 80;
        inst.values = {6,
                       167772687.0,
                       double(49152 + rng() % 4000),
                       double(1000000 + rng() % 500000),
                       port_b,
                       double(1 + rng() % 30),
                       double(60 + rng() % 4000),
                       double(rng() % 30),
                       double(rng() % 4000)};
        rows.push_back(std::move(inst));
    }
    return Dataset(Dataset::full_feature_names(), std::move(rows));
}

}  // namespace

TEST_CASE("the metric formulas evaluate exactly") {
    ConfusionMatrix cm{971, 0, 0, 29};
    auto r = convml::compute_metrics(cm);
    REQUIRE(r.tpr.has_value());
    CHECK(*r.tpr == 971.0 / 1000.0);
    CHECK(r.recall == r.tpr);

    cm = {0, 16, 984, 0};
    r = convml::compute_metrics(cm);
    REQUIRE(r.fpr.has_value());
    CHECK(*r.fpr == 16.0 / 1000.0);

    // Precision/recall near the 97.30/97.10 pattern: F lands at 0.9720.
    cm = {971, 27, 973, 29};
    r = convml::compute_metrics(cm);
    CHECK(*r.precision == doctest::Approx(0.973).epsilon(3e-4));
    CHECK(*r.tpr == doctest::Approx(0.971).epsilon(1e-12));
    CHECK(*r.f_measure == doctest::Approx(0.9720).epsilon(5e-4 / 0.972));
    const double by_hand =
        2.0 * (*r.recall * *r.precision) / (*r.recall + *r.precision);
    CHECK(*r.f_measure == by_hand);
}

TEST_CASE("metrics match the reference formulas on random matrices") {
    std::mt19937_64 rng(6021023);
    for (int i = 0; i < 100; ++i) {
        const ConfusionMatrix cm{rng() % 500, rng() % 500, rng() % 500, rng() % 500};
        const auto got = convml::compute_metrics(cm);
        const auto want = oracle::metrics_reference(cm.tp, cm.fp, cm.tn, cm.fn);
        CHECK(got.tpr.has_value() == want.tpr.has_value());
        if (got.tpr) CHECK(std::fabs(*got.tpr - *want.tpr) <= 1e-12);
        if (got.fpr) CHECK(std::fabs(*got.fpr - *want.fpr) <= 1e-12);
        if (got.precision) CHECK(std::fabs(*got.precision - *want.precision) <= 1e-12);
        if (got.f_measure) CHECK(std::fabs(*got.f_measure - *want.f_measure) <= 1e-12);
        CHECK(got.recall == got.tpr);
    }
}

TEST_CASE("the f-measure lies between precision and recall") {
    std::mt19937_64 rng(404);
    for (int i = 0; i < 200; ++i) {
        const ConfusionMatrix cm{1 + rng() % 300, rng() % 300, rng() % 300, rng() % 300};
        const auto r = convml::compute_metrics(cm);
        if (!r.f_measure) continue;
        const double lo = std::min(*r.precision, *r.recall);
        const double hi = std::max(*r.precision, *r.recall);
        CHECK(*r.f_measure >= lo - 1e-12);
        CHECK(*r.f_measure <= hi + 1e-12);
    }
}

TEST_CASE("zero denominators flag metrics as undefined rather than zero") {
    const auto empty = convml::compute_metrics({});
    CHECK_FALSE(empty.tpr.has_value());
    CHECK_FALSE(empty.fpr.has_value());
    CHECK_FALSE(empty.precision.has_value());
    CHECK_FALSE(empty.f_measure.has_value());
    CHECK_FALSE(empty.weighted_tpr.has_value());
    CHECK(empty.tpr.value_or(-1.0) == -1.0);  // no silent 0 anywhere

    // No malware in truth: TPR undefined, FPR still defined.
    const auto skewed = convml::compute_metrics({0, 3, 7, 0});
    CHECK_FALSE(skewed.tpr.has_value());
    CHECK(skewed.fpr.has_value());
}

TEST_CASE("weighted averages blend both class views by support") {
    const ConfusionMatrix cm{8, 2, 6, 4};  // malware support 12, goodware 8
    const auto r = convml::compute_metrics(cm);
    const double malware_tpr = 8.0 / 12.0;
    const double goodware_tpr = 6.0 / 8.0;
    CHECK(*r.weighted_tpr ==
          doctest::Approx((malware_tpr * 12 + goodware_tpr * 8) / 20.0).epsilon(1e-12));
    CHECK(r.weighted_recall == r.weighted_tpr);
    const double malware_precision = 8.0 / 10.0;
    const double goodware_precision = 6.0 / 10.0;
    CHECK(*r.weighted_precision ==
          doctest::Approx((malware_precision * 12 + goodware_precision * 8) / 20.0)
              .epsilon(1e-12));
}

TEST_CASE("stratified folds partition the data with balanced class counts") {
    const Dataset ds = separable_full(53, 9);
    const auto folds = convml::stratified_folds(ds, 10, 3);
    REQUIRE(folds.size() == 10);
    std::set<size_t> seen;
    std::vector<size_t> malware_per_fold;
    for (const auto& fold : folds) {
        size_t malware = 0;
        for (size_t row : fold) {
            CHECK(seen.insert(row).second);  // pairwise disjoint
            if (ds.instances()[row].label == Label::Malware) ++malware;
        }
        malware_per_fold.push_back(malware);
    }
    CHECK(seen.size() == ds.size());  // union is the dataset
    const auto [lo, hi] = std::minmax_element(malware_per_fold.begin(), malware_per_fold.end());
    CHECK(*hi - *lo <= 1);  // stratification bound
}

TEST_CASE("cross-validation rejects infeasible stratification") {
    const Dataset ds = separable_full(4, 1);  // 4 per class < k = 10
    CHECK_THROWS_AS(convml::stratified_folds(ds, 10, 1), convml::StratificationInfeasible);
    CHECK_THROWS_AS(convml::stratified_folds(ds, 1, 1), convml::Error);
}

TEST_CASE("a separable dataset cross-validates perfectly with the tree") {
    const Dataset ds = separable_full(60, 4);
    const auto spec = ClassifierSpec::defaults(ClassifierKind::DecisionTree, 1);
    const auto report = convml::cross_validate(ds, spec, 10, 42);
    REQUIRE(report.tpr.has_value());
    CHECK(*report.tpr == 1.0);
    CHECK(*report.fpr == 0.0);
    CHECK(report.folds.size() == 10);
    uint64_t pooled = 0;
    for (const auto& fold : report.folds) pooled += fold.total();
    CHECK(pooled == ds.size());
    CHECK(report.matrix.total() == ds.size());

    SUBCASE("the same seed reproduces the same confusion matrices") {
        const auto again = convml::cross_validate(ds, spec, 10, 42);
        CHECK(again.matrix == report.matrix);
        CHECK(again.folds == report.folds);
    }
}

TEST_CASE("holdout on the training data with memorizing kNN is perfect") {
    const Dataset ds = separable_full(25, 8);
    const auto model = convml::train_knn(ds);
    const auto report = convml::evaluate_holdout(*model, ds);
    CHECK(*report.tpr == 1.0);
    CHECK(*report.fpr == 0.0);
    CHECK(report.matrix.total() == ds.size());
}

TEST_CASE("an empty test set yields all-zero counts and undefined metrics") {
    const Dataset ds = separable_full(10, 2);
    const auto model = convml::train_knn(ds);
    const auto report = convml::evaluate_holdout(*model, ds.subset({}));
    CHECK(report.matrix.total() == 0);
    CHECK_FALSE(report.tpr.has_value());
}

TEST_CASE("a constant-class model pins TPR to one or zero") {
    std::vector<convml::Instance> rows;
    for (int i = 0; i < 12; ++i) {
        convml::Instance inst;
        inst.label = Label::Malware;
        inst.values = {6, 1, 2, 3, 4, 5, 6, 7, 8};
        rows.push_back(inst);
    }
    const Dataset malware_only(Dataset::full_feature_names(), rows);
    const auto model = convml::train_knn(malware_only);
    const Dataset mixed = separable_full(10, 5);
    const auto report = convml::evaluate_holdout(*model, mixed);
    CHECK(*report.tpr == 1.0);
    CHECK(*report.fpr == 1.0);
}

TEST_CASE("holdout rejects schema mismatches") {
    const Dataset full = separable_full(10, 6);
    const auto model = convml::train_knn(full);
    const Dataset reduced = convml::select_features(full, FeatureMode::Reduced);
    CHECK_THROWS_AS(convml::evaluate_holdout(*model, reduced), convml::SchemaMismatch);
}

TEST_CASE("the experiment emits one entry per classifier, mode and protocol") {
    const Dataset train = separable_full(30, 12);
    const Dataset test = separable_full(15, 13);
    const std::vector<ClassifierSpec> specs = {
        ClassifierSpec::defaults(ClassifierKind::DecisionTree, 1),
        ClassifierSpec::defaults(ClassifierKind::Knn, 1),
    };
    const auto report = convml::run_experiment(train, test, specs, 10, 5);
    CHECK(report.entries.size() == 2 * 2 * 2);
    for (ClassifierKind kind : {ClassifierKind::DecisionTree, ClassifierKind::Knn}) {
        for (FeatureMode mode : {FeatureMode::Full, FeatureMode::Reduced}) {
            for (EvalProtocol protocol :
                 {EvalProtocol::CrossValidation, EvalProtocol::Holdout}) {
                CHECK(report.find(kind, mode, protocol) != nullptr);
            }
        }
    }

    SUBCASE("identical metrics in both modes summarize as With/Without") {
        const auto best = report.best_per_classifier();
        REQUIRE(best.size() == 2);
        // Port_B separates the classes in both schemas, so the tree ties.
        CHECK(best[0].classifier == ClassifierKind::DecisionTree);
        CHECK(best[0].feature_selection == "With/Without");
    }

    SUBCASE("reports are a pure function of inputs and seed") {
        const auto again = convml::run_experiment(train, test, specs, 10, 5);
        REQUIRE(again.entries.size() == report.entries.size());
        for (size_t i = 0; i < report.entries.size(); ++i) {
            CHECK(again.entries[i].metrics.matrix == report.entries[i].metrics.matrix);
            CHECK(again.entries[i].metrics.tpr == report.entries[i].metrics.tpr);
        }
    }
}
