#include <doctest.h>

#include <random>
#include <sstream>

#include "convml/decision_tree.hpp"
#include "support/oracles.hpp"

using convml::Dataset;
using convml::DecisionTreeParams;
using convml::Label;

TEST_CASE("entropy matches hand values and the definition") {
    CHECK(convml::entropy({1, 1}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(convml::entropy({42, 0}) == 0.0);
    CHECK(convml::entropy({0, 7}) == 0.0);
    CHECK(convml::entropy({9, 5}) == doctest::Approx(0.9403).epsilon(1e-4 / 0.9403));
    CHECK(convml::entropy({9, 5}) ==
          doctest::Approx(oracle::entropy_reference({9, 5})).epsilon(1e-12));
    CHECK_THROWS_AS(convml::entropy({0, 0, 0}), convml::DegenerateDistribution);
}

TEST_CASE("entropy stays within [0, log2 k] and splits never gain more than the parent") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 500; ++round) {
        const uint64_t lg = rng() % 50, lm = rng() % 50;
        const uint64_t rg = rng() % 50, rm = rng() % 50;
        if (lg + lm == 0 || rg + rm == 0) continue;
        const double parent = convml::entropy({lg + rg, lm + rm});
        CHECK(parent >= 0.0);
        CHECK(parent <= 1.0 + 1e-12);
        const double nl = double(lg + lm), nr = double(rg + rm), n = nl + nr;
        const double children =
            nl / n * convml::entropy({lg, lm}) + nr / n * convml::entropy({rg, rm});
        const double gain = parent - children;
        CHECK(gain >= -1e-12);        // information gain is never negative
        CHECK(gain <= parent + 1e-12);
    }
}

TEST_CASE("single-class training data collapses to one leaf") {
    const Dataset ds = oracle::custom_dataset({{Label::Malware, {1.0, 2.0}},
                                               {Label::Malware, {3.0, 4.0}},
                                               {Label::Malware, {5.0, 6.0}}});
    const auto model = convml::train_decision_tree(ds);
    CHECK(model->tree().nodes.size() == 1);
    CHECK(model->tree().leaf_count() == 1);
    const auto p = model->predict(ds.instances()[0]);
    CHECK(p.label == Label::Malware);
    CHECK(p.score == 1.0);
}

TEST_CASE("an unpruned tree shatters conflict-free data") {
    const Dataset ds = oracle::conflict_free_random(31337, 200, 3);
    DecisionTreeParams params;
    params.prune = false;
    params.min_leaf = 1;
    const auto model = convml::train_decision_tree(ds, params);
    for (const auto& inst : ds.instances()) {
        CHECK(model->predict(inst).label == inst.label);
    }
}

TEST_CASE("pruning never grows the tree") {
    // Noisy labels: the same attribute region carries both classes.
    std::mt19937_64 rng(5);
    std::vector<std::pair<Label, std::vector<double>>> rows;
    for (int i = 0; i < 300; ++i) {
        const double x = double(rng() % 20);
        const bool noise = rng() % 5 == 0;
        const Label label = (x < 10) == !noise ? Label::Goodware : Label::Malware;
        rows.push_back({label, {x, double(rng() % 7)}});
    }
    const Dataset ds = oracle::custom_dataset(rows);
    DecisionTreeParams unpruned;
    unpruned.prune = false;
    DecisionTreeParams pruned;  // defaults: confidence 0.25, min_leaf 2
    const auto full = convml::train_decision_tree(ds, unpruned);
    const auto cut = convml::train_decision_tree(ds, pruned);
    CHECK(cut->tree().leaf_count() <= full->tree().leaf_count());
    CHECK(cut->tree().leaf_count() >= 1);
}

TEST_CASE("training twice yields structurally identical models") {
    const Dataset ds = oracle::conflict_free_random(99, 120, 4);
    const auto a = convml::train_decision_tree(ds);
    const auto b = convml::train_decision_tree(ds);
    std::ostringstream sa, sb;
    a->save(sa);
    b->save(sb);
    CHECK(sa.str() == sb.str());
}

TEST_CASE("a reloaded tree predicts identically") {
    const Dataset ds = oracle::conflict_free_random(17, 150, 3);
    const auto model = convml::train_decision_tree(ds);
    std::stringstream buffer;
    model->save(buffer);
    const auto loaded = convml::Model::load(buffer);
    CHECK(loaded->kind() == convml::ClassifierKind::DecisionTree);
    CHECK(loaded->schema_fingerprint() == model->schema_fingerprint());
    for (const auto& inst : ds.instances()) {
        const auto x = model->predict(inst);
        const auto y = loaded->predict(inst);
        CHECK(x.label == y.label);
        CHECK(x.score == y.score);
    }
}

TEST_CASE("degenerate inputs are rejected") {
    const Dataset empty(std::vector<std::string>{"x0"}, {});
    CHECK_THROWS_AS(convml::train_decision_tree(empty), convml::EmptyTrainingSet);

    const Dataset ds = oracle::custom_dataset({{Label::Goodware, {1.0}}});
    const auto model = convml::train_decision_tree(ds);
    convml::Instance wrong;
    wrong.values = {1.0, 2.0};
    CHECK_THROWS_AS(model->predict(wrong), convml::SchemaMismatch);
    convml::Instance nan_inst;
    nan_inst.values = {std::numeric_limits<double>::quiet_NaN()};
    CHECK_THROWS_AS(model->predict(nan_inst), convml::SchemaMismatch);
}
