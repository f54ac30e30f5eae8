#include <doctest.h>

#include <sstream>

#include "convml/decision_tree.hpp"
#include "convml/knn.hpp"
#include "convml/mlp.hpp"
#include "convml/naive_bayes.hpp"
#include "convml/random_forest.hpp"
#include "support/oracles.hpp"

using convml::Dataset;
using convml::KnnParams;
using convml::Label;

TEST_CASE("the model stores exactly the training instances") {
    const Dataset ds = oracle::conflict_free_random(3, 25, 4);
    const auto model = convml::train_knn(ds);
    CHECK(model->stored_instances() == 25);
    CHECK(model->params().k == 1);
}

TEST_CASE("an exact training match wins with full confidence at k=1") {
    const Dataset ds = oracle::conflict_free_random(8, 40, 3);
    const auto model = convml::train_knn(ds);
    for (const auto& inst : ds.instances()) {
        const auto p = model->predict(inst);
        CHECK(p.label == inst.label);
        CHECK(p.score == 1.0);
    }
}

TEST_CASE("normalized distance decides: query 4 between 0 and 10 is Goodware") {
    const Dataset ds = oracle::custom_dataset({{Label::Goodware, {0.0}},
                                               {Label::Malware, {10.0}}});
    const auto model = convml::train_knn(ds);
    convml::Instance query;
    query.values = {4.0};
    CHECK(model->predict(query).label == Label::Goodware);
    query.values = {6.0};
    CHECK(model->predict(query).label == Label::Malware);
}

TEST_CASE("distance ties break toward the earlier training instance") {
    const Dataset ds = oracle::custom_dataset({{Label::Malware, {0.0}},
                                               {Label::Goodware, {10.0}}});
    const auto model = convml::train_knn(ds);
    convml::Instance query;
    query.values = {5.0};
    CHECK(model->predict(query).label == Label::Malware);  // index 0 wins the tie
}

TEST_CASE("a constant attribute contributes nothing to the distance") {
    const Dataset ds = oracle::custom_dataset({{Label::Goodware, {7.0, 0.0}},
                                               {Label::Malware, {7.0, 10.0}}});
    const auto model = convml::train_knn(ds);
    convml::Instance query;
    query.values = {1000.0, 2.0};  // wild value on the degenerate attribute
    CHECK(model->predict(query).label == Label::Goodware);

    // All attributes constant: every distance is zero, first instance wins.
    const Dataset flat = oracle::custom_dataset({{Label::Malware, {1.0}},
                                                 {Label::Goodware, {1.0}},
                                                 {Label::Goodware, {1.0}}});
    const auto flat_model = convml::train_knn(flat, KnnParams{.k = 1});
    convml::Instance q2;
    q2.values = {1.0};
    CHECK(flat_model->predict(q2).label == Label::Malware);
}

TEST_CASE("vote fraction lands in the score and class order breaks vote ties") {
    const Dataset ds = oracle::custom_dataset({{Label::Malware, {0.0}},
                                               {Label::Malware, {1.0}},
                                               {Label::Goodware, {2.0}}});
    const auto model = convml::train_knn(ds, KnnParams{.k = 3});
    convml::Instance query;
    query.values = {1.0};
    const auto p = model->predict(query);
    CHECK(p.label == Label::Malware);
    CHECK(p.score == doctest::Approx(2.0 / 3.0));

    const Dataset even = oracle::custom_dataset({{Label::Malware, {0.0}},
                                                 {Label::Goodware, {2.0}}});
    const auto even_model = convml::train_knn(even, KnnParams{.k = 2});
    const auto tie = even_model->predict(query);
    CHECK(tie.label == Label::Goodware);  // Goodware < Malware on equal votes
    CHECK(tie.score == doctest::Approx(0.5));
}

TEST_CASE("kNN builds faster than every other classifier on the same data") {
    const Dataset ds = oracle::conflict_free_random(77, 1500, 9);
    // Timing comparisons flake under scheduler noise; take the best of a few
    // runs for each side before comparing.
    auto best_time = [&](auto&& trainer) {
        double best = 1e9;
        for (int i = 0; i < 3; ++i) {
            best = std::min(best, trainer()->build_time_s());
        }
        return best;
    };
    const double knn = best_time([&] { return convml::train_knn(ds); });
    const double tree = best_time([&] { return convml::train_decision_tree(ds); });
    const double bayes = best_time([&] { return convml::train_naive_bayes(ds); });
    const double forest = best_time([&] {
        convml::RandomForestParams params;
        params.trees = 10;
        return convml::train_random_forest(ds, params, 1);
    });
    const double mlp = best_time([&] {
        convml::MlpParams params;
        params.epochs = 20;
        return convml::train_mlp(ds, params, 1);
    });
    CHECK(knn <= tree);
    CHECK(knn <= bayes);
    CHECK(knn <= forest);
    CHECK(knn <= mlp);
}

TEST_CASE("a reloaded kNN model predicts identically") {
    const Dataset ds = oracle::conflict_free_random(21, 60, 5);
    const auto model = convml::train_knn(ds, KnnParams{.k = 3});
    std::stringstream buffer;
    model->save(buffer);
    const auto loaded = convml::Model::load(buffer);
    for (const auto& inst : ds.instances()) {
        CHECK(loaded->predict(inst).label == model->predict(inst).label);
        CHECK(loaded->predict(inst).score == model->predict(inst).score);
    }
}

TEST_CASE("empty training data and bad k are rejected") {
    const Dataset empty(std::vector<std::string>{"x0"}, {});
    CHECK_THROWS_AS(convml::train_knn(empty), convml::EmptyTrainingSet);
    const Dataset ds = oracle::custom_dataset({{Label::Goodware, {1.0}}});
    CHECK_THROWS_AS(convml::train_knn(ds, KnnParams{.k = 0}), convml::Error);
}
