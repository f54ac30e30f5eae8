#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "convml/naive_bayes.hpp"
#include "support/oracles.hpp"

using convml::Dataset;
using convml::Label;
using convml::NaiveBayesParams;

namespace {

Dataset nine_five_dataset() {
    std::vector<std::pair<Label, std::vector<double>>> rows;
    for (int i = 0; i < 9; ++i) rows.push_back({Label::Goodware, {double(i % 2)}});
    for (int i = 0; i < 5; ++i) rows.push_back({Label::Malware, {double(i % 2)}});
    return oracle::custom_dataset(rows);
}

}  // namespace

TEST_CASE("smoothed priors follow (n_c + a) / (N + a * classes)") {
    const auto model = convml::train_naive_bayes(nine_five_dataset());
    CHECK(model->prior(Label::Goodware) == doctest::Approx(0.6333).epsilon(1e-4 / 0.6333));
    CHECK(model->prior(Label::Goodware) == doctest::Approx(9.5 / 15.0).epsilon(1e-12));
    CHECK(model->prior(Label::Malware) == doctest::Approx(5.5 / 15.0).epsilon(1e-12));
}

TEST_CASE("bins that never saw a class still get positive probability") {
    // Goodware only occupies low values, malware only high ones.
    const Dataset ds = oracle::custom_dataset({{Label::Goodware, {0.0}},
                                               {Label::Goodware, {1.0}},
                                               {Label::Malware, {9.0}},
                                               {Label::Malware, {10.0}}});
    const auto model = convml::train_naive_bayes(ds);
    convml::Instance probe;
    probe.values = {0.5};
    const auto post = model->posterior(probe.values);
    CHECK(post[0] > 0.0);
    CHECK(post[1] > 0.0);
    CHECK(model->predict(probe).label == Label::Goodware);
}

TEST_CASE("posteriors sum to one") {
    std::mt19937_64 rng(1234);
    std::vector<std::pair<Label, std::vector<double>>> rows;
    for (int i = 0; i < 120; ++i) {
        rows.push_back({rng() % 2 ? Label::Malware : Label::Goodware,
                        {double(rng() % 500), double(rng() % 90), double(rng() % 7)}});
    }
    const auto model = convml::train_naive_bayes(oracle::custom_dataset(rows));
    for (int i = 0; i < 200; ++i) {
        const std::vector<double> q = {double(rng() % 600), double(rng() % 100),
                                       double(rng() % 9)};
        const auto post = model->posterior(q);
        CHECK(std::fabs(post[0] + post[1] - 1.0) <= 1e-9);
    }
}

TEST_CASE("a binary attribute reproduces the hand-computed Bayes posterior") {
    // 6 goodware at x=0, 2 goodware at x=1; 1 malware at x=0, 3 malware at x=1.
    std::vector<std::pair<Label, std::vector<double>>> rows;
    for (int i = 0; i < 6; ++i) rows.push_back({Label::Goodware, {0.0}});
    for (int i = 0; i < 2; ++i) rows.push_back({Label::Goodware, {1.0}});
    rows.push_back({Label::Malware, {0.0}});
    for (int i = 0; i < 3; ++i) rows.push_back({Label::Malware, {1.0}});
    const auto model = convml::train_naive_bayes(oracle::custom_dataset(rows));

    // Training range is [0,1], ten bins of width 0.1: x=0 hits bin 0, x=1
    // clamps into bin 9. Enumerate P(c|x) with the same counts by hand.
    const double alpha = 0.5;
    const auto posterior_of = [&](double g_count, double m_count) {
        const double pg = (8 + alpha) / (12 + alpha * 2) *
                          ((g_count + alpha) / (8 + alpha * 10));
        const double pm = (4 + alpha) / (12 + alpha * 2) *
                          ((m_count + alpha) / (4 + alpha * 10));
        return std::array<double, 2>{pg / (pg + pm), pm / (pg + pm)};
    };

    const auto at0 = model->posterior(std::vector<double>{0.0});
    const auto want0 = posterior_of(6, 1);
    CHECK(std::fabs(at0[0] - want0[0]) <= 1e-9);
    CHECK(std::fabs(at0[1] - want0[1]) <= 1e-9);

    const auto at1 = model->posterior(std::vector<double>{1.0});
    const auto want1 = posterior_of(2, 3);
    CHECK(std::fabs(at1[0] - want1[0]) <= 1e-9);
    CHECK(std::fabs(at1[1] - want1[1]) <= 1e-9);
}

TEST_CASE("a single training instance is predicted as its own label") {
    const Dataset ds = oracle::custom_dataset({{Label::Malware, {4.0, 2.0}}});
    const auto model = convml::train_naive_bayes(ds);
    CHECK(model->predict(ds.instances()[0]).label == Label::Malware);
}

TEST_CASE("values outside the training range clamp into the edge bins") {
    const Dataset ds = oracle::custom_dataset({{Label::Goodware, {0.0}},
                                               {Label::Goodware, {10.0}},
                                               {Label::Malware, {90.0}},
                                               {Label::Malware, {100.0}}});
    const auto model = convml::train_naive_bayes(ds);
    convml::Instance below, above;
    below.values = {2.0};
    above.values = {250.0};
    CHECK(model->predict(below).label == Label::Goodware);
    CHECK(model->predict(above).label == Label::Malware);
}

TEST_CASE("a reloaded model reproduces its posteriors") {
    const Dataset ds = oracle::conflict_free_random(55, 80, 4);
    const auto model = convml::train_naive_bayes(ds);
    std::stringstream buffer;
    model->save(buffer);
    const auto loaded = convml::Model::load(buffer);
    for (const auto& inst : ds.instances()) {
        CHECK(loaded->predict(inst).label == model->predict(inst).label);
        CHECK(loaded->predict(inst).score == doctest::Approx(model->predict(inst).score));
    }
}

TEST_CASE("empty data and invalid parameters are rejected") {
    const Dataset empty(std::vector<std::string>{"x0"}, {});
    CHECK_THROWS_AS(convml::train_naive_bayes(empty), convml::EmptyTrainingSet);
    const Dataset ds = oracle::custom_dataset({{Label::Goodware, {1.0}}});
    CHECK_THROWS_AS(convml::train_naive_bayes(ds, NaiveBayesParams{.bins = 0}), convml::Error);
    CHECK_THROWS_AS(convml::train_naive_bayes(ds, NaiveBayesParams{.alpha = 0.0}), convml::Error);
}
