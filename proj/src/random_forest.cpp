#include "convml/random_forest.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "textutil.hpp"
#include "tree_builder.hpp"

namespace convml {

int default_features_per_split(size_t feature_count) {
    int k = 1;
    while (feature_count >= 2) {
        feature_count /= 2;
        ++k;
    }
    return k;
}

RandomForestModel::RandomForestModel(std::vector<std::string> feature_names,
                                     RandomForestParams params, std::vector<FlatTree> trees)
    : Model(ClassifierKind::RandomForest, std::move(feature_names)),
      params_(params),
      trees_(std::move(trees)) {}

Prediction RandomForestModel::do_predict(std::span<const double> values) const {
    std::array<size_t, kClassCount> votes{};
    for (const FlatTree& tree : trees_) {
        votes[static_cast<size_t>(tree.predict(values).label)] += 1;
    }
    Prediction p;
    p.label = votes[1] > votes[0] ? Label::Malware : Label::Goodware;
    p.score = static_cast<double>(votes[static_cast<size_t>(p.label)]) /
              static_cast<double>(trees_.size());
    return p;
}

void RandomForestModel::save_body(std::ostream& out) const {
    out << "params trees=" << params_.trees
        << " features_per_split=" << params_.features_per_split
        << " bootstrap=" << (params_.bootstrap ? 1 : 0)
        << " per_tree_seeds=" << (params_.per_tree_seeds ? 1 : 0) << "\n";
    for (const FlatTree& tree : trees_) {
        out << "nodes " << tree.nodes.size() << "\n";
        for (const auto& node : tree.nodes) {
            out << node.attribute << ' ' << detail::format_hexfloat(node.threshold) << ' '
                << node.left << ' ' << node.right << ' ' << node.counts[0] << ' '
                << node.counts[1] << "\n";
        }
    }
}

namespace {

FlatTree grow_one(const Dataset& dataset, const RandomForestParams& params, uint64_t tree_seed) {
    Engine engine(tree_seed);
    const size_t n = dataset.size();
    std::vector<size_t> rows(n);
    if (params.bootstrap) {
        for (size_t i = 0; i < n; ++i) {
            rows[i] = static_cast<size_t>(engine.below(n));
        }
    } else {
        std::iota(rows.begin(), rows.end(), 0);
    }
    detail::TreeBuildConfig config;
    config.min_leaf = 1;  // forest trees grow out fully
    config.features_per_split = params.features_per_split > 0
                                    ? params.features_per_split
                                    : default_features_per_split(dataset.feature_count());
    config.engine = &engine;
    return detail::grow_tree(dataset, rows, config);
}

uint64_t tree_seed_of(const RandomForestParams& params, uint64_t seed, int tree_index) {
    if (!params.per_tree_seeds) return seed;
    return derive_seed(seed, "rf-tree-" + std::to_string(tree_index));
}

}  // namespace

FlatTree grow_forest_tree(const Dataset& dataset, const RandomForestParams& params, uint64_t seed,
                          int tree_index) {
    return grow_one(dataset, params, tree_seed_of(params, seed, tree_index));
}

std::unique_ptr<RandomForestModel> train_random_forest(const Dataset& dataset,
                                                       const RandomForestParams& params,
                                                       uint64_t seed) {
    if (dataset.empty()) {
        throw EmptyTrainingSet("random forest needs at least one training instance");
    }
    if (params.trees < 1) {
        throw Error("forest needs at least one tree");
    }
    const auto started = std::chrono::steady_clock::now();
    std::vector<FlatTree> trees;
    trees.reserve(static_cast<size_t>(params.trees));
    for (int t = 0; t < params.trees; ++t) {
        trees.push_back(grow_one(dataset, params, tree_seed_of(params, seed, t)));
    }
    auto model = std::make_unique<RandomForestModel>(dataset.feature_names(), params,
                                                     std::move(trees));
    set_build_time(*model, std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                         started)
                               .count());
    return model;
}

}  // namespace convml
