#pragma once

#include <memory>

#include "convml/decision_tree.hpp"

namespace convml {

/// K = floor(log2 F) + 1 attributes examined per split, F excluding the class.
int default_features_per_split(size_t feature_count);

/// Bagged ensemble of unpruned, feature-sampled trees. Tree t trains on a
/// bootstrap sample drawn from an engine seeded with
/// derive_seed(seed, "rf-tree-<t>") (or the forest seed itself when
/// per_tree_seeds is off). Prediction is the majority vote with the vote
/// fraction as score; ties resolve to the lower class index.
class RandomForestModel final : public Model {
public:
    RandomForestModel(std::vector<std::string> feature_names, RandomForestParams params,
                      std::vector<FlatTree> trees);

    const RandomForestParams& params() const { return params_; }
    const std::vector<FlatTree>& trees() const { return trees_; }

protected:
    Prediction do_predict(std::span<const double> values) const override;
    void save_body(std::ostream& out) const override;

private:
    RandomForestParams params_;
    std::vector<FlatTree> trees_;
};

std::unique_ptr<RandomForestModel> train_random_forest(const Dataset& dataset,
                                                       const RandomForestParams& params = {},
                                                       uint64_t seed = 0);

/// Grow the single tree a forest would grow at index `tree_index` with the
/// given forest seed. Lets the degenerate one-tree ensemble be checked
/// against its base learner.
FlatTree grow_forest_tree(const Dataset& dataset, const RandomForestParams& params, uint64_t seed,
                          int tree_index);

}  // namespace convml
