#pragma once

#include <vector>

#include "convml/decision_tree.hpp"
#include "convml/rng.hpp"

namespace convml::detail {

// Shared induction core for the pruned C4.5-style tree and the forest's
// unpruned random trees.
struct TreeBuildConfig {
    int min_leaf = 2;
    int features_per_split = 0;  // 0 = consider every attribute
    Engine* engine = nullptr;    // required when features_per_split > 0
};

FlatTree grow_tree(const Dataset& dataset, const std::vector<size_t>& rows,
                   const TreeBuildConfig& config);

/// Pessimistic upper bound on additional errors for a leaf covering n
/// instances with `errors` observed mistakes, at the given confidence.
double added_errors(double n, double errors, double confidence);

void prune_tree(FlatTree& tree, double confidence);

}  // namespace convml::detail
