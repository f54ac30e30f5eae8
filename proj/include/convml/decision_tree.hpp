#pragma once

#include <array>
#include <memory>

#include "convml/classifier.hpp"

namespace convml {

/// Binary decision tree over numeric attributes, nodes stored flat.
/// Instances route left when value <= threshold. Leaves keep the training
/// class distribution; prediction is the majority class with the class
/// fraction as score (ties resolve to the lower class index).
struct FlatTree {
    struct Node {
        int attribute = -1;  // -1 marks a leaf
        double threshold = 0.0;
        int left = -1;
        int right = -1;
        std::array<uint64_t, kClassCount> counts{};
    };

    std::vector<Node> nodes;  // nodes[0] is the root

    Prediction predict(std::span<const double> values) const;
    size_t leaf_count() const;
};

class DecisionTreeModel final : public Model {
public:
    DecisionTreeModel(std::vector<std::string> feature_names, DecisionTreeParams params,
                      FlatTree tree);

    const FlatTree& tree() const { return tree_; }
    const DecisionTreeParams& params() const { return params_; }

protected:
    Prediction do_predict(std::span<const double> values) const override;
    void save_body(std::ostream& out) const override;

private:
    DecisionTreeParams params_;
    FlatTree tree_;
};

/**
 * Top-down induction with binary midpoint thresholds on numeric attributes.
 * The split attribute is chosen by gain ratio among attributes whose
 * information gain reaches the mean gain of the candidate splits; growth
 * stops on purity, on the min_leaf floor, or when no split gains. With
 * params.prune, subtrees are replaced bottom-up whenever the pessimistic
 * error bound (at params.pruning_confidence) of a single leaf does not
 * exceed the subtree's.
 */
std::unique_ptr<DecisionTreeModel> train_decision_tree(const Dataset& dataset,
                                                       const DecisionTreeParams& params = {});

}  // namespace convml
