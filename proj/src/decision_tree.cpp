#include "convml/decision_tree.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "textutil.hpp"
#include "tree_builder.hpp"

namespace convml {

double entropy(std::span<const uint64_t> class_counts) {
    uint64_t total = 0;
    for (uint64_t c : class_counts) total += c;
    if (total == 0) {
        throw DegenerateDistribution("entropy of an all-zero count vector");
    }
    double bits = 0.0;
    for (uint64_t c : class_counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / static_cast<double>(total);
        bits -= p * std::log2(p);
    }
    return bits;
}

double entropy(std::initializer_list<uint64_t> class_counts) {
    return entropy(std::span<const uint64_t>(class_counts.begin(), class_counts.size()));
}

Prediction FlatTree::predict(std::span<const double> values) const {
    int at = 0;
    for (;;) {
        const Node& node = nodes[static_cast<size_t>(at)];
        if (node.attribute < 0) {
            const uint64_t total = node.counts[0] + node.counts[1];
            Prediction p;
            p.label = node.counts[1] > node.counts[0] ? Label::Malware : Label::Goodware;
            const uint64_t winner = node.counts[static_cast<size_t>(p.label)];
            p.score = total == 0 ? 1.0
                                 : static_cast<double>(winner) / static_cast<double>(total);
            return p;
        }
        at = values[static_cast<size_t>(node.attribute)] <= node.threshold ? node.left
                                                                           : node.right;
    }
}

size_t FlatTree::leaf_count() const {
    size_t n = 0;
    for (const auto& node : nodes) {
        if (node.attribute < 0) ++n;
    }
    return n;
}

namespace detail {

namespace {

double entropy2(uint64_t a, uint64_t b) {
    const uint64_t total = a + b;
    if (total == 0 || a == 0 || b == 0) return 0.0;
    const double pa = static_cast<double>(a) / static_cast<double>(total);
    const double pb = static_cast<double>(b) / static_cast<double>(total);
    return -pa * std::log2(pa) - pb * std::log2(pb);
}

struct SplitCandidate {
    int attribute = -1;
    double threshold = 0.0;
    double gain = 0.0;
    double split_info = 0.0;
};

// Best threshold on one attribute: sort the rows by value, sweep the class
// boundary counts, keep the midpoint with the highest information gain that
// leaves min_leaf instances on each side.
SplitCandidate best_threshold(const Dataset& dataset, const std::vector<size_t>& rows,
                              int attribute, double parent_entropy, int min_leaf) {
    const auto& instances = dataset.instances();
    std::vector<size_t> order(rows);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        const double va = instances[a].values[static_cast<size_t>(attribute)];
        const double vb = instances[b].values[static_cast<size_t>(attribute)];
        if (va != vb) return va < vb;
        return a < b;
    });

    uint64_t total_g = 0, total_m = 0;
    for (size_t r : order) {
        (instances[r].label == Label::Goodware ? total_g : total_m) += 1;
    }
    const double n = static_cast<double>(order.size());

    SplitCandidate best;
    uint64_t left_g = 0, left_m = 0;
    for (size_t i = 0; i + 1 < order.size(); ++i) {
        (instances[order[i]].label == Label::Goodware ? left_g : left_m) += 1;
        const double v = instances[order[i]].values[static_cast<size_t>(attribute)];
        const double v_next = instances[order[i + 1]].values[static_cast<size_t>(attribute)];
        if (v == v_next) continue;
        const size_t left_n = i + 1;
        const size_t right_n = order.size() - left_n;
        if (left_n < static_cast<size_t>(min_leaf) || right_n < static_cast<size_t>(min_leaf)) {
            continue;
        }
        const double ln = static_cast<double>(left_n), rn = static_cast<double>(right_n);
        const double child = ln / n * entropy2(left_g, left_m) +
                             rn / n * entropy2(total_g - left_g, total_m - left_m);
        const double gain = parent_entropy - child;
        if (best.attribute < 0 || gain > best.gain) {
            best.attribute = attribute;
            best.threshold = v + (v_next - v) / 2.0;
            best.gain = gain;
            best.split_info = entropy2(left_n, right_n);
        }
    }
    return best;
}

struct Builder {
    const Dataset& dataset;
    const TreeBuildConfig& config;
    FlatTree tree;

    std::vector<int> feature_pool() {
        std::vector<int> all(dataset.feature_count());
        std::iota(all.begin(), all.end(), 0);
        if (config.features_per_split <= 0 ||
            static_cast<size_t>(config.features_per_split) >= all.size()) {
            return all;
        }
        // Partial Fisher-Yates: the first K slots become the sample.
        const size_t k = static_cast<size_t>(config.features_per_split);
        for (size_t i = 0; i < k; ++i) {
            const size_t j = i + static_cast<size_t>(config.engine->below(all.size() - i));
            std::swap(all[i], all[j]);
        }
        all.resize(k);
        std::sort(all.begin(), all.end());
        return all;
    }

    int grow(const std::vector<size_t>& rows) {
        std::array<uint64_t, kClassCount> counts{};
        for (size_t r : rows) {
            counts[static_cast<size_t>(dataset.instances()[r].label)] += 1;
        }

        const int index = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes.back().counts = counts;

        const bool pure = counts[0] == 0 || counts[1] == 0;
        if (pure || rows.size() < 2 * static_cast<size_t>(config.min_leaf)) {
            return index;
        }

        const double parent_entropy = entropy2(counts[0], counts[1]);
        std::vector<SplitCandidate> candidates;
        for (int attribute : feature_pool()) {
            SplitCandidate c =
                best_threshold(dataset, rows, attribute, parent_entropy, config.min_leaf);
            if (c.attribute >= 0) candidates.push_back(c);
        }
        if (candidates.empty()) {
            return index;
        }

        double mean_gain = 0.0;
        for (const auto& c : candidates) mean_gain += c.gain;
        mean_gain /= static_cast<double>(candidates.size());

        const SplitCandidate* best = nullptr;
        double best_ratio = -1.0;
        for (const auto& c : candidates) {
            if (c.gain + 1e-12 < mean_gain) continue;
            const double ratio = c.split_info > 0.0 ? c.gain / c.split_info : 0.0;
            if (best == nullptr || ratio > best_ratio ||
                (ratio == best_ratio && c.attribute < best->attribute)) {
                best = &c;
                best_ratio = ratio;
            }
        }
        if (best == nullptr || best->gain <= 1e-12) {
            return index;
        }

        std::vector<size_t> left_rows, right_rows;
        for (size_t r : rows) {
            const double v = dataset.instances()[r].values[static_cast<size_t>(best->attribute)];
            (v <= best->threshold ? left_rows : right_rows).push_back(r);
        }

        // Freeze split parameters before recursing; the node vector may move.
        const int attribute = best->attribute;
        const double threshold = best->threshold;
        const int left = grow(left_rows);
        const int right = grow(right_rows);
        FlatTree::Node& node = tree.nodes[static_cast<size_t>(index)];
        node.attribute = attribute;
        node.threshold = threshold;
        node.left = left;
        node.right = right;
        return index;
    }
};

// Inverse standard normal CDF (Acklam's rational approximation).
double inverse_normal(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    if (p <= 0.0) return -HUGE_VAL;
    if (p >= 1.0) return HUGE_VAL;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

FlatTree grow_tree(const Dataset& dataset, const std::vector<size_t>& rows,
                   const TreeBuildConfig& config) {
    Builder builder{dataset, config, {}};
    builder.grow(rows);
    return std::move(builder.tree);
}

double added_errors(double n, double errors, double confidence) {
    confidence = std::clamp(confidence, 1e-6, 0.5);
    if (errors < 1.0) {
        const double base = n * (1.0 - std::pow(confidence, 1.0 / n));
        if (errors <= 0.0) return base;
        return base + errors * (added_errors(n, 1.0, confidence) - base);
    }
    if (errors + 0.5 >= n) {
        return std::max(n - errors, 0.0);
    }
    const double z = inverse_normal(1.0 - confidence);
    const double f = (errors + 0.5) / n;
    const double r = (f + z * z / (2.0 * n) +
                      z * std::sqrt(f / n - f * f / n + z * z / (4.0 * n * n))) /
                     (1.0 + z * z / n);
    return r * n - errors;
}

namespace {

double node_observed_errors(const FlatTree::Node& node) {
    return static_cast<double>(std::min(node.counts[0], node.counts[1]));
}

double node_total(const FlatTree::Node& node) {
    return static_cast<double>(node.counts[0] + node.counts[1]);
}

// Returns the pessimistic error estimate of the (already pruned) subtree and
// collapses it to a leaf when a leaf would not be worse.
double prune_subtree(FlatTree& tree, int index, double confidence) {
    FlatTree::Node& node = tree.nodes[static_cast<size_t>(index)];
    const double n = node_total(node);
    const double leaf_estimate =
        node_observed_errors(node) + added_errors(n, node_observed_errors(node), confidence);
    if (node.attribute < 0) {
        return leaf_estimate;
    }
    const double subtree_estimate = prune_subtree(tree, node.left, confidence) +
                                    prune_subtree(tree, node.right, confidence);
    if (leaf_estimate <= subtree_estimate + 0.1) {
        node.attribute = -1;
        node.left = node.right = -1;
        return leaf_estimate;
    }
    return subtree_estimate;
}

// Drops nodes orphaned by subtree replacement and renumbers children.
void compact(FlatTree& tree) {
    FlatTree packed;
    packed.nodes.reserve(tree.nodes.size());
    if (tree.nodes.empty()) {
        tree = std::move(packed);
        return;
    }
    struct Frame {
        int old_index;
        int new_parent;
        bool left_child;
    };
    std::vector<Frame> work{{0, -1, false}};
    while (!work.empty()) {
        const Frame frame = work.back();
        work.pop_back();
        const int new_index = static_cast<int>(packed.nodes.size());
        packed.nodes.push_back(tree.nodes[static_cast<size_t>(frame.old_index)]);
        if (frame.new_parent >= 0) {
            auto& parent = packed.nodes[static_cast<size_t>(frame.new_parent)];
            (frame.left_child ? parent.left : parent.right) = new_index;
        }
        const FlatTree::Node& node = tree.nodes[static_cast<size_t>(frame.old_index)];
        if (node.attribute >= 0) {
            // Right pushed first so the left subtree stays contiguous.
            work.push_back({node.right, new_index, false});
            work.push_back({node.left, new_index, true});
        }
    }
    tree = std::move(packed);
}

}  // namespace

void prune_tree(FlatTree& tree, double confidence) {
    if (!tree.nodes.empty()) {
        prune_subtree(tree, 0, confidence);
        compact(tree);
    }
}

}  // namespace detail

DecisionTreeModel::DecisionTreeModel(std::vector<std::string> feature_names,
                                     DecisionTreeParams params, FlatTree tree)
    : Model(ClassifierKind::DecisionTree, std::move(feature_names)),
      params_(params),
      tree_(std::move(tree)) {}

Prediction DecisionTreeModel::do_predict(std::span<const double> values) const {
    return tree_.predict(values);
}

void DecisionTreeModel::save_body(std::ostream& out) const {
    out << "params confidence=" << detail::format_hexfloat(params_.pruning_confidence)
        << " min_leaf=" << params_.min_leaf << " prune=" << (params_.prune ? 1 : 0) << "\n";
    out << "nodes " << tree_.nodes.size() << "\n";
    for (const auto& node : tree_.nodes) {
        out << node.attribute << ' ' << detail::format_hexfloat(node.threshold) << ' '
            << node.left << ' ' << node.right << ' ' << node.counts[0] << ' ' << node.counts[1]
            << "\n";
    }
}

std::unique_ptr<DecisionTreeModel> train_decision_tree(const Dataset& dataset,
                                                       const DecisionTreeParams& params) {
    if (dataset.empty()) {
        throw EmptyTrainingSet("decision tree needs at least one training instance");
    }
    const auto started = std::chrono::steady_clock::now();
    std::vector<size_t> rows(dataset.size());
    std::iota(rows.begin(), rows.end(), 0);
    detail::TreeBuildConfig config;
    config.min_leaf = params.min_leaf;
    FlatTree tree = detail::grow_tree(dataset, rows, config);
    if (params.prune) {
        detail::prune_tree(tree, params.pruning_confidence);
    }
    auto model =
        std::make_unique<DecisionTreeModel>(dataset.feature_names(), params, std::move(tree));
    set_build_time(*model, std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                         started)
                               .count());
    return model;
}

}  // namespace convml
