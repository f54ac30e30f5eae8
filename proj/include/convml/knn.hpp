#pragma once

#include <memory>

#include "convml/classifier.hpp"

namespace convml {

/// k-nearest-neighbours over min-max-normalized Euclidean distance.
/// Normalization bounds come from the training data; an attribute with a
/// degenerate range (min == max) contributes zero to every distance.
/// Distance ties resolve to the earlier training instance, vote ties to the
/// lower class index. Score is the winning label's vote fraction.
class KnnModel final : public Model {
public:
    /// `values` is the row-major instance matrix, labels_.size() rows by
    /// feature_names.size() columns.
    KnnModel(std::vector<std::string> feature_names, KnnParams params,
             std::vector<double> values, std::vector<Label> labels, std::vector<double> minima,
             std::vector<double> maxima);

    const KnnParams& params() const { return params_; }
    size_t stored_instances() const { return labels_.size(); }
    const std::vector<double>& minima() const { return minima_; }
    const std::vector<double>& maxima() const { return maxima_; }

protected:
    Prediction do_predict(std::span<const double> values) const override;
    void save_body(std::ostream& out) const override;

private:
    KnnParams params_;
    std::vector<double> values_;  // row-major
    std::vector<Label> labels_;
    std::vector<double> minima_;
    std::vector<double> maxima_;
};

std::unique_ptr<KnnModel> train_knn(const Dataset& dataset, const KnnParams& params = {});

}  // namespace convml
