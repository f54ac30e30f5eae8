#pragma once

#include <memory>

#include "convml/classifier.hpp"

namespace convml {

/// Naive Bayes over equal-width-discretized numeric attributes with
/// additive smoothing:
///   P(c)        = (n_c + alpha) / (N + alpha * #classes)
///   P(bin | c)  = (count + alpha) / (n_c + alpha * #bins)
/// Test values outside the training range clamp into the edge bins.
/// Posteriors are computed in log space and normalized to sum to one.
class NaiveBayesModel final : public Model {
public:
    NaiveBayesModel(std::vector<std::string> feature_names, NaiveBayesParams params,
                    std::array<uint64_t, kClassCount> class_counts, std::vector<double> minima,
                    std::vector<double> widths, std::vector<uint64_t> bin_counts);

    const NaiveBayesParams& params() const { return params_; }
    double prior(Label label) const;

    /// Class posteriors for one instance, normalized. Exposed so calibration
    /// properties can be checked directly.
    std::array<double, kClassCount> posterior(std::span<const double> values) const;

protected:
    Prediction do_predict(std::span<const double> values) const override;
    void save_body(std::ostream& out) const override;

private:
    size_t bin_of(size_t attribute, double value) const;
    uint64_t count_at(size_t cls, size_t attribute, size_t bin) const;

    NaiveBayesParams params_;
    std::array<uint64_t, kClassCount> class_counts_{};
    std::vector<double> minima_;  // per attribute
    std::vector<double> widths_;  // per attribute; 0 marks a degenerate range
    std::vector<uint64_t> bin_counts_;  // [class][attribute][bin], flattened
};

std::unique_ptr<NaiveBayesModel> train_naive_bayes(const Dataset& dataset,
                                                   const NaiveBayesParams& params = {});

}  // namespace convml
