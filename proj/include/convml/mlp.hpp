#pragma once

#include <memory>

#include "convml/classifier.hpp"
#include "convml/rng.hpp"

namespace convml {

/// Hidden layer width used when MlpParams.hidden is 0: floor((F + classes) / 2).
int default_hidden_units(size_t feature_count, size_t class_count = kClassCount);

/// Fully-connected single-hidden-layer network, sigmoid units throughout,
/// squared-error loss. Weight rows carry a trailing bias column. Kept as a
/// plain struct so the backward pass can be verified against finite
/// differences directly.
struct MlpNetwork {
    size_t inputs = 0;
    size_t hidden = 0;
    size_t outputs = 0;
    std::vector<double> hidden_weights;  // hidden x (inputs + 1)
    std::vector<double> output_weights;  // outputs x (hidden + 1)

    static MlpNetwork random(size_t inputs, size_t hidden, size_t outputs, Engine& engine);

    std::vector<double> forward(std::span<const double> x) const;

    struct Gradients {
        std::vector<double> hidden_weights;
        std::vector<double> output_weights;
    };

    /// Loss 0.5 * sum((y - t)^2) for one example, with dLoss/dWeight written
    /// into grads (resized as needed).
    double loss_and_gradients(std::span<const double> x, std::span<const double> target,
                              Gradients& grads) const;

    /// Loss only; the probe used by finite-difference checks.
    double loss(std::span<const double> x, std::span<const double> target) const;
};

class MlpModel final : public Model {
public:
    MlpModel(std::vector<std::string> feature_names, MlpParams params, MlpNetwork network,
             std::vector<double> minima, std::vector<double> widths);

    const MlpParams& params() const { return params_; }
    const MlpNetwork& network() const { return network_; }

protected:
    Prediction do_predict(std::span<const double> values) const override;
    void save_body(std::ostream& out) const override;

private:
    MlpParams params_;
    MlpNetwork network_;
    std::vector<double> minima_;  // input scaling to [0, 1]
    std::vector<double> widths_;
};

/// Stochastic gradient descent with momentum over seeded shuffled epochs.
std::unique_ptr<MlpModel> train_mlp(const Dataset& dataset, const MlpParams& params = {},
                                    uint64_t seed = 0);

}  // namespace convml
