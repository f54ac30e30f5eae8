#include "convml/mlp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <ostream>

#include "textutil.hpp"

namespace convml {

int default_hidden_units(size_t feature_count, size_t class_count) {
    return static_cast<int>((feature_count + class_count) / 2);
}

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

MlpNetwork MlpNetwork::random(size_t inputs, size_t hidden, size_t outputs, Engine& engine) {
    MlpNetwork net;
    net.inputs = inputs;
    net.hidden = hidden;
    net.outputs = outputs;
    net.hidden_weights.resize(hidden * (inputs + 1));
    net.output_weights.resize(outputs * (hidden + 1));
    for (double& w : net.hidden_weights) w = engine.range_real(-0.5, 0.5);
    for (double& w : net.output_weights) w = engine.range_real(-0.5, 0.5);
    return net;
}

std::vector<double> MlpNetwork::forward(std::span<const double> x) const {
    std::vector<double> h(hidden);
    for (size_t j = 0; j < hidden; ++j) {
        const double* w = &hidden_weights[j * (inputs + 1)];
        double sum = w[inputs];  // bias
        for (size_t i = 0; i < inputs; ++i) sum += w[i] * x[i];
        h[j] = sigmoid(sum);
    }
    std::vector<double> y(outputs);
    for (size_t o = 0; o < outputs; ++o) {
        const double* w = &output_weights[o * (hidden + 1)];
        double sum = w[hidden];
        for (size_t j = 0; j < hidden; ++j) sum += w[j] * h[j];
        y[o] = sigmoid(sum);
    }
    return y;
}

double MlpNetwork::loss_and_gradients(std::span<const double> x, std::span<const double> target,
                                      Gradients& grads) const {
    // Forward pass, keeping the hidden activations.
    std::vector<double> h(hidden);
    for (size_t j = 0; j < hidden; ++j) {
        const double* w = &hidden_weights[j * (inputs + 1)];
        double sum = w[inputs];
        for (size_t i = 0; i < inputs; ++i) sum += w[i] * x[i];
        h[j] = sigmoid(sum);
    }
    std::vector<double> y(outputs);
    for (size_t o = 0; o < outputs; ++o) {
        const double* w = &output_weights[o * (hidden + 1)];
        double sum = w[hidden];
        for (size_t j = 0; j < hidden; ++j) sum += w[j] * h[j];
        y[o] = sigmoid(sum);
    }

    double loss = 0.0;
    std::vector<double> delta_out(outputs);
    for (size_t o = 0; o < outputs; ++o) {
        const double err = y[o] - target[o];
        loss += 0.5 * err * err;
        delta_out[o] = err * y[o] * (1.0 - y[o]);
    }

    grads.output_weights.assign(output_weights.size(), 0.0);
    grads.hidden_weights.assign(hidden_weights.size(), 0.0);
    for (size_t o = 0; o < outputs; ++o) {
        double* g = &grads.output_weights[o * (hidden + 1)];
        for (size_t j = 0; j < hidden; ++j) g[j] = delta_out[o] * h[j];
        g[hidden] = delta_out[o];
    }
    for (size_t j = 0; j < hidden; ++j) {
        double back = 0.0;
        for (size_t o = 0; o < outputs; ++o) {
            back += delta_out[o] * output_weights[o * (hidden + 1) + j];
        }
        const double delta_h = back * h[j] * (1.0 - h[j]);
        double* g = &grads.hidden_weights[j * (inputs + 1)];
        for (size_t i = 0; i < inputs; ++i) g[i] = delta_h * x[i];
        g[inputs] = delta_h;
    }
    return loss;
}

double MlpNetwork::loss(std::span<const double> x, std::span<const double> target) const {
    const auto y = forward(x);
    double loss = 0.0;
    for (size_t o = 0; o < outputs; ++o) {
        const double err = y[o] - target[o];
        loss += 0.5 * err * err;
    }
    return loss;
}

MlpModel::MlpModel(std::vector<std::string> feature_names, MlpParams params, MlpNetwork network,
                   std::vector<double> minima, std::vector<double> widths)
    : Model(ClassifierKind::Mlp, std::move(feature_names)),
      params_(params),
      network_(std::move(network)),
      minima_(std::move(minima)),
      widths_(std::move(widths)) {}

Prediction MlpModel::do_predict(std::span<const double> values) const {
    std::vector<double> scaled(values.size());
    for (size_t a = 0; a < values.size(); ++a) {
        scaled[a] = widths_[a] > 0.0 ? (values[a] - minima_[a]) / widths_[a] : 0.0;
    }
    const auto y = network_.forward(scaled);
    Prediction p;
    p.label = y[1] > y[0] ? Label::Malware : Label::Goodware;
    double total = 0.0;
    for (double v : y) total += v;
    p.score = total > 0.0 ? y[static_cast<size_t>(p.label)] / total : 1.0 / kClassCount;
    return p;
}

void MlpModel::save_body(std::ostream& out) const {
    out << "params hidden=" << params_.hidden
        << " learning_rate=" << detail::format_hexfloat(params_.learning_rate)
        << " momentum=" << detail::format_hexfloat(params_.momentum)
        << " epochs=" << params_.epochs << "\n";
    out << "layout " << network_.inputs << ' ' << network_.hidden << ' ' << network_.outputs
        << "\n";
    out << "scale";
    for (size_t a = 0; a < minima_.size(); ++a) {
        out << ' ' << detail::format_hexfloat(minima_[a]) << ' '
            << detail::format_hexfloat(widths_[a]);
    }
    out << "\n";
    out << "hidden_weights";
    for (double w : network_.hidden_weights) out << ' ' << detail::format_hexfloat(w);
    out << "\n";
    out << "output_weights";
    for (double w : network_.output_weights) out << ' ' << detail::format_hexfloat(w);
    out << "\n";
}

std::unique_ptr<MlpModel> train_mlp(const Dataset& dataset, const MlpParams& params,
                                    uint64_t seed) {
    if (dataset.empty()) {
        throw EmptyTrainingSet("MLP needs at least one training instance");
    }
    if (params.epochs < 0 || params.learning_rate <= 0.0) {
        throw Error("MLP needs epochs >= 0 and a positive learning rate");
    }
    const auto started = std::chrono::steady_clock::now();
    const size_t attrs = dataset.feature_count();
    const size_t hidden = params.hidden > 0
                              ? static_cast<size_t>(params.hidden)
                              : static_cast<size_t>(default_hidden_units(attrs, kClassCount));

    std::vector<double> minima(attrs, std::numeric_limits<double>::infinity());
    std::vector<double> maxima(attrs, -std::numeric_limits<double>::infinity());
    for (const Instance& inst : dataset.instances()) {
        for (size_t a = 0; a < attrs; ++a) {
            minima[a] = std::min(minima[a], inst.values[a]);
            maxima[a] = std::max(maxima[a], inst.values[a]);
        }
    }
    std::vector<double> widths(attrs);
    for (size_t a = 0; a < attrs; ++a) widths[a] = maxima[a] - minima[a];

    std::vector<std::vector<double>> scaled(dataset.size());
    std::vector<std::array<double, kClassCount>> targets(dataset.size());
    for (size_t i = 0; i < dataset.size(); ++i) {
        const Instance& inst = dataset.instances()[i];
        scaled[i].resize(attrs);
        for (size_t a = 0; a < attrs; ++a) {
            scaled[i][a] = widths[a] > 0.0 ? (inst.values[a] - minima[a]) / widths[a] : 0.0;
        }
        targets[i].fill(0.0);
        targets[i][static_cast<size_t>(inst.label)] = 1.0;
    }

    Engine init_engine(derive_seed(seed, "mlp-init"));
    MlpNetwork net = MlpNetwork::random(attrs, hidden, kClassCount, init_engine);

    Engine order_engine(derive_seed(seed, "mlp-order"));
    std::vector<size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);

    MlpNetwork::Gradients grads;
    std::vector<double> vel_hidden(net.hidden_weights.size(), 0.0);
    std::vector<double> vel_output(net.output_weights.size(), 0.0);
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        order_engine.shuffle(order);
        for (size_t i : order) {
            net.loss_and_gradients(scaled[i], targets[i], grads);
            for (size_t w = 0; w < net.hidden_weights.size(); ++w) {
                vel_hidden[w] = -params.learning_rate * grads.hidden_weights[w] +
                                params.momentum * vel_hidden[w];
                net.hidden_weights[w] += vel_hidden[w];
            }
            for (size_t w = 0; w < net.output_weights.size(); ++w) {
                vel_output[w] = -params.learning_rate * grads.output_weights[w] +
                                params.momentum * vel_output[w];
                net.output_weights[w] += vel_output[w];
            }
        }
    }

    MlpParams resolved = params;
    resolved.hidden = static_cast<int>(hidden);
    auto model = std::make_unique<MlpModel>(dataset.feature_names(), resolved, std::move(net),
                                            std::move(minima), std::move(widths));
    set_build_time(*model, std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                         started)
                               .count());
    return model;
}

}  // namespace convml
