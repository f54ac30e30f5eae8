#include "convml/naive_bayes.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "textutil.hpp"

namespace convml {

NaiveBayesModel::NaiveBayesModel(std::vector<std::string> feature_names, NaiveBayesParams params,
                                 std::array<uint64_t, kClassCount> class_counts,
                                 std::vector<double> minima, std::vector<double> widths,
                                 std::vector<uint64_t> bin_counts)
    : Model(ClassifierKind::NaiveBayes, std::move(feature_names)),
      params_(params),
      class_counts_(class_counts),
      minima_(std::move(minima)),
      widths_(std::move(widths)),
      bin_counts_(std::move(bin_counts)) {}

double NaiveBayesModel::prior(Label label) const {
    const double total = static_cast<double>(class_counts_[0] + class_counts_[1]);
    const double a = params_.alpha;
    return (static_cast<double>(class_counts_[static_cast<size_t>(label)]) + a) /
           (total + a * kClassCount);
}

size_t NaiveBayesModel::bin_of(size_t attribute, double value) const {
    if (widths_[attribute] <= 0.0) return 0;  // degenerate training range
    const double offset = (value - minima_[attribute]) / widths_[attribute];
    const auto bin = static_cast<long long>(std::floor(offset));
    return static_cast<size_t>(std::clamp<long long>(bin, 0, params_.bins - 1));
}

uint64_t NaiveBayesModel::count_at(size_t cls, size_t attribute, size_t bin) const {
    const size_t bins = static_cast<size_t>(params_.bins);
    return bin_counts_[(cls * minima_.size() + attribute) * bins + bin];
}

std::array<double, kClassCount> NaiveBayesModel::posterior(std::span<const double> values) const {
    const double a = params_.alpha;
    std::array<double, kClassCount> log_post{};
    for (size_t cls = 0; cls < kClassCount; ++cls) {
        double lp = std::log(prior(static_cast<Label>(cls)));
        const double denom =
            static_cast<double>(class_counts_[cls]) + a * static_cast<double>(params_.bins);
        for (size_t attr = 0; attr < minima_.size(); ++attr) {
            const uint64_t c = count_at(cls, attr, bin_of(attr, values[attr]));
            lp += std::log((static_cast<double>(c) + a) / denom);
        }
        log_post[cls] = lp;
    }
    const double peak = std::max(log_post[0], log_post[1]);
    std::array<double, kClassCount> post{};
    double total = 0.0;
    for (size_t cls = 0; cls < kClassCount; ++cls) {
        post[cls] = std::exp(log_post[cls] - peak);
        total += post[cls];
    }
    for (double& p : post) p /= total;
    return post;
}

Prediction NaiveBayesModel::do_predict(std::span<const double> values) const {
    const auto post = posterior(values);
    Prediction p;
    p.label = post[1] > post[0] ? Label::Malware : Label::Goodware;
    p.score = post[static_cast<size_t>(p.label)];
    return p;
}

void NaiveBayesModel::save_body(std::ostream& out) const {
    out << "params bins=" << params_.bins << " alpha=" << detail::format_hexfloat(params_.alpha)
        << "\n";
    out << "class_counts " << class_counts_[0] << ' ' << class_counts_[1] << "\n";
    out << "bounds";
    for (size_t a = 0; a < minima_.size(); ++a) {
        out << ' ' << detail::format_hexfloat(minima_[a]) << ' '
            << detail::format_hexfloat(widths_[a]);
    }
    out << "\n";
    out << "counts";
    for (uint64_t c : bin_counts_) out << ' ' << c;
    out << "\n";
}

std::unique_ptr<NaiveBayesModel> train_naive_bayes(const Dataset& dataset,
                                                   const NaiveBayesParams& params) {
    if (dataset.empty()) {
        throw EmptyTrainingSet("naive Bayes needs at least one training instance");
    }
    if (params.bins < 1 || params.alpha <= 0.0) {
        throw Error("naive Bayes needs bins >= 1 and alpha > 0");
    }
    const auto started = std::chrono::steady_clock::now();
    const size_t attrs = dataset.feature_count();
    const size_t bins = static_cast<size_t>(params.bins);

    std::vector<double> minima(attrs, std::numeric_limits<double>::infinity());
    std::vector<double> maxima(attrs, -std::numeric_limits<double>::infinity());
    for (const Instance& inst : dataset.instances()) {
        for (size_t a = 0; a < attrs; ++a) {
            minima[a] = std::min(minima[a], inst.values[a]);
            maxima[a] = std::max(maxima[a], inst.values[a]);
        }
    }
    std::vector<double> widths(attrs);
    for (size_t a = 0; a < attrs; ++a) {
        widths[a] = (maxima[a] - minima[a]) / static_cast<double>(bins);
    }

    std::array<uint64_t, kClassCount> class_counts{};
    std::vector<uint64_t> bin_counts(kClassCount * attrs * bins, 0);
    for (const Instance& inst : dataset.instances()) {
        const size_t cls = static_cast<size_t>(inst.label);
        class_counts[cls] += 1;
        for (size_t a = 0; a < attrs; ++a) {
            size_t bin = 0;
            if (widths[a] > 0.0) {
                const double offset = (inst.values[a] - minima[a]) / widths[a];
                bin = static_cast<size_t>(std::clamp<long long>(
                    static_cast<long long>(std::floor(offset)), 0,
                    static_cast<long long>(bins) - 1));
            }
            bin_counts[(cls * attrs + a) * bins + bin] += 1;
        }
    }

    auto model = std::make_unique<NaiveBayesModel>(dataset.feature_names(), params, class_counts,
                                                   std::move(minima), std::move(widths),
                                                   std::move(bin_counts));
    set_build_time(*model, std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                         started)
                               .count());
    return model;
}

}  // namespace convml
