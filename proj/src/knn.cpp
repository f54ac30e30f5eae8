#include "convml/knn.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "textutil.hpp"

namespace convml {

KnnModel::KnnModel(std::vector<std::string> feature_names, KnnParams params,
                   std::vector<double> values, std::vector<Label> labels,
                   std::vector<double> minima, std::vector<double> maxima)
    : Model(ClassifierKind::Knn, std::move(feature_names)),
      params_(params),
      values_(std::move(values)),
      labels_(std::move(labels)),
      minima_(std::move(minima)),
      maxima_(std::move(maxima)) {}

Prediction KnnModel::do_predict(std::span<const double> values) const {
    const size_t attrs = minima_.size();
    std::vector<std::pair<double, size_t>> by_distance;
    by_distance.reserve(labels_.size());
    for (size_t i = 0; i < labels_.size(); ++i) {
        const double* row = &values_[i * attrs];
        double d2 = 0.0;
        for (size_t a = 0; a < attrs; ++a) {
            const double range = maxima_[a] - minima_[a];
            if (range <= 0.0) continue;  // constant attribute carries no signal
            const double diff = (values[a] - row[a]) / range;
            d2 += diff * diff;
        }
        by_distance.emplace_back(d2, i);
    }
    // Pair ordering gives the declared tie-break: equal distances fall back
    // to the earlier training instance.
    const size_t k = std::min<size_t>(static_cast<size_t>(params_.k), by_distance.size());
    std::partial_sort(by_distance.begin(), by_distance.begin() + static_cast<ptrdiff_t>(k),
                      by_distance.end());

    std::array<size_t, kClassCount> votes{};
    for (size_t i = 0; i < k; ++i) {
        votes[static_cast<size_t>(labels_[by_distance[i].second])] += 1;
    }
    Prediction p;
    p.label = votes[1] > votes[0] ? Label::Malware : Label::Goodware;
    p.score = static_cast<double>(votes[static_cast<size_t>(p.label)]) / static_cast<double>(k);
    return p;
}

void KnnModel::save_body(std::ostream& out) const {
    out << "params k=" << params_.k << "\n";
    out << "bounds";
    for (size_t a = 0; a < minima_.size(); ++a) {
        out << ' ' << detail::format_hexfloat(minima_[a]) << ' '
            << detail::format_hexfloat(maxima_[a]);
    }
    out << "\n";
    out << "instances " << labels_.size() << "\n";
    const size_t attrs = minima_.size();
    for (size_t i = 0; i < labels_.size(); ++i) {
        out << to_string(labels_[i]);
        for (size_t a = 0; a < attrs; ++a) {
            out << ' ' << detail::format_hexfloat(values_[i * attrs + a]);
        }
        out << "\n";
    }
}

std::unique_ptr<KnnModel> train_knn(const Dataset& dataset, const KnnParams& params) {
    if (dataset.empty()) {
        throw EmptyTrainingSet("kNN needs at least one training instance");
    }
    if (params.k < 1) {
        throw Error("k must be at least 1");
    }
    const auto started = std::chrono::steady_clock::now();
    const size_t attrs = dataset.feature_count();
    std::vector<double> minima(attrs, std::numeric_limits<double>::infinity());
    std::vector<double> maxima(attrs, -std::numeric_limits<double>::infinity());
    std::vector<double> values;
    std::vector<Label> labels;
    values.resize(dataset.size() * attrs);
    labels.reserve(dataset.size());
    for (size_t i = 0; i < dataset.size(); ++i) {
        const Instance& inst = dataset.instances()[i];
        for (size_t a = 0; a < attrs; ++a) {
            const double v = inst.values[a];
            minima[a] = std::min(minima[a], v);
            maxima[a] = std::max(maxima[a], v);
            values[i * attrs + a] = v;
        }
        labels.push_back(inst.label);
    }
    auto model = std::make_unique<KnnModel>(dataset.feature_names(), params, std::move(values),
                                            std::move(labels), std::move(minima),
                                            std::move(maxima));
    set_build_time(*model, std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                                         started)
                               .count());
    return model;
}

}  // namespace convml
