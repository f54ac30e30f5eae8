#include "convml/dataset.hpp"

#include <cmath>

#include "convml/rng.hpp"

namespace convml {

Label label_from_string(std::string_view text) {
    if (text == "Goodware") return Label::Goodware;
    if (text == "Malware") return Label::Malware;
    throw Error("unknown class label: " + std::string(text));
}

const char* to_string(FeatureMode mode) {
    switch (mode) {
        case FeatureMode::Full: return "full";
        case FeatureMode::Reduced: return "reduced";
        case FeatureMode::Custom: return "custom";
    }
    return "unknown";
}

const std::vector<std::string>& Dataset::full_feature_names() {
    static const std::vector<std::string> names = {
        "Protocol",    "Address_A",   "Port_A",    "Address_B", "Port_B",
        "Packets_A_B", "Bytes_A_B",   "Packets_B_A", "Bytes_B_A",
    };
    return names;
}

const std::vector<std::string>& Dataset::reduced_feature_names() {
    static const std::vector<std::string> names = {
        "Protocol", "Address_A", "Port_A", "Address_B", "Port_B", "Bytes_A_B", "Bytes_B_A",
    };
    return names;
}

uint64_t schema_fingerprint_of(const std::vector<std::string>& feature_names) {
    std::string text = "numeric:";
    for (const auto& n : feature_names) {
        text += n;
        text += ',';
    }
    text += "|class:Goodware,Malware";
    return fnv1a64(text);
}

namespace {

FeatureMode derive_mode(const std::vector<std::string>& names) {
    if (names == Dataset::full_feature_names()) return FeatureMode::Full;
    if (names == Dataset::reduced_feature_names()) return FeatureMode::Reduced;
    return FeatureMode::Custom;
}

}  // namespace

Dataset::Dataset(std::vector<std::string> feature_names, std::vector<Instance> instances)
    : feature_names_(std::move(feature_names)),
      instances_(std::move(instances)),
      mode_(derive_mode(feature_names_)),
      fingerprint_(schema_fingerprint_of(feature_names_)) {
    if (feature_names_.empty()) {
        throw Error("dataset needs at least one feature column");
    }
    for (size_t i = 0; i < instances_.size(); ++i) {
        const Instance& inst = instances_[i];
        if (inst.values.size() != feature_names_.size()) {
            throw Error("instance " + std::to_string(i) + " has " +
                        std::to_string(inst.values.size()) + " values, schema expects " +
                        std::to_string(feature_names_.size()));
        }
        for (double v : inst.values) {
            if (!std::isfinite(v) || v < 0.0) {
                throw Error("instance " + std::to_string(i) +
                            " carries a non-finite or negative value");
            }
        }
    }
}

size_t Dataset::count(Label label) const {
    size_t n = 0;
    for (const auto& inst : instances_) {
        if (inst.label == label) ++n;
    }
    return n;
}

std::vector<std::string> Dataset::groups() const {
    std::vector<std::string> out;
    for (const auto& inst : instances_) {
        bool seen = false;
        for (const auto& g : out) {
            if (g == inst.group) {
                seen = true;
                break;
            }
        }
        if (!seen) out.push_back(inst.group);
    }
    return out;
}

Dataset Dataset::subset(const std::vector<size_t>& indices) const {
    std::vector<Instance> rows;
    rows.reserve(indices.size());
    for (size_t i : indices) {
        rows.push_back(instances_.at(i));
    }
    return Dataset(feature_names_, std::move(rows));
}

}  // namespace convml
