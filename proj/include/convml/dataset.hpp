#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "convml/errors.hpp"

namespace convml {

enum class Label : uint8_t { Goodware = 0, Malware = 1 };
constexpr size_t kClassCount = 2;

/// Stable 64-bit digest of a numeric feature schema with the fixed
/// {Goodware, Malware} class attribute.
uint64_t schema_fingerprint_of(const std::vector<std::string>& feature_names);

constexpr const char* to_string(Label label) {
    return label == Label::Goodware ? "Goodware" : "Malware";
}

Label label_from_string(std::string_view text);

/// Dataset schema family. Full carries the byte and packet counts in both
/// directions (10 attributes with the label); Reduced drops the two packet
/// counts (8 attributes); Custom is any other numeric schema.
enum class FeatureMode { Full, Reduced, Custom };

const char* to_string(FeatureMode mode);

/// One labelled feature row. `group` identifies the source capture so splits
/// can keep whole captures on one side.
struct Instance {
    Label label = Label::Goodware;
    std::vector<double> values;
    std::string group;

    bool operator==(const Instance&) const = default;
};

/**
 * Immutable labelled dataset: an ordered numeric feature schema, a fixed
 * nominal class attribute {Goodware, Malware}, and instances.
 *
 * Construction validates that every instance matches the schema arity and
 * carries only finite, non-negative values.
 */
class Dataset {
public:
    Dataset(std::vector<std::string> feature_names, std::vector<Instance> instances);

    static const std::vector<std::string>& full_feature_names();
    static const std::vector<std::string>& reduced_feature_names();

    const std::vector<std::string>& feature_names() const { return feature_names_; }
    const std::vector<Instance>& instances() const { return instances_; }

    size_t size() const { return instances_.size(); }
    bool empty() const { return instances_.empty(); }
    size_t feature_count() const { return feature_names_.size(); }
    /// Feature columns plus the class attribute.
    size_t attribute_count() const { return feature_names_.size() + 1; }

    /// Derived from the schema: Full/Reduced when the names match the
    /// conversation schemas exactly, Custom otherwise.
    FeatureMode mode() const { return mode_; }

    size_t count(Label label) const;

    /// Distinct group ids in first-appearance order.
    std::vector<std::string> groups() const;

    /// Stable 64-bit digest of the schema (names, order, class values).
    /// Models refuse to score datasets whose fingerprint differs.
    uint64_t schema_fingerprint() const { return fingerprint_; }

    /// New dataset with the selected rows, same schema, order preserved.
    Dataset subset(const std::vector<size_t>& indices) const;

    bool operator==(const Dataset& other) const {
        return feature_names_ == other.feature_names_ && instances_ == other.instances_;
    }

private:
    std::vector<std::string> feature_names_;
    std::vector<Instance> instances_;
    FeatureMode mode_;
    uint64_t fingerprint_;
};

}  // namespace convml
