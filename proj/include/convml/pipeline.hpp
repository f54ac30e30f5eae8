#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "convml/conversation.hpp"
#include "convml/dataset.hpp"

namespace convml {

/// Dotted-quad text to its positional decimal value: a*2^24 + b*2^16 + c*2^8 + d.
/// Throws InvalidAddress on malformed text or octets outside 0-255.
uint32_t ip_to_decimal(std::string_view dotted);

/// Inverse of ip_to_decimal.
std::string decimal_to_ip(uint32_t value);

/// One cleaned, unlabelled feature row in final column order:
/// Protocol, Address A, Port A, Address B, Port B,
/// Packets A->B, Bytes A->B, Packets B->A, Bytes B->A.
struct CleanRow {
    std::array<double, 9> values{};
    std::string group;

    bool operator==(const CleanRow&) const = default;
};

/// Cleaning rules applied to aggregated conversations:
/// rows whose Address A is 0.0.0.0 or whose Port B is 53 are dropped, the
/// Packets/Bytes totals and the timing columns are removed, and addresses
/// become decimal values. Order of retained rows is preserved.
std::vector<CleanRow> clean(const std::vector<Conversation>& conversations);

/// Attach labels by source capture and assemble the Full-schema dataset.
/// Throws Error when a row's group is missing from the label map.
Dataset make_dataset(const std::vector<CleanRow>& rows,
                     const std::map<std::string, Label>& label_by_group);

/// Project a dataset onto the requested schema. Reduced drops the two packet
/// count columns; projecting Reduced back to Full throws
/// IrreversibleProjection. Instance order is preserved.
Dataset select_features(const Dataset& dataset, FeatureMode mode);

struct SplitResult {
    Dataset train;
    Dataset test;
    double train_fraction = 0.0;  // achieved, by instance count
    std::map<Label, double> per_class_fraction;
    bool infeasible = false;  // best-effort assignment could not honor the request
    std::string note;
};

/**
 * Seeded group-respecting train/test split.
 *
 * Every group (capture) lands wholly in train or test. Within each class the
 * groups are shuffled by a seed-derived engine and assigned to train in order
 * until that class's train instance fraction first reaches train_fraction;
 * the rest go to test. Degenerate corpora (a single dominant or lone group)
 * yield a best-effort assignment flagged with infeasible + note rather than
 * an error.
 */
SplitResult grouped_split(const Dataset& dataset, double train_fraction, uint64_t seed);

}  // namespace convml
