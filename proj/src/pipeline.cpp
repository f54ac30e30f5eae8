#include "convml/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "convml/rng.hpp"

namespace convml {

uint32_t ip_to_decimal(std::string_view dotted) {
    uint32_t value = 0;
    int octets = 0;
    size_t pos = 0;
    while (pos <= dotted.size()) {
        size_t dot = dotted.find('.', pos);
        std::string_view part = dotted.substr(pos, dot == std::string_view::npos
                                                       ? std::string_view::npos
                                                       : dot - pos);
        if (part.empty() || part.size() > 3) {
            throw InvalidAddress("malformed IPv4 address: " + std::string(dotted));
        }
        uint32_t octet = 0;
        for (char c : part) {
            if (c < '0' || c > '9') {
                throw InvalidAddress("malformed IPv4 address: " + std::string(dotted));
            }
            octet = octet * 10 + static_cast<uint32_t>(c - '0');
        }
        if (octet > 255) {
            throw InvalidAddress("IPv4 octet out of range: " + std::string(dotted));
        }
        value = value << 8 | octet;
        ++octets;
        if (dot == std::string_view::npos) break;
        pos = dot + 1;
        if (pos == dotted.size()) {  // trailing dot
            throw InvalidAddress("malformed IPv4 address: " + std::string(dotted));
        }
    }
    if (octets != 4) {
        throw InvalidAddress("expected four octets: " + std::string(dotted));
    }
    return value;
}

std::string decimal_to_ip(uint32_t value) {
    return std::to_string(value >> 24) + '.' + std::to_string(value >> 16 & 0xff) + '.' +
           std::to_string(value >> 8 & 0xff) + '.' + std::to_string(value & 0xff);
}

std::vector<CleanRow> clean(const std::vector<Conversation>& conversations) {
    std::vector<CleanRow> rows;
    rows.reserve(conversations.size());
    for (const Conversation& c : conversations) {
        if (c.address_a == 0) continue;  // Address A 0.0.0.0
        if (c.port_b == 53) continue;    // DNS server side
        CleanRow row;
        row.values = {static_cast<double>(c.protocol),   static_cast<double>(c.address_a),
                      static_cast<double>(c.port_a),     static_cast<double>(c.address_b),
                      static_cast<double>(c.port_b),     static_cast<double>(c.packets_ab),
                      static_cast<double>(c.bytes_ab),   static_cast<double>(c.packets_ba),
                      static_cast<double>(c.bytes_ba)};
        row.group = c.source_capture;
        rows.push_back(std::move(row));
    }
    return rows;
}

Dataset make_dataset(const std::vector<CleanRow>& rows,
                     const std::map<std::string, Label>& label_by_group) {
    std::vector<Instance> instances;
    instances.reserve(rows.size());
    for (const CleanRow& row : rows) {
        auto it = label_by_group.find(row.group);
        if (it == label_by_group.end()) {
            throw Error("no label for capture '" + row.group + "'");
        }
        Instance inst;
        inst.label = it->second;
        inst.values.assign(row.values.begin(), row.values.end());
        inst.group = row.group;
        instances.push_back(std::move(inst));
    }
    return Dataset(Dataset::full_feature_names(), std::move(instances));
}

Dataset select_features(const Dataset& dataset, FeatureMode mode) {
    if (mode == FeatureMode::Custom) {
        throw Error("cannot project onto the custom schema");
    }
    if (dataset.mode() == mode) {
        return dataset;
    }
    if (dataset.mode() == FeatureMode::Reduced && mode == FeatureMode::Full) {
        throw IrreversibleProjection("packet counts were dropped; full schema cannot be rebuilt");
    }
    if (dataset.mode() != FeatureMode::Full) {
        throw Error("feature selection requires the full conversation schema");
    }

    // Full -> Reduced: drop Packets_A_B and Packets_B_A.
    const auto& names = dataset.feature_names();
    std::vector<size_t> keep;
    for (size_t i = 0; i < names.size(); ++i) {
        if (names[i] != "Packets_A_B" && names[i] != "Packets_B_A") keep.push_back(i);
    }
    std::vector<Instance> projected;
    projected.reserve(dataset.size());
    for (const Instance& inst : dataset.instances()) {
        Instance out;
        out.label = inst.label;
        out.group = inst.group;
        out.values.reserve(keep.size());
        for (size_t i : keep) out.values.push_back(inst.values[i]);
        projected.push_back(std::move(out));
    }
    return Dataset(Dataset::reduced_feature_names(), std::move(projected));
}

SplitResult grouped_split(const Dataset& dataset, double train_fraction, uint64_t seed) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0) {
        throw Error("train fraction must lie strictly between 0 and 1");
    }

    struct GroupInfo {
        Label label = Label::Goodware;
        size_t instances = 0;
    };
    std::vector<std::string> group_order;
    std::map<std::string, GroupInfo> groups;
    for (const Instance& inst : dataset.instances()) {
        auto [it, inserted] = groups.try_emplace(inst.group);
        if (inserted) {
            it->second.label = inst.label;
            group_order.push_back(inst.group);
        } else if (it->second.label != inst.label) {
            throw Error("group '" + inst.group + "' spans both classes; groups must be pure");
        }
        ++it->second.instances;
    }

    SplitResult result{dataset.subset({}), dataset.subset({}), 0.0, {}, false, {}};
    std::vector<size_t> train_rows, test_rows;
    std::map<std::string, bool> in_train;

    for (Label label : {Label::Goodware, Label::Malware}) {
        std::vector<std::string> class_groups;
        size_t class_total = 0;
        for (const auto& name : group_order) {
            const GroupInfo& info = groups[name];
            if (info.label == label) {
                class_groups.push_back(name);
                class_total += info.instances;
            }
        }
        if (class_groups.empty()) continue;

        Engine engine(derive_seed(seed, std::string("split/") + to_string(label)));
        engine.shuffle(class_groups);

        const double target = train_fraction * static_cast<double>(class_total);
        size_t assigned = 0;
        size_t taken = 0;
        for (const auto& name : class_groups) {
            if (static_cast<double>(assigned) >= target) break;
            in_train[name] = true;
            assigned += groups[name].instances;
            ++taken;
        }
        result.per_class_fraction[label] =
            static_cast<double>(assigned) / static_cast<double>(class_total);
        if (taken == class_groups.size()) {
            result.infeasible = true;
            result.note += std::string(to_string(label)) + ": every group landed in train; ";
        } else if (taken == 1 && result.per_class_fraction[label] > train_fraction) {
            // A single group already overshoots the request.
            if (result.per_class_fraction[label] - train_fraction > 0.5 * (1.0 - train_fraction)) {
                result.infeasible = true;
                result.note += std::string(to_string(label)) + ": one group dominates the class; ";
            }
        }
    }

    for (size_t i = 0; i < dataset.size(); ++i) {
        if (in_train[dataset.instances()[i].group]) {
            train_rows.push_back(i);
        } else {
            test_rows.push_back(i);
        }
    }
    result.train = dataset.subset(train_rows);
    result.test = dataset.subset(test_rows);
    result.train_fraction =
        dataset.empty() ? 0.0
                        : static_cast<double>(train_rows.size()) / static_cast<double>(dataset.size());
    return result;
}

}  // namespace convml
