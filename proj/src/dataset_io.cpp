#include "convml/dataset_io.hpp"

#include <fstream>
#include <optional>
#include <sstream>
#include <vector>

#include "textutil.hpp"

namespace convml {

using detail::format_value;
using detail::iequals;
using detail::parse_value;
using detail::trim;

namespace {

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> cells;
    size_t pos = 0;
    for (;;) {
        size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(pos)));
            break;
        }
        cells.push_back(trim(line.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    return cells;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write file: " + path);
    return out;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read file: " + path);
    return in;
}

void write_group_breaks(std::ostream& out, const std::string& previous,
                        const std::string& current) {
    if (current != previous) {
        out << "% group=" << current << "\n";
    }
}

}  // namespace

void export_arff(const Dataset& dataset, std::ostream& out, const std::string& relation) {
    out << "@RELATION " << relation << "\n\n";
    out << "@ATTRIBUTE Label {Goodware,Malware}\n";
    for (const auto& name : dataset.feature_names()) {
        out << "@ATTRIBUTE " << name << " REAL\n";
    }
    out << "\n@DATA\n";
    std::string previous_group;
    for (const Instance& inst : dataset.instances()) {
        write_group_breaks(out, previous_group, inst.group);
        previous_group = inst.group;
        out << to_string(inst.label);
        for (double v : inst.values) {
            out << ',' << format_value(v);
        }
        out << "\n";
    }
}

void export_arff(const Dataset& dataset, const std::string& path, const std::string& relation) {
    auto out = open_out(path);
    export_arff(dataset, out, relation);
}

namespace {

struct ArffAttribute {
    std::string name;
    bool nominal = false;
    std::vector<std::string> values;  // nominal only
};

}  // namespace

Dataset import_arff(std::istream& in) {
    std::vector<ArffAttribute> attributes;
    std::vector<Instance> instances;
    std::optional<size_t> label_index;
    bool in_data = false;
    std::string current_group;
    std::string raw;
    int line_no = 0;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '%') {
            std::string_view comment = trim(line.substr(1));
            if (comment.substr(0, 6) == "group=") {
                current_group = std::string(comment.substr(6));
            }
            continue;
        }
        if (!in_data) {
            if (iequals(line.substr(0, 9), "@relation")) {
                continue;
            }
            if (iequals(line.substr(0, 10), "@attribute")) {
                std::string_view rest = trim(line.substr(10));
                size_t ws = rest.find_first_of(" \t");
                if (ws == std::string_view::npos) {
                    throw ParseError("attribute declaration needs a name and a type", line_no);
                }
                ArffAttribute attr;
                attr.name = std::string(trim(rest.substr(0, ws)));
                std::string_view type = trim(rest.substr(ws + 1));
                if (!type.empty() && type.front() == '{') {
                    if (type.back() != '}') {
                        throw ParseError("unterminated nominal value set", line_no);
                    }
                    attr.nominal = true;
                    for (auto v : split_csv(type.substr(1, type.size() - 2))) {
                        attr.values.emplace_back(v);
                    }
                    if (attr.values.empty()) {
                        throw ParseError("empty nominal value set", line_no);
                    }
                } else if (iequals(type, "real") || iequals(type, "numeric") ||
                           iequals(type, "integer")) {
                    attr.nominal = false;
                } else {
                    throw ParseError("unknown attribute type: '" + std::string(type) + "'",
                                     line_no);
                }
                attributes.push_back(std::move(attr));
                continue;
            }
            if (iequals(line.substr(0, 5), "@data")) {
                if (attributes.empty()) {
                    throw ParseError("@DATA before any attribute declaration", line_no);
                }
                // Exactly one nominal attribute, and it must be the
                // Goodware/Malware class.
                for (size_t i = 0; i < attributes.size(); ++i) {
                    if (!attributes[i].nominal) continue;
                    if (label_index) {
                        throw ParseError("multiple nominal attributes; expected only the class",
                                         line_no);
                    }
                    label_index = i;
                }
                if (!label_index) {
                    throw ParseError("no class attribute {Goodware,Malware} declared", line_no);
                }
                const auto& vals = attributes[*label_index].values;
                bool ok = vals.size() == 2 &&
                          ((vals[0] == "Goodware" && vals[1] == "Malware") ||
                           (vals[0] == "Malware" && vals[1] == "Goodware"));
                if (!ok) {
                    throw ParseError("class attribute must take values {Goodware,Malware}",
                                     line_no);
                }
                in_data = true;
                continue;
            }
            throw ParseError("unrecognized header line: '" + std::string(line) + "'", line_no);
        }

        auto cells = split_csv(line);
        if (cells.size() != attributes.size()) {
            throw ParseError("row has " + std::to_string(cells.size()) + " values, expected " +
                                 std::to_string(attributes.size()),
                             line_no);
        }
        Instance inst;
        inst.group = current_group;
        inst.values.reserve(attributes.size() - 1);
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i == *label_index) {
                bool declared = false;
                for (const auto& v : attributes[i].values) {
                    if (cells[i] == v) declared = true;
                }
                if (!declared) {
                    throw ParseError("undeclared nominal value: '" + std::string(cells[i]) + "'",
                                     line_no);
                }
                inst.label = label_from_string(cells[i]);
            } else {
                inst.values.push_back(parse_value(cells[i], line_no));
            }
        }
        instances.push_back(std::move(inst));
    }
    if (!in_data) {
        throw ParseError("no @DATA section found", line_no);
    }

    std::vector<std::string> feature_names;
    for (size_t i = 0; i < attributes.size(); ++i) {
        if (i != *label_index) feature_names.push_back(attributes[i].name);
    }
    return Dataset(std::move(feature_names), std::move(instances));
}

Dataset import_arff(const std::string& path) {
    auto in = open_in(path);
    return import_arff(in);
}

void export_csv(const Dataset& dataset, std::ostream& out) {
    out << "Label";
    for (const auto& name : dataset.feature_names()) {
        out << ',' << name;
    }
    out << ",Group\n";
    for (const Instance& inst : dataset.instances()) {
        out << to_string(inst.label);
        for (double v : inst.values) {
            out << ',' << format_value(v);
        }
        out << ',' << inst.group << "\n";
    }
}

void export_csv(const Dataset& dataset, const std::string& path) {
    auto out = open_out(path);
    export_csv(dataset, out);
}

Dataset import_csv(std::istream& in) {
    std::string raw;
    int line_no = 0;
    if (!std::getline(in, raw)) {
        throw ParseError("empty CSV file", 1);
    }
    ++line_no;
    auto header = split_csv(trim(raw));
    if (header.empty() || header.front() != "Label") {
        throw ParseError("CSV header must start with the Label column", line_no);
    }
    const bool has_group = header.size() >= 2 && header.back() == "Group";
    const size_t feature_count = header.size() - 1 - (has_group ? 1 : 0);
    if (feature_count == 0) {
        throw ParseError("CSV header declares no feature columns", line_no);
    }
    std::vector<std::string> feature_names;
    for (size_t i = 1; i <= feature_count; ++i) {
        feature_names.emplace_back(header[i]);
    }

    std::vector<Instance> instances;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = trim(raw);
        if (line.empty()) continue;
        auto cells = split_csv(line);
        if (cells.size() != header.size()) {
            throw ParseError("row has " + std::to_string(cells.size()) + " values, expected " +
                                 std::to_string(header.size()),
                             line_no);
        }
        Instance inst;
        inst.label = label_from_string(cells[0]);
        for (size_t i = 1; i <= feature_count; ++i) {
            inst.values.push_back(parse_value(cells[i], line_no));
        }
        if (has_group) inst.group = std::string(cells.back());
        instances.push_back(std::move(inst));
    }
    return Dataset(std::move(feature_names), std::move(instances));
}

Dataset import_csv(const std::string& path) {
    auto in = open_in(path);
    return import_csv(in);
}

namespace {

bool has_extension(const std::string& path, std::string_view ext) {
    if (path.size() < ext.size()) return false;
    return iequals(std::string_view(path).substr(path.size() - ext.size()), ext);
}

}  // namespace

void export_dataset(const Dataset& dataset, const std::string& path) {
    if (has_extension(path, ".arff")) {
        export_arff(dataset, path);
    } else if (has_extension(path, ".csv")) {
        export_csv(dataset, path);
    } else {
        throw Error("dataset path must end in .arff or .csv: " + path);
    }
}

Dataset import_dataset(const std::string& path) {
    if (has_extension(path, ".arff")) return import_arff(path);
    if (has_extension(path, ".csv")) return import_csv(path);
    throw Error("dataset path must end in .arff or .csv: " + path);
}

}  // namespace convml
