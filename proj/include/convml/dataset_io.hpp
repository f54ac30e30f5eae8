#pragma once

#include <iosfwd>
#include <string>

#include "convml/dataset.hpp"

namespace convml {

// ARFF and CSV dataset serialization. Both formats are deterministic:
// exporting the same dataset twice yields byte-identical files.
//
// ARFF files declare the class attribute first, as
//   @ATTRIBUTE Label {Goodware,Malware}
// followed by one REAL attribute per feature column. Group ids survive the
// trip as `% group=<id>` comment lines emitted whenever the group changes
// between consecutive data rows; standard ARFF readers ignore them.
//
// CSV files carry the Label and feature columns in schema order plus a
// trailing Group column.

void export_arff(const Dataset& dataset, std::ostream& out,
                 const std::string& relation = "conversations");
void export_arff(const Dataset& dataset, const std::string& path,
                 const std::string& relation = "conversations");

/// Parse an ARFF file with a {Goodware,Malware} class attribute and numeric
/// features. Throws ParseError (with line number) on malformed input.
Dataset import_arff(std::istream& in);
Dataset import_arff(const std::string& path);

void export_csv(const Dataset& dataset, std::ostream& out);
void export_csv(const Dataset& dataset, const std::string& path);

Dataset import_csv(std::istream& in);
Dataset import_csv(const std::string& path);

/// Pick the format from the file extension (.arff or .csv).
void export_dataset(const Dataset& dataset, const std::string& path);
Dataset import_dataset(const std::string& path);

}  // namespace convml
