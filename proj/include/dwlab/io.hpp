#pragma once

// CSV and JSON import/export for traces, sampled H, Gramians and tables.

#include "dwlab/dynamics.hpp"
#include "dwlab/lemma.hpp"
#include "dwlab/observability.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace dwlab::io {

using Json = nlohmann::ordered_json;

/// Shortest round-trip decimal form.
std::string format_double(double x);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Numeric CSV with a header row; throws InvalidArgument on ragged or
/// non-numeric content.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};
Table parse_csv(const std::string& text);
std::string to_csv(const Table& table);

std::string trace_to_csv(const EnergyTrace& trace);
Json trace_to_json(const EnergyTrace& trace);
/// Accepts either the CSV form (t, energy, flux) or the JSON form.
EnergyTrace trace_from_csv(const std::string& text);
EnergyTrace trace_from_json(const Json& doc);
EnergyTrace load_trace(const std::filesystem::path& path);

std::string sampled_h_to_csv(const SampledH& H);
SampledH sampled_h_from_csv(const std::string& text);

std::string gramian_to_csv(const Gramian& gramian);

/// Two-column (x, y) table, e.g. a custom rate G or damping law g.
std::vector<std::pair<double, double>> pairs_from_csv(const std::string& text);

Json to_json(const GraphNorms& n);
Json to_json(const XFinvReport& r);
Json to_json(const ObservabilityReport& r);

}  // namespace dwlab::io
