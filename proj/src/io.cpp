#include "dwlab/io.hpp"

#include "dwlab/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace dwlab::io {

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot write " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  return cells;
}

double parse_number(const std::string& cell, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
    throw InvalidArgument("csv line " + std::to_string(line) + ": not a number: '" + cell + "'");
  return v;
}

}  // namespace

Table parse_csv(const std::string& text) {
  Table table;
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    auto cells = split(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size())
      throw InvalidArgument("csv line " + std::to_string(lineno) + ": expected " +
                            std::to_string(table.header.size()) + " columns");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(parse_number(c, lineno));
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw InvalidArgument("csv: missing header");
  return table;
}

std::string to_csv(const Table& table) {
  std::ostringstream os;
  for (std::size_t i = 0; i < table.header.size(); ++i) os << (i ? "," : "") << table.header[i];
  os << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_double(row[i]);
    os << '\n';
  }
  return os.str();
}

std::string trace_to_csv(const EnergyTrace& trace) {
  Table t{{"t", "energy", "flux"}, {}};
  for (std::size_t i = 0; i < trace.size(); ++i) t.rows.push_back({trace.times[i], trace.energies[i], trace.flux[i]});
  return to_csv(t);
}

Json to_json(const GraphNorms& n) { return Json{{"vx", n.vx}, {"da_v", n.da_v}, {"weak", n.weak}}; }

Json trace_to_json(const EnergyTrace& trace) {
  return Json{{"initial_norms", to_json(trace.initial_norms)},
              {"t", trace.times},
              {"energy", trace.energies},
              {"flux", trace.flux}};
}

namespace {

void check_trace(const EnergyTrace& trace) {
  if (trace.size() == 0) throw InvalidArgument("trace: no samples");
  if (trace.energies.size() != trace.size() || trace.flux.size() != trace.size())
    throw InvalidArgument("trace: column lengths differ");
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (!(trace.times[i] > trace.times[i - 1])) throw InvalidArgument("trace: times must increase");
}

}  // namespace

EnergyTrace trace_from_csv(const std::string& text) {
  const Table t = parse_csv(text);
  if (t.header != std::vector<std::string>{"t", "energy", "flux"})
    throw InvalidArgument("trace csv: expected header t,energy,flux");
  EnergyTrace trace;
  for (const auto& row : t.rows) {
    trace.times.push_back(row[0]);
    trace.energies.push_back(row[1]);
    trace.flux.push_back(row[2]);
  }
  check_trace(trace);
  return trace;
}

EnergyTrace trace_from_json(const Json& doc) {
  EnergyTrace trace;
  try {
    trace.times = doc.at("t").get<std::vector<double>>();
    trace.energies = doc.at("energy").get<std::vector<double>>();
    trace.flux = doc.at("flux").get<std::vector<double>>();
    if (doc.contains("initial_norms")) {
      const auto& n = doc.at("initial_norms");
      trace.initial_norms = GraphNorms{n.at("vx").get<double>(), n.at("da_v").get<double>(),
                                       n.at("weak").get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("trace json: ") + e.what());
  }
  check_trace(trace);
  return trace;
}

EnergyTrace load_trace(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  if (path.extension() == ".json") {
    try {
      return trace_from_json(Json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
      throw InvalidArgument(std::string("trace json: ") + e.what());
    }
  }
  return trace_from_csv(text);
}

std::string sampled_h_to_csv(const SampledH& H) {
  Table t{{"t", "H"}, {}};
  for (std::size_t i = 0; i < H.times().size(); ++i) t.rows.push_back({H.times()[i], H.values()[i]});
  return to_csv(t);
}

SampledH sampled_h_from_csv(const std::string& text) {
  const Table t = parse_csv(text);
  if (t.header.size() != 2) throw InvalidArgument("sampled H csv: expected two columns");
  std::vector<double> times;
  std::vector<double> values;
  for (const auto& row : t.rows) {
    times.push_back(row[0]);
    values.push_back(row[1]);
  }
  return SampledH(std::move(times), std::move(values));
}

std::string gramian_to_csv(const Gramian& gramian) {
  const auto n = gramian.Q.rows() / 2;
  Table t;
  for (Eigen::Index j = 0; j < gramian.Q.cols(); ++j)
    t.header.push_back((j < n ? "w0_" : "w1_") + std::to_string(j < n ? j + 1 : j - n + 1));
  for (Eigen::Index i = 0; i < gramian.Q.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(gramian.Q.cols()));
    for (Eigen::Index j = 0; j < gramian.Q.cols(); ++j) row[static_cast<std::size_t>(j)] = gramian.Q(i, j);
    t.rows.push_back(std::move(row));
  }
  return to_csv(t);
}

std::vector<std::pair<double, double>> pairs_from_csv(const std::string& text) {
  const Table t = parse_csv(text);
  if (t.header.size() != 2) throw InvalidArgument("table csv: expected two columns");
  std::vector<std::pair<double, double>> out;
  for (const auto& row : t.rows) out.emplace_back(row[0], row[1]);
  return out;
}

Json to_json(const XFinvReport& r) {
  Json j{{"increasing", r.increasing}, {"evaluated", r.evaluated}, {"skipped", r.skipped}};
  j["first_violation"] = r.first_violation ? Json(*r.first_violation) : Json(nullptr);
  return j;
}

Json to_json(const ObservabilityReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries)
    entries.push_back(Json{{"index", e.index},
                           {"Lambda", e.Lambda},
                           {"T_star", e.horizon},
                           {"integral", e.integral},
                           {"vx", e.vx},
                           {"margin", e.margin},
                           {"pass", e.pass}});
  return Json{{"form", r.form},   {"factor", r.factor},           {"C", r.C},
              {"all_pass", r.all_pass}, {"worst_margin", r.worst_margin}, {"states", entries}};
}

}  // namespace dwlab::io
