#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dampen/error.hpp"
#include "dampen/harness.hpp"

namespace dampen {
namespace {

using ordered_json = nlohmann::ordered_json;

constexpr const char* kCsvHeader = "application,dataset,setting,mechanism,epsilon,metricName,value,dispersion,runtimeMs";

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw InvalidInput("emit: unprintable number");
  return {buf, ptr};
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cells.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else if (c != '\r') {
      cells.back() += c;
    }
  }
  return cells;
}

double parse_double(const std::string& s, std::size_t line_no) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) throw ParseError("'" + s + "' is not a number", line_no);
  return v;
}

ordered_json params_json(const ExperimentSpec& spec) {
  ordered_json p;
  p["epsilons"] = spec.epsilons;
  std::vector<std::string> mechs;
  for (Mechanism m : spec.mechanisms) mechs.emplace_back(to_string(m));
  p["mechanisms"] = mechs;
  p["baseSeed"] = spec.base_seed;
  p["runs"] = spec.effective_runs();
  switch (spec.application) {
    case Application::percentile: p["percentiles"] = spec.percentiles; break;
    case Application::topk: p["k"] = spec.k; break;
    case Application::tree:
      p["depth"] = spec.depth;
      p["folds"] = spec.folds;
      break;
    case Application::mechanism_compare: break;
  }
  return p;
}

}  // namespace

void emit(const std::vector<ResultRow>& rows, const ExperimentSpec& spec, OutputFormat format, std::ostream& out) {
  if (rows.empty()) throw InvalidInput("emit: no rows");
  if (format == OutputFormat::csv) {
    out << kCsvHeader << '\n';
    for (const auto& r : rows) {
      out << csv_cell(r.application) << ',' << csv_cell(r.dataset) << ',' << csv_cell(r.setting) << ','
          << csv_cell(r.mechanism) << ',' << shortest(r.epsilon) << ',' << csv_cell(r.metric) << ','
          << shortest(r.value) << ',' << shortest(r.dispersion) << ',' << shortest(r.runtime_ms) << '\n';
    }
  } else {
    ordered_json doc;
    doc["experiment"] = {{"application", std::string(to_string(spec.application))}, {"dataset", spec.dataset_name}};
    doc["params"] = params_json(spec);
    doc["results"] = ordered_json::array();
    for (const auto& r : rows) {
      doc["results"].push_back({{"application", r.application},
                                {"dataset", r.dataset},
                                {"setting", r.setting},
                                {"mechanism", r.mechanism},
                                {"epsilon", r.epsilon},
                                {"metricName", r.metric},
                                {"value", r.value},
                                {"dispersion", r.dispersion},
                                {"runtimeMs", r.runtime_ms}});
    }
    out << doc.dump(2) << '\n';
  }
  if (!out) throw IoError("emit: write failure");
}

void emit(const std::vector<ResultRow>& rows, const ExperimentSpec& spec, OutputFormat format,
          const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  emit(rows, spec, format, out);
  out.close();
  if (!out) throw IoError("write failure on '" + path + "'");
}

std::vector<ResultRow> parse_rows_json(std::istream& in) {
  std::vector<ResultRow> rows;
  try {
    const auto doc = nlohmann::json::parse(in);
    for (const auto& r : doc.at("results")) {
      rows.push_back({r.at("application").get<std::string>(), r.at("dataset").get<std::string>(),
                      r.at("setting").get<std::string>(), r.at("mechanism").get<std::string>(),
                      r.at("epsilon").get<double>(), r.at("metricName").get<std::string>(),
                      r.at("value").get<double>(), r.at("dispersion").get<double>(),
                      r.at("runtimeMs").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("results json: ") + e.what());
  }
  return rows;
}

std::vector<ResultRow> parse_rows_csv(std::istream& in) {
  std::vector<ResultRow> rows;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw ParseError("results csv: empty input");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw ParseError("results csv: unexpected header", line_no);
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 9) throw ParseError("results csv: expected 9 cells", line_no);
    rows.push_back({c[0], c[1], c[2], c[3], parse_double(c[4], line_no), c[5], parse_double(c[6], line_no),
                    parse_double(c[7], line_no), parse_double(c[8], line_no)});
  }
  return rows;
}

}  // namespace dampen
