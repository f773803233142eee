#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "dampen/error.hpp"
#include "dampen/tree.hpp"

namespace dampen {
namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  out.push_back(cell);
  for (auto& c : out) {
    const auto b = c.find_first_not_of(" \t");
    const auto e = c.find_last_not_of(" \t");
    c = b == std::string::npos ? std::string{} : c.substr(b, e - b + 1);
  }
  return out;
}

std::size_t bin_of(double v, double lo, double hi, std::size_t bins) {
  if (hi <= lo) return 0;
  const double scaled = (v - lo) * static_cast<double>(bins) / (hi - lo);
  const double c = std::ceil(scaled) - 1.0;
  if (c <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(c), bins - 1);
}

}  // namespace

std::vector<std::size_t> LabeledTable::feature_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t a = 0; a < attributes.size(); ++a) {
    if (a != class_index) out.push_back(a);
  }
  return out;
}

void LabeledTable::validate() const {
  if (class_index >= attributes.size()) throw InvalidInput("table: class attribute out of range");
  if (attributes[class_index].kind != AttributeSpec::Kind::categorical) {
    throw InvalidInput("table: class attribute must be categorical");
  }
  for (const auto& a : attributes) {
    if (a.kind == AttributeSpec::Kind::categorical && a.values.empty()) {
      throw InvalidInput("table: attribute '" + a.name + "' has an empty domain");
    }
    if (a.kind == AttributeSpec::Kind::continuous && !(a.max >= a.min)) {
      throw InvalidInput("table: attribute '" + a.name + "' has max < min");
    }
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != attributes.size()) throw InvalidInput("table: row " + std::to_string(r) + " has wrong width");
    for (std::size_t a = 0; a < attributes.size(); ++a) {
      const double v = rows[r][a];
      const auto& spec = attributes[a];
      const bool ok = spec.kind == AttributeSpec::Kind::categorical
                          ? v >= 0 && v == std::floor(v) && v < static_cast<double>(spec.values.size())
                          : v >= spec.min && v <= spec.max;
      if (!ok) throw InvalidInput("table: value outside the domain of '" + spec.name + "'");
    }
  }
}

TableSchema parse_schema(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("schema: ") + e.what());
  }
  TableSchema schema;
  if (!doc.is_object() || !doc.contains("class") || !doc["class"].is_string()) {
    throw ParseError("schema: missing string field \"class\"");
  }
  schema.class_name = doc["class"].get<std::string>();
  if (!doc.contains("attributes") || !doc["attributes"].is_object()) {
    throw ParseError("schema: missing object field \"attributes\"");
  }
  for (const auto& [name, body] : doc["attributes"].items()) {
    AttributeSpec spec;
    spec.name = name;
    if (body.contains("categorical")) {
      spec.kind = AttributeSpec::Kind::categorical;
      for (const auto& v : body["categorical"]) spec.values.push_back(v.is_string() ? v.get<std::string>() : v.dump());
      if (spec.values.empty()) throw ParseError("schema: attribute '" + name + "' has an empty domain");
    } else if (body.contains("continuous")) {
      const auto& c = body["continuous"];
      spec.kind = AttributeSpec::Kind::continuous;
      spec.min = c.at("min").get<double>();
      spec.max = c.at("max").get<double>();
      spec.bins = c.value("bins", std::size_t{0});
      if (!(spec.max >= spec.min)) throw ParseError("schema: attribute '" + name + "' has max < min");
    } else {
      throw ParseError("schema: attribute '" + name + "' is neither categorical nor continuous");
    }
    schema.attributes.emplace(name, std::move(spec));
  }
  if (!schema.attributes.count(schema.class_name)) throw ParseError("schema: class attribute not declared");
  if (schema.attributes.at(schema.class_name).kind != AttributeSpec::Kind::categorical) {
    throw ParseError("schema: class attribute must be categorical");
  }
  return schema;
}

LabeledTable load_table_csv(std::istream& in, const TableSchema& schema, IngestionReport* report) {
  IngestionReport local;
  IngestionReport& rep = report ? *report : local;
  LabeledTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_done = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      if (header_done) ++rep.rows_dropped;
      continue;
    }
    const auto cells = split_csv(line);
    if (!header_done) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        auto it = schema.attributes.find(cells[i]);
        if (it == schema.attributes.end()) throw ParseError("column '" + cells[i] + "' not in schema", line_no);
        table.attributes.push_back(it->second);
        if (cells[i] == schema.class_name) table.class_index = i;
      }
      if (std::none_of(cells.begin(), cells.end(), [&](const std::string& c) { return c == schema.class_name; })) {
        throw ParseError("class column '" + schema.class_name + "' missing from header", line_no);
      }
      header_done = true;
      continue;
    }
    if (cells.size() != table.attributes.size()) {
      throw ParseError("expected " + std::to_string(table.attributes.size()) + " cells, got " +
                           std::to_string(cells.size()),
                       line_no);
    }
    std::vector<double> row(cells.size());
    for (std::size_t a = 0; a < cells.size(); ++a) {
      const auto& spec = table.attributes[a];
      if (spec.kind == AttributeSpec::Kind::categorical) {
        auto it = std::find(spec.values.begin(), spec.values.end(), cells[a]);
        if (it == spec.values.end()) {
          throw ParseError("value '" + cells[a] + "' not in the domain of '" + spec.name + "'", line_no);
        }
        row[a] = static_cast<double>(it - spec.values.begin());
      } else {
        double v = 0.0;
        const char* first = cells[a].data();
        const char* last = first + cells[a].size();
        auto [ptr, ec] = std::from_chars(first, last, v);
        if (ec != std::errc{} || ptr != last) {
          throw ParseError("value '" + cells[a] + "' of '" + spec.name + "' is not a number", line_no);
        }
        if (v < spec.min || v > spec.max) {
          throw ParseError("value '" + cells[a] + "' of '" + spec.name + "' outside [" + std::to_string(spec.min) +
                               ", " + std::to_string(spec.max) + "]",
                           line_no);
        }
        row[a] = v;
      }
    }
    table.rows.push_back(std::move(row));
    ++rep.rows_kept;
  }
  if (in.bad()) throw IoError("read failure");
  if (!header_done) throw ParseError("missing header row");
  return table;
}

LabeledTable discretize(const LabeledTable& table, std::size_t attribute, std::size_t bins) {
  if (bins < 2) throw InvalidInput("discretize: at least two bins required");
  const auto& spec = table.attributes.at(attribute);
  if (spec.kind != AttributeSpec::Kind::continuous) throw InvalidInput("discretize: attribute is not continuous");
  LabeledTable out = table;
  AttributeSpec& s = out.attributes[attribute];
  s.kind = AttributeSpec::Kind::categorical;
  s.values.clear();
  for (std::size_t b = 0; b < bins; ++b) s.values.push_back("bin" + std::to_string(b));
  s.bins = bins;
  for (auto& row : out.rows) row[attribute] = static_cast<double>(bin_of(row[attribute], spec.min, spec.max, bins));
  return out;
}

LabeledTable discretize(const LabeledTable& table) {
  LabeledTable out = table;
  for (std::size_t a = 0; a < table.attributes.size(); ++a) {
    const auto& spec = table.attributes[a];
    if (spec.kind != AttributeSpec::Kind::continuous) continue;
    if (spec.bins < 2) throw InvalidInput("discretize: attribute '" + spec.name + "' needs at least two bins");
    out = discretize(out, a, spec.bins);
  }
  return out;
}

}  // namespace dampen
