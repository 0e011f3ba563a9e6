#include "spillover/pair_csv.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "spillover/error.hpp"

namespace spillover {

namespace {

constexpr std::array<const char*, 5> kRequired{"family_id", "t1", "t2", "y1", "y2"};

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

// One record; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_record(const std::string& line, std::size_t line_no,
                                      const std::string& source) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(was_quoted ? field : trim(field));
      field.clear();
      was_quoted = false;
    } else {
      field += c;
    }
  }
  if (quoted) throw ParseError(fmt::format("{}:{}: unterminated quoted field", source, line_no));
  fields.push_back(was_quoted ? field : trim(field));
  return fields;
}

bool is_missing(const std::string& cell) { return cell.empty() || cell == "NA" || cell == "."; }

std::optional<double> parse_number(const std::string& cell) {
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) return std::nullopt;
  return value;
}

} // namespace

LoadedPairs read_pair_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    header = split_record(line, line_no, source);
    break;
  }
  if (header.empty()) throw EmptyDataError(fmt::format("{}: no header row", source));

  std::array<std::size_t, kRequired.size()> required{};
  for (std::size_t k = 0; k < kRequired.size(); ++k) {
    auto it = std::find(header.begin(), header.end(), kRequired[k]);
    if (it == header.end())
      throw SchemaError(fmt::format("{}: missing required column \"{}\"", source, kRequired[k]));
    required[k] = static_cast<std::size_t>(it - header.begin());
  }
  std::vector<std::size_t> covariate_columns;
  LoadedPairs out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].rfind("cov_", 0) == 0) {
      covariate_columns.push_back(c);
      out.data.covariate_names.push_back(header[c]);
    }
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_record(line, line_no, source);
    if (fields.size() != header.size())
      throw ParseError(fmt::format("{}:{}: expected {} fields, found {}", source, line_no,
                                   header.size(), fields.size()));

    bool missing = false;
    for (auto c : required) missing = missing || is_missing(fields[c]);
    for (auto c : covariate_columns) missing = missing || is_missing(fields[c]);
    if (missing) {
      ++out.dropped_rows;
      continue;
    }

    auto number = [&](std::size_t column) {
      const auto value = parse_number(fields[column]);
      if (!value)
        throw ParseError(fmt::format("{}:{}: column \"{}\": '{}' is not a finite number", source,
                                     line_no, header[column], fields[column]));
      return *value;
    };
    PairRow row;
    row.family_id = fields[required[0]];
    row.t1 = number(required[1]);
    row.t2 = number(required[2]);
    row.y1 = number(required[3]);
    row.y2 = number(required[4]);
    for (auto c : covariate_columns) row.covariates.push_back(number(c));
    out.data.rows.push_back(std::move(row));
  }

  if (out.dropped_rows > 0)
    out.warnings.push_back(fmt::format("{}: dropped {} row(s) with missing values (complete-case)",
                                       source, out.dropped_rows));
  if (out.data.empty()) throw EmptyDataError(fmt::format("{}: no complete rows", source));
  validate_dataset(out.data);
  return out;
}

LoadedPairs load_pair_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}' for reading", path.string()));
  return read_pair_csv(in, path.string());
}

void write_pair_csv(const PairDataset& data, std::ostream& out) {
  out << "family_id,t1,t2,y1,y2";
  for (const auto& name : data.covariate_names) out << ',' << name;
  out << '\n';
  for (const auto& r : data.rows) {
    fmt::print(out, "{},{},{},{},{}", r.family_id, r.t1, r.t2, r.y1, r.y2);
    for (double c : r.covariates) fmt::print(out, ",{}", c);
    out << '\n';
  }
}

void save_pair_csv(const PairDataset& data, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path.string()));
  write_pair_csv(data, out);
  if (!out) throw IoError(fmt::format("failed writing '{}'", path.string()));
}

} // namespace spillover
