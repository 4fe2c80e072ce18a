#include "consist/dataio.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "consist/error.hpp"
#include "consist/numfmt.hpp"

namespace consist {

namespace {

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

// Line reader that tolerates CRLF input and tracks 1-based line numbers.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::string& line) {
    if (!std::getline(in_, line)) return false;
    ++line_no_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
  }
  std::size_t line_no() const { return line_no_; }

  void expect_header(std::string_view header) {
    std::string line;
    if (!next(line)) throw ParseError(1, "missing header, expected '" + std::string(header) + "'");
    if (line != header)
      throw ParseError(1, "bad header '" + line + "', expected '" + std::string(header) + "'");
  }

 private:
  std::istream& in_;
  std::size_t line_no_ = 0;
};

std::vector<std::string_view> fields_of(std::string_view line, std::size_t expected,
                                        std::size_t line_no) {
  auto fields = split(line);
  if (fields.size() != expected)
    throw ParseError(line_no, "expected " + std::to_string(expected) + " fields, found " +
                                  std::to_string(fields.size()));
  return fields;
}

template <typename F>
auto parse_field(std::size_t line_no, std::string_view name, F&& parse) {
  try {
    return parse();
  } catch (const std::invalid_argument& e) {
    throw ParseError(line_no, std::string(name) + ": " + e.what());
  }
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace

StimulusTable aggregate_responses(std::span<const ResponseRecord> records) {
  std::map<std::pair<std::string, std::string>, ScoreCounts> tally;
  for (const auto& rec : records) {
    if (rec.score < 1 || rec.score > kScalePoints)
      throw DomainError("score " + std::to_string(rec.score) + " outside scale 1..5");
    ++tally[{rec.experiment_id, rec.stimulus_id}].c[static_cast<std::size_t>(rec.score - 1)];
  }
  StimulusTable table;
  table.reserve(tally.size());
  for (auto& [key, counts] : tally) table.push_back({key.first, key.second, counts});
  return table;
}

StimulusTable read_responses(std::istream& in) {
  LineReader reader(in);
  reader.expect_header(kResponsesHeader);
  std::vector<ResponseRecord> records;
  std::string line;
  while (reader.next(line)) {
    const auto no = reader.line_no();
    const auto fields = fields_of(line, 3, no);
    if (fields[0].empty() || fields[1].empty()) throw ParseError(no, "empty experiment or stimulus id");
    std::int64_t score = 0;
    try {
      const std::string_view text = fields[2];
      const bool negative = !text.empty() && text.front() == '-';
      const auto magnitude = numfmt::parse_u64(negative ? text.substr(1) : text);
      score = negative ? -static_cast<std::int64_t>(magnitude) : static_cast<std::int64_t>(magnitude);
    } catch (const std::invalid_argument&) {
      throw ParseError(no, "score '" + std::string(fields[2]) + "' is not an integer");
    }
    if (score < 1 || score > kScalePoints)
      throw ParseError(no, "score " + std::to_string(score) + " outside scale 1..5");
    records.push_back({std::string(fields[0]), std::string(fields[1]), static_cast<int>(score)});
  }
  return aggregate_responses(records);
}

StimulusTable read_responses(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_responses(in);
}

void write_responses(std::span<const ResponseRecord> records, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << kResponsesHeader << '\n';
  for (const auto& rec : records)
    out << rec.experiment_id << ',' << rec.stimulus_id << ',' << rec.score << '\n';
  finish(out, path);
}

void write_grid(const ProbabilityGrid& grid, std::ostream& out) {
  const auto model = to_string(grid.model());
  std::string line;
  out << kGridHeader << '\n';
  for (const auto& row : grid.rows()) {
    line.assign(model);
    line += ',';
    line += numfmt::sig17(row.param1);
    line += ',';
    line += numfmt::sig17(row.param2);
    for (double p : row.pmf.p) {
      line += ',';
      line += numfmt::sig17(p);
    }
    line += '\n';
    out << line;
  }
}

void write_grid(const ProbabilityGrid& grid, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_grid(grid, out);
  finish(out, path);
}

ProbabilityGrid read_grid(std::istream& in) {
  LineReader reader(in);
  reader.expect_header(kGridHeader);
  std::vector<GridRow> rows;
  std::optional<ModelId> model;
  std::string line;
  while (reader.next(line)) {
    const auto no = reader.line_no();
    const auto fields = fields_of(line, 8, no);
    const auto row_model = parse_field(no, "model", [&] {
      try {
        return parse_model_id(fields[0]);
      } catch (const DomainError& e) {
        throw std::invalid_argument(e.what());
      }
    });
    if (model && *model != row_model) throw IntegrityError("line " + std::to_string(no) + ": mixed models in one grid");
    model = row_model;

    GridRow row{};
    row.param1 = parse_field(no, "param1", [&] { return numfmt::parse_double(fields[1]); });
    row.param2 = parse_field(no, "param2", [&] { return numfmt::parse_double(fields[2]); });
    for (std::size_t s = 0; s < kScalePoints; ++s)
      row.pmf[s] = parse_field(no, "probability", [&] { return numfmt::parse_double(fields[3 + s]); });
    if (!row.pmf.is_valid())
      throw IntegrityError("line " + std::to_string(no) + ": probabilities do not form a distribution");
    rows.push_back(row);
  }
  if (!model) throw IntegrityError("grid file has no rows");
  return ProbabilityGrid(*model, std::move(rows));
}

ProbabilityGrid read_grid(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_grid(in);
}

void write_results(std::vector<GofResult> results, std::ostream& out) {
  std::sort(results.begin(), results.end(),
            [](const GofResult& a, const GofResult& b) { return a.stimulus_id < b.stimulus_id; });
  out << kResultsHeader << '\n';
  for (const auto& r : results) {
    out << r.stimulus_id << ',' << r.n << ',' << to_string(r.model) << ','
        << numfmt::sig17(r.param1_hat) << ',' << numfmt::sig17(r.param2_hat) << ','
        << numfmt::sig17(r.g_obs) << ',' << numfmt::fixed(r.p_value, 6) << ',' << r.t_bootstrap
        << ',' << r.seed << '\n';
  }
}

void write_results(std::vector<GofResult> results, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_results(std::move(results), out);
  finish(out, path);
}

std::vector<GofResult> read_results(std::istream& in) {
  LineReader reader(in);
  reader.expect_header(kResultsHeader);
  std::vector<GofResult> results;
  std::set<std::string> seen;
  std::string line;
  while (reader.next(line)) {
    const auto no = reader.line_no();
    const auto f = fields_of(line, 9, no);
    const auto where = "line " + std::to_string(no) + ": ";
    GofResult r;
    r.stimulus_id = std::string(f[0]);
    if (r.stimulus_id.empty()) throw ParseError(no, "empty stimulus_id");
    r.n = parse_field(no, "n", [&] { return numfmt::parse_u64(f[1]); });
    r.model = parse_field(no, "model", [&] {
      try {
        return parse_model_id(f[2]);
      } catch (const DomainError& e) {
        throw std::invalid_argument(e.what());
      }
    });
    r.param1_hat = parse_field(no, "param1_hat", [&] { return numfmt::parse_double(f[3]); });
    r.param2_hat = parse_field(no, "param2_hat", [&] { return numfmt::parse_double(f[4]); });
    r.g_obs = parse_field(no, "g_obs", [&] { return numfmt::parse_double(f[5]); });
    r.p_value = parse_field(no, "p_value", [&] { return numfmt::parse_double(f[6]); });
    const auto t = parse_field(no, "t_bootstrap", [&] { return numfmt::parse_u64(f[7]); });
    r.seed = parse_field(no, "seed", [&] { return numfmt::parse_u64(f[8]); });

    if (r.n < 1) throw IntegrityError(where + "n must be at least 1");
    if (!(r.g_obs >= 0.0)) throw IntegrityError(where + "g_obs " + std::string(f[5]) + " is negative or NaN");
    if (!(r.p_value >= 0.0 && r.p_value <= 1.0))
      throw IntegrityError(where + "p_value " + std::string(f[6]) + " outside [0, 1]");
    if (t < 1 || t > UINT32_MAX) throw IntegrityError(where + "t_bootstrap out of range");
    r.t_bootstrap = static_cast<std::uint32_t>(t);
    if (!seen.insert(r.stimulus_id).second)
      throw IntegrityError(where + "duplicate stimulus_id '" + r.stimulus_id + "'");
    results.push_back(std::move(r));
  }
  std::sort(results.begin(), results.end(),
            [](const GofResult& a, const GofResult& b) { return a.stimulus_id < b.stimulus_id; });
  return results;
}

std::vector<GofResult> read_results(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_results(in);
}

std::vector<std::string> read_id_list(const std::filesystem::path& path) {
  auto in = open_in(path);
  LineReader reader(in);
  std::vector<std::string> ids;
  std::string line;
  while (reader.next(line)) {
    if (line.empty() || line.front() == '#') continue;
    ids.push_back(line);
  }
  return ids;
}

}  // namespace consist
