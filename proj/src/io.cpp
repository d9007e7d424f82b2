#include "ldhoo/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ldhoo/errors.hpp"

namespace ldhoo {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (header[k] == name) return static_cast<int>(k);
  }
  return -1;
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for reading");
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  table.header = split_line(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_line(line);
    if (fields.size() != table.header.size()) {
      std::ostringstream msg;
      msg << path.string() << ":" << lineno << ": expected " << table.header.size()
          << " fields, found " << fields.size();
      throw DataError(msg.str());
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

void write_csv(std::ostream& out, const CsvTable& table) {
  auto write_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out << ',';
      out << row[k];
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& row : table.rows) write_row(row);
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw std::runtime_error("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << contents;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

CsvTable trace_table(std::span<const TraceRow<double>> trace, bool include_timing) {
  CsvTable table;
  const Eigen::Index dim = trace.empty() ? 1 : trace.front().action.size();
  table.header = {"t", "h", "i"};
  for (Eigen::Index p = 0; p < dim; ++p) table.header.push_back("action_" + std::to_string(p));
  for (const char* c : {"reward", "cumulative_reward", "node_count", "elapsed_ns"}) {
    table.header.emplace_back(c);
  }
  for (const auto& r : trace) {
    std::vector<std::string> row{std::to_string(r.t), std::to_string(r.cell.depth),
                                 std::to_string(r.cell.index)};
    for (Eigen::Index p = 0; p < r.action.size(); ++p) row.push_back(format_double(r.action[p]));
    row.push_back(format_double(r.reward));
    row.push_back(format_double(r.cumulative_reward));
    row.push_back(std::to_string(r.node_count));
    row.push_back(std::to_string(include_timing ? r.elapsed_ns : 0));
    table.rows.push_back(std::move(row));
  }
  return table;
}

CsvTable episode_table(const EpisodeResult& episode, bool include_timing) {
  CsvTable table;
  const Eigen::Index dim = episode.steps.empty() ? 1 : episode.steps.front().action.size();
  table.header = {"step"};
  for (Eigen::Index p = 0; p < dim; ++p) table.header.push_back("action_" + std::to_string(p));
  for (const char* c : {"reward", "cumulative_reward", "plan_time_ns"}) table.header.emplace_back(c);
  for (const auto& s : episode.steps) {
    std::vector<std::string> row{std::to_string(s.step)};
    for (Eigen::Index p = 0; p < s.action.size(); ++p) row.push_back(format_double(s.action[p]));
    row.push_back(format_double(s.reward));
    row.push_back(format_double(s.cumulative_reward));
    row.push_back(std::to_string(include_timing ? s.plan_time_ns : 0));
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace ldhoo
