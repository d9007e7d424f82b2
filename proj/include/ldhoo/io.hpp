#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "ldhoo/bandit.hpp"
#include "ldhoo/planner.hpp"

namespace ldhoo {

/// Shortest round-trip decimal representation.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column position, or -1.
  int column(const std::string& name) const;
};

/// Reads a comma-separated file with a header line. Fields are not quoted.
CsvTable read_csv(const std::filesystem::path& path);
void write_csv(std::ostream& out, const CsvTable& table);

/// Writes `contents` to `path`, creating parent directories. I/O failures are
/// reported with the path.
void write_file(const std::filesystem::path& path, const std::string& contents);

/// `t,h,i,action_0..,reward,cumulative_reward,node_count,elapsed_ns`. With
/// include_timing false the elapsed_ns column is written as 0.
CsvTable trace_table(std::span<const TraceRow<double>> trace, bool include_timing = true);

/// `step,action_0..,reward,cumulative_reward,plan_time_ns`.
CsvTable episode_table(const EpisodeResult& episode, bool include_timing = true);

}  // namespace ldhoo
