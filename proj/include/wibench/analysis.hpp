#ifndef WIBENCH_ANALYSIS_HPP_
#define WIBENCH_ANALYSIS_HPP_

#include <array>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wibench/model.hpp"

namespace wibench::analysis {

struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct IntervalMismatch : AnalysisError {
  using AnalysisError::AnalysisError;
};
struct RunIdMismatch : AnalysisError {
  using AnalysisError::AnalysisError;
};
struct ExcessiveDrop : AnalysisError {
  using AnalysisError::AnalysisError;
};
struct EmptyInput : AnalysisError {
  using AnalysisError::AnalysisError;
};

inline constexpr size_t kFactorCount = 6;
// Fixed factor order for every output.
extern const std::array<std::string, kFactorCount> kFactorLabels;

struct AlignedRow {
  int64_t seq = 0;
  std::array<double, kFactorCount> factors{};  // speed, load, cpu_temp, ext_temp, volt, curr
};

// Seq-joined six-factor table for one run.
struct AlignedTable {
  std::vector<AlignedRow> rows;
  model::RunHeader server_header;
  model::RunHeader client_header;
  size_t dropped = 0;  // rows present in only one journal

  std::vector<double> column(size_t factor) const;
};

// Inner join on seq. Throws when intervals differ, run ids do not share a
// prefix, or more than 20% of rows fail to pair up.
AlignedTable align(const model::Journal& server_j, const model::Journal& client_j);

// Pearson r over equal-length series (n >= 2). Empty optional means zero
// variance in at least one series; never NaN.
std::optional<double> pearson(std::span<const double> x, std::span<const double> y);

struct CorrelationMatrix {
  std::array<std::string, kFactorCount> labels;
  // r[i][j]; nullopt marks an undefined (zero-variance) cell
  std::array<std::array<std::optional<double>, kFactorCount>, kFactorCount> r{};
};

CorrelationMatrix correlation_matrix(const AlignedTable& t);

struct ThrottleEpisode {
  int64_t start_seq = 0;
  int64_t end_seq = 0;
  double peak_temp = 0.0;  // degC
  double load_drop = 0.0;  // percentage points at episode open
};

// Episode opens at seq k when cpu_temp(k-1) >= temp_floor and cpu_load fell by
// >= drop_pp between k-1 and k; closes when cpu_load recovers to within
// drop_pp/2 of the pre-drop value.
std::vector<ThrottleEpisode> detect_throttle(const AlignedTable& t, double temp_floor = 75.0,
                                             double drop_pp = 15.0);

struct FactorStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct TrialSummary {
  std::array<FactorStats, kFactorCount> factors;  // over per-trial means
  CorrelationMatrix mean_matrix;                  // defined cells only
  std::array<std::array<int, kFactorCount>, kFactorCount> defined_count{};
  size_t trial_count = 0;
};

TrialSummary aggregate_trials(std::span<const AlignedTable> tables);

// Pooled mode: concatenates all rows, then one matrix over the pool.
AlignedTable pool_tables(std::span<const AlignedTable> tables);

}  // namespace wibench::analysis

#endif
