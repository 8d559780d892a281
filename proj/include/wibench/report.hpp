#ifndef WIBENCH_REPORT_HPP_
#define WIBENCH_REPORT_HPP_

#include <optional>
#include <string>

#include "wibench/analysis.hpp"

namespace wibench::report {

struct LabelMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Lower-triangular matrix rendering, two decimals, "n/a" for undefined cells.
// With b present, cells pair up as "a/b" for side-by-side device comparison.
std::string render_matrix(const analysis::CorrelationMatrix& a,
                          const std::optional<analysis::CorrelationMatrix>& b = std::nullopt);

// Plot-ready per-factor time series: t_ms plus the six factor columns.
std::string plot_csv(const analysis::AlignedTable& t);

// Matrix persistence so `analyze` output can feed `report`.
std::string matrix_to_json(const analysis::CorrelationMatrix& m);
analysis::CorrelationMatrix matrix_from_json(const std::string& text);

}  // namespace wibench::report

#endif
