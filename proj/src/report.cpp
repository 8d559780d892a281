#include "wibench/report.hpp"

#include <json.hpp>

#include <sstream>

namespace wibench::report {

using analysis::kFactorCount;

namespace {

std::string cell_text(const std::optional<double>& a, const std::optional<double>* b) {
  auto one = [](const std::optional<double>& v) {
    return v ? model::format_fixed(*v, 2) : std::string("n/a");
  };
  if (b) return one(a) + "/" + one(*b);
  return one(a);
}

}  // namespace

std::string render_matrix(const analysis::CorrelationMatrix& a,
                          const std::optional<analysis::CorrelationMatrix>& b) {
  if (b && a.labels != b->labels)
    throw LabelMismatch("matrices carry different factor labels");

  // collect cells first so columns can be width-aligned
  std::array<std::array<std::string, kFactorCount>, kFactorCount> cells;
  for (size_t i = 0; i < kFactorCount; ++i)
    for (size_t j = 0; j <= i; ++j)
      cells[i][j] = cell_text(a.r[i][j], b ? &b->r[i][j] : nullptr);

  size_t label_w = 0, cell_w = 4;
  for (const auto& l : a.labels) label_w = std::max(label_w, l.size());
  for (size_t i = 0; i < kFactorCount; ++i) {
    label_w = std::max(label_w, a.labels[i].size());
    for (size_t j = 0; j <= i; ++j) cell_w = std::max(cell_w, cells[i][j].size());
  }

  std::ostringstream out;
  out << std::string(label_w, ' ');
  for (const auto& l : a.labels) out << "  " << std::string(cell_w > l.size() ? cell_w - l.size() : 0, ' ') << l;
  out << "\n";
  for (size_t i = 0; i < kFactorCount; ++i) {
    out << a.labels[i] << std::string(label_w - a.labels[i].size(), ' ');
    for (size_t j = 0; j <= i; ++j)
      out << "  " << std::string(cell_w - cells[i][j].size(), ' ') << cells[i][j];
    out << "\n";
  }
  return out.str();
}

std::string plot_csv(const analysis::AlignedTable& t) {
  std::ostringstream out;
  out << "t_ms,speed_bps,cpu_load,cpu_temp,ext_temp,voltage,current\n";
  int64_t interval = t.server_header.interval_ms;
  for (const auto& r : t.rows) {
    out << r.seq * interval;
    out << "," << model::format_fixed(r.factors[0], 0);
    out << "," << model::format_fixed(r.factors[1], 1);
    out << "," << model::format_fixed(r.factors[2], 1);
    out << "," << model::format_fixed(r.factors[3], 1);
    out << "," << model::format_fixed(r.factors[4], 3);
    out << "," << model::format_fixed(r.factors[5], 3);
    out << "\n";
  }
  return out.str();
}

std::string matrix_to_json(const analysis::CorrelationMatrix& m) {
  nlohmann::json j;
  j["labels"] = m.labels;
  auto& rows = j["r"] = nlohmann::json::array();
  for (size_t i = 0; i < kFactorCount; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (size_t k = 0; k < kFactorCount; ++k) {
      if (m.r[i][k])
        row.push_back(*m.r[i][k]);
      else
        row.push_back(nullptr);
    }
    rows.push_back(row);
  }
  return j.dump(2) + "\n";
}

analysis::CorrelationMatrix matrix_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  analysis::CorrelationMatrix m;
  auto labels = j.at("labels").get<std::vector<std::string>>();
  if (labels.size() != kFactorCount)
    throw LabelMismatch("expected " + std::to_string(kFactorCount) + " labels");
  std::copy(labels.begin(), labels.end(), m.labels.begin());
  const auto& rows = j.at("r");
  for (size_t i = 0; i < kFactorCount; ++i)
    for (size_t k = 0; k < kFactorCount; ++k) {
      const auto& cell = rows.at(i).at(k);
      if (!cell.is_null()) m.r[i][k] = cell.get<double>();
    }
  return m;
}

}  // namespace wibench::report
