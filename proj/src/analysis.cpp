#include "wibench/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace wibench::analysis {

const std::array<std::string, kFactorCount> kFactorLabels = {
    "Speed", "CPU load", "CPU temp", "Ext temp", "Voltage", "Current"};

std::vector<double> AlignedTable::column(size_t factor) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.factors[factor]);
  return out;
}

AlignedTable align(const model::Journal& server_j, const model::Journal& client_j) {
  if (server_j.header.role != model::Role::Server || client_j.header.role != model::Role::Client)
    throw AnalysisError("align expects one server and one client journal");
  if (server_j.header.interval_ms != client_j.header.interval_ms)
    throw IntervalMismatch("interval_ms " + std::to_string(server_j.header.interval_ms) +
                           " vs " + std::to_string(client_j.header.interval_ms));
  const std::string &a = server_j.header.run_id, &b = client_j.header.run_id;
  if (a.rfind(b, 0) != 0 && b.rfind(a, 0) != 0)
    throw RunIdMismatch("run ids '" + a + "' and '" + b + "' do not share a prefix");

  std::map<int64_t, const model::ServerSample*> by_seq;
  for (const auto& s : server_j.server_rows) by_seq[s.seq] = &s;

  AlignedTable t;
  t.server_header = server_j.header;
  t.client_header = client_j.header;
  size_t matched = 0;
  for (const auto& c : client_j.client_rows) {
    auto it = by_seq.find(c.seq);
    if (it == by_seq.end()) continue;
    const auto& s = *it->second;
    AlignedRow row;
    row.seq = c.seq;
    row.factors = {c.speed_bps, s.cpu_load, s.cpu_temp, s.ext_temp, s.voltage, s.current};
    t.rows.push_back(row);
    ++matched;
  }
  size_t total = server_j.server_rows.size() + client_j.client_rows.size();
  t.dropped = total - 2 * matched;
  if (total > 0 && static_cast<double>(t.dropped) > 0.20 * static_cast<double>(total))
    throw ExcessiveDrop(std::to_string(t.dropped) + " of " + std::to_string(total) +
                        " rows unmatched");
  return t;
}

std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw AnalysisError("series lengths differ");
  size_t n = x.size();
  if (n < 2) throw AnalysisError("pearson needs n >= 2");

  // two-pass, mean-shifted formulation
  double mx = 0.0, my = 0.0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return std::nullopt;
  double r = sxy / std::sqrt(sxx * syy);
  if (std::fabs(r) > 1.0 + 1e-12) throw AnalysisError("pearson out of range: " + std::to_string(r));
  return std::clamp(r, -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(const AlignedTable& t) {
  if (t.rows.size() < 2) throw AnalysisError("need at least 2 aligned rows");
  CorrelationMatrix m;
  m.labels = kFactorLabels;
  std::array<std::vector<double>, kFactorCount> cols;
  for (size_t i = 0; i < kFactorCount; ++i) cols[i] = t.column(i);
  for (size_t i = 0; i < kFactorCount; ++i) {
    m.r[i][i] = 1.0;
    for (size_t j = 0; j < i; ++j) {
      std::optional<double> r = pearson(cols[i], cols[j]);
      m.r[i][j] = r;
      m.r[j][i] = r;
    }
  }
  return m;
}

std::vector<ThrottleEpisode> detect_throttle(const AlignedTable& t, double temp_floor,
                                             double drop_pp) {
  constexpr size_t kLoad = 1, kCpuTemp = 2;
  std::vector<ThrottleEpisode> episodes;
  bool open = false;
  ThrottleEpisode cur;
  double pre_drop_load = 0.0;
  for (size_t k = 1; k < t.rows.size(); ++k) {
    double load_prev = t.rows[k - 1].factors[kLoad];
    double load = t.rows[k].factors[kLoad];
    double temp_prev = t.rows[k - 1].factors[kCpuTemp];
    if (!open) {
      if (temp_prev >= temp_floor && load_prev - load >= drop_pp) {
        open = true;
        cur = ThrottleEpisode{};
        cur.start_seq = t.rows[k].seq;
        cur.end_seq = t.rows[k].seq;
        cur.peak_temp = std::max(temp_prev, t.rows[k].factors[kCpuTemp]);
        cur.load_drop = load_prev - load;
        pre_drop_load = load_prev;
      }
    } else {
      cur.peak_temp = std::max(cur.peak_temp, t.rows[k].factors[kCpuTemp]);
      if (load >= pre_drop_load - drop_pp / 2.0) {
        cur.end_seq = t.rows[k].seq;
        episodes.push_back(cur);
        open = false;
      } else {
        cur.end_seq = t.rows[k].seq;
      }
    }
  }
  if (open) episodes.push_back(cur);  // run ended while still throttled
  return episodes;
}

TrialSummary aggregate_trials(std::span<const AlignedTable> tables) {
  if (tables.empty()) throw EmptyInput("no tables to aggregate");
  TrialSummary s;
  s.trial_count = tables.size();
  s.mean_matrix.labels = kFactorLabels;

  std::array<std::vector<double>, kFactorCount> per_trial_means;
  std::array<std::array<double, kFactorCount>, kFactorCount> sums{};
  for (const auto& t : tables) {
    for (size_t i = 0; i < kFactorCount; ++i) {
      auto col = t.column(i);
      double m = 0.0;
      for (double v : col) m += v;
      per_trial_means[i].push_back(col.empty() ? 0.0 : m / static_cast<double>(col.size()));
    }
    CorrelationMatrix cm = correlation_matrix(t);
    for (size_t i = 0; i < kFactorCount; ++i)
      for (size_t j = 0; j < kFactorCount; ++j)
        if (cm.r[i][j]) {
          sums[i][j] += *cm.r[i][j];
          s.defined_count[i][j] += 1;
        }
  }
  for (size_t i = 0; i < kFactorCount; ++i) {
    const auto& v = per_trial_means[i];
    FactorStats fs;
    fs.min = *std::min_element(v.begin(), v.end());
    fs.max = *std::max_element(v.begin(), v.end());
    for (double x : v) fs.mean += x;
    fs.mean /= static_cast<double>(v.size());
    s.factors[i] = fs;
  }
  for (size_t i = 0; i < kFactorCount; ++i)
    for (size_t j = 0; j < kFactorCount; ++j)
      if (s.defined_count[i][j] > 0)
        s.mean_matrix.r[i][j] = sums[i][j] / s.defined_count[i][j];
  return s;
}

AlignedTable pool_tables(std::span<const AlignedTable> tables) {
  if (tables.empty()) throw EmptyInput("no tables to pool");
  AlignedTable out = tables.front();
  for (size_t k = 1; k < tables.size(); ++k)
    out.rows.insert(out.rows.end(), tables[k].rows.begin(), tables[k].rows.end());
  return out;
}

}  // namespace wibench::analysis
