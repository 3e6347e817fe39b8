#include "scd/analysis.hpp"

#include <algorithm>
#include <ostream>
#include <set>

#include "scd/csv.hpp"
#include "scd/error.hpp"

namespace scd {

std::vector<std::uint64_t> TransitionMatrix::row_sums() const {
  std::vector<std::uint64_t> out(labels.size(), 0);
  for (std::size_t a = 0; a < labels.size(); ++a)
    for (auto c : counts[a]) out[a] += c;
  return out;
}

std::vector<std::uint64_t> TransitionMatrix::col_sums() const {
  std::vector<std::uint64_t> out(labels.size(), 0);
  for (const auto& row : counts)
    for (std::size_t b = 0; b < row.size(); ++b) out[b] += row[b];
  return out;
}

std::uint64_t TransitionMatrix::total() const {
  std::uint64_t t = 0;
  for (auto r : row_sums()) t += r;
  return t;
}

std::size_t TransitionMatrix::index_of(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw ContractViolation("transition matrix: unknown label " + label);
  return static_cast<std::size_t>(it - labels.begin());
}

TransitionMatrix transition_matrix(const ClassMap& early, const ClassMap& late,
                                   const std::vector<std::string>& labels) {
  TransitionMatrix m;
  m.labels = labels;
  m.counts.assign(labels.size(), std::vector<std::uint64_t>(labels.size(), 0));
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (!index.emplace(labels[i], i).second) throw ContractViolation("transition matrix: duplicate label " + labels[i]);

  for (const auto& [card, from] : early) {
    auto to = late.find(card);
    auto ia = index.find(from);
    if (to == late.end() || ia == index.end()) {
      ++m.excluded;
      continue;
    }
    auto ib = index.find(to->second);
    if (ib == index.end()) {
      ++m.excluded;
      continue;
    }
    ++m.counts[ia->second][ib->second];
  }
  for (const auto& [card, cls] : late)
    if (!early.contains(card)) ++m.excluded;
  return m;
}

double conversion_rate(const TransitionMatrix& m, const std::string& from, const std::string& to) {
  const auto a = m.index_of(from);
  const auto b = m.index_of(to);
  const auto row = m.row_sums()[a];
  if (row == 0) throw UndefinedStatistic("conversion rate: empty row " + from);
  return static_cast<double>(m.counts[a][b]) / static_cast<double>(row);
}

double retention_rate(const TransitionMatrix& m, const std::string& label) {
  return conversion_rate(m, label, label);
}

TransitionMatrix aggregate(const TransitionMatrix& m, const std::function<std::string(const std::string&)>& coarsen,
                           const std::vector<std::string>& coarse_labels) {
  TransitionMatrix out;
  out.labels = coarse_labels;
  out.counts.assign(coarse_labels.size(), std::vector<std::uint64_t>(coarse_labels.size(), 0));
  out.excluded = m.excluded;
  std::vector<std::optional<std::size_t>> target(m.labels.size());
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    auto coarse = coarsen(m.labels[i]);
    auto it = std::find(coarse_labels.begin(), coarse_labels.end(), coarse);
    if (it != coarse_labels.end()) target[i] = static_cast<std::size_t>(it - coarse_labels.begin());
  }
  for (std::size_t a = 0; a < m.labels.size(); ++a)
    for (std::size_t b = 0; b < m.labels.size(); ++b) {
      if (target[a] && target[b])
        out.counts[*target[a]][*target[b]] += m.counts[a][b];
      else
        out.excluded += m.counts[a][b];
    }
  return out;
}

void write_matrix_csv(std::ostream& out, const TransitionMatrix& m, const std::string& corner) {
  out << corner;
  for (const auto& l : m.labels) out << ',' << l;
  out << ",SUM\n";
  const auto rows = m.row_sums();
  for (std::size_t a = 0; a < m.labels.size(); ++a) {
    out << m.labels[a];
    for (auto c : m.counts[a]) out << ',' << c;
    out << ',' << rows[a] << '\n';
  }
  out << "SUM";
  for (auto c : m.col_sums()) out << ',' << c;
  out << ',' << m.total() << '\n';
}

void write_heatmap_csv(std::ostream& out, const TransitionMatrix& m) {
  out << "from,to,count\n";
  for (std::size_t a = 0; a < m.labels.size(); ++a)
    for (std::size_t b = 0; b < m.labels.size(); ++b)
      out << m.labels[a] << ',' << m.labels[b] << ',' << m.counts[a][b] << '\n';
}

PeriodClusterStats cluster_statistics(const std::string& period, const std::map<std::string, int>& assignments,
                                      const ProfileMap& profiles, std::span<const int> cluster_ids) {
  std::map<int, ClusterRow> rows;
  for (int id : cluster_ids) rows[id].cluster_id = id;
  for (const auto& [card, id] : assignments) {
    auto p = profiles.find(card);
    if (p == profiles.end()) throw ContractViolation("cluster statistics: no profile for card " + card);
    auto& row = rows[id];
    row.cluster_id = id;
    ++row.cards;
    if (p->second.metro_taps >= 1) ++row.metro_riders;
  }
  PeriodClusterStats out;
  out.period = period;
  out.population = assignments.size();
  for (auto& [id, row] : rows) {
    row.empty = row.cards == 0;
    row.metro_ratio = row.empty ? 0.0 : static_cast<double>(row.metro_riders) / static_cast<double>(row.cards);
    out.rows.push_back(row);
  }
  return out;
}

RegularityScatter regularity_scatter(const std::map<std::string, RegularityScore>& early,
                                     const std::map<std::string, RegularityScore>& late) {
  RegularityScatter s;
  for (const auto& [card, e] : early) {
    auto l = late.find(card);
    if (l == late.end()) continue;
    s.cards.push_back(card);
    s.re_early.push_back(e.RE);
    s.re_late.push_back(l->second.RE);
    s.sta.push_back(stability(e, l->second).sta);
  }
  if (s.cards.size() < 2) throw UndefinedStatistic("regularity scatter: fewer than two paired cards");
  try {
    s.corr_re = pearson(s.re_early, s.re_late);
  } catch (const UndefinedStatistic&) {
  }
  try {
    s.corr_sta = pearson(s.re_early, s.sta);
  } catch (const UndefinedStatistic&) {
  }
  return s;
}

}  // namespace scd
