#include "scd/model.hpp"

#include <istream>
#include <ostream>
#include <string>

#include "scd/csv.hpp"
#include "scd/error.hpp"

namespace scd {

ClusterCentroid make_noise_centroid() {
  ClusterCentroid c;
  c.id = kNoiseClusterId;
  return c;
}

ClusterCentroid centroid_from_members(int id, const std::vector<const WeeklyProfile*>& members) {
  ClusterCentroid c;
  c.id = id;
  double total = 0.0;
  for (const auto* p : members) {
    for (std::size_t j = 0; j < kSlotsPerWeek; ++j) {
      if (p->slots[j] == 0) continue;
      c.weights[j] += p->slots[j];
      total += p->slots[j];
      c.n += 1.0;
    }
  }
  if (total > 0)
    for (auto& w : c.weights) w /= total;
  return c;
}

void write_centroids_csv(std::ostream& out, const ClusterModel& model) {
  out << "cluster_id";
  for (int j = 0; j < kSlotsPerWeek; ++j) out << ",c" << j;
  out << ",n\n";
  for (const auto& c : model) {
    out << c.id;
    for (double w : c.weights) out << ',' << csv::format_double(w);
    out << ',' << csv::format_double(c.n) << '\n';
  }
}

ClusterModel read_centroids_csv(std::istream& in) {
  ClusterModel model;
  std::string line;
  if (!std::getline(in, line)) throw DataError("centroid CSV is empty");
  if (csv::split(csv::trim(line)).size() != kSlotsPerWeek + 2)
    throw DataError("centroid CSV header has the wrong column count");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    auto view = csv::trim(line);
    if (view.empty()) continue;
    auto f = csv::split(view);
    auto bad = [&] { return DataError("centroid CSV line " + std::to_string(line_no) + " is malformed"); };
    if (f.size() != kSlotsPerWeek + 2) throw bad();
    ClusterCentroid c;
    auto id = csv::parse_number<int>(f[0]);
    if (!id || *id < 1 || *id > kNoiseClusterId) throw bad();
    c.id = *id;
    for (std::size_t j = 0; j < kSlotsPerWeek; ++j) {
      auto w = csv::parse_number<double>(f[j + 1]);
      if (!w || *w < 0.0) throw bad();
      c.weights[j] = *w;
    }
    auto n = csv::parse_number<double>(f.back());
    if (!n || *n < 0.0) throw bad();
    c.n = *n;
    model.push_back(c);
  }
  return model;
}

}  // namespace scd
