#include "noisypairs/experiments/deltas.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace noisypairs::experiments {
namespace {

ConfigKey with_mode(ConfigKey k, const std::string& mode) {
  k.mode = mode;
  return k;
}

}  // namespace

Json DeltaReport::to_json() const {
  Json c = Json::array();
  for (const auto& d : cells) {
    c.push_back({{"dataset", d.dataset},
                 {"loss", d.loss},
                 {"r_pairs", d.r_pairs},
                 {"r_img", d.r_img ? Json(*d.r_img) : Json(nullptr)},
                 {"seed", d.seed},
                 {"noisy_f1", d.noisy_f1},
                 {"mere_exposure_f1", d.mere_exposure_f1},
                 {"delta_pp", d.delta_pp}});
  }
  Json stats = Json::object();
  for (const auto& [loss, s] : by_loss) stats[loss] = {{"mean_pp", s.mean}, {"stddev_pp", s.stddev}, {"cells", s.cells}};
  Json missing = Json::array();
  for (const auto& k : unmatched) missing.push_back(k.to_json());
  return Json{{"cells", c}, {"by_loss", stats}, {"unmatched", missing}};
}

DeltaReport compute_deltas(const std::vector<ExperimentRecord>& records) {
  std::map<ConfigKey, const ExperimentRecord*> index;
  for (const auto& r : records) index[r.key] = &r;

  DeltaReport report;
  for (const auto& [key, record] : index) {
    const std::string other = key.mode == "noisy" ? "mere_exposure" : "noisy";
    const auto partner = index.find(with_mode(key, other));
    if (partner == index.end()) {
      report.unmatched.push_back(key);
      continue;
    }
    if (key.mode != "noisy") continue;
    DeltaCell d{key.dataset, key.loss, key.r_pairs, key.r_img, key.seed, record->macro_f1, partner->second->macro_f1,
                100.0 * (record->macro_f1 - partner->second->macro_f1)};
    report.cells.push_back(d);
  }
  std::sort(report.cells.begin(), report.cells.end(), [](const DeltaCell& a, const DeltaCell& b) {
    return std::tie(a.dataset, a.loss, a.r_img, a.r_pairs, a.seed) < std::tie(b.dataset, b.loss, b.r_img, b.r_pairs, b.seed);
  });

  std::map<std::string, std::vector<double>> per_loss;
  for (const auto& d : report.cells) per_loss[d.loss].push_back(d.delta_pp);
  for (const auto& [loss, values] : per_loss) {
    DeltaStats s;
    s.cells = static_cast<int>(values.size());
    for (double v : values) s.mean += v;
    s.mean /= s.cells;
    for (double v : values) s.stddev += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(s.stddev / s.cells);
    report.by_loss[loss] = s;
  }
  return report;
}

}  // namespace noisypairs::experiments
