#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "noisypairs/experiments/records.hpp"

namespace noisypairs::experiments {

struct DeltaCell {
  std::string dataset, loss;
  double r_pairs = 0.0;
  std::optional<double> r_img;
  std::uint64_t seed = 0;
  double noisy_f1 = 0.0, mere_exposure_f1 = 0.0;
  double delta_pp = 0.0;  // 100 · (noisy − mere exposure)
};

struct DeltaStats {
  double mean = 0.0;
  double stddev = 0.0;  // population
  int cells = 0;
};

struct DeltaReport {
  std::vector<DeltaCell> cells;             // sorted by loss, r_img, r_pairs, seed
  std::map<std::string, DeltaStats> by_loss;
  std::vector<ConfigKey> unmatched;         // records without a counterpart

  Json to_json() const;
};

/// Pairs each noisy record with the mere-exposure record of the same cell.
DeltaReport compute_deltas(const std::vector<ExperimentRecord>& records);

}  // namespace noisypairs::experiments
