#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "noisypairs/common/json_io.hpp"

namespace noisypairs::experiments {

struct ConfigKey {
  std::string dataset;  // "vts" or "xbd"
  std::string loss;     // "moco", "within_image", "cross_image"
  double r_pairs = 0.0;
  std::optional<double> r_img;  // vts only
  std::string mode = "noisy";   // "noisy" or "mere_exposure"
  std::uint64_t seed = 0;

  /// File-system friendly and unique per key, e.g. "vts_moco_rp0.50_ri0.25_noisy_s0".
  std::string slug() const;
  Json to_json() const;
  static ConfigKey from_json(const Json& json);
  /// Throws std::invalid_argument when a field is out of its domain.
  void validate() const;

  auto operator<=>(const ConfigKey&) const = default;
};

struct ExperimentRecord {
  ConfigKey key;
  double macro_f1 = 0.0;
  std::vector<std::optional<double>> per_class_f1;
  std::string checkpoint;  // path relative to the run directory
  double wall_clock_s = 0.0;
  Json extra = Json::object();  // free-form diagnostics (epochs, best val loss, lr)

  Json to_json() const;
  static ExperimentRecord from_json(const Json& json);
};

struct FailureEntry {
  ConfigKey key;
  std::string error;
};

std::vector<ExperimentRecord> read_records(const std::filesystem::path& jsonl);
void write_records(const std::filesystem::path& jsonl, const std::vector<ExperimentRecord>& records);

}  // namespace noisypairs::experiments
