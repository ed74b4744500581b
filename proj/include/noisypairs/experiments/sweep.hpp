#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "noisypairs/experiments/records.hpp"

namespace noisypairs::experiments {

struct SweepGrid {
  std::string dataset = "vts";
  std::vector<std::string> losses{"moco", "within_image", "cross_image"};
  std::vector<double> r_pairs{0.0, 0.25, 0.5, 0.75, 1.0};
  std::vector<double> r_img{0.25, 0.5, 0.75, 1.0};  // ignored for xbd
  std::vector<std::string> modes{"noisy", "mere_exposure"};
  int seeds = 1;
  std::uint64_t base_seed = 0;

  /// Every cell of the grid in loss, r_img, r_pairs, mode, seed order.
  std::vector<ConfigKey> cells() const;
};

/// Trains and evaluates one cell. `cell_dir` is private to the cell; the
/// returned checkpoint path should be relative to the run directory.
using CellRunner = std::function<ExperimentRecord(const ConfigKey& key, const std::filesystem::path& cell_dir)>;

struct SweepResult {
  std::vector<ExperimentRecord> records;  // every completed cell in the run dir
  std::vector<FailureEntry> failures;     // cells that failed in this invocation
  int trained = 0;
  int skipped = 0;
};

/// Runs every cell without a completed result under `<run>/cells/`. A
/// failing cell is recorded as a failure and the sweep moves on. Results are
/// written atomically per cell, then merged into `<run>/records.jsonl` and
/// `<run>/failures.jsonl`.
SweepResult run_sweep(const std::vector<ConfigKey>& cells, const std::filesystem::path& run_dir,
                      const CellRunner& runner);

/// Merges all completed cell files of a run directory, sorted by key.
std::vector<ExperimentRecord> collect_records(const std::filesystem::path& run_dir);

}  // namespace noisypairs::experiments
