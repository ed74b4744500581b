#pragma once

#include <filesystem>
#include <vector>

#include "noisypairs/experiments/deltas.hpp"
#include "noisypairs/experiments/records.hpp"

namespace noisypairs::experiments {

/// Writes results.csv, deltas.csv, delta_stats.csv, one F1-vs-r_pairs line
/// plot per (dataset, loss, mode) with a series per r_img, and one delta bar
/// plot per (dataset, loss) that has matched cells. Output is a pure function
/// of the inputs. Returns the written files in order. Throws on no records.
std::vector<std::filesystem::path> render_report(const std::vector<ExperimentRecord>& records,
                                                 const DeltaReport& deltas, const std::filesystem::path& out_dir);

}  // namespace noisypairs::experiments
