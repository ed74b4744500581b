#pragma once

#include <filesystem>

#include "noisypairs/experiments/sweep.hpp"
#include "noisypairs/train/config.hpp"

namespace noisypairs::train {

/// Path of the VTS dataset for `r_img`, generating it (and procedural
/// textures when no texture directory is set) on first use.
std::filesystem::path ensure_vts_dataset(const ExperimentSettings& settings, double r_img);

/// Pretrains and finetunes one cell into `cell_dir` and returns its record
/// with the checkpoint path relative to `run_dir`.
experiments::ExperimentRecord run_cell(const experiments::ConfigKey& key, const ExperimentSettings& settings,
                                       const std::filesystem::path& cell_dir, const std::filesystem::path& run_dir);

experiments::CellRunner make_cell_runner(ExperimentSettings settings, std::filesystem::path run_dir);

}  // namespace noisypairs::train
