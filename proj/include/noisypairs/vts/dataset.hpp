#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "noisypairs/common/json_io.hpp"
#include "noisypairs/vts/compose.hpp"
#include "noisypairs/vts/layout.hpp"
#include "noisypairs/vts/texture_bank.hpp"

namespace noisypairs::vts {

struct GeneratorConfig {
  std::filesystem::path texture_dir;
  TextureClasses texture_classes;
  std::array<double, 3> texture_split_ratios{0.5, 0.3, 0.2};
  int n_train = 600;
  int n_val = 360;
  int n_test = 240;
  int image_size = 64;
  int n_cells = 20;
  double r_img = 0.5;
  std::uint64_t seed = 0;
  /// Replaced cells keep their downstream class instead of becoming class 2.
  bool irrelevant_noise = false;

  /// 6000/3600/2400 images of 256×256.
  static GeneratorConfig full_scale();
  /// 600/360/240 images of 64×64.
  static GeneratorConfig desk_scale();

  int count(Split split) const;
  NoiseLabeling labeling() const {
    return irrelevant_noise ? NoiseLabeling::kIrrelevant : NoiseLabeling::kNoiseClass;
  }
  Json to_json() const;
  static GeneratorConfig from_json(const Json& json);
};

struct GeneratedSample {
  std::string id;
  Split split = Split::kTrain;
  VoronoiLayout layout;
  VtsSample sample;
  std::array<std::string, 3> textures;  // class0, class1, noise (relative paths)
};

/// One sample, a pure function of (config, split, index). The validation split
/// is always generated noise-free (r_img = 0).
GeneratedSample generate_sample(const GeneratorConfig& config, const TextureBank& bank, Split split, int index);

Json sample_manifest(const GeneratedSample& sample, const GeneratorConfig& config);

/// Writes clean.png, noisy.png, label.png, noisy_label.png and manifest.json.
void write_sample(const std::filesystem::path& dir, const GeneratedSample& sample, const GeneratorConfig& config);

/// Generates every split under `out` (`<out>/<split>/<id>/...`) plus
/// `<out>/dataset.json`, and returns the dataset-level manifest.
Json generate_dataset(const GeneratorConfig& config, const std::filesystem::path& out);

struct LoadedSample {
  VtsSample sample;
  VoronoiLayout layout;
  NoiseLabeling labeling = NoiseLabeling::kNoiseClass;
  Json manifest;
};

/// Reads a sample back, rebuilding its layout from the stored seeds.
LoadedSample load_sample(const std::filesystem::path& sample_dir);

/// Sample directories of one split, in id order.
std::vector<std::filesystem::path> list_samples(const std::filesystem::path& root, Split split);

}  // namespace noisypairs::vts
