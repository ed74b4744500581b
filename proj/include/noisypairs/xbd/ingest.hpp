#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "noisypairs/common/json_io.hpp"
#include "noisypairs/xbd/tiling.hpp"

namespace noisypairs::xbd {

/// A tile pair on disk. Paths are relative to the ingest output directory.
struct PairEntry {
  std::string id;
  std::string site;
  bool noisy = false;
  std::string pre_image, post_image, pre_label, post_label;
};

Json to_json(const PairEntry& entry);
PairEntry pair_entry_from_json(const Json& json);

/// The ingest output: every tile pair by split, plus the pretraining subset
/// undersampled from the train split to the requested noisy-pairs rate.
struct PretrainManifest {
  double r_pairs = 0.0;
  std::uint64_t seed = 0;
  double train_ratio = 0.7;
  std::vector<PairEntry> train, val, test;
  std::vector<std::string> clean_pairs;  // ids of the pretraining subset
  std::vector<std::string> noisy_pairs;

  Json to_json() const;
  static PretrainManifest from_json(const Json& json);

  /// Re-runs the undersampling over the full train split for another rate;
  /// val and test are unchanged.
  PretrainManifest with_rate(double rate) const;

  std::vector<PairEntry> pretrain_pairs() const;
};

struct IngestOptions {
  std::filesystem::path input;
  std::filesystem::path output;
  double r_pairs = 0.0;
  std::uint64_t seed = 0;
  double train_ratio = 0.7;
  int source_size = kSourceSize;
};

struct SceneFiles {
  std::string name;  // stem without the _pre/_post suffix
  std::filesystem::path pre_image, post_image;
  std::filesystem::path pre_label, post_label;  // JSON polygons or PNG masks
};

/// Finds pre/post scene files in an xBD-style directory (`images/*.png` with
/// `labels/*.json`, or `masks/*.png` holding rasterized class maps).
std::vector<SceneFiles> discover_scenes(const std::filesystem::path& dir);

SourcePair load_scene(const SceneFiles& files);

/// Tiles every scene, classifies tiles as clean/noisy, splits subsets named
/// "test" into the test split and everything else 70/30 (stratified by site,
/// whole scenes kept together) into train/val, undersamples train and writes
/// `<out>/tiles/...` plus `<out>/pretrain_manifest.json`.
PretrainManifest ingest(const IngestOptions& options);

/// Synthetic stand-in for the xBD corpus: drawn "buildings" on smooth terrain,
/// with some post-event buildings damaged. Written in the xBD layout.
struct FixtureOptions {
  int sites = 3;
  int scenes_per_site = 4;
  int test_scenes = 2;
  int source_size = kSourceSize;
  std::uint64_t seed = 0;
};

void write_fixture(const std::filesystem::path& out, const FixtureOptions& options);

}  // namespace noisypairs::xbd
