#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "noisypairs/vts/compose.hpp"

namespace noisypairs::vts {

enum class Split { kTrain = 0, kVal = 1, kTest = 2 };
inline constexpr std::array<Split, 3> kSplits{Split::kTrain, Split::kVal, Split::kTest};

std::string to_string(Split split);
Split split_from_string(const std::string& name);

/// Texture class names used for the two downstream classes and the noise.
struct TextureClasses {
  std::string class0 = "stratified";
  std::string class1 = "veined";
  std::string noise = "matted";
};

/// Texture file references per texture class and split. Files are assigned to
/// exactly one split.
class TextureBank {
 public:
  /// Scans `root/<class>/` (or the DTD layout `root/images/<class>/`) for
  /// images and splits each class's files by `ratios` after a seeded shuffle.
  /// Throws std::runtime_error for a missing directory or a class with too few
  /// files for every split to get one; std::invalid_argument for bad ratios.
  static TextureBank scan(const std::filesystem::path& root, const TextureClasses& classes,
                          std::array<double, 3> ratios, std::uint64_t seed);

  const std::filesystem::path& root() const { return root_; }
  const TextureClasses& classes() const { return classes_; }

  /// Files (relative to root) of one texture class in one split, sorted.
  const std::vector<std::string>& files(const std::string& texture_class, Split split) const;

  /// Loads (and caches) one texture.
  const Texture& load(const std::string& relative_path) const;

  /// Loads every texture of `split` into the cache, so that concurrent readers
  /// never mutate it.
  void preload(Split split) const;

 private:
  std::filesystem::path root_;
  TextureClasses classes_;
  std::map<std::string, std::array<std::vector<std::string>, 3>> files_;
  mutable std::map<std::string, Texture> cache_;
};

}  // namespace noisypairs::vts
