#pragma once

#include <cstdint>
#include <filesystem>

#include <opencv2/core.hpp>

#include "noisypairs/common/rng.hpp"
#include "noisypairs/vts/texture_bank.hpp"

namespace noisypairs::vts {

/// Stand-ins for the three texture classes, for tests and CI runs that do not
/// have a texture corpus. Colour statistics are drawn from one shared
/// distribution, so the classes differ by structure only.
enum class TextureKind { kStratified, kVeined, kMatted };

cv::Mat procedural_texture(TextureKind kind, int size, Rng& rng);

struct ProceduralTextureOptions {
  int per_class = 40;
  int size = 128;
  std::uint64_t seed = 0;
};

/// Writes `<out>/<class>/<class>_NNN.png` for the three classes in `classes`
/// (class0 → stratified, class1 → veined, noise → matted).
void write_procedural_textures(const std::filesystem::path& out, const TextureClasses& classes,
                               const ProceduralTextureOptions& options);

}  // namespace noisypairs::vts
