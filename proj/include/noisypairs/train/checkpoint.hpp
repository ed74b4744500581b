#pragma once

#include <filesystem>

#include "noisypairs/common/json_io.hpp"
#include "noisypairs/train/resnet.hpp"

namespace noisypairs::train {

/// Encoder weights plus a JSON metadata string (config echo, epoch,
/// validation loss) in one torch archive.
void save_checkpoint(const std::filesystem::path& path, ResNet18& encoder, const Json& meta);

/// Metadata only. Throws std::runtime_error when the file is unreadable.
Json read_checkpoint_meta(const std::filesystem::path& path);

/// Builds an encoder from the stored config and loads its weights.
ResNet18 load_encoder(const std::filesystem::path& path);

}  // namespace noisypairs::train
