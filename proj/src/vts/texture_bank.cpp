#include "noisypairs/vts/texture_bank.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "noisypairs/common/image_io.hpp"
#include "noisypairs/common/rng.hpp"

namespace fs = std::filesystem;

namespace noisypairs::vts {

std::string to_string(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

Split split_from_string(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val") return Split::kVal;
  if (name == "test") return Split::kTest;
  throw std::invalid_argument("unknown split: " + name);
}

namespace {

bool is_image(const fs::path& p) {
  auto ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

}  // namespace

TextureBank TextureBank::scan(const fs::path& root, const TextureClasses& classes, std::array<double, 3> ratios,
                              std::uint64_t seed) {
  double total = 0.0;
  for (double r : ratios) {
    if (!(r > 0.0)) throw std::invalid_argument("split ratios must be positive");
    total += r;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("split ratios must sum to 1");
  if (!fs::is_directory(root)) throw std::runtime_error("texture directory does not exist: " + root.string());

  TextureBank bank;
  bank.root_ = root;
  bank.classes_ = classes;
  const fs::path base = fs::is_directory(root / "images") ? root / "images" : root;

  std::uint64_t class_index = 0;
  for (const auto& name : {classes.class0, classes.class1, classes.noise}) {
    const fs::path dir = base / name;
    if (!fs::is_directory(dir)) throw std::runtime_error("texture class directory does not exist: " + dir.string());
    std::vector<std::string> found;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file() && is_image(entry.path())) {
        found.push_back(fs::relative(entry.path(), root).generic_string());
      }
    }
    std::sort(found.begin(), found.end());
    const auto n = static_cast<int>(found.size());
    const int n_train = static_cast<int>(std::lround(ratios[0] * n));
    const int n_val = static_cast<int>(std::lround(ratios[1] * n));
    if (n_train < 1 || n_val < 1 || n - n_train - n_val < 1) {
      throw std::runtime_error("texture class '" + name + "' has " + std::to_string(n) +
                               " images, too few to give every split at least one");
    }
    auto rng = make_rng(seed, streams::kTextureSplit, class_index++);
    std::shuffle(found.begin(), found.end(), rng);

    auto& per_split = bank.files_[name];
    per_split[0].assign(found.begin(), found.begin() + n_train);
    per_split[1].assign(found.begin() + n_train, found.begin() + n_train + n_val);
    per_split[2].assign(found.begin() + n_train + n_val, found.end());
    for (auto& files : per_split) std::sort(files.begin(), files.end());
  }
  return bank;
}

const std::vector<std::string>& TextureBank::files(const std::string& texture_class, Split split) const {
  const auto it = files_.find(texture_class);
  if (it == files_.end()) throw std::invalid_argument("unknown texture class: " + texture_class);
  return it->second[static_cast<int>(split)];
}

const Texture& TextureBank::load(const std::string& relative_path) const {
  auto it = cache_.find(relative_path);
  if (it == cache_.end()) {
    it = cache_.emplace(relative_path, Texture{read_color(root_ / relative_path), relative_path}).first;
  }
  return it->second;
}

void TextureBank::preload(Split split) const {
  for (const auto& [name, per_split] : files_) {
    for (const auto& file : per_split[static_cast<int>(split)]) load(file);
  }
}

}  // namespace noisypairs::vts
