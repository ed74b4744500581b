#include "noisypairs/xbd/ingest.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "noisypairs/common/image_io.hpp"
#include "noisypairs/xbd/polygon.hpp"
#include "noisypairs/xbd/split.hpp"

namespace fs = std::filesystem;

namespace noisypairs::xbd {
namespace {

constexpr const char* kPreSuffix = "_pre_disaster";
constexpr const char* kPostSuffix = "_post_disaster";

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

cv::Mat load_label(const fs::path& path, cv::Size size) {
  if (path.extension() == ".json") return rasterize_labels(parse_xbd_labels(read_json(path)).polygons, size);
  return read_label(path);
}

std::vector<PairEntry> entries_with_ids(const std::vector<PairEntry>& all, const std::set<std::string>& ids) {
  std::vector<PairEntry> out;
  for (const auto& e : all)
    if (ids.count(e.id)) out.push_back(e);
  return out;
}

}  // namespace

Json to_json(const PairEntry& e) {
  return Json{{"id", e.id},           {"site", e.site},           {"noisy", e.noisy},
              {"pre", e.pre_image},   {"post", e.post_image},     {"pre_label", e.pre_label},
              {"post_label", e.post_label}};
}

PairEntry pair_entry_from_json(const Json& j) {
  return {j.at("id"), j.at("site"), j.at("noisy"), j.at("pre"), j.at("post"), j.at("pre_label"), j.at("post_label")};
}

Json PretrainManifest::to_json() const {
  auto list = [](const std::vector<PairEntry>& entries) {
    Json out = Json::array();
    for (const auto& e : entries) out.push_back(xbd::to_json(e));
    return out;
  };
  std::size_t train_noisy = 0;
  for (const auto& e : train) train_noisy += e.noisy;
  return Json{{"format", "xbd-pretrain-1"},
              {"r_pairs", r_pairs},
              {"seed", seed},
              {"train_ratio", train_ratio},
              {"counts",
               {{"train_clean", train.size() - train_noisy},
                {"train_noisy", train_noisy},
                {"val", val.size()},
                {"test", test.size()},
                {"pretrain_clean", clean_pairs.size()},
                {"pretrain_noisy", noisy_pairs.size()}}},
              {"clean_pairs", clean_pairs},
              {"noisy_pairs", noisy_pairs},
              {"pairs", {{"train", list(train)}, {"val", list(val)}, {"test", list(test)}}}};
}

PretrainManifest PretrainManifest::from_json(const Json& j) {
  PretrainManifest m;
  m.r_pairs = j.at("r_pairs");
  m.seed = j.at("seed");
  m.train_ratio = j.at("train_ratio");
  for (const auto& e : j.at("pairs").at("train")) m.train.push_back(pair_entry_from_json(e));
  for (const auto& e : j.at("pairs").at("val")) m.val.push_back(pair_entry_from_json(e));
  for (const auto& e : j.at("pairs").at("test")) m.test.push_back(pair_entry_from_json(e));
  m.clean_pairs = j.at("clean_pairs").get<std::vector<std::string>>();
  m.noisy_pairs = j.at("noisy_pairs").get<std::vector<std::string>>();
  return m;
}

PretrainManifest PretrainManifest::with_rate(double rate) const {
  std::vector<std::string> clean_ids, noisy_ids;
  for (const auto& e : train) (e.noisy ? noisy_ids : clean_ids).push_back(e.id);
  const auto selection = undersample_to_rate(clean_ids, noisy_ids, rate, seed);
  PretrainManifest out = *this;
  out.r_pairs = rate;
  out.clean_pairs = selection.clean;
  out.noisy_pairs = selection.noisy;
  std::sort(out.clean_pairs.begin(), out.clean_pairs.end());
  std::sort(out.noisy_pairs.begin(), out.noisy_pairs.end());
  return out;
}

std::vector<PairEntry> PretrainManifest::pretrain_pairs() const {
  std::set<std::string> ids(clean_pairs.begin(), clean_pairs.end());
  ids.insert(noisy_pairs.begin(), noisy_pairs.end());
  return entries_with_ids(train, ids);
}

std::vector<SceneFiles> discover_scenes(const fs::path& dir) {
  std::vector<SceneFiles> scenes;
  const auto images = dir / "images";
  if (!fs::is_directory(images)) return scenes;
  for (const auto& entry : fs::directory_iterator(images)) {
    const auto stem = entry.path().stem().string();
    if (entry.path().extension() != ".png" || !ends_with(stem, kPreSuffix)) continue;
    SceneFiles s;
    s.name = stem.substr(0, stem.size() - std::string(kPreSuffix).size());
    s.pre_image = entry.path();
    s.post_image = images / (s.name + kPostSuffix + ".png");
    for (const auto& [sub, ext] : {std::pair{"labels", ".json"}, std::pair{"masks", ".png"}}) {
      const auto pre = dir / sub / (s.name + kPreSuffix + ext);
      const auto post = dir / sub / (s.name + kPostSuffix + ext);
      if (fs::exists(pre) && fs::exists(post)) {
        s.pre_label = pre;
        s.post_label = post;
        break;
      }
    }
    if (!fs::exists(s.post_image)) {
      spdlog::warn("xbd: {} has no post-disaster image, skipped", s.name);
      continue;
    }
    scenes.push_back(std::move(s));
  }
  std::sort(scenes.begin(), scenes.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  return scenes;
}

SourcePair load_scene(const SceneFiles& files) {
  SourcePair s;
  s.name = files.name;
  s.site = site_of(files.name);
  s.pre_image = read_color(files.pre_image);
  s.post_image = read_color(files.post_image);
  if (files.pre_label.empty() || files.post_label.empty()) {
    throw std::invalid_argument("scene " + files.name + " has no labels");
  }
  s.pre_label = load_label(files.pre_label, s.pre_image.size());
  s.post_label = load_label(files.post_label, s.post_image.size());
  return s;
}

PretrainManifest ingest(const IngestOptions& options) {
  if (!fs::is_directory(options.input)) throw std::runtime_error("input directory does not exist: " + options.input.string());

  // Subsets: the input itself if it has images/, otherwise its subdirectories.
  std::vector<fs::path> subsets;
  if (fs::is_directory(options.input / "images")) {
    subsets.push_back(options.input);
  } else {
    for (const auto& entry : fs::directory_iterator(options.input)) {
      if (entry.is_directory() && fs::is_directory(entry.path() / "images")) subsets.push_back(entry.path());
    }
    std::sort(subsets.begin(), subsets.end());
  }

  struct Scene {
    std::string name, site;
    std::vector<PairEntry> tiles;
  };
  std::vector<Scene> pool;
  PretrainManifest manifest;
  manifest.seed = options.seed;
  manifest.train_ratio = options.train_ratio;

  for (const auto& subset : subsets) {
    const bool is_test = subset.filename() == "test";
    for (const auto& files : discover_scenes(subset)) {
      const auto source = load_scene(files);
      Scene scene{source.name, source.site, {}};
      for (const auto& t : tile(source, options.source_size)) {
        const std::string rel = "tiles/" + t.id + "/";
        write_png(options.output / (rel + "pre.png"), t.pre_image);
        write_png(options.output / (rel + "post.png"), t.post_image);
        write_png(options.output / (rel + "pre_label.png"), t.pre_label);
        write_png(options.output / (rel + "post_label.png"), t.post_label);
        scene.tiles.push_back({t.id, t.site, t.noisiness == Noisiness::kNoisy, rel + "pre.png", rel + "post.png",
                               rel + "pre_label.png", rel + "post_label.png"});
      }
      if (is_test) {
        manifest.test.insert(manifest.test.end(), scene.tiles.begin(), scene.tiles.end());
      } else {
        pool.push_back(std::move(scene));
      }
    }
  }
  if (pool.empty()) throw std::runtime_error("no training scenes found under " + options.input.string());

  // Whole scenes go to one side so that quadrants of a scene never straddle train and val.
  auto [train_scenes, val_scenes] =
      split_train_val(pool, options.train_ratio, [](const Scene& s) { return s.site; }, options.seed);
  for (const auto& s : train_scenes) manifest.train.insert(manifest.train.end(), s.tiles.begin(), s.tiles.end());
  for (const auto& s : val_scenes) manifest.val.insert(manifest.val.end(), s.tiles.begin(), s.tiles.end());

  manifest = manifest.with_rate(options.r_pairs);
  write_json_atomic(options.output / "pretrain_manifest.json", manifest.to_json());
  spdlog::info("xbd: {} train ({} in pretraining), {} val, {} test tile pairs", manifest.train.size(),
               manifest.clean_pairs.size() + manifest.noisy_pairs.size(), manifest.val.size(), manifest.test.size());
  return manifest;
}

}  // namespace noisypairs::xbd
