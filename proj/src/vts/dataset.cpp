#include "noisypairs/vts/dataset.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "noisypairs/common/image_io.hpp"
#include "noisypairs/common/rng.hpp"

namespace fs = std::filesystem;

namespace noisypairs::vts {
namespace {

constexpr std::uint64_t kSampleStreamBase = 100;

const std::string& pick(const std::vector<std::string>& files, Rng& rng) {
  if (files.empty()) throw std::runtime_error("texture split is empty");
  return files[std::uniform_int_distribution<std::size_t>(0, files.size() - 1)(rng)];
}

std::string sample_id(int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%06d", index);
  return buf;
}

}  // namespace

GeneratorConfig GeneratorConfig::full_scale() {
  GeneratorConfig c;
  c.n_train = 6000;
  c.n_val = 3600;
  c.n_test = 2400;
  c.image_size = 256;
  return c;
}

GeneratorConfig GeneratorConfig::desk_scale() { return GeneratorConfig{}; }

int GeneratorConfig::count(Split split) const {
  switch (split) {
    case Split::kTrain: return n_train;
    case Split::kVal: return n_val;
    case Split::kTest: return n_test;
  }
  return 0;
}

Json GeneratorConfig::to_json() const {
  return Json{{"texture_classes",
               {{"class0", texture_classes.class0}, {"class1", texture_classes.class1},
                {"noise", texture_classes.noise}}},
              {"texture_split_ratios", texture_split_ratios},
              {"n_train", n_train},
              {"n_val", n_val},
              {"n_test", n_test},
              {"image_size", image_size},
              {"n_cells", n_cells},
              {"r_img", r_img},
              {"seed", seed},
              {"irrelevant_noise", irrelevant_noise}};
}

GeneratorConfig GeneratorConfig::from_json(const Json& json) {
  GeneratorConfig c;
  const auto& tc = json.at("texture_classes");
  c.texture_classes = {tc.at("class0"), tc.at("class1"), tc.at("noise")};
  c.texture_split_ratios = json.at("texture_split_ratios").get<std::array<double, 3>>();
  c.n_train = json.at("n_train");
  c.n_val = json.at("n_val");
  c.n_test = json.at("n_test");
  c.image_size = json.at("image_size");
  c.n_cells = json.at("n_cells");
  c.r_img = json.at("r_img");
  c.seed = json.at("seed");
  c.irrelevant_noise = json.at("irrelevant_noise");
  return c;
}

GeneratedSample generate_sample(const GeneratorConfig& config, const TextureBank& bank, Split split, int index) {
  const auto sample_seed = derive_seed(config.seed, kSampleStreamBase + static_cast<std::uint64_t>(split), index);
  GeneratedSample out;
  out.id = sample_id(index);
  out.split = split;
  out.layout = generate_layout(config.image_size, config.n_cells, derive_seed(sample_seed, streams::kLayout));

  auto pick_rng = make_rng(sample_seed, streams::kTexturePick);
  const auto& classes = bank.classes();
  out.textures = {pick(bank.files(classes.class0, split), pick_rng), pick(bank.files(classes.class1, split), pick_rng),
                  pick(bank.files(classes.noise, split), pick_rng)};

  const auto clean = compose_image(out.layout, bank.load(out.textures[0]), bank.load(out.textures[1]),
                                   derive_seed(sample_seed, streams::kCompose));
  const double r_img = split == Split::kVal ? 0.0 : config.r_img;
  out.sample = inject_noise(clean, out.layout, bank.load(out.textures[2]), r_img,
                            derive_seed(sample_seed, streams::kNoise), config.labeling());
  out.sample.rng_seed = sample_seed;
  return out;
}

Json sample_manifest(const GeneratedSample& sample, const GeneratorConfig& config) {
  Json seeds = Json::array();
  for (const auto& p : sample.layout.seeds) seeds.push_back({p.x, p.y});
  return Json{{"id", sample.id},
              {"split", to_string(sample.split)},
              {"seed", sample.sample.rng_seed},
              {"r_img", sample.sample.r_img},
              {"image_size", sample.layout.image_size},
              {"n_cells", sample.layout.n_cells()},
              {"seeds", seeds},
              {"class_of_cell", sample.layout.class_of_cell},
              {"replaced_cells", sample.sample.replaced_cells},
              {"irrelevant_noise", config.irrelevant_noise},
              {"textures",
               {{"class0", sample.textures[0]}, {"class1", sample.textures[1]}, {"noise", sample.textures[2]}}}};
}

void write_sample(const fs::path& dir, const GeneratedSample& sample, const GeneratorConfig& config) {
  write_png(dir / "clean.png", sample.sample.clean_image);
  write_png(dir / "noisy.png", sample.sample.noisy_image);
  write_png(dir / "label.png", sample.sample.clean_label);
  write_png(dir / "noisy_label.png", sample.sample.noisy_label);
  write_json_atomic(dir / "manifest.json", sample_manifest(sample, config));
}

Json generate_dataset(const GeneratorConfig& config, const fs::path& out) {
  for (Split s : kSplits) {
    if (config.count(s) < 0) throw std::invalid_argument("split sizes must be non-negative");
  }
  if (config.image_size < config.n_cells) throw std::invalid_argument("image size must be at least n_cells");
  const auto bank = TextureBank::scan(config.texture_dir, config.texture_classes, config.texture_split_ratios,
                                      config.seed);
  Json counts = Json::object();
  for (Split split : kSplits) {
    bank.preload(split);
    const int n = config.count(split);
    for (int i = 0; i < n; ++i) {
      const auto sample = generate_sample(config, bank, split, i);
      write_sample(out / to_string(split) / sample.id, sample, config);
    }
    counts[to_string(split)] = n;
    spdlog::info("vts: wrote {} {} samples", n, to_string(split));
  }
  Json texture_files = Json::object();
  for (Split split : kSplits) {
    for (const auto& name : {config.texture_classes.class0, config.texture_classes.class1,
                             config.texture_classes.noise}) {
      texture_files[to_string(split)][name] = bank.files(name, split);
    }
  }
  const Json dataset{{"format", "vts-1"},
                     {"master_seed", config.seed},
                     {"config", config.to_json()},
                     {"counts", counts},
                     {"texture_files", texture_files}};
  write_json_atomic(out / "dataset.json", dataset);
  return dataset;
}

LoadedSample load_sample(const fs::path& sample_dir) {
  LoadedSample out;
  out.manifest = read_json(sample_dir / "manifest.json");
  const auto& m = out.manifest;
  out.layout.image_size = m.at("image_size");
  for (const auto& p : m.at("seeds")) out.layout.seeds.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
  out.layout.class_of_cell = m.at("class_of_cell").get<std::vector<int>>();
  if (out.layout.class_of_cell.size() != out.layout.seeds.size()) {
    throw std::runtime_error("manifest cell classes do not match its seeds: " + sample_dir.string());
  }
  out.layout.cell_of = assign_cells(out.layout.image_size, out.layout.seeds);
  out.labeling = m.at("irrelevant_noise").get<bool>() ? NoiseLabeling::kIrrelevant : NoiseLabeling::kNoiseClass;

  out.sample.clean_image = read_color(sample_dir / "clean.png");
  out.sample.noisy_image = read_color(sample_dir / "noisy.png");
  out.sample.clean_label = read_label(sample_dir / "label.png");
  out.sample.noisy_label = read_label(sample_dir / "noisy_label.png");
  out.sample.replaced_cells = m.at("replaced_cells").get<std::vector<int>>();
  out.sample.r_img = m.at("r_img");
  out.sample.rng_seed = m.at("seed");
  return out;
}

std::vector<fs::path> list_samples(const fs::path& root, Split split) {
  std::vector<fs::path> dirs;
  const auto base = root / to_string(split);
  if (!fs::is_directory(base)) return dirs;
  for (const auto& entry : fs::directory_iterator(base)) {
    if (entry.is_directory()) dirs.push_back(entry.path());
  }
  std::sort(dirs.begin(), dirs.end());
  return dirs;
}

}  // namespace noisypairs::vts
