#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include <opencv2/core.hpp>

#include "noisypairs/common/image_io.hpp"
#include "noisypairs/common/rng.hpp"
#include "noisypairs/vts/dataset.hpp"
#include "noisypairs/vts/layout.hpp"
#include "noisypairs/vts/procedural_textures.hpp"
#include "test_support.hpp"

using namespace noisypairs;
using namespace noisypairs::vts;

namespace {

Texture solid(int size, cv::Vec3b colour, const std::string& name = "solid") {
  return {cv::Mat(size, size, CV_8UC3, cv::Scalar(colour[0], colour[1], colour[2])), name};
}

Texture random_texture(int size, std::uint64_t seed, const std::string& name) {
  Rng rng(seed);
  return {procedural_texture(TextureKind::kMatted, size, rng), name};
}

std::set<int> label_two_cells(const VtsSample& s, const VoronoiLayout& layout) {
  std::set<int> cells;
  for (int y = 0; y < layout.image_size; ++y)
    for (int x = 0; x < layout.image_size; ++x)
      if (s.noisy_label.at<std::uint8_t>(y, x) == kNoiseClass) cells.insert(layout.cell_at(x, y));
  return cells;
}

}  // namespace

TEST_CASE("generate_layout: 20 nonempty cells with a 10/10 class split") {
  const auto layout = generate_layout(256, 20, 7);
  CHECK(layout.n_cells() == 20);
  const auto counts = layout.cell_pixel_counts();
  CHECK(*std::min_element(counts.begin(), counts.end()) >= 1);
  CHECK(std::accumulate(counts.begin(), counts.end(), 0) == 256 * 256);
  CHECK(std::count(layout.class_of_cell.begin(), layout.class_of_cell.end(), 0) == 10);
  CHECK(std::count(layout.class_of_cell.begin(), layout.class_of_cell.end(), 1) == 10);

  const auto again = generate_layout(256, 20, 7);
  CHECK(again.cell_of == layout.cell_of);
  CHECK(again.class_of_cell == layout.class_of_cell);
}

TEST_CASE("generate_layout: two cells tile a 4x4 image") {
  const auto layout = generate_layout(4, 2, 0);
  const auto counts = layout.cell_pixel_counts();
  CHECK(counts.size() == 2);
  CHECK(counts[0] + counts[1] == 16);
  CHECK(counts[0] >= 1);
  CHECK(counts[1] >= 1);
  CHECK_THROWS_AS(generate_layout(4, 1, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_layout(3, 5, 0), std::invalid_argument);
}

TEST_CASE("assign_cells: nearest seed with ties to the lowest index") {
  // Pixel (1,0) is equidistant from both seeds.
  const auto cells = assign_cells(3, {cv::Point(0, 0), cv::Point(2, 0)});
  CHECK(cells[1] == 0);
  CHECK(cells[0] == 0);
  CHECK(cells[2] == 1);
}

TEST_CASE("compose_image: single-class layout reproduces the texture window") {
  auto layout = generate_layout(32, 20, 3);
  std::fill(layout.class_of_cell.begin(), layout.class_of_cell.end(), 0);
  const auto a = random_texture(32, 1, "a.png");  // same size as the image: window is the whole texture
  const auto b = random_texture(32, 2, "b.png");
  const auto composed = compose_image(layout, a, b, 99);
  CHECK(identical(composed.image, a.pixels));
  CHECK(cv::countNonZero(composed.label) == 0);
}

TEST_CASE("compose_image: label histogram and determinism") {
  const auto layout = generate_layout(48, 20, 11);
  const auto a = random_texture(80, 1, "a.png");
  const auto b = random_texture(80, 2, "b.png");
  const auto composed = compose_image(layout, a, b, 5);
  const auto counts = layout.cell_pixel_counts();
  int class1_pixels = 0;
  for (int c = 0; c < 20; ++c) class1_pixels += layout.class_of_cell[c] == 1 ? counts[c] : 0;
  CHECK(cv::countNonZero(composed.label) == class1_pixels);
  CHECK(identical(compose_image(layout, a, b, 5).image, composed.image));
}

TEST_CASE("compose_image: texture smaller than the image names the file") {
  const auto layout = generate_layout(64, 20, 1);
  try {
    compose_image(layout, solid(32, {1, 2, 3}, "tiny_texture.png"), solid(64, {4, 5, 6}), 0);
    FAIL("expected an error");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("tiny_texture.png") != std::string::npos);
  }
}

TEST_CASE("inject_noise: replaced-cell accounting across r_img") {
  const auto layout = generate_layout(64, 20, 21);
  const auto clean = compose_image(layout, random_texture(64, 1, "a"), random_texture(64, 2, "b"), 3);
  const auto noise = solid(64, {0, 255, 0}, "noise");
  for (double r : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    const auto s = inject_noise(clean, layout, noise, r, 17);
    CHECK(check_sample(s, layout).empty());
    CHECK(static_cast<int>(s.replaced_cells.size()) == replaced_cell_count(r, 20));
    const auto counts = layout.cell_pixel_counts();
    int replaced_pixels = 0;
    for (int c : s.replaced_cells) replaced_pixels += counts[c];
    cv::Mat is_noise = s.noisy_label == kNoiseClass;
    CHECK(cv::countNonZero(is_noise) == replaced_pixels);
  }
  const auto zero = inject_noise(clean, layout, noise, 0.0, 17);
  CHECK(identical(zero.noisy_image, zero.clean_image));
  CHECK(zero.replaced_cells.empty());

  const auto all = inject_noise(clean, layout, noise, 1.0, 17);
  CHECK(all.replaced_cells.size() == 20);

  const auto quarter = inject_noise(clean, layout, noise, 0.25, 17);
  CHECK(label_two_cells(quarter, layout).size() == 5);

  CHECK_THROWS_AS(inject_noise(clean, layout, noise, 1.5, 0), std::invalid_argument);
}

TEST_CASE("replaced_cell_count rounds half up") {
  CHECK(replaced_cell_count(0.25, 20) == 5);
  CHECK(replaced_cell_count(0.125, 20) == 3);
  CHECK(replaced_cell_count(0.35, 20) == 7);
  CHECK(replaced_cell_count(0.024, 20) == 0);
}

TEST_CASE("inject_noise: irrelevant noise keeps the binary labels") {
  const auto layout = generate_layout(64, 20, 4);
  const auto clean = compose_image(layout, random_texture(64, 1, "a"), random_texture(64, 2, "b"), 3);
  const auto noise = random_texture(64, 3, "n");
  const auto half = inject_noise(clean, layout, noise, 0.5, 8, NoiseLabeling::kIrrelevant);
  CHECK(identical(half.noisy_label, half.clean_label));
  CHECK(check_sample(half, layout, NoiseLabeling::kIrrelevant).empty());

  // The noise texture is solid green and the class textures never produce it.
  const auto green = solid(64, {0, 255, 0});
  const auto full = inject_noise(clean, layout, green, 1.0, 8, NoiseLabeling::kIrrelevant);
  cv::Mat diff;
  cv::compare(full.noisy_image.reshape(1), full.clean_image.reshape(1), diff, cv::CMP_NE);
  cv::Mat per_pixel = diff.reshape(3);
  std::vector<cv::Mat> channels;
  cv::split(per_pixel, channels);
  cv::Mat any = channels[0] | channels[1] | channels[2];
  CHECK(cv::countNonZero(any) == 64 * 64);
  CHECK(identical(full.noisy_label, full.clean_label));
}

TEST_CASE("texture bank: split hygiene and errors") {
  testing::TempDir dir;
  write_procedural_textures(dir.path(), {}, {.per_class = 10, .size = 40, .seed = 1});
  const auto bank = TextureBank::scan(dir.path(), {}, {0.5, 0.3, 0.2}, 3);
  for (const auto& cls : {"stratified", "veined", "matted"}) {
    std::set<std::string> seen;
    std::size_t total = 0;
    for (Split s : kSplits) {
      for (const auto& f : bank.files(cls, s)) seen.insert(f);
      total += bank.files(cls, s).size();
    }
    CHECK(seen.size() == total);
    CHECK(total == 10);
    CHECK(bank.files(cls, Split::kTrain).size() == 5);
    CHECK(bank.files(cls, Split::kVal).size() == 3);
    CHECK(bank.files(cls, Split::kTest).size() == 2);
  }
  CHECK_THROWS_AS(TextureBank::scan(dir / "missing", {}, {0.5, 0.3, 0.2}, 3), std::runtime_error);
  CHECK_THROWS_AS(TextureBank::scan(dir.path(), {}, {0.5, 0.3, 0.3}, 3), std::invalid_argument);
}

TEST_CASE("generate_dataset: desk preset round trip and determinism") {
  testing::TempDir dir;
  write_procedural_textures(dir / "textures", {}, {.per_class = 20, .size = 96, .seed = 2});

  auto config = GeneratorConfig::desk_scale();
  config.texture_dir = dir / "textures";
  config.seed = 42;
  CHECK(config.n_train == 600);
  CHECK(config.n_val == 360);
  CHECK(config.n_test == 240);
  CHECK(config.image_size == 64);
  const auto full = GeneratorConfig::full_scale();
  CHECK(full.n_train == 6000);
  CHECK(full.n_val == 3600);
  CHECK(full.n_test == 2400);

  const auto dataset = generate_dataset(config, dir / "a");
  CHECK(dataset.at("counts").at("train") == 600);

  std::size_t train_images = 0;
  for (Split split : kSplits) {
    const auto samples = list_samples(dir / "a", split);
    CHECK(static_cast<int>(samples.size()) == config.count(split));
    for (const auto& path : samples) {
      const auto loaded = load_sample(path);
      const auto problems = check_sample(loaded.sample, loaded.layout, loaded.labeling);
      CHECK_MESSAGE(problems.empty(), path.string());
      if (split == Split::kVal) CHECK(loaded.sample.replaced_cells.empty());
      if (split == Split::kTrain) train_images += 2;
    }
  }
  CHECK(train_images == 1200);

  // Config survives the dataset manifest.
  const auto echoed = GeneratorConfig::from_json(read_json(dir / "a" / "dataset.json").at("config"));
  CHECK(echoed.to_json() == config.to_json());

  config.n_train = 40;
  config.n_val = 10;
  config.n_test = 10;
  generate_dataset(config, dir / "b");
  generate_dataset(config, dir / "c");
  CHECK(testing::same_tree(dir / "b", dir / "c"));
}

TEST_CASE("generate_dataset: irrelevant-noise variant") {
  testing::TempDir dir;
  write_procedural_textures(dir / "textures", {}, {.per_class = 10, .size = 80, .seed = 2});
  GeneratorConfig config;
  config.texture_dir = dir / "textures";
  config.n_train = 8;
  config.n_val = 2;
  config.n_test = 2;
  config.r_img = 0.0;
  config.seed = 5;
  generate_dataset(config, dir / "plain");
  config.irrelevant_noise = true;
  generate_dataset(config, dir / "irrelevant");
  for (Split split : kSplits) {
    for (const auto& p : list_samples(dir / "plain", split)) {
      for (const char* f : {"clean.png", "noisy.png", "label.png", "noisy_label.png"}) {
        CHECK(testing::slurp(p / f) == testing::slurp(dir / "irrelevant" / to_string(split) / p.filename() / f));
      }
    }
  }

  config.r_img = 0.5;
  generate_dataset(config, dir / "half");
  for (const auto& p : list_samples(dir / "half", Split::kTrain)) {
    const auto loaded = load_sample(p);
    CHECK(identical(loaded.sample.noisy_label, loaded.sample.clean_label));
    CHECK(loaded.sample.replaced_cells.size() == 10);
  }
}

TEST_CASE("generate_dataset: missing texture directory") {
  testing::TempDir dir;
  GeneratorConfig config;
  config.texture_dir = dir / "nope";
  CHECK_THROWS_AS(generate_dataset(config, dir / "out"), std::runtime_error);
}
