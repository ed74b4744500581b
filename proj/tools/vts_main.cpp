#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "noisypairs/vts/dataset.hpp"
#include "noisypairs/vts/procedural_textures.hpp"

using namespace noisypairs;

int main(int argc, char** argv) {
  CLI::App app{"Voronoi texture segmentation dataset generator"};
  app.require_subcommand(1);

  auto config = vts::GeneratorConfig::desk_scale();
  std::string out;
  std::string textures;
  auto* gen = app.add_subcommand("generate", "generate train/val/test splits");
  gen->add_option("--out", out, "output directory")->required();
  gen->add_option("--textures", textures, "texture root with one directory per class")->required();
  gen->add_option("--r-img", config.r_img, "fraction of cells replaced by noise")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--n-train", config.n_train)->check(CLI::NonNegativeNumber);
  gen->add_option("--n-val", config.n_val)->check(CLI::NonNegativeNumber);
  gen->add_option("--n-test", config.n_test)->check(CLI::NonNegativeNumber);
  gen->add_option("--image-size", config.image_size)->check(CLI::PositiveNumber);
  gen->add_option("--seed", config.seed);
  gen->add_flag("--irrelevant-noise", config.irrelevant_noise, "noise cells keep their downstream class");
  gen->add_option("--class0", config.texture_classes.class0);
  gen->add_option("--class1", config.texture_classes.class1);
  gen->add_option("--noise-class", config.texture_classes.noise);

  vts::ProceduralTextureOptions tex;
  std::string tex_out;
  auto* make_tex = app.add_subcommand("make-textures", "write procedural stand-in textures");
  make_tex->add_option("--out", tex_out)->required();
  make_tex->add_option("--per-class", tex.per_class)->check(CLI::PositiveNumber);
  make_tex->add_option("--size", tex.size)->check(CLI::PositiveNumber);
  make_tex->add_option("--seed", tex.seed);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) {
      config.texture_dir = textures;
      const auto manifest = vts::generate_dataset(config, out);
      std::cout << manifest.at("counts").dump() << "\n";
    } else if (*make_tex) {
      vts::write_procedural_textures(tex_out, vts::TextureClasses{}, tex);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
