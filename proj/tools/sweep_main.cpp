#include <iostream>

#include <CLI11.hpp>

#include "noisypairs/common/json_io.hpp"
#include "noisypairs/common/log.hpp"
#include "noisypairs/experiments/sweep.hpp"
#include "noisypairs/train/experiment_runner.hpp"

using namespace noisypairs;

int main(int argc, char** argv) {
  CLI::App app{"Pretrain and finetune every cell of an experiment grid"};
  experiments::SweepGrid grid;
  std::string out, config_path, data_root, textures, xbd_dir;
  bool print_config = false;
  int threads = 0;
  app.add_option("--dataset", grid.dataset)->check(CLI::IsMember({"vts", "xbd"}));
  app.add_option("--losses", grid.losses)->delimiter(',')->check(CLI::IsMember({"moco", "within_image", "cross_image"}));
  app.add_option("--r-pairs", grid.r_pairs)->delimiter(',')->check(CLI::Range(0.0, 1.0));
  app.add_option("--r-img", grid.r_img, "ignored for xbd")->delimiter(',')->check(CLI::Range(0.0, 1.0));
  app.add_option("--modes", grid.modes)->delimiter(',')->check(CLI::IsMember({"noisy", "mere_exposure"}));
  app.add_option("--seeds", grid.seeds, "replicates per cell")->check(CLI::PositiveNumber);
  app.add_option("--base-seed", grid.base_seed);
  app.add_option("--out", out, "run directory; completed cells are skipped on rerun");
  app.add_option("--config", config_path, "experiment settings JSON (see --print-config)")
      ->check(CLI::ExistingFile);
  app.add_option("--data-root", data_root, "cache for generated datasets");
  app.add_option("--textures", textures, "texture root; default is procedural textures");
  app.add_option("--xbd-dir", xbd_dir, "output of `xbd ingest`");
  app.add_option("--threads", threads, "torch intra-op threads; 1 gives bit-reproducible runs")
      ->check(CLI::PositiveNumber);
  app.add_flag("--print-config", print_config, "print the effective settings and exit");
  CLI11_PARSE(app, argc, argv);

  if (threads > 0) torch::set_num_threads(threads);
  try {
    auto settings = config_path.empty() ? train::ExperimentSettings::desk()
                                        : train::ExperimentSettings::from_json(read_json(config_path));
    if (!data_root.empty()) settings.data_root = data_root;
    if (!textures.empty()) settings.texture_dir = textures;
    if (!xbd_dir.empty()) settings.xbd_dir = xbd_dir;
    if (print_config) {
      std::cout << settings.to_json().dump(2) << "\n";
      return 0;
    }
    if (out.empty()) throw std::invalid_argument("--out is required");
    if (grid.dataset == "xbd" && settings.xbd_dir.empty()) throw std::invalid_argument("xbd needs --xbd-dir");

    const auto cells = grid.cells();
    log::info(log::format("%zu cells in %s", cells.size(), out.c_str()));
    const auto result = experiments::run_sweep(cells, out, train::make_cell_runner(settings, out));
    log::info(log::format("trained %d, skipped %d, failed %zu", result.trained, result.skipped,
                          result.failures.size()));
    for (const auto& f : result.failures) log::error(f.key.slug() + ": " + f.error);
    return result.failures.empty() ? 0 : 2;
  } catch (const std::exception& e) {
    log::error(e.what());
    return 1;
  }
}
