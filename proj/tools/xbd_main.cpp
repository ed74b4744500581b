#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "noisypairs/xbd/ingest.hpp"

using namespace noisypairs;

int main(int argc, char** argv) {
  CLI::App app{"xBD preprocessing"};
  app.require_subcommand(1);

  xbd::IngestOptions ingest;
  std::string in, out;
  auto* cmd = app.add_subcommand("ingest", "tile scenes into pre/post pairs and write the pretraining manifest");
  cmd->add_option("--in", in, "xBD directory (images/, labels/ or masks/, optional test/)")->required();
  cmd->add_option("--out", out)->required();
  cmd->add_option("--r-pairs", ingest.r_pairs, "fraction of noisy pairs kept for pretraining")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", ingest.seed);
  cmd->add_option("--train-ratio", ingest.train_ratio)->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--source-size", ingest.source_size)->check(CLI::PositiveNumber);

  xbd::FixtureOptions fixture;
  std::string fixture_out;
  auto* fix = app.add_subcommand("make-fixture", "write a small synthetic directory in xBD layout");
  fix->add_option("--out", fixture_out)->required();
  fix->add_option("--sites", fixture.sites)->check(CLI::PositiveNumber);
  fix->add_option("--scenes-per-site", fixture.scenes_per_site)->check(CLI::PositiveNumber);
  fix->add_option("--test-scenes", fixture.test_scenes)->check(CLI::NonNegativeNumber);
  fix->add_option("--source-size", fixture.source_size)->check(CLI::PositiveNumber);
  fix->add_option("--seed", fixture.seed);

  CLI11_PARSE(app, argc, argv);
  try {
    if (*cmd) {
      ingest.input = in;
      ingest.output = out;
      const auto manifest = xbd::ingest(ingest);
      std::cout << "train " << manifest.train.size() << " val " << manifest.val.size() << " test "
                << manifest.test.size() << " pretrain clean " << manifest.clean_pairs.size() << " noisy "
                << manifest.noisy_pairs.size() << "\n";
    } else if (*fix) {
      xbd::write_fixture(fixture_out, fixture);
    }
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
