#include <iostream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "noisypairs/experiments/deltas.hpp"
#include "noisypairs/experiments/report.hpp"
#include "noisypairs/experiments/sweep.hpp"

using namespace noisypairs;

int main(int argc, char** argv) {
  CLI::App app{"Tables and plots for a sweep run directory"};
  std::string run, out;
  app.add_option("--run", run, "sweep output directory")->required()->check(CLI::ExistingDirectory);
  app.add_option("--out", out, "defaults to <run>/report");
  CLI11_PARSE(app, argc, argv);
  try {
    const auto records = experiments::collect_records(run);
    const auto deltas = experiments::compute_deltas(records);
    const std::filesystem::path dir = out.empty() ? std::filesystem::path(run) / "report" : std::filesystem::path(out);
    for (const auto& f : experiments::render_report(records, deltas, dir)) std::cout << f.string() << "\n";
    for (const auto& [loss, s] : deltas.by_loss) {
      spdlog::info("{}: mean delta {:+.2f} pp, sd {:.2f} over {} cells", loss, s.mean, s.stddev, s.cells);
    }
    for (const auto& k : deltas.unmatched) spdlog::warn("no counterpart for {}", k.slug());
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
