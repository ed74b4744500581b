#include "noisypairs/experiments/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include <spdlog/spdlog.h>

namespace fs = std::filesystem;

namespace noisypairs::experiments {

std::vector<ConfigKey> SweepGrid::cells() const {
  std::vector<std::optional<double>> imgs;
  if (dataset == "vts") {
    for (double r : r_img) imgs.emplace_back(r);
  } else {
    imgs.emplace_back();
  }
  std::vector<ConfigKey> out;
  for (const auto& loss : losses)
    for (const auto& ri : imgs)
      for (double rp : r_pairs)
        for (const auto& mode : modes)
          for (int s = 0; s < seeds; ++s) {
            ConfigKey k{dataset, loss, rp, ri, mode, base_seed + static_cast<std::uint64_t>(s)};
            k.validate();
            out.push_back(k);
          }
  return out;
}

std::vector<ExperimentRecord> collect_records(const fs::path& run_dir) {
  std::vector<ExperimentRecord> out;
  const auto cells = run_dir / "cells";
  if (!fs::is_directory(cells)) return out;
  for (const auto& entry : fs::directory_iterator(cells)) {
    if (entry.path().extension() != ".json") continue;
    const auto j = read_json(entry.path());
    if (j.value("status", "") == "ok") out.push_back(ExperimentRecord::from_json(j.at("record")));
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  return out;
}

SweepResult run_sweep(const std::vector<ConfigKey>& cells, const fs::path& run_dir, const CellRunner& runner) {
  SweepResult result;
  fs::create_directories(run_dir / "cells");
  for (const auto& key : cells) {
    key.validate();
    const auto slug = key.slug();
    const auto cell_file = run_dir / "cells" / (slug + ".json");
    if (fs::exists(cell_file) && read_json(cell_file).value("status", "") == "ok") {
      ++result.skipped;
      continue;
    }
    spdlog::info("sweep: running {}", slug);
    const auto start = std::chrono::steady_clock::now();
    try {
      auto record = runner(key, run_dir / "runs" / slug);
      record.key = key;
      if (record.wall_clock_s == 0.0) {
        record.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      }
      write_json_atomic(cell_file, Json{{"status", "ok"}, {"record", record.to_json()}});
      ++result.trained;
    } catch (const std::exception& e) {
      spdlog::error("sweep: {} failed: {}", slug, e.what());
      result.failures.push_back({key, e.what()});
      write_json_atomic(cell_file, Json{{"status", "failed"}, {"key", key.to_json()}, {"error", e.what()}});
    }
  }
  result.records = collect_records(run_dir);
  write_records(run_dir / "records.jsonl", result.records);

  std::vector<std::string> lines;
  for (const auto& entry : fs::directory_iterator(run_dir / "cells")) {
    if (entry.path().extension() != ".json") continue;
    const auto j = read_json(entry.path());
    if (j.value("status", "") == "failed") lines.push_back(Json{{"key", j.at("key")}, {"error", j.at("error")}}.dump());
  }
  std::sort(lines.begin(), lines.end());
  std::ostringstream failures;
  for (const auto& line : lines) failures << line << '\n';
  write_text_atomic(run_dir / "failures.jsonl", failures.str());
  return result;
}

}  // namespace noisypairs::experiments
