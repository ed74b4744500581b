// Acceptance run: one PASS/FAIL line per criterion. Criteria 8 and 9 train
// desk-scale models and are slow; everything else takes seconds.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "noisypairs/common/image_io.hpp"
#include "noisypairs/experiments/deltas.hpp"
#include "noisypairs/experiments/sweep.hpp"
#include "noisypairs/losses/dense.hpp"
#include "noisypairs/losses/info_nce.hpp"
#include "noisypairs/metrics/class_weights.hpp"
#include "noisypairs/metrics/f1.hpp"
#include "noisypairs/pairing/sampler.hpp"
#include "noisypairs/train/checkpoint.hpp"
#include "noisypairs/train/config.hpp"
#include "noisypairs/train/experiment_runner.hpp"
#include "noisypairs/train/finetune.hpp"
#include "noisypairs/train/pretrain.hpp"
#include "noisypairs/vts/dataset.hpp"
#include "noisypairs/vts/procedural_textures.hpp"
#include "noisypairs/xbd/split.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace noisypairs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string strf(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

std::vector<double> unit(int dim, int axis) {
  std::vector<double> v(dim, 0.0);
  v[axis] = 1.0;
  return v;
}

losses::FeatureMap constant_map(int side, int channels) {
  return losses::FeatureMap::normalized(side, channels,
                                        std::vector<double>(static_cast<std::size_t>(side) * side * channels, 1.0));
}

losses::DenseLabelGrid constant_grid(int side, int cls) {
  return {side, std::vector<int>(static_cast<std::size_t>(side) * side, cls)};
}

Outcome loss_closed_forms() {
  double worst = 0.0;
  const auto e = unit(16, 3);
  for (int k : {0, 7, 1023}) {
    std::vector<double> negatives;
    for (int i = 0; i < k; ++i) negatives.insert(negatives.end(), e.begin(), e.end());
    worst = std::max(worst, std::abs(losses::info_nce(e, e, negatives, 0.2) - std::log(k + 1.0)));
  }
  for (int d : {2, 8}) {
    const auto f = constant_map(d, 16);
    const auto y = constant_grid(d, 1);
    worst = std::max(worst, std::abs(losses::within_image_loss(f, f, y, y, 0.1).loss - std::log(double(d * d))));
  }
  return {worst < 1e-6, strf("max |error| %.2e", worst)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> side(1, 4), dim(1, 8), classes(1, 4);
  std::uniform_real_distribution<double> tau(0.05, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int d = side(rng), c = dim(rng), k = classes(rng);
    const double t = tau(rng);
    const auto fi = oracle::random_features(d, c, rng);
    const auto fj = oracle::random_features(d, c, rng);
    const auto fk = oracle::random_features(d, c, rng);
    const auto yi = oracle::random_labels(d, k, rng);
    const auto yj = oracle::random_labels(d, k, rng);
    const auto yk = oracle::random_labels(d, k, rng);
    worst = std::max(worst, std::abs(losses::within_image_loss(fi, fj, yi, yj, t).loss -
                                     oracle::within_image(fi, fj, yi, yj, t)));
    worst = std::max(worst, std::abs(losses::cross_image_loss(fi, fj, fk, yi, yj, yk, t).loss -
                                     oracle::cross_image(fi, fj, fk, yi, yj, yk, t)));
  }
  return {worst < 1e-5, strf("200 instances per loss, max |delta| %.2e", worst)};
}

Outcome gradient_checks() {
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const int dim = 3 + trial % 4, k = 1 + trial % 5;
    const double tau = 0.3 + 0.05 * (trial % 3);
    const auto q = oracle::random_features(1, dim, rng).values();
    const auto pos = oracle::random_features(1, dim, rng).values();
    std::vector<double> neg;
    for (int i = 0; i < k; ++i) {
      const auto v = oracle::random_features(1, dim, rng).values();
      neg.insert(neg.end(), v.begin(), v.end());
    }
    const auto g = losses::info_nce_with_gradients(q, pos, neg, tau);
    worst = std::max({worst,
                      oracle::relative_error(g.query, oracle::finite_difference(
                                                          [&](const auto& x) { return losses::info_nce(x, pos, neg, tau); }, q)),
                      oracle::relative_error(g.positive, oracle::finite_difference(
                                                             [&](const auto& x) { return losses::info_nce(q, x, neg, tau); }, pos)),
                      oracle::relative_error(g.negatives, oracle::finite_difference(
                                                              [&](const auto& x) { return losses::info_nce(q, pos, x, tau); }, neg))});

    const int d = 2 + trial % 2, c = 3 + trial % 3;
    const auto fi = oracle::random_features(d, c, rng);
    const auto fj = oracle::random_features(d, c, rng);
    const auto fk = oracle::random_features(d, c, rng);
    const auto yi = oracle::random_labels(d, 2, rng);
    const auto yj = oracle::random_labels(d, 2, rng);
    const auto yk = oracle::random_labels(d, 2, rng);
    auto fm = [&](const std::vector<double>& v) { return losses::FeatureMap(d, c, v); };
    const auto w = losses::within_image_loss(fi, fj, yi, yj, tau, true);
    worst = std::max(worst, oracle::relative_error(w.grad_anchor, oracle::finite_difference(
        [&](const auto& x) { return losses::within_image_loss(fm(x), fj, yi, yj, tau).loss; }, fi.values())));
    worst = std::max(worst, oracle::relative_error(w.grad_view, oracle::finite_difference(
        [&](const auto& x) { return losses::within_image_loss(fi, fm(x), yi, yj, tau).loss; }, fj.values())));
    const auto x = losses::cross_image_loss(fi, fj, fk, yi, yj, yk, tau, true);
    worst = std::max(worst, oracle::relative_error(x.grad_anchor, oracle::finite_difference(
        [&](const auto& v) { return losses::cross_image_loss(fm(v), fj, fk, yi, yj, yk, tau).loss; }, fi.values())));
    worst = std::max(worst, oracle::relative_error(x.grad_view, oracle::finite_difference(
        [&](const auto& v) { return losses::cross_image_loss(fi, fm(v), fk, yi, yj, yk, tau).loss; }, fj.values())));
    worst = std::max(worst, oracle::relative_error(x.grad_other, oracle::finite_difference(
        [&](const auto& v) { return losses::cross_image_loss(fi, fj, fm(v), yi, yj, yk, tau).loss; }, fk.values())));
  }
  return {worst < 1e-3, strf("20 instances of each loss, max relative error %.2e", worst)};
}

Outcome cross_image_reduction() {
  std::mt19937_64 rng(5);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const int d = 1 + trial % 4, c = 2 + trial % 6;
    const auto fi = oracle::random_features(d, c, rng);
    const auto fj = oracle::random_features(d, c, rng);
    const auto fk = oracle::random_features(d, c, rng);
    const auto yi = oracle::random_labels(d, 3, rng);
    const auto yj = oracle::random_labels(d, 3, rng);
    const auto yk = constant_grid(d, 3 + trial % 2);  // classes the anchor never has
    worst = std::max(worst, std::abs(losses::cross_image_loss(fi, fj, fk, yi, yj, yk, 0.2).loss -
                                     losses::within_image_loss(fi, fj, yi, yj, 0.2).loss));
  }
  return {worst < 1e-6, strf("50 instances, max |delta| %.2e", worst)};
}

// Independent checks of one sample read back from disk.
std::vector<std::string> sample_violations(const vts::LoadedSample& loaded, double r_img) {
  std::vector<std::string> out;
  const auto& lay = loaded.layout;
  const auto& s = loaded.sample;
  const int n = lay.image_size;
  std::vector<int> pixels(lay.n_cells(), 0);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      int best = 0;
      long best_d = -1;
      for (int c = 0; c < lay.n_cells(); ++c) {
        const long dx = x - lay.seeds[c].x, dy = y - lay.seeds[c].y;
        if (best_d < 0 || dx * dx + dy * dy < best_d) {
          best_d = dx * dx + dy * dy;
          best = c;
        }
      }
      if (lay.cell_at(x, y) != best) return {"pixel not in its nearest cell"};
      ++pixels[best];
    }
  }
  if (std::count(pixels.begin(), pixels.end(), 0) > 0) out.push_back("empty cell");
  if (std::count(lay.class_of_cell.begin(), lay.class_of_cell.end(), 0) != 10 ||
      std::count(lay.class_of_cell.begin(), lay.class_of_cell.end(), 1) != 10) {
    out.push_back("class split is not 10/10");
  }
  const auto expected = static_cast<std::size_t>(std::floor(r_img * 20 + 0.5));
  const std::set<int> replaced(s.replaced_cells.begin(), s.replaced_cells.end());
  if (replaced.size() != expected || s.replaced_cells.size() != expected) out.push_back("replaced cell count");
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const int cell = lay.cell_at(x, y);
      const auto clean_label = s.clean_label.at<std::uint8_t>(y, x);
      const auto noisy_label = s.noisy_label.at<std::uint8_t>(y, x);
      if (clean_label != lay.class_of_cell[cell]) return {"clean label disagrees with the layout"};
      if (replaced.count(cell)) {
        if (noisy_label != 2) return {"replaced pixel not labelled as noise"};
      } else {
        if (noisy_label != clean_label) return {"noisy label changed off replaced cells"};
        if (s.noisy_image.at<cv::Vec3b>(y, x) != s.clean_image.at<cv::Vec3b>(y, x)) {
          return {"noisy image changed off replaced cells"};
        }
      }
    }
  }
  return out;
}

Outcome generator_invariants() {
  testing::TempDir dir("acceptance-vts");
  vts::write_procedural_textures(dir / "textures", vts::TextureClasses{}, {40, 128, 3});
  int checked = 0;
  std::vector<std::string> problems;
  bool identical = true;
  for (double r : {0.0, 0.25, 0.5, 0.75, 1.0}) {
    auto config = vts::GeneratorConfig::desk_scale();
    config.texture_dir = dir / "textures";
    config.n_train = 100;
    config.n_val = 0;
    config.n_test = 0;
    config.r_img = r;
    config.seed = 42;
    const auto a = dir / strf("a%.2f", r);
    const auto b = dir / strf("b%.2f", r);
    vts::generate_dataset(config, a);
    vts::generate_dataset(config, b);
    identical = identical && testing::same_tree(a, b);
    for (const auto& sample_dir : vts::list_samples(a, vts::Split::kTrain)) {
      const auto loaded = vts::load_sample(sample_dir);
      auto v = sample_violations(loaded, r);
      for (auto& msg : vts::check_sample(loaded.sample, loaded.layout)) v.push_back("library: " + msg);
      for (auto& msg : v) problems.push_back(sample_dir.filename().string() + strf(" r_img %.2f: ", r) + msg);
      ++checked;
    }
  }
  std::string detail = strf("%d samples, %zu violations, regeneration %s", checked, problems.size(),
                           identical ? "byte-identical" : "DIFFERS");
  if (!problems.empty()) detail += "; first: " + problems.front();
  return {checked == 500 && problems.empty() && identical, detail};
}

Outcome sampler_statistics() {
  auto rng = make_rng(2024, streams::kPairing);
  int noisy = 0;
  for (int i = 0; i < 10000; ++i) noisy += pairing::draw_kind(0.3, pairing::PairingMode::kNoisy, rng) == pairing::PairKind::kNoisy;
  const double frac = noisy / 10000.0;
  return {frac >= 0.28 && frac <= 0.32, strf("noisy fraction %.4f", frac)};
}

Outcome undersampling() {
  const std::size_t clean = 20446, noisy = 5224;
  bool ok = true;
  std::string detail;
  for (double r : {0.0, 0.1, 0.7, 1.0}) {
    const auto got = xbd::undersample_counts(clean, noisy, r);
    const auto want = oracle::undersample_search(clean, noisy, r);
    ok = ok && got.clean == want.first && got.noisy == want.second;
    detail += strf("r=%.1f: %zu clean / %zu noisy; ", r, got.clean, got.noisy);
  }
  ok = ok && xbd::undersample_counts(clean, noisy, 0.1).noisy == 2271 &&
       xbd::undersample_counts(clean, noisy, 0.7).clean == 2238;

  std::vector<int> c(clean), n(noisy);
  std::iota(c.begin(), c.end(), 0);
  std::iota(n.begin(), n.end(), 1000000);
  const auto sel = xbd::undersample_to_rate(c, n, 0.1, 7);
  ok = ok && sel.clean.size() == clean && sel.noisy.size() == 2271 &&
       std::set<int>(sel.noisy.begin(), sel.noisy.end()).size() == 2271;
  detail.resize(detail.size() - 2);
  return {ok, detail};
}

// Criterion 10.

train::ExperimentSettings tiny_settings(const fs::path& root) {
  auto s = train::ExperimentSettings::desk();
  s.data_root = root;
  s.generator.n_train = 24;
  s.generator.n_val = 8;
  s.generator.n_test = 8;
  s.pretrain.encoder.base_width = 8;
  s.pretrain.epochs = 4;
  s.pretrain.batch_size = 8;
  s.pretrain.moco_queue = 64;
  s.finetune.epochs = 2;
  s.finetune.lr_grid = {0.1, 0.01};
  return s;
}

bool bitwise_equal(const std::vector<torch::Tensor>& a, const std::vector<torch::Tensor>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!torch::equal(a[i], b[i])) return false;
  return true;
}

Outcome pipeline_contracts() {
  testing::TempDir dir("acceptance-pipeline");
  std::vector<std::string> failed;

  // Best-val checkpoint and frozen encoder.
  const auto s = tiny_settings(dir / "data");
  const auto data = train::VtsData::load(train::ensure_vts_dataset(s, 0.5));
  for (const std::string loss : {"moco", "within_image"}) {
    auto pc = s.pretrain;
    pc.loss = loss;
    const bool dense = loss != "moco";
    train::VtsPairSource tr(data.train, data.train_ids, 0.5, pairing::PairingMode::kNoisy, pc.augment, dense);
    train::VtsPairSource va(data.val, std::vector<std::string>(data.val.size(), "v"), 0.0,
                            pairing::PairingMode::kNoisy, pc.augment, dense);
    const auto r = train::pretrain(pc, tr, va, dir / loss);
    const auto best = std::min_element(r.val_loss.begin(), r.val_loss.end());
    const auto meta = train::read_checkpoint_meta(r.checkpoint);
    if (meta.at("epoch").get<long>() != best - r.val_loss.begin() || meta.at("val_loss").get<double>() != *best) {
      failed.push_back("best-val checkpoint (" + loss + ")");
    }
    auto encoder = train::load_encoder(r.checkpoint);
    const auto before = train::snapshot(*encoder);
    train::finetune(encoder, data.finetune_set(), data.validation_set(), data.test_set(), s.finetune, dir / (loss + "_ft"));
    if (!bitwise_equal(before, train::snapshot(*encoder))) failed.push_back("encoder changed during finetuning");
  }

  // Inverse-frequency weights: w_c ∝ N / n_c, mean 1.
  const std::vector<std::int64_t> counts{600, 300, 100};
  const auto w = metrics::inverse_frequency_weights(counts);
  const std::vector<double> expected{1.0 / 3.0, 2.0 / 3.0, 2.0};
  for (int c = 0; c < 3; ++c)
    if (std::abs(w[c] - expected[c]) > 1e-12) failed.push_back("class weights");

  // F1 from the confusion matrix against direct pixel scans.
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int classes = 2 + trial % 4;
    std::vector<cv::Mat> preds, labels;
    for (int i = 0; i < 3; ++i) {
      cv::Mat p(16, 16, CV_8UC1), l(16, 16, CV_8UC1);
      cv::randu(p, 0, classes - trial % 2);
      cv::randu(l, 0, classes);
      preds.push_back(p);
      labels.push_back(l);
    }
    std::vector<int> candidates(classes);
    std::iota(candidates.begin(), candidates.end(), 0);
    const auto report = metrics::evaluate_f1(preds, labels, classes, candidates);
    const auto scan = oracle::f1_scan(preds, labels, classes);
    double sum = 0.0;
    int present = 0;
    for (int c = 0; c < classes; ++c) {
      if (std::isnan(scan[c])) {
        if (report.per_class[c]) failed.push_back("f1: absent class reported");
        continue;
      }
      if (!report.per_class[c] || *report.per_class[c] != scan[c]) failed.push_back("f1: per-class value");
      sum += scan[c];
      ++present;
    }
    if (std::abs(report.macro_f1 - sum / present) > 1e-15) failed.push_back("f1: macro");
  }

  // Sweep idempotence and delta antisymmetry on stand-in results.
  experiments::SweepGrid grid;
  grid.r_pairs = {0.0, 0.5, 1.0};
  grid.r_img = {0.5};
  int calls = 0;
  experiments::CellRunner runner = [&](const experiments::ConfigKey& k, const fs::path&) {
    ++calls;
    experiments::ExperimentRecord r;
    r.key = k;
    r.macro_f1 = 0.5 + 0.1 * std::sin(7.0 * k.r_pairs + k.loss.size() + k.mode.size());
    r.per_class_f1 = {r.macro_f1};
    return r;
  };
  experiments::run_sweep(grid.cells(), dir / "sweep", runner);
  const auto records_before = testing::slurp(dir / "sweep" / "records.jsonl");
  const int calls_before = calls;
  const auto again = experiments::run_sweep(grid.cells(), dir / "sweep", runner);
  if (calls != calls_before || again.trained != 0 || testing::slurp(dir / "sweep" / "records.jsonl") != records_before) {
    failed.push_back("sweep rerun was not a no-op");
  }
  auto records = experiments::read_records(dir / "sweep" / "records.jsonl");
  const auto d = experiments::compute_deltas(records);
  for (auto& r : records) r.key.mode = r.key.mode == "noisy" ? "mere_exposure" : "noisy";
  const auto swapped = experiments::compute_deltas(records);
  bool antisymmetric = d.cells.size() == swapped.cells.size() && !d.cells.empty();
  for (std::size_t i = 0; antisymmetric && i < d.cells.size(); ++i)
    antisymmetric = swapped.cells[i].delta_pp == -d.cells[i].delta_pp;
  if (!antisymmetric) failed.push_back("delta antisymmetry");

  std::string detail = failed.empty() ? "checkpoint, frozen encoder, weights, F1, idempotence, antisymmetry hold"
                                      : "failed: " + failed.front();
  return {failed.empty(), detail};
}

// Criteria 8 and 9 share one sweep directory.

struct Desk {
  fs::path run_dir;
  train::ExperimentSettings settings;

  double f1(const std::string& loss, double r_pairs, const std::string& mode, std::uint64_t seed) {
    const experiments::ConfigKey key{"vts", loss, r_pairs, 0.5, mode, seed};
    const auto result = experiments::run_sweep({key}, run_dir, train::make_cell_runner(settings, run_dir));
    for (const auto& r : result.records)
      if (r.key == key) return r.macro_f1;
    throw std::runtime_error("cell " + key.slug() + " failed: " +
                             (result.failures.empty() ? std::string("no record") : result.failures.front().error));
  }
};

Outcome robustness_trend(Desk& desk) {
  bool ok = true;
  std::string detail;
  for (const std::string loss : {"moco", "within_image", "cross_image"}) {
    const double clean = desk.f1(loss, 0.0, "noisy", 0);
    const double noisy = desk.f1(loss, 0.5, "noisy", 0);
    ok = ok && noisy >= clean - 0.02;
    detail += strf("%s %.4f vs %.4f; ", loss.c_str(), noisy, clean);
  }
  detail.resize(detail.size() - 2);
  return {ok, "F1 at r_pairs 0.5 vs 0: " + detail};
}

Outcome regularization_direction(Desk& desk) {
  const double noisy = desk.f1("moco", 1.0, "noisy", 0);
  const double mere = desk.f1("moco", 1.0, "mere_exposure", 0);
  std::string detail = strf("noisy %.4f, mere exposure %.4f", noisy, mere);
  if (noisy >= mere - 0.01) return {true, detail};
  double sum = 0.0;
  for (std::uint64_t seed : {1, 2, 3}) {
    const double n = desk.f1("moco", 1.0, "noisy", seed);
    const double m = desk.f1("moco", 1.0, "mere_exposure", seed);
    sum += n - m;
    detail += strf("; seed %llu: %.4f vs %.4f", static_cast<unsigned long long>(seed), n, m);
  }
  const double mean = sum / 3.0;
  detail += strf("; 3-seed mean difference %+.4f", mean);
  return {mean >= -0.01, detail};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> selected;
  std::string run_dir = "acceptance_desk";
  bool fresh = false;
  app.add_option("--criteria", selected, "subset to run (default: all)")->delimiter(',')->check(CLI::Range(1, 10));
  app.add_option("--run-dir", run_dir, "sweep directory for the training criteria; completed cells are reused");
  app.add_flag("--fresh", fresh, "delete the run directory first");
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) selected = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  if (fresh) fs::remove_all(run_dir);
  Desk desk{run_dir, train::ExperimentSettings::desk()};
  desk.settings.data_root = fs::path(run_dir) / "data";

  const std::map<int, std::pair<std::string, std::function<Outcome()>>> criteria{
      {1, {"loss closed forms", loss_closed_forms}},
      {2, {"oracle equivalence", oracle_equivalence}},
      {3, {"gradient checks", gradient_checks}},
      {4, {"cross-image reduction", cross_image_reduction}},
      {5, {"generator invariants", generator_invariants}},
      {6, {"sampler statistics", sampler_statistics}},
      {7, {"undersampling arithmetic", undersampling}},
      {8, {"desk robustness trend", [&] { return robustness_trend(desk); }}},
      {9, {"desk regularization direction", [&] { return regularization_direction(desk); }}},
      {10, {"pipeline contracts", pipeline_contracts}},
  };

  int failures = 0;
  for (int id : selected) {
    const auto& [name, run] = criteria.at(id);
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !outcome.pass;
    std::cout << (outcome.pass ? "PASS" : "FAIL") << "  " << id << ". " << name << ": " << outcome.detail
              << strf(" (%.1fs)", secs) << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
