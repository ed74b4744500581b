#include "noisypairs/train/experiment_runner.hpp"

#include <chrono>
#include <cstdio>
#include <unistd.h>

#include "noisypairs/common/log.hpp"

#include "noisypairs/train/checkpoint.hpp"
#include "noisypairs/vts/procedural_textures.hpp"
#include "noisypairs/xbd/ingest.hpp"

namespace fs = std::filesystem;

namespace noisypairs::train {
namespace {

fs::path texture_dir(const ExperimentSettings& s) {
  if (!s.texture_dir.empty()) return s.texture_dir;
  const auto dir = s.data_root / "textures";
  if (!fs::exists(dir / ".complete")) {
    vts::write_procedural_textures(dir, s.generator.texture_classes, {40, 128, s.generator.seed});
    write_text_atomic(dir / ".complete", "");
  }
  return dir;
}

}  // namespace

fs::path ensure_vts_dataset(const ExperimentSettings& s, double r_img) {
  auto config = s.generator;
  config.r_img = r_img;
  config.texture_dir = texture_dir(s);
  char name[96];
  std::snprintf(name, sizeof name, "vts_ri%.2f_n%d_s%llu", r_img, config.n_train,
                static_cast<unsigned long long>(config.seed));
  const auto dir = s.data_root / name;
  if (fs::exists(dir / "dataset.json")) {
    const auto stored = read_json(dir / "dataset.json");
    if (stored.at("config") != config.to_json()) {
      throw std::runtime_error(dir.string() + " was generated with a different configuration");
    }
    return dir;
  }
  log::info(log::format("generating VTS dataset r_img=%.2f into %s", r_img, dir.c_str()));
  const fs::path tmp = dir.string() + ".tmp" + std::to_string(::getpid());
  fs::remove_all(tmp);
  vts::generate_dataset(config, tmp);
  std::error_code ec;
  fs::rename(tmp, dir, ec);
  if (ec) fs::remove_all(tmp);  // another process finished first
  return dir;
}

experiments::ExperimentRecord run_cell(const experiments::ConfigKey& key, const ExperimentSettings& settings,
                                       const fs::path& cell_dir, const fs::path& run_dir) {
  key.validate();
  const auto start = std::chrono::steady_clock::now();
  fs::create_directories(cell_dir);

  auto pc = settings.pretrain;
  pc.loss = key.loss;
  pc.seed = key.seed;
  auto fc = settings.finetune;
  fc.seed = key.seed;
  const auto mode = pairing::mode_from_string(key.mode);
  const bool dense = key.loss != "moco";
  write_json_atomic(cell_dir / "config.json",
                    Json{{"key", key.to_json()}, {"settings", settings.to_json()}, {"pretrain", pc.to_json()}});

  PretrainResult pre;
  metrics::F1Report f1;
  Json extra;
  if (key.dataset == "vts") {
    const auto data = VtsData::load(ensure_vts_dataset(settings, *key.r_img));
    pc.input_size = settings.generator.image_size;
    VtsPairSource train(data.train, data.train_ids, key.r_pairs, mode, pc.augment, dense);
    std::vector<std::string> val_ids(data.val.size());
    for (std::size_t i = 0; i < val_ids.size(); ++i) val_ids[i] = "val" + std::to_string(i);
    VtsPairSource val(data.val, val_ids, 0.0, pairing::PairingMode::kNoisy, pc.augment, dense);
    pre = pretrain(pc, train, val, cell_dir / "pretrain");
    auto encoder = load_encoder(pre.checkpoint);
    fc.classes = 3;
    const auto ft = finetune(encoder, data.finetune_set(), data.validation_set(), data.test_set(), fc, cell_dir / "finetune");
    f1 = ft.test;
    extra["finetune_lr"] = ft.lr;
  } else {
    const auto manifest =
        xbd::PretrainManifest::from_json(read_json(settings.xbd_dir / "pretrain_manifest.json")).with_rate(key.r_pairs);
    pc.input_size = settings.xbd_input_size;
    const auto data = XbdData::load(settings.xbd_dir, settings.xbd_input_size, manifest);
    XbdPairSource train(data.train, data.pretrain, mode, pc.augment, dense);
    XbdPairSource val(data.val, data.clean_val, pairing::PairingMode::kNoisy, pc.augment, dense);
    pre = pretrain(pc, train, val, cell_dir / "pretrain");
    auto encoder = load_encoder(pre.checkpoint);
    fc.classes = 5;
    fc.macro_classes = {1, 2, 3, 4};
    const auto ft = finetune(encoder, XbdData::post_event(data.train), XbdData::post_event(data.val),
                             XbdData::post_event(data.test), fc, cell_dir / "finetune");
    f1 = ft.test;
    extra["finetune_lr"] = ft.lr;
  }

  experiments::ExperimentRecord record;
  record.key = key;
  record.macro_f1 = f1.macro_f1;
  record.per_class_f1 = f1.per_class;
  record.checkpoint = fs::relative(pre.checkpoint, run_dir).string();
  record.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  extra["best_epoch"] = pre.best_epoch;
  extra["best_val_loss"] = pre.best_val_loss;
  extra["val_loss"] = pre.val_loss;
  extra["train_loss"] = pre.train_loss;
  record.extra = extra;
  return record;
}

experiments::CellRunner make_cell_runner(ExperimentSettings settings, fs::path run_dir) {
  return [settings = std::move(settings), run_dir = std::move(run_dir)](const experiments::ConfigKey& key,
                                                                         const fs::path& cell_dir) {
    return run_cell(key, settings, cell_dir, run_dir);
  };
}

}  // namespace noisypairs::train
