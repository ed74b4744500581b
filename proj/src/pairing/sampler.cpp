#include "noisypairs/pairing/sampler.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace noisypairs::pairing {

std::string to_string(PairKind kind) {
  switch (kind) {
    case PairKind::kClean: return "clean";
    case PairKind::kNoisy: return "noisy";
    case PairKind::kMereExposure: return "mere_exposure";
  }
  return "?";
}

std::string to_string(PairingMode mode) { return mode == PairingMode::kNoisy ? "noisy" : "mere_exposure"; }

PairingMode mode_from_string(const std::string& name) {
  if (name == "noisy") return PairingMode::kNoisy;
  if (name == "mere_exposure" || name == "mere-exposure") return PairingMode::kMereExposure;
  throw std::invalid_argument("unknown pairing mode: " + name);
}

PairKind draw_kind(double r_pairs, PairingMode mode, Rng& rng) {
  if (!(r_pairs >= 0.0 && r_pairs <= 1.0)) throw std::invalid_argument("r_pairs must lie in [0, 1]");
  const bool partnered = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < r_pairs;
  if (!partnered) return PairKind::kClean;
  return mode == PairingMode::kNoisy ? PairKind::kNoisy : PairKind::kMereExposure;
}

std::vector<PairPlan> plan_vts_epoch(std::size_t n, double r_pairs, PairingMode mode, Rng& rng) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<PairPlan> plan;
  plan.reserve(n);
  for (auto i : order) plan.push_back({i, draw_kind(r_pairs, mode, rng)});
  return plan;
}

std::vector<PairPlan> plan_xbd_epoch(const std::vector<bool>& noisy, PairingMode mode, Rng& rng) {
  if (noisy.empty()) throw std::invalid_argument("empty pretraining manifest");
  std::vector<PairPlan> plan;
  plan.reserve(noisy.size());
  const auto partner = mode == PairingMode::kNoisy ? PairKind::kNoisy : PairKind::kMereExposure;
  for (std::size_t i = 0; i < noisy.size(); ++i) plan.push_back({i, noisy[i] ? partner : PairKind::kClean});
  std::shuffle(plan.begin(), plan.end(), rng);
  return plan;
}

ViewPair make_vts_pair(const vts::VtsSample& s, PairKind kind, const AugmentConfig& config, Rng& rng,
                       bool with_labels) {
  ViewPair p;
  p.kind = kind;
  p.source_a = kind == PairKind::kMereExposure ? ViewSource::kSecond : ViewSource::kFirst;
  p.source_b = kind == PairKind::kClean ? ViewSource::kFirst : ViewSource::kSecond;
  const cv::Mat none;
  const cv::Mat& label = with_labels ? s.clean_label : none;
  auto a = augment(p.source_a == ViewSource::kFirst ? s.clean_image : s.noisy_image, label, config, rng);
  auto b = augment(p.source_b == ViewSource::kFirst ? s.clean_image : s.noisy_image, label, config, rng);
  p.image_a = std::move(a.image);
  p.label_a = std::move(a.label);
  p.image_b = std::move(b.image);
  p.label_b = std::move(b.label);
  return p;
}

ViewPair make_xbd_pair(const cv::Mat& pre, const cv::Mat& post, const cv::Mat& label, PairKind kind,
                       const AugmentConfig& config, Rng& rng) {
  ViewPair p;
  p.kind = kind;
  p.source_a = kind == PairKind::kMereExposure ? ViewSource::kSecond : ViewSource::kFirst;
  p.source_b = ViewSource::kSecond;
  auto a = augment(p.source_a == ViewSource::kFirst ? pre : post, label, config, rng);
  auto b = augment(post, label, config, rng);
  p.image_a = std::move(a.image);
  p.label_a = std::move(a.label);
  p.image_b = std::move(b.image);
  p.label_b = std::move(b.label);
  return p;
}

ViewPair sample_pair_vts(const vts::VtsSample& sample, double r_pairs, PairingMode mode, const AugmentConfig& config,
                         Rng& rng) {
  return make_vts_pair(sample, draw_kind(r_pairs, mode, rng), config, rng);
}

void append_pair_log(const std::filesystem::path& csv, int epoch, const std::vector<PairPlan>& plan,
                     const std::vector<std::string>& sample_ids) {
  const bool fresh = !std::filesystem::exists(csv);
  if (csv.has_parent_path()) std::filesystem::create_directories(csv.parent_path());
  std::ofstream out(csv, std::ios::app);
  if (!out) throw std::runtime_error("cannot write pair log " + csv.string());
  if (fresh) out << "epoch,position,sample,kind\n";
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto& id = plan[i].index < sample_ids.size() ? sample_ids[plan[i].index] : std::to_string(plan[i].index);
    out << epoch << ',' << i << ',' << id << ',' << to_string(plan[i].kind) << '\n';
  }
}

}  // namespace noisypairs::pairing
