#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <opencv2/core.hpp>

#include "noisypairs/common/rng.hpp"
#include "noisypairs/pairing/augment.hpp"
#include "noisypairs/vts/compose.hpp"

namespace noisypairs::pairing {

enum class PairKind { kClean, kNoisy, kMereExposure };
enum class PairingMode { kNoisy, kMereExposure };

/// Which image of a bi-temporal (or clean/noisy) sample a view was cut from.
/// kFirst is the clean VTS image or the pre-event tile.
enum class ViewSource { kFirst, kSecond };

std::string to_string(PairKind kind);
std::string to_string(PairingMode mode);
PairingMode mode_from_string(const std::string& name);

struct ViewPair {
  PairKind kind = PairKind::kClean;
  ViewSource source_a = ViewSource::kFirst, source_b = ViewSource::kFirst;
  cv::Mat image_a, image_b;
  cv::Mat label_a, label_b;  // empty when no label was supplied
};

struct PairPlan {
  std::size_t index = 0;  // into the sample list
  PairKind kind = PairKind::kClean;
};

/// With probability r_pairs the mode's kind, otherwise kClean.
PairKind draw_kind(double r_pairs, PairingMode mode, Rng& rng);

/// One pass over n VTS samples in shuffled order, with a fresh kind per draw.
std::vector<PairPlan> plan_vts_epoch(std::size_t n, double r_pairs, PairingMode mode, Rng& rng);

/// One pass over an already undersampled xBD pair list: clean entries give
/// kClean, noisy entries the mode's kind. Throws on an empty list.
std::vector<PairPlan> plan_xbd_epoch(const std::vector<bool>& noisy, PairingMode mode, Rng& rng);

/// Views for a VTS sample. kClean pairs the clean image with itself, kNoisy
/// the clean with the noisy image, kMereExposure the noisy image with itself.
/// Both views carry the noiseless label, warped along with their image.
ViewPair make_vts_pair(const vts::VtsSample& sample, PairKind kind, const AugmentConfig& config, Rng& rng,
                       bool with_labels = true);

/// Views for an xBD tile pair: (pre, post) for kClean and kNoisy, (post, post)
/// for kMereExposure. `label` is the building map shared by both views and
/// may be empty.
ViewPair make_xbd_pair(const cv::Mat& pre, const cv::Mat& post, const cv::Mat& label, PairKind kind,
                       const AugmentConfig& config, Rng& rng);

/// Single draws, for callers that do not iterate by epoch.
ViewPair sample_pair_vts(const vts::VtsSample& sample, double r_pairs, PairingMode mode, const AugmentConfig& config,
                         Rng& rng);

/// Appends "epoch,position,sample,kind" rows, writing the header for a new file.
void append_pair_log(const std::filesystem::path& csv, int epoch, const std::vector<PairPlan>& plan,
                     const std::vector<std::string>& sample_ids);

}  // namespace noisypairs::pairing
