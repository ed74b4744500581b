#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "noisypairs/common/rng.hpp"

namespace noisypairs::xbd {

/// Splits items into (train, val) per site: each site's items are shuffled and
/// round(ratio · n) of them go to train. Output order is site-major, then
/// shuffled order, so the result is deterministic in `seed`.
template <typename Item, typename SiteOf>
std::pair<std::vector<Item>, std::vector<Item>> split_train_val(const std::vector<Item>& items, double ratio,
                                                                SiteOf site_of, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0)) throw std::invalid_argument("split ratio must lie in [0, 1]");
  std::map<std::string, std::vector<Item>> by_site;
  for (const auto& item : items) by_site[site_of(item)].push_back(item);

  std::pair<std::vector<Item>, std::vector<Item>> out;
  std::uint64_t site_index = 0;
  for (auto& [site, group] : by_site) {
    auto rng = make_rng(seed, streams::kSplit, site_index++);
    std::shuffle(group.begin(), group.end(), rng);
    const auto n_train = static_cast<std::size_t>(std::floor(ratio * group.size() + 0.5));
    out.first.insert(out.first.end(), group.begin(), group.begin() + n_train);
    out.second.insert(out.second.end(), group.begin() + n_train, group.end());
  }
  return out;
}

struct UndersampleCounts {
  std::size_t clean = 0;
  std::size_t noisy = 0;
};

/// How many clean and noisy pairs to keep so that noisy/(noisy+clean) comes as
/// close to r_pairs as possible from below while keeping the larger side whole.
UndersampleCounts undersample_counts(std::size_t n_clean, std::size_t n_noisy, double r_pairs);

template <typename Item>
struct PretrainSelection {
  std::vector<Item> clean;
  std::vector<Item> noisy;
  double r_pairs = 0.0;
};

/// Draws the subsets chosen by undersample_counts without replacement.
/// Throws std::invalid_argument for r_pairs outside [0, 1], or when the needed
/// side is empty (r_pairs > 0 with no noisy pairs, r_pairs < 1 with no clean).
template <typename Item>
PretrainSelection<Item> undersample_to_rate(const std::vector<Item>& clean, const std::vector<Item>& noisy,
                                            double r_pairs, std::uint64_t seed) {
  const auto counts = undersample_counts(clean.size(), noisy.size(), r_pairs);
  auto draw = [](std::vector<Item> pool, std::size_t n, Rng rng) {
    if (n < pool.size()) {
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(n);
    }
    return pool;
  };
  return {draw(clean, counts.clean, make_rng(seed, streams::kUndersample, 0)),
          draw(noisy, counts.noisy, make_rng(seed, streams::kUndersample, 1)), r_pairs};
}

}  // namespace noisypairs::xbd
