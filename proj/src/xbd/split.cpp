#include "noisypairs/xbd/split.hpp"

#include <string>

namespace noisypairs::xbd {

UndersampleCounts undersample_counts(std::size_t n_clean, std::size_t n_noisy, double r_pairs) {
  if (!(r_pairs >= 0.0 && r_pairs <= 1.0)) {
    throw std::invalid_argument("r_pairs must lie in [0, 1], got " + std::to_string(r_pairs));
  }
  if (r_pairs > 0.0 && n_noisy == 0) throw std::invalid_argument("r_pairs > 0 but there are no noisy pairs");
  if (r_pairs < 1.0 && n_clean == 0) throw std::invalid_argument("r_pairs < 1 but there are no clean pairs");
  if (r_pairs == 0.0) return {n_clean, 0};
  if (r_pairs == 1.0) return {0, n_noisy};

  const double natural = static_cast<double>(n_noisy) / static_cast<double>(n_noisy + n_clean);
  // The epsilon keeps exact quotients such as 9.0000000001 → 9 stable.
  if (r_pairs <= natural) {
    const double wanted = static_cast<double>(n_clean) * r_pairs / (1.0 - r_pairs);
    return {n_clean, std::min(n_noisy, static_cast<std::size_t>(std::floor(wanted + 1e-9)))};
  }
  const double wanted = static_cast<double>(n_noisy) * (1.0 - r_pairs) / r_pairs;
  return {std::min(n_clean, static_cast<std::size_t>(std::floor(wanted + 1e-9))), n_noisy};
}

}  // namespace noisypairs::xbd
