#include "noisypairs/losses/moco.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "noisypairs/losses/feature_map.hpp"

namespace noisypairs::losses {

void momentum_update(std::span<float> key, std::span<const float> query, double momentum) {
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("momentum must lie in [0, 1), got " + std::to_string(momentum));
  }
  if (key.size() != query.size()) {
    throw std::invalid_argument("momentum update: parameter shapes differ (" + std::to_string(key.size()) +
                                " vs " + std::to_string(query.size()) + ")");
  }
  const float m = static_cast<float>(momentum);
  const float one_minus_m = static_cast<float>(1.0 - momentum);
  for (std::size_t i = 0; i < key.size(); ++i) key[i] = m * key[i] + one_minus_m * query[i];
}

KeyQueue::KeyQueue(int capacity, int dim, Rng& rng) : capacity_(capacity), dim_(dim) {
  if (capacity < 0 || dim <= 0) throw std::invalid_argument("queue capacity must be ≥ 0 and dim > 0");
  storage_.resize(static_cast<std::size_t>(capacity) * dim);
  std::normal_distribution<float> normal;
  for (int r = 0; r < capacity; ++r) {
    float* row = storage_.data() + static_cast<std::size_t>(r) * dim;
    double norm2 = 0.0;
    for (int c = 0; c < dim; ++c) {
      row[c] = normal(rng);
      norm2 += static_cast<double>(row[c]) * row[c];
    }
    const auto inv = static_cast<float>(1.0 / std::sqrt(norm2));
    for (int c = 0; c < dim; ++c) row[c] *= inv;
  }
}

void KeyQueue::enqueue(std::span<const float> keys) {
  if (keys.size() % static_cast<std::size_t>(dim_) != 0) {
    throw std::invalid_argument("enqueued keys are not a multiple of the key dimension");
  }
  if (capacity_ == 0) return;
  const auto count = static_cast<int>(keys.size() / dim_);
  for (int b = 0; b < count; ++b) {
    const float* src = keys.data() + static_cast<std::size_t>(b) * dim_;
    double norm2 = 0.0;
    for (int c = 0; c < dim_; ++c) norm2 += static_cast<double>(src[c]) * src[c];
    if (std::abs(std::sqrt(norm2) - 1.0) > kNormTolerance) {
      throw std::invalid_argument("queue keys must be unit-normalized");
    }
    std::copy(src, src + dim_, storage_.begin() + static_cast<std::ptrdiff_t>(head_) * dim_);
    head_ = (head_ + 1) % capacity_;
  }
}

std::vector<float> KeyQueue::fifo_contents() const {
  std::vector<float> out;
  out.reserve(storage_.size());
  for (int i = 0; i < capacity_; ++i) {
    const int row = (head_ + i) % capacity_;
    const auto begin = storage_.begin() + static_cast<std::ptrdiff_t>(row) * dim_;
    out.insert(out.end(), begin, begin + dim_);
  }
  return out;
}

void KeyQueue::restore(std::vector<float> storage, int head) {
  if (storage.size() != storage_.size() || head < 0 || (capacity_ > 0 && head >= capacity_)) {
    throw std::invalid_argument("queue snapshot does not match this queue's shape");
  }
  storage_ = std::move(storage);
  head_ = head;
}

}  // namespace noisypairs::losses
