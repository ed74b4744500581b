#include "noisypairs/vts/procedural_textures.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include <opencv2/imgproc.hpp>

#include "noisypairs/common/image_io.hpp"

namespace noisypairs::vts {
namespace {

using Uniform = std::uniform_real_distribution<double>;

cv::Mat gaussian_field(int size, double mean, double sd, Rng& rng) {
  std::normal_distribution<float> normal(static_cast<float>(mean), static_cast<float>(sd));
  cv::Mat out(size, size, CV_32FC1);
  for (int y = 0; y < size; ++y) {
    auto* row = out.ptr<float>(y);
    for (int x = 0; x < size; ++x) row[x] = normal(rng);
  }
  return out;
}

cv::Mat stratified(int size, Rng& rng) {
  const double angle = Uniform(-0.45, 0.45)(rng);
  const double period = Uniform(5.0, 12.0)(rng);
  const double wave_amp = Uniform(0.0, 3.0)(rng);
  const double wave_len = Uniform(30.0, 80.0)(rng);
  const double phase = Uniform(0.0, 2 * std::numbers::pi)(rng);
  const double harmonic = Uniform(0.1, 0.4)(rng);
  cv::Mat out(size, size, CV_32FC1);
  const double c = std::cos(angle), s = std::sin(angle);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double u = c * x + s * y;
      const double v = -s * x + c * y + wave_amp * std::sin(2 * std::numbers::pi * u / wave_len);
      const double t = 2 * std::numbers::pi * v / period + phase;
      out.at<float>(y, x) = static_cast<float>(0.5 + 0.4 * std::sin(t) + 0.4 * harmonic * std::sin(2.7 * t));
    }
  }
  return out;
}

cv::Mat veined(int size, Rng& rng) {
  cv::Mat background = gaussian_field(size, 0.5, 0.25, rng);
  cv::GaussianBlur(background, background, cv::Size(0, 0), size / 12.0);
  cv::normalize(background, background, 0.3, 0.7, cv::NORM_MINMAX);

  const int veins = std::uniform_int_distribution<int>(4, 9)(rng);
  const double contrast = Uniform(0.3, 0.5)(rng) * (std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0);
  for (int i = 0; i < veins; ++i) {
    double x = Uniform(0, size)(rng), y = Uniform(0, size)(rng);
    double heading = Uniform(0, 2 * std::numbers::pi)(rng);
    const int steps = std::uniform_int_distribution<int>(size / 2, 2 * size)(rng);
    const int thickness = std::uniform_int_distribution<int>(1, 2)(rng);
    for (int k = 0; k < steps; ++k) {
      heading += Uniform(-0.25, 0.25)(rng);
      const double nx = x + 2.0 * std::cos(heading), ny = y + 2.0 * std::sin(heading);
      cv::line(background, cv::Point2d(x, y), cv::Point2d(nx, ny), cv::Scalar(0.5 + contrast), thickness,
               cv::LINE_AA);
      x = nx;
      y = ny;
    }
  }
  return background;
}

cv::Mat matted(int size, Rng& rng) {
  cv::Mat out(size, size, CV_32FC1, cv::Scalar(0.5));
  const int strokes = size * size / 14;
  for (int i = 0; i < strokes; ++i) {
    const double x = Uniform(-4, size + 4)(rng), y = Uniform(-4, size + 4)(rng);
    const double angle = Uniform(0, std::numbers::pi)(rng);
    const double len = Uniform(3.0, 9.0)(rng);
    const double shade = Uniform(0.1, 0.9)(rng);
    cv::line(out, cv::Point2d(x, y), cv::Point2d(x + len * std::cos(angle), y + len * std::sin(angle)),
             cv::Scalar(shade), 1, cv::LINE_AA);
  }
  cv::GaussianBlur(out, out, cv::Size(0, 0), 0.7);
  return out;
}

}  // namespace

cv::Mat procedural_texture(TextureKind kind, int size, Rng& rng) {
  cv::Mat intensity;
  switch (kind) {
    case TextureKind::kStratified: intensity = stratified(size, rng); break;
    case TextureKind::kVeined: intensity = veined(size, rng); break;
    case TextureKind::kMatted: intensity = matted(size, rng); break;
  }
  intensity += gaussian_field(size, 0.0, 0.06, rng);

  // Shared colour model: a random base colour modulated by the intensity.
  Uniform base_dist(70.0, 190.0);
  const cv::Vec3d base(base_dist(rng), base_dist(rng), base_dist(rng));
  const double contrast = Uniform(50.0, 110.0)(rng);
  cv::Mat out(size, size, CV_8UC3);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double v = (intensity.at<float>(y, x) - 0.5) * 2.0 * contrast;
      auto& px = out.at<cv::Vec3b>(y, x);
      for (int ch = 0; ch < 3; ++ch) px[ch] = cv::saturate_cast<std::uint8_t>(base[ch] + v);
    }
  }
  return out;
}

void write_procedural_textures(const std::filesystem::path& out, const TextureClasses& classes,
                               const ProceduralTextureOptions& options) {
  const std::pair<const std::string*, TextureKind> kinds[] = {{&classes.class0, TextureKind::kStratified},
                                                              {&classes.class1, TextureKind::kVeined},
                                                              {&classes.noise, TextureKind::kMatted}};
  std::uint64_t k = 0;
  for (const auto& [name, kind] : kinds) {
    auto rng = make_rng(options.seed, streams::kProcedural, k++);
    for (int i = 0; i < options.per_class; ++i) {
      char file[64];
      std::snprintf(file, sizeof file, "%s_%03d.png", name->c_str(), i);
      write_png(out / *name / file, procedural_texture(kind, options.size, rng));
    }
  }
}

}  // namespace noisypairs::vts
