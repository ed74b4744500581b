#include "noisypairs/pairing/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <opencv2/imgproc.hpp>

namespace noisypairs::pairing {
namespace {

cv::Matx33d to3(const cv::Matx23d& m) { return {m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2), 0, 0, 1}; }

template <typename F>
void for_each_source(const cv::Matx23d& inv, cv::Size size, F&& f) {
  for (int y = 0; y < size.height; ++y) {
    for (int x = 0; x < size.width; ++x) {
      f(x, y, inv(0, 0) * x + inv(0, 1) * y + inv(0, 2), inv(1, 0) * x + inv(1, 1) * y + inv(1, 2));
    }
  }
}

void jitter(cv::Mat& image, const AugmentConfig& c, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double b = 1.0 + c.brightness * u(rng);
  const double k = 1.0 + c.contrast * u(rng);
  const double s = 1.0 + c.saturation * u(rng);
  if (b == 1.0 && k == 1.0 && s == 1.0) return;

  cv::Mat f;
  image.convertTo(f, CV_32FC3, b);
  cv::Mat gray;
  cv::cvtColor(f, gray, cv::COLOR_BGR2GRAY);
  const double mean = cv::mean(gray)[0];
  cv::Mat gray3;
  cv::cvtColor(gray, gray3, cv::COLOR_GRAY2BGR);
  // saturation: blend with grey; contrast: blend with the mean intensity
  cv::addWeighted(f, s, gray3, 1.0 - s, 0.0, f);
  f.convertTo(f, -1, k, (1.0 - k) * mean);
  f.convertTo(image, CV_8UC3);
}

void shift_hue(cv::Mat& image, double turns) {
  cv::Mat hsv;
  cv::cvtColor(image, hsv, cv::COLOR_BGR2HSV);  // 8-bit hue runs over [0, 180)
  const int shift = static_cast<int>(std::lround(turns * 180.0));
  for (int y = 0; y < hsv.rows; ++y) {
    auto* row = hsv.ptr<cv::Vec3b>(y);
    for (int x = 0; x < hsv.cols; ++x) row[x][0] = static_cast<uchar>(((row[x][0] + shift) % 180 + 180) % 180);
  }
  cv::cvtColor(hsv, image, cv::COLOR_HSV2BGR);
}

}  // namespace

AugmentConfig AugmentConfig::identity() {
  AugmentConfig c;
  c.crop = false;
  c.hflip_prob = c.vflip_prob = 0.0;
  c.max_rotation_deg = 0.0;
  c.brightness = c.contrast = c.saturation = 0.0;
  c.blur_prob = 0.0;
  return c;
}

Json AugmentConfig::to_json() const {
  return Json{{"output_size", output_size},
              {"crop", crop},
              {"crop_min_scale", crop_min_scale},
              {"crop_max_scale", crop_max_scale},
              {"crop_min_aspect", crop_min_aspect},
              {"crop_max_aspect", crop_max_aspect},
              {"hflip_prob", hflip_prob},
              {"vflip_prob", vflip_prob},
              {"max_rotation_deg", max_rotation_deg},
              {"brightness", brightness},
              {"contrast", contrast},
              {"saturation", saturation},
              {"hue", hue},
              {"grayscale_prob", grayscale_prob},
              {"blur_prob", blur_prob},
              {"blur_sigma_min", blur_sigma_min},
              {"blur_sigma_max", blur_sigma_max}};
}

AugmentConfig AugmentConfig::from_json(const Json& j) {
  AugmentConfig c;
  c.output_size = j.value("output_size", c.output_size);
  c.crop = j.value("crop", c.crop);
  c.crop_min_scale = j.value("crop_min_scale", c.crop_min_scale);
  c.crop_max_scale = j.value("crop_max_scale", c.crop_max_scale);
  c.crop_min_aspect = j.value("crop_min_aspect", c.crop_min_aspect);
  c.crop_max_aspect = j.value("crop_max_aspect", c.crop_max_aspect);
  c.hflip_prob = j.value("hflip_prob", c.hflip_prob);
  c.vflip_prob = j.value("vflip_prob", c.vflip_prob);
  c.max_rotation_deg = j.value("max_rotation_deg", c.max_rotation_deg);
  c.brightness = j.value("brightness", c.brightness);
  c.contrast = j.value("contrast", c.contrast);
  c.saturation = j.value("saturation", c.saturation);
  c.hue = j.value("hue", c.hue);
  c.grayscale_prob = j.value("grayscale_prob", c.grayscale_prob);
  c.blur_prob = j.value("blur_prob", c.blur_prob);
  c.blur_sigma_min = j.value("blur_sigma_min", c.blur_sigma_min);
  c.blur_sigma_max = j.value("blur_sigma_max", c.blur_sigma_max);
  return c;
}

cv::Mat warp_bilinear(const cv::Mat& src, const cv::Matx23d& inverse, cv::Size size) {
  if (src.depth() != CV_8U) throw std::invalid_argument("warp_bilinear expects an 8-bit image");
  const int ch = src.channels();
  cv::Mat out(size, src.type());
  const int w = src.cols, h = src.rows;
  for_each_source(inverse, size, [&](int x, int y, double sx, double sy) {
    sx = std::clamp(sx, 0.0, w - 1.0);
    sy = std::clamp(sy, 0.0, h - 1.0);
    const int x0 = static_cast<int>(std::floor(sx)), y0 = static_cast<int>(std::floor(sy));
    const int x1 = std::min(x0 + 1, w - 1), y1 = std::min(y0 + 1, h - 1);
    const double fx = sx - x0, fy = sy - y0;
    const uchar* r0 = src.ptr<uchar>(y0);
    const uchar* r1 = src.ptr<uchar>(y1);
    uchar* o = out.ptr<uchar>(y) + x * ch;
    for (int c = 0; c < ch; ++c) {
      const double top = r0[x0 * ch + c] * (1 - fx) + r0[x1 * ch + c] * fx;
      const double bottom = r1[x0 * ch + c] * (1 - fx) + r1[x1 * ch + c] * fx;
      o[c] = cv::saturate_cast<uchar>(top * (1 - fy) + bottom * fy);
    }
  });
  return out;
}

cv::Mat warp_nearest(const cv::Mat& src, const cv::Matx23d& inverse, cv::Size size) {
  if (src.type() != CV_8UC1) throw std::invalid_argument("warp_nearest expects a CV_8UC1 label map");
  cv::Mat out(size, CV_8UC1);
  for_each_source(inverse, size, [&](int x, int y, double sx, double sy) {
    const int ix = std::clamp(static_cast<int>(std::floor(sx + 0.5)), 0, src.cols - 1);
    const int iy = std::clamp(static_cast<int>(std::floor(sy + 0.5)), 0, src.rows - 1);
    out.at<uchar>(y, x) = src.at<uchar>(iy, ix);
  });
  return out;
}

cv::Matx23d sample_geometry(cv::Size size, int output_size, const AugmentConfig& c, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double W = size.width, H = size.height;
  const double outW = output_size > 0 ? output_size : W;
  const double outH = output_size > 0 ? output_size : H;

  double cw = W, ch = H, cx = 0.0, cy = 0.0;
  if (c.crop) {
    const double scale = c.crop_min_scale + (c.crop_max_scale - c.crop_min_scale) * u(rng);
    const double log_a = std::log(c.crop_min_aspect) + (std::log(c.crop_max_aspect) - std::log(c.crop_min_aspect)) * u(rng);
    const double aspect = std::exp(log_a);
    cw = std::sqrt(scale * aspect) * W;
    ch = std::sqrt(scale / aspect) * H;
    // Clamping one side keeps the area, so the scale bound holds.
    if (cw > W) {
      cw = W;
      ch = scale * H;
    } else if (ch > H) {
      ch = H;
      cw = scale * W;
    }
    cx = (W - cw) * u(rng);
    cy = (H - ch) * u(rng);
  }
  const bool hflip = u(rng) < c.hflip_prob;
  const bool vflip = u(rng) < c.vflip_prob;
  const double angle = c.max_rotation_deg * (2.0 * u(rng) - 1.0) * std::numbers::pi / 180.0;

  // Output pixel -> unit square, flip, rotate about the centre, then into the crop window.
  const double sx = 1.0 / outW, sy = 1.0 / outH;
  cv::Matx33d to_unit(sx, 0, 0.5 * sx, 0, sy, 0.5 * sy, 0, 0, 1);
  cv::Matx33d flip(hflip ? -1 : 1, 0, hflip ? 1 : 0, 0, vflip ? -1 : 1, vflip ? 1 : 0, 0, 0, 1);
  const double cs = std::cos(angle), sn = std::sin(angle);
  // Rotation in pixel-proportional units so squares stay square.
  cv::Matx33d centre(1, 0, -0.5, 0, 1, -0.5, 0, 0, 1), uncentre(1, 0, 0.5, 0, 1, 0.5, 0, 0, 1);
  cv::Matx33d rot(cs, -sn * ch / cw, 0, sn * cw / ch, cs, 0, 0, 0, 1);
  cv::Matx33d to_src(cw, 0, cx - 0.5, 0, ch, cy - 0.5, 0, 0, 1);
  if (!c.crop && !hflip && !vflip && angle == 0.0 && outW == W && outH == H) return {1, 0, 0, 0, 1, 0};
  const cv::Matx33d m = to_src * uncentre * rot * centre * flip * to_unit;
  return {m(0, 0), m(0, 1), m(0, 2), m(1, 0), m(1, 1), m(1, 2)};
}

Augmented augment(const cv::Mat& image, const cv::Mat& label, const AugmentConfig& c, Rng& rng) {
  if (image.empty() || image.type() != CV_8UC3) throw std::invalid_argument("augment expects a non-empty CV_8UC3 image");
  if (!label.empty() && label.size() != image.size()) throw std::invalid_argument("label size differs from image size");
  const cv::Size out_size = c.output_size > 0 ? cv::Size(c.output_size, c.output_size) : image.size();

  Augmented out;
  out.inverse = sample_geometry(image.size(), c.output_size, c, rng);
  const auto inv3 = to3(out.inverse);
  const bool identity = inv3 == cv::Matx33d::eye() && out_size == image.size();
  out.image = identity ? image.clone() : warp_bilinear(image, out.inverse, out_size);
  if (!label.empty()) out.label = identity ? label.clone() : warp_nearest(label, out.inverse, out_size);

  jitter(out.image, c, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  if (c.hue > 0.0) {
    const double turns = c.hue * (2.0 * u(rng) - 1.0);
    if (turns != 0.0) shift_hue(out.image, turns);
  }
  if (c.grayscale_prob > 0.0 && u(rng) < c.grayscale_prob) {
    cv::Mat gray;
    cv::cvtColor(out.image, gray, cv::COLOR_BGR2GRAY);
    cv::cvtColor(gray, out.image, cv::COLOR_GRAY2BGR);
  }
  if (u(rng) < c.blur_prob) {
    const double sigma = c.blur_sigma_min + (c.blur_sigma_max - c.blur_sigma_min) * u(rng);
    cv::GaussianBlur(out.image, out.image, cv::Size(0, 0), sigma, sigma, cv::BORDER_REFLECT_101);
  }
  return out;
}

}  // namespace noisypairs::pairing
