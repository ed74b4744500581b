#include <cstdio>
#include <fstream>

#include <opencv2/imgproc.hpp>

#include "noisypairs/common/image_io.hpp"
#include "noisypairs/common/rng.hpp"
#include "noisypairs/xbd/ingest.hpp"
#include "noisypairs/xbd/polygon.hpp"

namespace fs = std::filesystem;

namespace noisypairs::xbd {
namespace {

const char* const kSubtypes[] = {"no-damage", "no-damage", "minor-damage", "major-damage", "destroyed"};

cv::Mat terrain(int size, Rng& rng) {
  // Low-frequency noise upsampled to full size, tinted green-brown.
  std::normal_distribution<float> n(0.f, 1.f);
  cv::Mat coarse(8, 8, CV_32F);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) coarse.at<float>(y, x) = n(rng);
  cv::Mat field;
  cv::resize(coarse, field, {size, size}, 0, 0, cv::INTER_CUBIC);
  cv::Mat out(size, size, CV_8UC3);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const float v = field.at<float>(y, x);
      out.at<cv::Vec3b>(y, x) = cv::Vec3b(cv::saturate_cast<uchar>(70 + 12 * v), cv::saturate_cast<uchar>(110 + 18 * v),
                                          cv::saturate_cast<uchar>(90 + 10 * v));
    }
  }
  return out;
}

std::string wkt_of(const std::vector<cv::Point2d>& ring) {
  std::string s = "POLYGON ((";
  char buf[64];
  for (std::size_t i = 0; i <= ring.size(); ++i) {
    const auto& p = ring[i % ring.size()];
    std::snprintf(buf, sizeof buf, "%s%.2f %.2f", i ? ", " : "", p.x, p.y);
    s += buf;
  }
  return s + "))";
}

void write_scene(const fs::path& subset, const std::string& stem, int size, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  cv::Mat pre = terrain(size, rng);
  cv::Mat post = pre.clone();
  post.convertTo(post, -1, 0.95, 6);  // different acquisition conditions

  // Damage concentrates around an epicentre, so some quadrants stay intact.
  const double cx = u(rng) * size, cy = u(rng) * size;
  const double radius = (0.15 + 0.35 * u(rng)) * size;
  const bool disaster = u(rng) < 0.75;

  Json pre_xy = Json::array(), post_xy = Json::array();
  const int n_buildings = 6 + static_cast<int>(u(rng) * 18);
  const double unit = size / 64.0;
  for (int b = 0; b < n_buildings; ++b) {
    const double w = (3 + 5 * u(rng)) * unit, h = (3 + 5 * u(rng)) * unit;
    const double x0 = u(rng) * (size - w), y0 = u(rng) * (size - h);
    const double angle = (u(rng) - 0.5) * 0.6;
    const cv::Point2d c(x0 + w / 2, y0 + h / 2);
    std::vector<cv::Point2d> ring;
    for (const auto& [dx, dy] : {std::pair{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}}) {
      const double px = dx * w, py = dy * h;
      ring.emplace_back(c.x + px * std::cos(angle) - py * std::sin(angle),
                        c.y + px * std::sin(angle) + py * std::cos(angle));
    }
    int grade = kNoDamage;
    if (disaster && std::hypot(c.x - cx, c.y - cy) < radius) grade = 2 + static_cast<int>(u(rng) * 3) % 3;

    std::vector<cv::Point> poly;
    for (const auto& p : ring) poly.emplace_back(cvRound(p.x), cvRound(p.y));
    const cv::Scalar roof(150 + 60 * u(rng), 140 + 60 * u(rng), 130 + 60 * u(rng));
    cv::fillConvexPoly(pre, poly, roof);
    const cv::Scalar damaged = grade == kDestroyed ? cv::Scalar(60, 70, 80) : roof * (1.0 - 0.2 * (grade - 1));
    cv::fillConvexPoly(post, poly, damaged);
    if (grade >= kMajorDamage) cv::line(post, poly[0], poly[2], cv::Scalar(40, 40, 40), std::max(1, size / 256));

    pre_xy.push_back({{"wkt", wkt_of(ring)}, {"properties", {{"feature_type", "building"}}}});
    post_xy.push_back(
        {{"wkt", wkt_of(ring)}, {"properties", {{"feature_type", "building"}, {"subtype", kSubtypes[grade]}}}});
  }

  write_png(subset / "images" / (stem + "_pre_disaster.png"), pre);
  write_png(subset / "images" / (stem + "_post_disaster.png"), post);
  fs::create_directories(subset / "labels");
  write_json_atomic(subset / "labels" / (stem + "_pre_disaster.json"), Json{{"features", {{"xy", pre_xy}}}});
  write_json_atomic(subset / "labels" / (stem + "_post_disaster.json"), Json{{"features", {{"xy", post_xy}}}});
}

}  // namespace

void write_fixture(const fs::path& out, const FixtureOptions& options) {
  if (options.sites < 1 || options.scenes_per_site < 1 || options.test_scenes < 0 || options.source_size < 64) {
    throw std::invalid_argument("invalid fixture options");
  }
  char stem[64];
  for (int s = 0; s < options.sites; ++s) {
    for (int i = 0; i < options.scenes_per_site; ++i) {
      auto rng = make_rng(options.seed, streams::kFixture, static_cast<std::uint64_t>(s * 10000 + i));
      std::snprintf(stem, sizeof stem, "site-%c_%08d", 'a' + s, i);
      write_scene(out / "train", stem, options.source_size, rng);
    }
  }
  for (int i = 0; i < options.test_scenes; ++i) {
    auto rng = make_rng(options.seed, streams::kFixture, 1000000 + static_cast<std::uint64_t>(i));
    std::snprintf(stem, sizeof stem, "site-%c_%08d", 'a' + i % options.sites, 90000 + i);
    write_scene(out / "test", stem, options.source_size, rng);
  }
}

}  // namespace noisypairs::xbd
