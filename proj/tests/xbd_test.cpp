#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <set>

#include <opencv2/core.hpp>

#include "noisypairs/common/image_io.hpp"
#include "noisypairs/common/rng.hpp"
#include "noisypairs/xbd/ingest.hpp"
#include "noisypairs/xbd/polygon.hpp"
#include "noisypairs/xbd/split.hpp"
#include "noisypairs/xbd/tiling.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace noisypairs;
using namespace noisypairs::xbd;

namespace {

cv::Mat random_grades(int size, Rng& rng, int max_grade = 4) {
  std::uniform_int_distribution<int> g(0, max_grade);
  cv::Mat m(size, size, CV_8UC1);
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) m.at<uchar>(y, x) = static_cast<uchar>(g(rng));
  return m;
}

SourcePair random_source(int size, Rng& rng) {
  SourcePair s{"quake_00000001", "quake", cv::Mat(size, size, CV_8UC3), cv::Mat(size, size, CV_8UC3),
               random_grades(size, rng, 1), random_grades(size, rng, 1)};
  cv::randu(s.pre_image, 0, 255);
  cv::randu(s.post_image, 0, 255);
  return s;
}

}  // namespace

TEST_CASE("wkt parsing and subtypes") {
  std::vector<std::vector<cv::Point2d>> rings;
  REQUIRE(parse_wkt_polygon("POLYGON ((1 2, 3 4.5, 5 6, 1 2))", rings));
  REQUIRE(rings.size() == 1);
  CHECK(rings[0].size() >= 3);
  CHECK(rings[0][1].y == doctest::Approx(4.5));
  REQUIRE(parse_wkt_polygon("POLYGON ((0 0, 10 0, 10 10, 0 10, 0 0), (2 2, 4 2, 4 4, 2 2))", rings));
  CHECK(rings.size() == 2);
  CHECK_FALSE(parse_wkt_polygon("LINESTRING (0 0, 1 1)", rings));
  CHECK_FALSE(parse_wkt_polygon("POLYGON ((0 0, 1))", rings));

  CHECK(grade_from_subtype("") == kNoDamage);
  CHECK(grade_from_subtype("no-damage") == kNoDamage);
  CHECK(grade_from_subtype("minor-damage") == kMinorDamage);
  CHECK(grade_from_subtype("major-damage") == kMajorDamage);
  CHECK(grade_from_subtype("destroyed") == kDestroyed);
  CHECK(grade_from_subtype("flooded") == -1);
}

TEST_CASE("parse_xbd_labels counts malformed records") {
  const Json file = {{"features",
                      {{"xy",
                        {{{"wkt", "POLYGON ((0 0, 4 0, 4 4, 0 0))"}, {"properties", {{"subtype", "destroyed"}}}},
                         {{"wkt", "POLYGON ((garbage))"}},
                         {{"properties", {{"subtype", "minor-damage"}}}},
                         {{"wkt", "POLYGON ((0 0, 4 0, 4 4, 0 0))"}, {"properties", {{"subtype", "???"}}}}}}}}};
  const auto parsed = parse_xbd_labels(file);
  REQUIRE(parsed.polygons.size() == 1);
  CHECK(parsed.polygons[0].grade == kDestroyed);
  CHECK(parsed.skipped == 3);
}

TEST_CASE("rasterize: trivial cases") {
  CHECK(cv::countNonZero(rasterize_labels({}, {32, 32})) == 0);
  BuildingPolygon full{{{{0, 0}, {32, 0}, {32, 32}, {0, 32}}}, kMajorDamage};
  const auto m = rasterize_labels({full}, {32, 32});
  CHECK(cv::countNonZero(m == kMajorDamage) == 32 * 32);
  // Out of bounds: clipped rather than rejected.
  BuildingPolygon huge{{{{-100, -100}, {500, -100}, {500, 500}, {-100, 500}}}, kMinorDamage};
  CHECK(cv::countNonZero(rasterize_labels({huge}, {16, 16}) == kMinorDamage) == 256);
}

TEST_CASE("rasterize: matches point-in-polygon brute force on a 16x16 canvas") {
  Rng rng(41);
  std::uniform_real_distribution<double> coord(-2.0, 18.0);
  std::uniform_int_distribution<int> grade(1, 4), vertices(3, 7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<BuildingPolygon> polys;
    for (int k = 0; k < 3; ++k) {
      BuildingPolygon p;
      p.grade = grade(rng);
      p.rings.emplace_back();
      const int n = vertices(rng);
      for (int v = 0; v < n; ++v) p.rings.back().emplace_back(coord(rng), coord(rng));
      polys.push_back(p);
    }
    const auto got = rasterize_labels(polys, {16, 16});
    const auto want = oracle::rasterize(polys, 16);
    REQUIRE(cv::countNonZero(got != want) == 0);
  }
}

TEST_CASE("rasterize: overlap takes the later polygon and holes stay empty") {
  BuildingPolygon a{{{{0, 0}, {10, 0}, {10, 10}, {0, 10}}}, kNoDamage};
  BuildingPolygon b{{{{5, 5}, {16, 5}, {16, 16}, {5, 16}}}, kDestroyed};
  const auto m = rasterize_labels({a, b}, {16, 16});
  CHECK(m.at<uchar>(7, 7) == kDestroyed);
  CHECK(m.at<uchar>(2, 2) == kNoDamage);
  CHECK(m.at<uchar>(12, 2) == 0);
  const auto swapped = rasterize_labels({b, a}, {16, 16});
  CHECK(swapped.at<uchar>(7, 7) == kNoDamage);

  BuildingPolygon ring{{{{0, 0}, {16, 0}, {16, 16}, {0, 16}}, {{4, 4}, {12, 4}, {12, 12}, {4, 12}}}, kMinorDamage};
  const auto r = rasterize_labels({ring}, {16, 16});
  CHECK(r.at<uchar>(8, 8) == 0);
  CHECK(r.at<uchar>(1, 1) == kMinorDamage);
  CHECK(cv::countNonZero(r) == 256 - 64);
}

TEST_CASE("tile: quadrants partition the source") {
  Rng rng(5);
  const auto src = random_source(64, rng);
  const auto tiles = tile(src, 64);
  for (int k = 0; k < 4; ++k) {
    CHECK(tiles[k].quadrant == k);
    CHECK(tiles[k].id == "quake_00000001_q" + std::to_string(k));
    CHECK(tiles[k].site == "quake");
    CHECK(tiles[k].pre_image.size() == cv::Size(32, 32));
  }
  cv::Mat top, bottom, whole;
  const std::pair<cv::Mat TilePair::*, const cv::Mat*> members[] = {{&TilePair::pre_image, &src.pre_image},
                                                                      {&TilePair::post_image, &src.post_image},
                                                                      {&TilePair::pre_label, &src.pre_label},
                                                                      {&TilePair::post_label, &src.post_label}};
  for (const auto& [member, original] : members) {
    cv::hconcat(tiles[0].*member, tiles[1].*member, top);
    cv::hconcat(tiles[2].*member, tiles[3].*member, bottom);
    cv::vconcat(top, bottom, whole);
    CHECK(cv::norm(whole, *original, cv::NORM_INF) == 0);
  }
}

TEST_CASE("tile: noisiness per quadrant matches a pixel scan") {
  Rng rng(6);
  for (int trial = 0; trial < 40; ++trial) {
    auto src = random_source(32, rng);
    src.post_label = random_grades(32, rng, 1);
    // Sprinkle damage into a random subset of quadrants.
    std::uniform_int_distribution<int> coin(0, 1), pos(0, 15), g(2, 4);
    for (int q = 0; q < 4; ++q) {
      if (coin(rng)) src.post_label.at<uchar>((q / 2) * 16 + pos(rng), (q % 2) * 16 + pos(rng)) = g(rng);
    }
    for (const auto& t : tile(src, 32)) {
      bool damaged = false;
      for (int y = 0; y < 16; ++y)
        for (int x = 0; x < 16; ++x) damaged |= t.post_label.at<uchar>(y, x) >= 2;
      CHECK((t.noisiness == Noisiness::kNoisy) == damaged);
    }
  }

  auto src = random_source(32, rng);
  src.post_label.setTo(1);
  src.pre_label.setTo(3);  // pre-event damage is not consulted
  src.post_label.at<uchar>(3, 4) = kMinorDamage;
  const auto tiles = tile(src, 32);
  int noisy = 0;
  for (const auto& t : tiles) noisy += t.noisiness == Noisiness::kNoisy;
  CHECK(noisy == 1);
  CHECK(tiles[0].noisiness == Noisiness::kNoisy);
}

TEST_CASE("tile: errors") {
  Rng rng(7);
  auto src = random_source(64, rng);
  CHECK_THROWS_AS(tile(src, 32), std::invalid_argument);
  auto unlabeled = src;
  unlabeled.post_label = cv::Mat();
  CHECK_THROWS_AS(tile(unlabeled, 64), std::invalid_argument);
  auto mismatched = src;
  mismatched.pre_label = cv::Mat(32, 64, CV_8UC1, cv::Scalar(0));
  CHECK_THROWS_AS(tile(mismatched, 64), std::invalid_argument);
}

TEST_CASE("binarize_label") {
  CHECK(cv::countNonZero(binarize_label(cv::Mat::zeros(8, 8, CV_8UC1))) == 0);
  CHECK(cv::countNonZero(binarize_label(cv::Mat(8, 8, CV_8UC1, cv::Scalar(3))) == 1) == 64);
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const auto m = random_grades(24, rng);
    const auto b = binarize_label(m);
    int nonzero = 0;
    for (int y = 0; y < 24; ++y)
      for (int x = 0; x < 24; ++x) nonzero += m.at<uchar>(y, x) != 0;
    CHECK(cv::countNonZero(b) == nonzero);
    CHECK(cv::countNonZero(binarize_label(b) != b) == 0);
  }
  cv::Mat bad(4, 4, CV_8UC1, cv::Scalar(5));
  CHECK_THROWS_AS(binarize_label(bad), std::invalid_argument);
}

TEST_CASE("site_of") {
  CHECK(site_of("hurricane-harvey_00000012_post_disaster") == "hurricane-harvey");
  CHECK(site_of("hurricane-harvey_00000012") == "hurricane-harvey");
  CHECK(site_of("santa-rosa-wildfire_00000003_pre_disaster") == "santa-rosa-wildfire");
}

TEST_CASE("split_train_val: per-site proportions and determinism") {
  std::vector<std::pair<std::string, int>> items;
  for (int i = 0; i < 10; ++i) items.push_back({"a", i});
  auto site = [](const auto& item) { return item.first; };
  auto [train, val] = split_train_val(items, 0.7, site, 3);
  CHECK(train.size() == 7);
  CHECK(val.size() == 3);

  for (int i = 0; i < 13; ++i) items.push_back({"b", 100 + i});
  for (int i = 0; i < 4; ++i) items.push_back({"c", 200 + i});
  const auto first = split_train_val(items, 0.7, site, 99);
  const auto again = split_train_val(items, 0.7, site, 99);
  CHECK(first == again);
  CHECK(first != split_train_val(items, 0.7, site, 100));
  for (const std::string s : {"a", "b", "c"}) {
    const auto n = std::count_if(items.begin(), items.end(), [&](const auto& i) { return i.first == s; });
    const auto t = std::count_if(first.first.begin(), first.first.end(), [&](const auto& i) { return i.first == s; });
    CHECK(std::abs(static_cast<double>(t) - 0.7 * n) <= 1.0);
  }
  std::set<int> seen;
  for (const auto& i : first.first) seen.insert(i.second);
  for (const auto& i : first.second) seen.insert(i.second);
  CHECK(seen.size() == items.size());
}

TEST_CASE("undersample_counts: stated counts and brute-force search") {
  const auto r01 = undersample_counts(20446, 5224, 0.1);
  CHECK(r01.clean == 20446);
  CHECK(r01.noisy == 2271);
  const auto r07 = undersample_counts(20446, 5224, 0.7);
  CHECK(r07.clean == 2238);
  CHECK(r07.noisy == 5224);
  CHECK(undersample_counts(20446, 5224, 0.0).noisy == 0);
  CHECK(undersample_counts(20446, 5224, 0.0).clean == 20446);
  CHECK(undersample_counts(20446, 5224, 1.0).clean == 0);
  CHECK(undersample_counts(20446, 5224, 1.0).noisy == 5224);

  for (double r : {0.0, 0.1, 0.25, 0.5, 0.7, 0.75, 1.0}) {
    const auto want = oracle::undersample_search(20446, 5224, r);
    const auto got = undersample_counts(20446, 5224, r);
    CHECK(got.clean == want.first);
    CHECK(got.noisy == want.second);
  }
  Rng rng(9);
  std::uniform_int_distribution<int> n(1, 300);
  std::uniform_real_distribution<double> r(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t c = n(rng), z = n(rng);
    const double rate = r(rng);
    const auto got = undersample_counts(c, z, rate);
    const auto want = oracle::undersample_search(c, z, rate);
    REQUIRE(got.clean == want.first);
    REQUIRE(got.noisy == want.second);
    // Achieved rate lies within one pair of the target.
    const double achieved_noisy = rate * (got.clean + got.noisy);
    CHECK(std::abs(achieved_noisy - got.noisy) <= 1.0 + 1e-9);
  }
}

TEST_CASE("undersample_to_rate: errors and no duplicates") {
  std::vector<int> clean(50), noisy(20);
  std::iota(clean.begin(), clean.end(), 0);
  std::iota(noisy.begin(), noisy.end(), 1000);
  CHECK_THROWS_AS(undersample_to_rate(clean, noisy, -0.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(undersample_to_rate(clean, noisy, 1.1, 1), std::invalid_argument);
  CHECK_THROWS_AS(undersample_to_rate(clean, std::vector<int>{}, 0.2, 1), std::invalid_argument);
  CHECK_THROWS_AS(undersample_to_rate(std::vector<int>{}, noisy, 0.2, 1), std::invalid_argument);
  CHECK_NOTHROW(undersample_to_rate(clean, std::vector<int>{}, 0.0, 1));

  const auto sel = undersample_to_rate(clean, noisy, 0.6, 4);
  std::set<int> all(sel.clean.begin(), sel.clean.end());
  all.insert(sel.noisy.begin(), sel.noisy.end());
  CHECK(all.size() == sel.clean.size() + sel.noisy.size());
  CHECK(sel.noisy.size() == 20);
  CHECK(sel.clean.size() == 13);
  for (int c : sel.clean) CHECK(c < 1000);
}

TEST_CASE("ingest: fixture end to end") {
  testing::TempDir dir("xbd");
  FixtureOptions fx;
  fx.sites = 2;
  fx.scenes_per_site = 5;
  fx.test_scenes = 1;
  fx.source_size = 128;
  fx.seed = 11;
  write_fixture(dir / "raw", fx);

  IngestOptions opt{dir / "raw", dir / "out_a", 0.5, 3, 0.7, 128};
  const auto a = ingest(opt);
  CHECK(a.train.size() + a.val.size() == 40);
  CHECK(a.test.size() == 4);
  CHECK(a.train.size() % 4 == 0);  // whole scenes

  // Scenes never straddle train and val.
  std::set<std::string> train_scenes, val_scenes;
  for (const auto& e : a.train) train_scenes.insert(e.id.substr(0, e.id.size() - 3));
  for (const auto& e : a.val) val_scenes.insert(e.id.substr(0, e.id.size() - 3));
  for (const auto& s : train_scenes) CHECK(val_scenes.count(s) == 0);

  // Noisiness agrees with the written labels.
  for (const auto& e : a.train) {
    const auto label = read_label(dir / "out_a" / e.post_label);
    double max = 0;
    cv::minMaxLoc(label, nullptr, &max);
    CHECK(e.noisy == (max >= 2));
  }

  const auto round_trip = PretrainManifest::from_json(read_json(dir / "out_a" / "pretrain_manifest.json"));
  CHECK(round_trip.to_json() == a.to_json());

  const std::size_t kept = a.clean_pairs.size() + a.noisy_pairs.size();
  REQUIRE(kept > 0);
  CHECK(std::abs(0.5 * kept - a.noisy_pairs.size()) <= 1.0);

  // The validation and test sets do not depend on the rate.
  opt.output = dir / "out_b";
  opt.r_pairs = 0.0;
  const auto b = ingest(opt);
  auto ids = [](const std::vector<PairEntry>& v) {
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(e.id);
    return out;
  };
  CHECK(ids(a.val) == ids(b.val));
  CHECK(ids(a.test) == ids(b.test));
  CHECK(b.noisy_pairs.empty());
  CHECK(testing::slurp(dir / "out_a" / a.val[0].post_image) == testing::slurp(dir / "out_b" / b.val[0].post_image));
}

TEST_CASE("ingest: missing input") {
  testing::TempDir dir("xbd");
  CHECK_THROWS_AS(ingest({dir / "nope", dir / "out", 0.1, 1}), std::runtime_error);
  std::filesystem::create_directories(dir / "empty");
  CHECK_THROWS_AS(ingest({dir / "empty", dir / "out", 0.1, 1}), std::runtime_error);
}
