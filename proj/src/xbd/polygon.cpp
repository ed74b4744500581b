#include "noisypairs/xbd/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <spdlog/spdlog.h>

namespace noisypairs::xbd {

bool parse_wkt_polygon(const std::string& wkt, std::vector<std::vector<cv::Point2d>>& rings) {
  rings.clear();
  const auto open = wkt.find("((");
  const auto close = wkt.rfind("))");
  if (wkt.rfind("POLYGON", 0) != 0 || open == std::string::npos || close == std::string::npos || close < open) {
    return false;
  }
  // Between the outer parentheses: "(x y, x y), (x y, ...)"
  const std::string body = wkt.substr(open + 1, close - open);
  std::size_t pos = 0;
  while (true) {
    const auto start = body.find('(', pos);
    if (start == std::string::npos) break;
    const auto end = body.find(')', start);
    if (end == std::string::npos) return false;
    std::vector<cv::Point2d> ring;
    std::stringstream coords(body.substr(start + 1, end - start - 1));
    std::string vertex;
    while (std::getline(coords, vertex, ',')) {
      std::stringstream xy(vertex);
      double x, y;
      if (!(xy >> x >> y) || !std::isfinite(x) || !std::isfinite(y)) return false;
      ring.emplace_back(x, y);
    }
    if (ring.size() >= 2 && ring.front() == ring.back()) ring.pop_back();
    if (ring.size() < 3) return false;
    rings.push_back(std::move(ring));
    pos = end + 1;
  }
  return !rings.empty();
}

int grade_from_subtype(const std::string& subtype) {
  if (subtype.empty() || subtype == "no-damage" || subtype == "un-classified") return kNoDamage;
  if (subtype == "minor-damage") return kMinorDamage;
  if (subtype == "major-damage") return kMajorDamage;
  if (subtype == "destroyed") return kDestroyed;
  return -1;
}

ParsedAnnotations parse_xbd_labels(const Json& label_file) {
  ParsedAnnotations out;
  const auto features = label_file.find("features");
  if (features == label_file.end() || !features->contains("xy")) return out;
  for (const auto& record : features->at("xy")) {
    BuildingPolygon polygon;
    const auto wkt = record.find("wkt");
    if (wkt == record.end() || !wkt->is_string() || !parse_wkt_polygon(wkt->get<std::string>(), polygon.rings)) {
      ++out.skipped;
      continue;
    }
    std::string subtype;
    if (const auto props = record.find("properties"); props != record.end() && props->contains("subtype")) {
      subtype = props->at("subtype").is_string() ? props->at("subtype").get<std::string>() : "?";
    }
    polygon.grade = grade_from_subtype(subtype);
    if (polygon.grade < 0) {
      ++out.skipped;
      continue;
    }
    out.polygons.push_back(std::move(polygon));
  }
  if (out.skipped > 0) spdlog::warn("xbd: skipped {} malformed building records", out.skipped);
  return out;
}

cv::Mat rasterize_labels(const std::vector<BuildingPolygon>& polygons, cv::Size size) {
  cv::Mat label(size, CV_8UC1, cv::Scalar(0));
  std::vector<double> crossings;
  for (const auto& polygon : polygons) {
    for (int y = 0; y < size.height; ++y) {
      const double yc = y + 0.5;
      crossings.clear();
      for (const auto& ring : polygon.rings) {
        for (std::size_t i = 0; i < ring.size(); ++i) {
          const auto& a = ring[i];
          const auto& b = ring[(i + 1) % ring.size()];
          if ((a.y <= yc) != (b.y <= yc)) crossings.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
        }
      }
      std::sort(crossings.begin(), crossings.end());
      auto* row = label.ptr<std::uint8_t>(y);
      for (std::size_t i = 0; i + 1 < crossings.size(); i += 2) {
        // Pixels whose centre x + 0.5 lies in [left, right).
        const int x0 = std::max(0, static_cast<int>(std::ceil(crossings[i] - 0.5)));
        const int x1 = std::min(size.width, static_cast<int>(std::ceil(crossings[i + 1] - 0.5)));
        for (int x = x0; x < x1; ++x) row[x] = static_cast<std::uint8_t>(polygon.grade);
      }
    }
  }
  return label;
}

}  // namespace noisypairs::xbd
