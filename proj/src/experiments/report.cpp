#include "noisypairs/experiments/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "noisypairs/common/json_io.hpp"

namespace fs = std::filesystem;

namespace noisypairs::experiments {
namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : ""; }

std::string series_name(const std::optional<double>& r_img) { return r_img ? "r_img=" + num(*r_img, 2) : "all"; }

class Svg {
 public:
  Svg(int w, int h) { s_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n"
                         << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"; }
  void line(double x1, double y1, double x2, double y2, const std::string& stroke, double width = 1.0) {
    s_ << "<line x1=\"" << num(x1, 1) << "\" y1=\"" << num(y1, 1) << "\" x2=\"" << num(x2, 1) << "\" y2=\""
       << num(y2, 1) << "\" stroke=\"" << stroke << "\" stroke-width=\"" << num(width, 1) << "\"/>\n";
  }
  void text(double x, double y, const std::string& t, const std::string& anchor = "middle", int size = 12) {
    s_ << "<text x=\"" << num(x, 1) << "\" y=\"" << num(y, 1) << "\" font-family=\"sans-serif\" font-size=\"" << size
       << "\" text-anchor=\"" << anchor << "\">" << t << "</text>\n";
  }
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& stroke) {
    s_ << "<polyline fill=\"none\" stroke=\"" << stroke << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) s_ << (i ? " " : "") << num(pts[i].first, 1) << ',' << num(pts[i].second, 1);
    s_ << "\"/>\n";
  }
  void circle(double x, double y, double r, const std::string& fill) {
    s_ << "<circle cx=\"" << num(x, 1) << "\" cy=\"" << num(y, 1) << "\" r=\"" << num(r, 1) << "\" fill=\"" << fill
       << "\"/>\n";
  }
  void rect(double x, double y, double w, double h, const std::string& fill) {
    s_ << "<rect x=\"" << num(x, 1) << "\" y=\"" << num(y, 1) << "\" width=\"" << num(w, 1) << "\" height=\""
       << num(h, 1) << "\" fill=\"" << fill << "\"/>\n";
  }
  std::string str() const { return s_.str() + "</svg>\n"; }

 private:
  std::ostringstream s_;
};

struct Frame {
  double left = 60, right = 150, top = 40, bottom = 50, width = 560, height = 360;
  double x0, x1, y0, y1;
  double px(double x) const { return left + (x - x0) / (x1 - x0) * (width - left - right); }
  double py(double y) const { return height - bottom - (y - y0) / (y1 - y0) * (height - top - bottom); }
};

void axes(Svg& svg, const Frame& f, const std::string& title, const std::string& xlabel, const std::string& ylabel,
          const std::vector<double>& xticks, int yticks) {
  svg.text(f.width / 2, 22, title, "middle", 14);
  svg.line(f.px(f.x0), f.py(f.y0), f.px(f.x1), f.py(f.y0), "black");
  svg.line(f.px(f.x0), f.py(f.y0), f.px(f.x0), f.py(f.y1), "black");
  for (double x : xticks) {
    svg.line(f.px(x), f.py(f.y0), f.px(x), f.py(f.y0) + 5, "black");
    svg.text(f.px(x), f.py(f.y0) + 18, num(x, 2));
  }
  for (int i = 0; i <= yticks; ++i) {
    const double y = f.y0 + (f.y1 - f.y0) * i / yticks;
    svg.line(f.px(f.x0) - 5, f.py(y), f.px(f.x0), f.py(y), "black");
    svg.line(f.px(f.x0), f.py(y), f.px(f.x1), f.py(y), "#dddddd", 0.5);
    svg.text(f.px(f.x0) - 8, f.py(y) + 4, num(y, 2), "end");
  }
  svg.text((f.px(f.x0) + f.px(f.x1)) / 2, f.height - 12, xlabel);
  svg.text(16, f.height / 2, ylabel);
}

void legend(Svg& svg, const Frame& f, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = f.top + 10 + 20.0 * i;
    svg.rect(f.width - f.right + 20, y - 9, 12, 12, kPalette[i % 7]);
    svg.text(f.width - f.right + 38, y + 2, names[i], "start");
  }
}

fs::path write(const fs::path& path, const std::string& text) {
  write_text_atomic(path, text);
  return path;
}

}  // namespace

std::vector<fs::path> render_report(const std::vector<ExperimentRecord>& records, const DeltaReport& deltas,
                                    const fs::path& out_dir) {
  if (records.empty()) throw std::invalid_argument("no records to report");
  std::vector<ExperimentRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.key < b.key; });
  std::vector<fs::path> files;

  std::ostringstream csv;
  csv << "dataset,loss,mode,r_pairs,r_img,seed,macro_f1,per_class_f1,wall_clock_s\n";
  for (const auto& r : sorted) {
    std::string per;
    for (std::size_t i = 0; i < r.per_class_f1.size(); ++i) per += (i ? ";" : "") + opt(r.per_class_f1[i]);
    csv << r.key.dataset << ',' << r.key.loss << ',' << r.key.mode << ',' << num(r.key.r_pairs, 2) << ','
        << (r.key.r_img ? num(*r.key.r_img, 2) : "") << ',' << r.key.seed << ',' << num(r.macro_f1) << ',' << per
        << ',' << num(r.wall_clock_s, 1) << '\n';
  }
  files.push_back(write(out_dir / "results.csv", csv.str()));

  std::ostringstream dcsv;
  dcsv << "dataset,loss,r_pairs,r_img,seed,noisy_f1,mere_exposure_f1,delta_pp\n";
  for (const auto& d : deltas.cells) {
    dcsv << d.dataset << ',' << d.loss << ',' << num(d.r_pairs, 2) << ',' << (d.r_img ? num(*d.r_img, 2) : "") << ','
         << d.seed << ',' << num(d.noisy_f1) << ',' << num(d.mere_exposure_f1) << ',' << num(d.delta_pp, 3) << '\n';
  }
  files.push_back(write(out_dir / "deltas.csv", dcsv.str()));

  std::ostringstream scsv;
  scsv << "loss,mean_pp,stddev_pp,cells\n";
  for (const auto& [loss, s] : deltas.by_loss) scsv << loss << ',' << num(s.mean, 3) << ',' << num(s.stddev, 3) << ',' << s.cells << '\n';
  files.push_back(write(out_dir / "delta_stats.csv", scsv.str()));

  // Line plots: mean macro F1 over seeds, x = r_pairs, one series per r_img.
  using PlotKey = std::tuple<std::string, std::string, std::string>;
  std::map<PlotKey, std::map<std::optional<double>, std::map<double, std::vector<double>>>> lines;
  for (const auto& r : sorted) lines[{r.key.dataset, r.key.loss, r.key.mode}][r.key.r_img][r.key.r_pairs].push_back(r.macro_f1);
  for (const auto& [pk, series] : lines) {
    const auto& [dataset, loss, mode] = pk;
    double lo = 1.0, hi = 0.0;
    std::set<double> xs;
    for (const auto& [ri, pts] : series)
      for (const auto& [rp, v] : pts) {
        xs.insert(rp);
        for (double f : v) lo = std::min(lo, f), hi = std::max(hi, f);
      }
    Frame f;
    f.x0 = 0.0;
    f.x1 = 1.0;
    f.y0 = std::max(0.0, std::floor(lo * 10 - 0.5) / 10);
    f.y1 = std::min(1.0, std::ceil(hi * 10 + 0.5) / 10);
    if (f.y1 <= f.y0) f.y1 = f.y0 + 0.1;
    Svg svg(static_cast<int>(f.width), static_cast<int>(f.height));
    axes(svg, f, dataset + " / " + loss + " / " + mode, "noisy pairs rate r_pairs", "F1", {0, 0.25, 0.5, 0.75, 1.0}, 5);
    std::vector<std::string> names;
    int i = 0;
    for (const auto& [ri, pts] : series) {
      std::vector<std::pair<double, double>> xy;
      for (const auto& [rp, v] : pts) {
        double m = 0;
        for (double x : v) m += x;
        xy.emplace_back(f.px(rp), f.py(m / v.size()));
      }
      if (xy.size() > 1) svg.polyline(xy, kPalette[i % 7]);
      for (const auto& [x, y] : xy) svg.circle(x, y, 3.5, kPalette[i % 7]);
      names.push_back(series_name(ri));
      ++i;
    }
    legend(svg, f, names);
    files.push_back(write(out_dir / ("f1_" + dataset + "_" + loss + "_" + mode + ".svg"), svg.str()));
  }

  // Delta bars: grouped by r_pairs, one bar per r_img, averaged over seeds.
  std::map<std::pair<std::string, std::string>, std::map<double, std::map<std::optional<double>, std::vector<double>>>> bars;
  for (const auto& d : deltas.cells) bars[{d.dataset, d.loss}][d.r_pairs][d.r_img].push_back(d.delta_pp);
  for (const auto& [bk, groups] : bars) {
    std::set<std::optional<double>> imgs;
    double lo = 0, hi = 0;
    for (const auto& [rp, by_img] : groups)
      for (const auto& [ri, v] : by_img) {
        imgs.insert(ri);
        for (double x : v) lo = std::min(lo, x), hi = std::max(hi, x);
      }
    Frame f;
    f.x0 = 0;
    f.x1 = static_cast<double>(groups.size());
    f.y0 = std::floor(lo) - 1;
    f.y1 = std::ceil(hi) + 1;
    Svg svg(static_cast<int>(f.width), static_cast<int>(f.height));
    axes(svg, f, bk.first + " / " + bk.second + ": noisy minus mere exposure", "noisy pairs rate r_pairs",
         "delta F1 (pp)", {}, 4);
    svg.line(f.px(f.x0), f.py(0), f.px(f.x1), f.py(0), "black");
    int g = 0;
    const double slot = 0.8 / static_cast<double>(imgs.size());
    for (const auto& [rp, by_img] : groups) {
      svg.text(f.px(g + 0.5), f.py(f.y0) + 18, num(rp, 2));
      int k = 0;
      for (const auto& ri : imgs) {
        const auto it = by_img.find(ri);
        if (it != by_img.end()) {
          double m = 0;
          for (double x : it->second) m += x;
          m /= it->second.size();
          const double x = f.px(g + 0.1 + k * slot);
          svg.rect(x, std::min(f.py(m), f.py(0)), f.px(slot) - f.px(0), std::abs(f.py(m) - f.py(0)), kPalette[k % 7]);
        }
        ++k;
      }
      ++g;
    }
    std::vector<std::string> names;
    for (const auto& ri : imgs) names.push_back(series_name(ri));
    legend(svg, f, names);
    files.push_back(write(out_dir / ("delta_" + bk.first + "_" + bk.second + ".svg"), svg.str()));
  }
  return files;
}

}  // namespace noisypairs::experiments
