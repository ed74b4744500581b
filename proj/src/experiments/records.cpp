#include "noisypairs/experiments/records.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace noisypairs::experiments {

std::string ConfigKey::slug() const {
  char buf[160];
  if (r_img) {
    std::snprintf(buf, sizeof buf, "%s_%s_rp%.2f_ri%.2f_%s_s%llu", dataset.c_str(), loss.c_str(), r_pairs, *r_img,
                  mode.c_str(), static_cast<unsigned long long>(seed));
  } else {
    std::snprintf(buf, sizeof buf, "%s_%s_rp%.2f_%s_s%llu", dataset.c_str(), loss.c_str(), r_pairs, mode.c_str(),
                  static_cast<unsigned long long>(seed));
  }
  return buf;
}

Json ConfigKey::to_json() const {
  return Json{{"dataset", dataset}, {"loss", loss},
              {"r_pairs", r_pairs}, {"r_img", r_img ? Json(*r_img) : Json(nullptr)},
              {"mode", mode},       {"seed", seed}};
}

ConfigKey ConfigKey::from_json(const Json& j) {
  ConfigKey k;
  k.dataset = j.at("dataset");
  k.loss = j.at("loss");
  k.r_pairs = j.at("r_pairs");
  if (j.contains("r_img") && !j.at("r_img").is_null()) k.r_img = j.at("r_img").get<double>();
  k.mode = j.at("mode");
  k.seed = j.at("seed");
  return k;
}

void ConfigKey::validate() const {
  if (dataset != "vts" && dataset != "xbd") throw std::invalid_argument("dataset must be vts or xbd: " + dataset);
  if (loss != "moco" && loss != "within_image" && loss != "cross_image") {
    throw std::invalid_argument("unknown loss: " + loss);
  }
  if (mode != "noisy" && mode != "mere_exposure") throw std::invalid_argument("unknown pairing mode: " + mode);
  if (!(r_pairs >= 0.0 && r_pairs <= 1.0)) throw std::invalid_argument("r_pairs outside [0, 1]");
  if ((dataset == "vts") != r_img.has_value()) throw std::invalid_argument("r_img is required for vts and only vts");
  if (r_img && !(*r_img >= 0.0 && *r_img <= 1.0)) throw std::invalid_argument("r_img outside [0, 1]");
}

Json ExperimentRecord::to_json() const {
  Json per = Json::array();
  for (const auto& f : per_class_f1) per.push_back(f ? Json(*f) : Json(nullptr));
  return Json{{"key", key.to_json()},   {"macro_f1", macro_f1},         {"per_class_f1", per},
              {"checkpoint", checkpoint}, {"wall_clock_s", wall_clock_s}, {"extra", extra}};
}

ExperimentRecord ExperimentRecord::from_json(const Json& j) {
  ExperimentRecord r;
  r.key = ConfigKey::from_json(j.at("key"));
  r.macro_f1 = j.at("macro_f1");
  for (const auto& f : j.at("per_class_f1")) {
    r.per_class_f1.push_back(f.is_null() ? std::nullopt : std::optional<double>(f.get<double>()));
  }
  r.checkpoint = j.value("checkpoint", "");
  r.wall_clock_s = j.value("wall_clock_s", 0.0);
  r.extra = j.value("extra", Json::object());
  return r;
}

std::vector<ExperimentRecord> read_records(const std::filesystem::path& jsonl) {
  std::ifstream in(jsonl);
  if (!in) throw std::runtime_error("cannot open " + jsonl.string());
  std::vector<ExperimentRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    out.push_back(ExperimentRecord::from_json(Json::parse(line)));
  }
  return out;
}

void write_records(const std::filesystem::path& jsonl, const std::vector<ExperimentRecord>& records) {
  std::ostringstream s;
  for (const auto& r : records) s << r.to_json().dump() << '\n';
  write_text_atomic(jsonl, s.str());
}

}  // namespace noisypairs::experiments
