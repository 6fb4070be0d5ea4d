#include "hmvlm/pipeline.hpp"

#include <fstream>
#include <istream>
#include <ostream>

namespace hmvlm {

nlohmann::json trajectory_to_json(const Trajectoryd& traj)
{
  auto out = nlohmann::json::array();
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    out.push_back({traj.points()(i, 0), traj.points()(i, 1)});
  }
  return out;
}

Trajectoryd trajectory_from_json(const nlohmann::json& j)
{
  if (!j.is_array()) {
    throw std::invalid_argument("trajectory must be an array of [x, y] pairs");
  }
  Trajectoryd::Points pts(static_cast<Eigen::Index>(j.size()), 2);
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& p = j[i];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw std::invalid_argument("waypoint " + std::to_string(i) + " is not a numeric [x, y] pair");
    }
    pts(static_cast<Eigen::Index>(i), 0) = p[0].get<double>();
    pts(static_cast<Eigen::Index>(i), 1) = p[1].get<double>();
  }
  return Trajectoryd(std::move(pts));
}

nlohmann::json record_to_json(const EvalRecord& record)
{
  nlohmann::json j;
  j["id"] = record.id;
  if (record.raw_text) {
    j["raw_text"] = *record.raw_text;
  }
  if (record.pred) {
    j["pred"] = trajectory_to_json(*record.pred);
  }
  j["gt"] = trajectory_to_json(record.gt);
  if (record.ego_history) {
    auto hist = nlohmann::json::array();
    for (const auto& s : record.ego_history->samples()) {
      hist.push_back({s.t, s.velocity, s.acceleration});
    }
    j["ego_history"] = std::move(hist);
  }
  if (record.nav_instruction) {
    j["nav"] = *record.nav_instruction;
  }
  return j;
}

namespace {

EgoHistory history_from_json(const nlohmann::json& j)
{
  if (!j.is_array()) {
    throw std::invalid_argument("ego_history must be an array of [t, v, a] triples");
  }
  std::vector<KinematicSample> samples;
  for (const auto& s : j) {
    if (!s.is_array() || s.size() != 3 || !s[0].is_number() || !s[1].is_number() || !s[2].is_number()) {
      throw std::invalid_argument("ego_history entries must be numeric [t, v, a] triples");
    }
    samples.push_back({s[0].get<double>(), s[1].get<double>(), s[2].get<double>()});
  }
  return EgoHistory(std::move(samples));
}

std::optional<std::string> optional_string(const nlohmann::json& j, const char* key)
{
  if (!j.contains(key) || j[key].is_null()) {
    return std::nullopt;
  }
  if (!j[key].is_string()) {
    throw std::invalid_argument(std::string("\"") + key + "\" must be a string");
  }
  return j[key].get<std::string>();
}

} // namespace

EvalRecord record_from_json(const nlohmann::json& j)
{
  if (!j.is_object()) {
    throw std::invalid_argument("record must be a JSON object");
  }
  if (!j.contains("id") || !j["id"].is_string()) {
    throw std::invalid_argument("missing string field \"id\"");
  }
  if (!j.contains("gt")) {
    throw std::invalid_argument("missing field \"gt\"");
  }
  EvalRecord r;
  r.id = j["id"].get<std::string>();
  r.gt = trajectory_from_json(j["gt"]);
  r.raw_text = optional_string(j, "raw_text");
  if (j.contains("pred") && !j["pred"].is_null()) {
    r.pred = trajectory_from_json(j["pred"]);
  }
  if (j.contains("ego_history") && !j["ego_history"].is_null()) {
    r.ego_history = history_from_json(j["ego_history"]);
  }
  r.nav_instruction = optional_string(j, "nav");
  if (!r.raw_text && !r.pred) {
    throw std::invalid_argument("record needs \"raw_text\" or \"pred\"");
  }
  return r;
}

LoadResult read_records(std::istream& in)
{
  LoadResult result;
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      result.records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      result.diagnostics.push_back({number, std::string("invalid JSON: ") + e.what()});
    } catch (const std::invalid_argument& e) {
      result.diagnostics.push_back({number, e.what()});
    }
  }
  return result;
}

LoadResult load_records(const std::filesystem::path& path)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  return read_records(in);
}

void write_records(std::ostream& out, const std::vector<EvalRecord>& records)
{
  for (const auto& r : records) {
    out << record_to_json(r).dump() << '\n';
  }
}

nlohmann::json summary_to_json(const EvalSummary& summary)
{
  const auto opt = [](const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); };
  nlohmann::json j;
  j["ade_3s"] = opt(summary.ade_3s);
  j["ade_5s"] = opt(summary.ade_5s);
  j["n_records"] = summary.n_records;
  j["n_parse_failures"] = summary.n_parse_failures;
  j["n_length_failures"] = summary.n_length_failures;
  j["mean_smoothness_pre"] = opt(summary.mean_smoothness_pre);
  j["mean_smoothness_post"] = opt(summary.mean_smoothness_post);
  return j;
}

nlohmann::json outcome_to_json(const RecordOutcome& o)
{
  nlohmann::json j;
  j["id"] = o.id;
  j["status"] = std::string(to_string(o.status));
  if (o.status != RecordStatus::Ok) {
    j["error"] = o.error;
    return j;
  }
  j["ade_3s"] = o.ade_3s;
  j["ade_5s"] = o.ade_5s;
  j["smoothness_pre"] = o.smoothness_pre;
  j["smoothness_post"] = o.smoothness_post;
  j["outlier_indices"] = o.outlier_indices;
  j["keypoint_indices"] = o.keypoint_indices;
  j["refined"] = trajectory_to_json(*o.refined);
  return j;
}

} // namespace hmvlm
