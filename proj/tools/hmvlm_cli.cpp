// Batch front end: gen, parse, refine, eval, prompt.

#include "hmvlm/pipeline.hpp"
#include "hmvlm/structured_io.hpp"
#include "hmvlm/traj_normalize.hpp"
#include "hmvlm/traj_refine.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <memory>

namespace {

using hmvlm::RunConfig;

struct RefineFlags
{
  CLI::Option* target_len = nullptr;
  CLI::Option* z_threshold = nullptr;
  CLI::Option* min_window = nullptr;
  CLI::Option* max_window = nullptr;
  CLI::Option* poly_order = nullptr;
  CLI::Option* keypoint_angle = nullptr;
  CLI::Option* keypoint_weight = nullptr;

  long long target_len_value = hmvlm::kCompleteLength;
  hmvlm::RefinementConfig values;

  void add(CLI::App& app)
  {
    target_len = app.add_option("--target-len", target_len_value, "Waypoints per trajectory");
    z_threshold = app.add_option("--z-threshold", values.z_threshold, "Outlier z-score threshold");
    min_window = app.add_option("--min-window", values.min_window, "Smallest Savitzky-Golay window (odd)");
    max_window = app.add_option("--max-window", values.max_window, "Largest Savitzky-Golay window (odd)");
    poly_order = app.add_option("--poly-order", values.poly_order, "Savitzky-Golay polynomial order");
    keypoint_angle = app.add_option("--keypoint-angle", values.keypoint_angle_deg, "Key-point heading change, degrees");
    keypoint_weight = app.add_option("--keypoint-weight", values.keypoint_weight, "Weight on the original key-point");
  }

  // Only flags given on the command line override `cfg`.
  void apply(RunConfig& cfg) const
  {
    if (target_len->count()) cfg.target_len = target_len_value;
    if (z_threshold->count()) cfg.refinement.z_threshold = values.z_threshold;
    if (min_window->count()) cfg.refinement.min_window = values.min_window;
    if (max_window->count()) cfg.refinement.max_window = values.max_window;
    if (poly_order->count()) cfg.refinement.poly_order = values.poly_order;
    if (keypoint_angle->count()) cfg.refinement.keypoint_angle_deg = values.keypoint_angle_deg;
    if (keypoint_weight->count()) cfg.refinement.keypoint_weight = values.keypoint_weight;
  }
};

// Writes to `path`, or stdout when empty.
class Sink
{
public:
  explicit Sink(const std::string& path)
  {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) {
        throw std::runtime_error("cannot write " + path);
      }
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

template <typename Fn>
void for_each_json_line(const std::string& path, Fn&& fn)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      fn(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      std::cerr << path << ":" << number << ": skipped: " << e.what() << '\n';
    }
  }
}

std::string id_of(const nlohmann::json& j, std::size_t fallback)
{
  return j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : std::to_string(fallback);
}

int run_parse(const std::string& input, const std::string& output)
{
  Sink sink(output);
  std::size_t index = 0;
  for_each_json_line(input, [&](const nlohmann::json& j) {
    nlohmann::json out;
    out["id"] = id_of(j, index++);
    if (!j.contains("raw_text") || !j["raw_text"].is_string()) {
      throw std::invalid_argument("missing string field \"raw_text\"");
    }
    try {
      const auto resp = hmvlm::parse_response(j["raw_text"].get<std::string>());
      out["description"] = resp.description;
      out["decision"] = resp.decision;
      out["trajectory"] = hmvlm::trajectory_to_json(resp.trajectory);
    } catch (const hmvlm::ParseError& e) {
      out["error"] = {{"kind", std::string(hmvlm::to_string(e.kind()))},
                      {"position", e.position()},
                      {"fragment", e.fragment()},
                      {"message", e.what()}};
    }
    sink.stream() << out.dump() << '\n';
  });
  return 0;
}

int run_refine(const std::string& input, const std::string& output, const RunConfig& cfg)
{
  cfg.refinement.validate();
  Sink sink(output);
  std::size_t index = 0;
  for_each_json_line(input, [&](const nlohmann::json& j) {
    nlohmann::json out;
    out["id"] = id_of(j, index++);
    if (!j.contains("pred")) {
      throw std::invalid_argument("missing field \"pred\"");
    }
    try {
      const auto normalized = hmvlm::normalize_length(hmvlm::trajectory_from_json(j["pred"]), cfg.target_len);
      const auto result = hmvlm::refine(normalized, cfg.refinement, cfg.target_len);
      out["refined"] = hmvlm::trajectory_to_json(result.trajectory);
      out["outlier_indices"] = result.report.outlier_indices;
      out["keypoint_indices"] = result.report.keypoint_indices;
      out["window_used"] = result.report.window_used;
      out["smoothness_pre"] = result.report.smoothness_pre;
      out["smoothness_post"] = result.report.smoothness_post;
    } catch (const hmvlm::EmptyPrediction& e) {
      out["error"] = e.what();
    }
    sink.stream() << out.dump() << '\n';
  });
  return 0;
}

int run_prompt(const std::string& input, const std::string& output)
{
  Sink sink(output);
  std::size_t index = 0;
  for_each_json_line(input, [&](const nlohmann::json& j) {
    hmvlm::PromptSpec spec;
    if (j.contains("ego_history") && !j["ego_history"].is_null()) {
      std::vector<hmvlm::KinematicSample> samples;
      for (const auto& s : j["ego_history"]) {
        samples.push_back({s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>()});
      }
      spec.ego_history = hmvlm::EgoHistory(std::move(samples), j.value("span", 4.0));
    }
    if (j.contains("nav") && j["nav"].is_string()) {
      spec.nav_instruction = j["nav"].get<std::string>();
    }
    nlohmann::json out;
    out["id"] = id_of(j, index++);
    out["prompt"] = hmvlm::build_prompt(spec);
    sink.stream() << out.dump() << '\n';
  });
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Post-processing and evaluation for structured driving-model output"};
  app.require_subcommand(1);

  std::string input;
  std::string output;

  auto* gen = app.add_subcommand("gen", "Write a synthetic JSONL corpus");
  std::size_t n = 100;
  std::uint64_t gen_seed = 0;
  hmvlm::StubOptions stub;
  bool clean = false;
  gen->add_option("-n,--n", n, "Number of records");
  gen->add_option("--seed", gen_seed, "Random seed");
  gen->add_option("--output", output, "Output file (stdout when omitted)");
  gen->add_option("--noise", stub.noise_sigma, "Per-point noise sigma, meters");
  gen->add_option("--jitter", stub.jitter_sigma, "Extra noise on the last five points, meters");
  gen->add_option("--length-change", stub.length_change_prob, "Probability of a wrong-length prediction");
  gen->add_option("--malformed", stub.malformed_prob, "Probability of broken token structure");
  gen->add_flag("--clean", clean, "No corruption at all");

  auto* parse = app.add_subcommand("parse", "Structured model text to JSON");
  parse->add_option("--input", input, "JSONL with id and raw_text")->required();
  parse->add_option("--output", output, "Output JSONL (stdout when omitted)");

  auto* refine = app.add_subcommand("refine", "Normalize and refine waypoint lists");
  RefineFlags refine_flags;
  refine->add_option("--input", input, "JSONL with id and pred")->required();
  refine->add_option("--output", output, "Output JSONL (stdout when omitted)");
  refine_flags.add(*refine);

  auto* eval = app.add_subcommand("eval", "Full pipeline with summary metrics");
  RefineFlags eval_flags;
  std::string config_path;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  bool emit_plots = false;
  bool no_refine = false;
  auto* input_opt = eval->add_option("--input", input, "Input JSONL records");
  auto* output_opt = eval->add_option("--output", output, "Output directory");
  eval->add_option("--config", config_path, "key = value config file; flags override it");
  auto* workers_opt = eval->add_option("--workers", workers, "Worker threads");
  auto* seed_opt = eval->add_option("--seed", seed, "Seed (recorded; evaluation is deterministic)");
  auto* plots_opt = eval->add_flag("--emit-plots", emit_plots, "Write SVG overlays for flagged records");
  auto* no_refine_opt = eval->add_flag("--no-refine", no_refine, "Skip trajectory refinement");
  eval_flags.add(*eval);

  auto* prompt = app.add_subcommand("prompt", "Build five-view prompts from JSONL specs");
  prompt->add_option("--input", input, "JSONL with id, ego_history [[t,v,a],...], span, nav")->required();
  prompt->add_option("--output", output, "Output JSONL (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      if (clean) {
        stub = hmvlm::StubOptions::clean();
      }
      Sink sink(output);
      hmvlm::write_records(sink.stream(), hmvlm::stub_generate(n, gen_seed, stub));
      return 0;
    }
    if (parse->parsed()) {
      return run_parse(input, output);
    }
    if (refine->parsed()) {
      RunConfig cfg;
      refine_flags.apply(cfg);
      return run_refine(input, output, cfg);
    }
    if (prompt->parsed()) {
      return run_prompt(input, output);
    }
    if (eval->parsed()) {
      RunConfig cfg;
      if (!config_path.empty()) {
        hmvlm::apply_config_file(config_path, cfg);
      }
      if (input_opt->count()) cfg.input = input;
      if (output_opt->count()) cfg.output = output;
      if (workers_opt->count()) cfg.workers = workers;
      if (seed_opt->count()) cfg.seed = seed;
      if (plots_opt->count()) cfg.emit_plots = emit_plots;
      if (no_refine_opt->count()) cfg.refine = !no_refine;
      eval_flags.apply(cfg);
      hmvlm::run_pipeline(cfg, std::cout);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
