#include "hmvlm/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace hmvlm {

namespace {

std::string trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

bool parse_bool(const std::string& key, const std::string& v)
{
  if (v == "true" || v == "1" || v == "yes" || v == "on") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off") {
    return false;
  }
  throw std::invalid_argument("config key " + key + ": expected a boolean, got \"" + v + "\"");
}

template <typename T>
T parse_number(const std::string& key, const std::string& v)
{
  std::istringstream in(v);
  T value{};
  in >> value;
  if (!in || !(in >> std::ws).eof()) {
    throw std::invalid_argument("config key " + key + ": cannot parse \"" + v + "\"");
  }
  return value;
}

std::string file_stem_for(const std::string& id)
{
  std::string out;
  for (const char c : id) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    out += keep ? c : '_';
  }
  return out.empty() ? "record" : out;
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write failed for " + path.string());
  }
}

} // namespace

void RunConfig::validate() const
{
  if (input.empty() || output.empty()) {
    throw std::invalid_argument("input and output paths must be set");
  }
  if (workers < 1) {
    throw std::invalid_argument("worker count must be >= 1");
  }
  if (target_len < 1) {
    throw std::invalid_argument("target_len must be >= 1");
  }
  refinement.validate();
}

void apply_config_text(std::istream& in, RunConfig& cfg)
{
  std::string line;
  for (std::size_t number = 1; std::getline(in, line); ++number) {
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    if (trim(line).empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(number) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key == "input") {
      cfg.input = value;
    } else if (key == "output") {
      cfg.output = value;
    } else if (key == "workers") {
      cfg.workers = parse_number<std::size_t>(key, value);
    } else if (key == "seed") {
      cfg.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "target_len") {
      cfg.target_len = parse_number<Eigen::Index>(key, value);
    } else if (key == "z_threshold") {
      cfg.refinement.z_threshold = parse_number<double>(key, value);
    } else if (key == "min_window") {
      cfg.refinement.min_window = parse_number<int>(key, value);
    } else if (key == "max_window") {
      cfg.refinement.max_window = parse_number<int>(key, value);
    } else if (key == "poly_order") {
      cfg.refinement.poly_order = parse_number<int>(key, value);
    } else if (key == "keypoint_angle") {
      cfg.refinement.keypoint_angle_deg = parse_number<double>(key, value);
    } else if (key == "keypoint_weight") {
      cfg.refinement.keypoint_weight = parse_number<double>(key, value);
    } else if (key == "emit_plots") {
      cfg.emit_plots = parse_bool(key, value);
    } else if (key == "refine") {
      cfg.refine = parse_bool(key, value);
    } else {
      throw std::invalid_argument("config line " + std::to_string(number) + ": unknown key \"" + key + "\"");
    }
  }
}

void apply_config_file(const std::filesystem::path& path, RunConfig& cfg)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config " + path.string());
  }
  apply_config_text(in, cfg);
}

std::string render_overlay_svg(const RecordOutcome& outcome, const Trajectoryd& gt)
{
  constexpr double kSize = 480.0;
  constexpr double kMargin = 24.0;

  std::vector<const Trajectoryd*> layers{&gt};
  if (outcome.raw) {
    layers.push_back(&*outcome.raw);
  }
  if (outcome.refined) {
    layers.push_back(&*outcome.refined);
  }
  double min_x = 0.0, max_x = 0.0, min_y = 0.0, max_y = 0.0;
  for (const auto* t : layers) {
    if (t->empty()) {
      continue;
    }
    min_x = std::min(min_x, t->points().col(0).minCoeff());
    max_x = std::max(max_x, t->points().col(0).maxCoeff());
    min_y = std::min(min_y, t->points().col(1).minCoeff());
    max_y = std::max(max_y, t->points().col(1).maxCoeff());
  }
  const double extent = std::max({max_x - min_x, max_y - min_y, 1.0});
  const double scale = (kSize - 2.0 * kMargin) / extent;
  // BEV: x forward drawn upwards, y left drawn leftwards.
  const auto px = [&](double y) { return kMargin + (max_y - y) * scale; };
  const auto py = [&](double x) { return kSize - kMargin - (x - min_x) * scale; };

  char buf[160];
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"480\" viewBox=\"0 0 480 480\">\n";
  svg += "<rect width=\"480\" height=\"480\" fill=\"white\"/>\n";
  svg += "<text x=\"8\" y=\"16\" font-family=\"monospace\" font-size=\"12\">" + file_stem_for(outcome.id) + "</text>\n";
  const auto polyline = [&](const Trajectoryd& t, const char* colour, const char* dash) {
    std::string pts;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%s%.2f,%.2f", i ? " " : "", px(t.points()(i, 1)), py(t.points()(i, 0)));
      pts += buf;
    }
    svg += std::string("<polyline fill=\"none\" stroke=\"") + colour + "\" stroke-width=\"2\" stroke-dasharray=\"" +
           dash + "\" points=\"" + pts + "\"/>\n";
  };
  const auto markers = [&](const Trajectoryd& t, const std::vector<Eigen::Index>& idx, const char* colour) {
    for (const auto i : idx) {
      std::snprintf(buf, sizeof(buf), "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"4\" fill=\"none\" stroke=\"%s\"/>\n",
                    px(t.points()(i, 1)), py(t.points()(i, 0)), colour);
      svg += buf;
    }
  };
  polyline(gt, "#888888", "6 3");
  if (outcome.raw) {
    polyline(*outcome.raw, "#d62728", "none");
    markers(*outcome.raw, outcome.outlier_indices, "#ff7f0e");
  }
  if (outcome.refined) {
    polyline(*outcome.refined, "#1f77b4", "none");
    markers(*outcome.refined, outcome.keypoint_indices, "#2ca02c");
  }
  svg += "</svg>\n";
  return svg;
}

EvalSummary run_pipeline(const RunConfig& cfg, std::ostream& log)
{
  cfg.validate();
  const LoadResult loaded = load_records(cfg.input);
  for (const auto& d : loaded.diagnostics) {
    log << cfg.input.string() << ":" << d.line << ": skipped: " << d.message << '\n';
  }

  EvalOptions options;
  options.refinement = cfg.refinement;
  options.refine = cfg.refine;
  options.target_len = cfg.target_len;
  const auto outcomes = evaluate_all(loaded.records, options, cfg.workers);
  const EvalSummary summary = aggregate(outcomes);

  std::error_code ec;
  std::filesystem::create_directories(cfg.output, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory " + cfg.output.string() + ": " + ec.message());
  }

  std::string diagnostics;
  for (const auto& o : outcomes) {
    diagnostics += outcome_to_json(o).dump();
    diagnostics += '\n';
  }
  write_file(cfg.output / "records.jsonl", diagnostics);
  write_file(cfg.output / "summary.json", summary_to_json(summary).dump(2) + "\n");
  const std::string text = format_summary_text(summary);
  write_file(cfg.output / "summary.txt", text);

  if (cfg.emit_plots) {
    const auto plots = cfg.output / "plots";
    std::filesystem::create_directories(plots, ec);
    if (ec) {
      throw std::runtime_error("cannot create " + plots.string() + ": " + ec.message());
    }
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
      const auto& o = outcomes[i];
      if (o.status != RecordStatus::Ok || (o.outlier_indices.empty() && o.keypoint_indices.empty())) {
        continue;
      }
      char prefix[16];
      std::snprintf(prefix, sizeof(prefix), "%06zu_", i);
      write_file(plots / (prefix + file_stem_for(o.id) + ".svg"), render_overlay_svg(o, loaded.records[i].gt));
    }
  }

  log << text;
  return summary;
}

} // namespace hmvlm
