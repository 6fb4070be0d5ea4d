#include "hmvlm/metrics.hpp"

#include "hmvlm/traj_normalize.hpp"
#include "hmvlm/traj_refine.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <numeric>
#include <thread>

namespace hmvlm {

namespace {

std::optional<double> sorted_mean(std::vector<double> values)
{
  if (values.empty()) {
    return std::nullopt;
  }
  std::sort(values.begin(), values.end());
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::string format_optional(const std::optional<double>& v)
{
  if (!v) {
    return "nan";
  }
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", *v);
  return buf;
}

} // namespace

std::string_view to_string(RecordStatus status)
{
  switch (status) {
  case RecordStatus::Ok:
    return "ok";
  case RecordStatus::ParseFailure:
    return "parse_failure";
  case RecordStatus::LengthFailure:
    return "length_failure";
  }
  return "unknown";
}

RecordOutcome evaluate_record(const EvalRecord& record, const EvalOptions& options)
{
  RecordOutcome out;
  out.id = record.id;

  Trajectoryd prediction;
  if (record.raw_text) {
    try {
      prediction = parse_response(*record.raw_text, options.tokens).trajectory;
    } catch (const ParseError& e) {
      out.status = RecordStatus::ParseFailure;
      out.error = std::string(to_string(e.kind())) + ": " + e.what();
      return out;
    }
  } else if (record.pred) {
    prediction = *record.pred;
  } else {
    out.status = RecordStatus::ParseFailure;
    out.error = "record has neither raw_text nor pred";
    return out;
  }

  if (!is_complete(record.gt, options.target_len)) {
    out.status = RecordStatus::LengthFailure;
    out.error = "ground truth is not a complete trajectory";
    return out;
  }

  try {
    const Trajectoryd normalized = normalize_length(prediction, options.target_len);
    if (!normalized.all_finite()) {
      out.status = RecordStatus::LengthFailure;
      out.error = "prediction contains non-finite waypoints";
      return out;
    }
    out.raw = normalized;
    if (options.refine) {
      auto result = refine(normalized, options.refinement, options.target_len);
      out.refined = std::move(result.trajectory);
      out.outlier_indices = std::move(result.report.outlier_indices);
      out.keypoint_indices = std::move(result.report.keypoint_indices);
      out.smoothness_pre = result.report.smoothness_pre;
      out.smoothness_post = result.report.smoothness_post;
    } else {
      out.refined = normalized;
      out.smoothness_pre = smoothness(normalized);
      out.smoothness_post = out.smoothness_pre;
    }
    out.ade_3s = ade(*out.refined, record.gt, 3.0);
    out.ade_5s = ade(*out.refined, record.gt, 5.0);
  } catch (const EmptyPrediction& e) {
    out = RecordOutcome{};
    out.id = record.id;
    out.status = RecordStatus::LengthFailure;
    out.error = e.what();
  } catch (const std::invalid_argument& e) {
    out = RecordOutcome{};
    out.id = record.id;
    out.status = RecordStatus::LengthFailure;
    out.error = e.what();
  }
  return out;
}

EvalSummary aggregate(const std::vector<RecordOutcome>& outcomes)
{
  EvalSummary summary;
  summary.n_records = outcomes.size();
  std::vector<double> ade3, ade5, pre, post;
  for (const auto& o : outcomes) {
    switch (o.status) {
    case RecordStatus::ParseFailure:
      ++summary.n_parse_failures;
      continue;
    case RecordStatus::LengthFailure:
      ++summary.n_length_failures;
      continue;
    case RecordStatus::Ok:
      break;
    }
    ade3.push_back(o.ade_3s);
    ade5.push_back(o.ade_5s);
    pre.push_back(o.smoothness_pre);
    post.push_back(o.smoothness_post);
  }
  summary.ade_3s = sorted_mean(std::move(ade3));
  summary.ade_5s = sorted_mean(std::move(ade5));
  summary.mean_smoothness_pre = sorted_mean(std::move(pre));
  summary.mean_smoothness_post = sorted_mean(std::move(post));
  return summary;
}

std::vector<RecordOutcome> evaluate_all(const std::vector<EvalRecord>& records, const EvalOptions& options,
                                        std::size_t workers)
{
  options.refinement.validate();
  std::vector<RecordOutcome> outcomes(records.size());
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(records.size(), 1));
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i = next++; i < records.size(); i = next++) {
      outcomes[i] = evaluate_record(records[i], options);
    }
  };
  if (workers == 1) {
    work();
    return outcomes;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back(work);
  }
  pool.clear();
  return outcomes;
}

EvalSummary summarize(const std::vector<EvalRecord>& records, const RefinementConfig& cfg, std::size_t workers)
{
  EvalOptions options;
  options.refinement = cfg;
  return aggregate(evaluate_all(records, options, workers));
}

std::string format_summary_text(const EvalSummary& summary)
{
  std::string out;
  out += "ade_3s=" + format_optional(summary.ade_3s) + "\n";
  out += "ade_5s=" + format_optional(summary.ade_5s) + "\n";
  out += "n_records=" + std::to_string(summary.n_records) + "\n";
  out += "n_parse_failures=" + std::to_string(summary.n_parse_failures) + "\n";
  out += "n_length_failures=" + std::to_string(summary.n_length_failures) + "\n";
  out += "mean_smoothness_pre=" + format_optional(summary.mean_smoothness_pre) + "\n";
  out += "mean_smoothness_post=" + format_optional(summary.mean_smoothness_post) + "\n";
  return out;
}

} // namespace hmvlm
