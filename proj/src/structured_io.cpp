#include "hmvlm/structured_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>
#include <vector>

namespace hmvlm {

namespace {

constexpr std::size_t kNotFound = std::string_view::npos;

bool is_space(char c)
{
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string format_fixed(double value, int decimals)
{
  char buf[64];
  const int n = std::snprintf(buf, sizeof(buf), "%.*f", decimals, value);
  return std::string(buf, static_cast<std::size_t>(n));
}

void replace_all(std::string& s, std::string_view from, std::string_view to)
{
  for (std::size_t pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size())) {
    s.replace(pos, from.size(), to);
  }
}

class WaypointScanner
{
public:
  WaypointScanner(std::string_view text, std::size_t offset) : text_(text), offset_(offset) {}

  Trajectoryd scan()
  {
    std::vector<Waypointd> pts;
    skip_space();
    if (pos_ == text_.size()) {
      return Trajectoryd::from_points(pts);
    }
    while (true) {
      pts.push_back(pair());
      skip_space();
      if (pos_ == text_.size()) {
        break;
      }
      if (text_[pos_] != ',') {
        fail(pos_);
      }
      ++pos_;
      skip_space();
    }
    return Trajectoryd::from_points(pts);
  }

private:
  Waypointd pair()
  {
    const std::size_t start = pos_;
    if (!consume('(')) {
      fail(start);
    }
    const double x = number(start);
    skip_space();
    if (!consume(',')) {
      fail(start);
    }
    const double y = number(start);
    skip_space();
    if (!consume(')')) {
      fail(start);
    }
    return {x, y};
  }

  double number(std::size_t element_start)
  {
    skip_space();
    double value = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr == first || !std::isfinite(value)) {
      fail(element_start);
    }
    pos_ += static_cast<std::size_t>(ptr - first);
    return value;
  }

  bool consume(char c)
  {
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void skip_space()
  {
    while (pos_ < text_.size() && is_space(text_[pos_])) {
      ++pos_;
    }
  }

  [[noreturn]] void fail(std::size_t element_start) const
  {
    const std::size_t close = text_.find(')', element_start);
    const std::size_t end = close == kNotFound ? text_.size() : close + 1;
    std::string fragment(text_.substr(element_start, end - element_start));
    throw ParseError(ParseErrorKind::MalformedTrajectory, offset_ + element_start, fragment,
                     "malformed trajectory at \"" + fragment + "\"");
  }

  std::string_view text_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

std::optional<std::size_t> find_any_token(std::string_view segment, const SpecialTokens& tokens)
{
  std::optional<std::size_t> first;
  for (const auto tok : tokens.all()) {
    const std::size_t at = segment.find(tok);
    if (at != kNotFound && (!first || at < *first)) {
      first = at;
    }
  }
  return first;
}

} // namespace

void SpecialTokens::validate() const
{
  std::set<std::string_view> seen;
  for (const auto tok : all()) {
    if (tok.empty()) {
      throw std::invalid_argument("special tokens must be non-empty");
    }
    if (!seen.insert(tok).second) {
      throw std::invalid_argument("special tokens must be pairwise distinct");
    }
  }
}

ParseError::ParseError(ParseErrorKind kind, std::size_t position, std::string fragment, const std::string& what)
  : std::runtime_error(what), kind_(kind), position_(position), fragment_(std::move(fragment))
{
}

std::string_view to_string(ParseErrorKind kind)
{
  switch (kind) {
  case ParseErrorKind::MalformedStructure:
    return "malformed_structure";
  case ParseErrorKind::MalformedTrajectory:
    return "malformed_trajectory";
  }
  return "unknown";
}

std::string format_waypoints(const Trajectoryd& traj)
{
  std::string out;
  for (Eigen::Index i = 0; i < traj.size(); ++i) {
    if (i > 0) {
      out += ',';
    }
    out += '(';
    out += format_fixed(traj.points()(i, 0), 4);
    out += ',';
    out += format_fixed(traj.points()(i, 1), 4);
    out += ')';
  }
  return out;
}

Trajectoryd parse_waypoints(std::string_view text, std::size_t offset)
{
  return WaypointScanner(text, offset).scan();
}

std::string serialize_response(const StructuredResponse& resp, const SpecialTokens& tokens)
{
  tokens.validate();
  if (find_any_token(resp.description, tokens)) {
    throw std::invalid_argument("description contains a special token literal");
  }
  if (find_any_token(resp.decision, tokens)) {
    throw std::invalid_argument("decision contains a special token literal");
  }
  std::string out;
  out += tokens.desc_start;
  out += resp.description;
  out += tokens.desc_end;
  out += tokens.deci_start;
  out += resp.decision;
  out += tokens.deci_end;
  out += tokens.traj_start;
  out += format_waypoints(resp.trajectory);
  out += tokens.traj_end;
  return out;
}

StructuredResponse parse_response(std::string_view text, const SpecialTokens& tokens)
{
  tokens.validate();
  const auto literals = tokens.all();

  // First occurrence of every token, which must appear in stream order without overlap.
  std::array<std::size_t, 6> at{};
  for (std::size_t k = 0; k < literals.size(); ++k) {
    at[k] = text.find(literals[k]);
    if (at[k] == kNotFound) {
      throw ParseError(ParseErrorKind::MalformedStructure, text.size(), std::string(literals[k]),
                       "malformed structure: missing " + std::string(literals[k]));
    }
  }
  for (std::size_t k = 1; k < literals.size(); ++k) {
    if (at[k] < at[k - 1] + literals[k - 1].size()) {
      throw ParseError(ParseErrorKind::MalformedStructure, at[k], std::string(literals[k]),
                       "malformed structure: " + std::string(literals[k]) + " out of order at offset " +
                         std::to_string(at[k]));
    }
  }

  const auto segment = [&](std::size_t open) {
    const std::size_t begin = at[open] + literals[open].size();
    return std::pair{begin, text.substr(begin, at[open + 1] - begin)};
  };
  const auto [desc_begin, desc] = segment(0);
  const auto [deci_begin, deci] = segment(2);
  const auto [traj_begin, traj] = segment(4);

  for (const auto& [begin, body] : {std::pair{desc_begin, desc}, std::pair{deci_begin, deci}}) {
    if (const auto stray = find_any_token(body, tokens)) {
      throw ParseError(ParseErrorKind::MalformedStructure, begin + *stray, "",
                       "malformed structure: repeated token at offset " + std::to_string(begin + *stray));
    }
  }

  StructuredResponse resp;
  resp.description = std::string(desc);
  resp.decision = std::string(deci);
  resp.trajectory = parse_waypoints(traj, traj_begin);
  return resp;
}

std::string_view to_string(CameraView view)
{
  switch (view) {
  case CameraView::Front:
    return "front";
  case CameraView::FrontLeft:
    return "front-left";
  case CameraView::FrontRight:
    return "front-right";
  case CameraView::SideLeft:
    return "side-left";
  case CameraView::SideRight:
    return "side-right";
  }
  return "unknown";
}

std::string format_kinematics(const KinematicSample& sample)
{
  // Round first so tiny negatives do not render as "-0.00".
  const auto two = [](double v) {
    double r = std::round(v * 100.0) / 100.0;
    if (r == 0.0) {
      r = 0.0;
    }
    return format_fixed(r, 2);
  };
  return "t=" + two(sample.t) + "s v=" + two(sample.velocity) + "m/s a=" + two(sample.acceleration) + "m/s²";
}

std::string build_prompt(const PromptSpec& spec)
{
  std::string out;
  for (const CameraView view : PromptSpec::view_order) {
    std::string slot = spec.templates.view_slot;
    replace_all(slot, "{view}", to_string(view));
    out += slot;
    out += '\n';
  }
  if (!spec.ego_history.empty()) {
    if (!spec.templates.history_header.empty()) {
      out += spec.templates.history_header;
      out += '\n';
    }
    for (const auto& sample : spec.ego_history.samples()) {
      out += format_kinematics(sample);
      out += '\n';
    }
  }
  if (spec.nav_instruction) {
    std::string nav = spec.templates.navigation;
    replace_all(nav, "{instruction}", *spec.nav_instruction);
    out += nav;
    out += '\n';
  }
  return out;
}

} // namespace hmvlm
