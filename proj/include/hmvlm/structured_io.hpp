#pragma once

#include "hmvlm/core_types.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hmvlm {

/// Delimiters of the three reasoning stages in model output.
struct SpecialTokens
{
  std::string desc_start = "<DESC_START>";
  std::string desc_end = "<DESC_END>";
  std::string deci_start = "<DECI_START>";
  std::string deci_end = "<DECI_END>";
  std::string traj_start = "<TRAJ_START>";
  std::string traj_end = "<TRAJ_END>";

  /// In stream order.
  std::array<std::string_view, 6> all() const
  {
    return {desc_start, desc_end, deci_start, deci_end, traj_start, traj_end};
  }

  /// Throws std::invalid_argument unless the six literals are non-empty and pairwise distinct.
  void validate() const;
};

enum class ParseErrorKind
{
  MalformedStructure,
  MalformedTrajectory,
};

class ParseError : public std::runtime_error
{
public:
  ParseError(ParseErrorKind kind, std::size_t position, std::string fragment, const std::string& what);

  ParseErrorKind kind() const { return kind_; }
  /// Byte offset into the parsed text of the first violation.
  std::size_t position() const { return position_; }
  /// Offending waypoint text (MalformedTrajectory) or the token expected (MalformedStructure).
  const std::string& fragment() const { return fragment_; }

private:
  ParseErrorKind kind_;
  std::size_t position_;
  std::string fragment_;
};

std::string_view to_string(ParseErrorKind kind);

/// Renders `(x,y)` pairs, comma separated, four decimals.
std::string format_waypoints(const Trajectoryd& traj);

/// Parses the waypoint list syntax written by format_waypoints. Whitespace and newlines
/// between elements are accepted. `offset` shifts reported positions.
Trajectoryd parse_waypoints(std::string_view text, std::size_t offset = 0);

/// Throws std::invalid_argument when description or decision contain a token literal.
std::string serialize_response(const StructuredResponse& resp, const SpecialTokens& tokens = {});

/// Extracts the three delimited stages from arbitrary model output. Text before the first
/// and after the last token is ignored. Throws ParseError.
StructuredResponse parse_response(std::string_view text, const SpecialTokens& tokens = {});

enum class CameraView
{
  Front,
  FrontLeft,
  FrontRight,
  SideLeft,
  SideRight,
};

std::string_view to_string(CameraView view);

/// Textual scaffold around the image slots. `{view}` and `{instruction}` are substituted.
struct PromptTemplates
{
  std::string view_slot = "<image:{view}>";
  std::string history_header = "Ego kinematics (oldest first):";
  std::string navigation = "Navigation: {instruction}";
};

struct PromptSpec
{
  static constexpr std::array<CameraView, 5> view_order{
    CameraView::Front, CameraView::FrontLeft, CameraView::FrontRight, CameraView::SideLeft, CameraView::SideRight};

  EgoHistory ego_history;
  std::optional<std::string> nav_instruction;
  PromptTemplates templates;
};

/// One line per sample, e.g. `t=-3.75s v=12.30m/s a=0.10m/s²`.
std::string format_kinematics(const KinematicSample& sample);

std::string build_prompt(const PromptSpec& spec);

} // namespace hmvlm
