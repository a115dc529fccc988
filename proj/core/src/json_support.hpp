#pragma once

// Internal JSON helpers shared by the core sources; not installed.

#include <json.hpp>

#include "qca/keyframe.hpp"
#include "qca/raster.hpp"
#include "qca/stenosis.hpp"

namespace qca::detail {

using Json = nlohmann::ordered_json;

Json to_json_value(Point p);
Json to_json_value(const FrameWidthStats& s);
Json to_json_value(const StenosisAssessment& a);
Json to_json_value(const FrameScore& s);

Point point_from_json(const Json& j);
StenosisAssessment assessment_from_json_value(const Json& j);

/// Parses text, converting parser exceptions into Error(format).
Json parse(std::string_view text, const char* what);

}  // namespace qca::detail
