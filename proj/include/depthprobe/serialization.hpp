#pragma once

#include "json.hpp"

#include "depthprobe/geometry.hpp"
#include "depthprobe/metrics.hpp"
#include "depthprobe/oracle.hpp"
#include "depthprobe/raster.hpp"
#include "depthprobe/robustfit.hpp"

namespace depthprobe {

using Json = nlohmann::json;

// Centered coordinates serialize as [x, y].
void to_json(Json& j, const CenteredCoord& c);
void from_json(const Json& j, CenteredCoord& c);

void to_json(Json& j, const CameraModel& c);
void from_json(const Json& j, CameraModel& c);

void to_json(Json& j, const GroundPlaneModel& p);
void from_json(const Json& j, GroundPlaneModel& p);

void to_json(Json& j, const OracleObstacle& o);
void from_json(const Json& j, OracleObstacle& o);

void to_json(Json& j, const OracleSpec& s);
void from_json(const Json& j, OracleSpec& s);

void to_json(Json& j, const FracRect& r);
void from_json(const Json& j, FracRect& r);

void to_json(Json& j, const MetricSet& m);
void from_json(const Json& j, MetricSet& m);

void to_json(Json& j, const RegressionSummary& r);
void from_json(const Json& j, RegressionSummary& r);

void to_json(Json& j, const RansacParams& p);
void from_json(const Json& j, RansacParams& p);

void to_json(Json& j, const HoughParams& p);
void from_json(const Json& j, HoughParams& p);

}  // namespace depthprobe
