#pragma once

#include <string>
#include <vector>

namespace mfopt {

struct CurveBand;
struct SolvabilityProfile;

/// Static SVG line charts of the aggregated progress curves (mean with the
/// confidence band) and of the solvability profiles.
void write_curves_svg(const std::string& path, const std::vector<const CurveBand*>& bands);
void write_profiles_svg(const std::string& path, const std::vector<SolvabilityProfile>& profiles);

}  // namespace mfopt
