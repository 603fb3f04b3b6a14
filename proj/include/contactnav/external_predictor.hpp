// Runs an external occupancy predictor as a child process: one request frame
// on its stdin, one response frame expected on its stdout.

#pragma once

#include <string>
#include <vector>

#include "contactnav/occupancy.hpp"

namespace contactnav {

/// Throws ExternalPredictorFailure on spawn errors, timeouts, non-zero exit
/// or malformed responses.
std::vector<double> run_external_predictor(const OccupancyEstimate& est, const std::vector<std::string>& argv,
                                           int timeout_ms);

}  // namespace contactnav
