#pragma once

#include "run_config.hpp"

namespace homcli {

/// Each command takes the merged configuration (resolved in place) and
/// writes its outputs atomically.  Errors are thrown as hom::Error subclasses.
void cmd_simulate(json& cfg);
void cmd_estimate(json& cfg);
void cmd_witness(json& cfg);
void cmd_bias(json& cfg);
void cmd_delay(json& cfg);
/// Returns false when the fit did not converge (report still written).
bool cmd_fit(json& cfg);
void cmd_export_plot(json& cfg);

}  // namespace homcli
