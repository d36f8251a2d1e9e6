#pragma once

#include <string>

#include "txamp/config.hpp"
#include "txamp/econ.hpp"

namespace txamp::cli {

int cmd_model(const Config& cfg, const std::string& out_dir);
int cmd_infer(const Config& cfg, const std::string& out_dir);
int cmd_simulate(const Config& cfg, const std::string& out_dir);
int cmd_detect(const Config& cfg, const std::string& out_dir);
int cmd_econ(const Config& cfg, const std::string& out_dir);

// Shared config plumbing.
econ::PricingSchedule pricing_from_config(const Config& cfg);

}  // namespace txamp::cli
