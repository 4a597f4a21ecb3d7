#pragma once

#include <string>

#include "alkspin/spectrum.hpp"

namespace alkspin {

// run options that sit outside the physics setup
struct RunOptions {
  int jobs = 0; // 0 = hardware concurrency
  std::string output_dir = ".";
  bool deterministic = true;
};

struct RunConfig {
  SimulationSetup setup;
  RunOptions run;
};

// defaults reproduce the reference operating point: B0 = 27 uT dual-harmonic
// drive, 100 V/m sigma+ pump on resonance, Gamma = 1 kHz, 80 C vapor,
// 8 velocity classes, reduced tier
RunConfig default_config();

// strict parser: unknown keys, wrong types, and invalid values all throw
// std::invalid_argument with the offending key in the message
RunConfig load_config_text(const std::string& json_text);
RunConfig load_config_file(const std::string& path);

// one-line JSON snapshot of every effective parameter (for file headers)
std::string config_snapshot(const RunConfig& cfg);

} // namespace alkspin
