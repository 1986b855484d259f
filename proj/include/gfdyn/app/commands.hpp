#pragma once

#include <string>
#include <vector>

#include "gfdyn/app/config.hpp"
#include "gfdyn/app/report.hpp"
#include "gfdyn/rays.hpp"
#include "gfdyn/semiconj.hpp"

namespace gfdyn::app {

inline const std::vector<std::string> kCommands = {"examples", "petal", "metric", "semiconj", "ray", "render"};

// Runs one subcommand. Artifacts (CSV, PNG) go to out_dir when it is non-empty.
// Throws DynamicsError(ConfigError) for unknown commands or configurations the
// command cannot handle.
Report run_command(const std::string& name, const ExperimentConfig& cfg, const std::string& out_dir = {});

Report cmd_examples(const ExperimentConfig& cfg);
Report cmd_petal(const ExperimentConfig& cfg);
Report cmd_metric(const ExperimentConfig& cfg);
Report cmd_semiconj(const ExperimentConfig& cfg, const std::string& out_dir = {});
Report cmd_ray(const ExperimentConfig& cfg);
Report cmd_render(const ExperimentConfig& cfg, const std::string& out_dir = {});

// Addresses for pullback samples: `prefix_length` entries in [-bound, bound],
// then the tail (0) for a `tail_fraction` share of them (spread evenly) and a
// random nonzero period of length 1 or 2 otherwise.
std::vector<ExternalAddress> sample_addresses(std::size_t count, long bound, std::size_t prefix_length,
                                              double tail_fraction, std::uint64_t seed);

// `count` addresses with pairwise distinct 3-prefixes and entries in
// [-bound, bound], tail (0). Needs (2 bound + 1)^3 >= count.
std::vector<ExternalAddress> distinct_prefix_addresses(std::size_t count, long bound, std::uint64_t seed);

// Symbolic pullback samples for g (exponential or sine kernel). Sine tails
// alternate between the upper and lower half-planes.
std::vector<PullbackSample> symbolic_samples(const EntireMap& g, const std::vector<ExternalAddress>& addresses,
                                             std::size_t depth);

// Step-length series as CSV: sample,label,level,step_length,sigma_length.
std::string step_length_csv(const PullbackResult& result);

}  // namespace gfdyn::app
