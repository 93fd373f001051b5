// SPDX-License-Identifier: Apache-2.0
//
// Whole-simulation configuration: a flat dotted-key = value document.
// Unknown keys are rejected; absent keys take the documented defaults.

#ifndef SWEEPLOC_SIM_CONFIG_HPP
#define SWEEPLOC_SIM_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sweeploc/field_sim.hpp"

namespace sweeploc {

struct SimulationConfig {
    RoomSpec room{};
    ArrayConfig array{};
    LinkBudget link{};
    EstimatorConfig estimator{};
    double sigma_db = 1.7;        // noise sigma from the calibration procedure
    double threshold_dbm = -73.0; // detection threshold
    std::uint64_t master_seed = 0;
    std::vector<int> n_list = {4, 8, 16, 32};
    int trials = 100;
    CrlbMaskMode crlb_mask_mode = CrlbMaskMode::detected;

    bool operator==(const SimulationConfig&) const = default;
};

/// Throws std::invalid_argument naming the offending key on any invariant
/// violation.
void validate(const SimulationConfig& cfg);

/// Parse a key = value document ('#' starts a comment). Parse errors and
/// unknown keys throw std::invalid_argument with the line number; the
/// result is validated before it is returned.
SimulationConfig parse_simulation_config(const std::string& text);

/// Emit a document that parses back to an identical config (doubles are
/// written with round-trip precision).
std::string serialize_simulation_config(const SimulationConfig& cfg);

std::string to_string(EstimatorMethod method);
std::string to_string(CrlbMaskMode mode);

} // namespace sweeploc

#endif // SWEEPLOC_SIM_CONFIG_HPP
