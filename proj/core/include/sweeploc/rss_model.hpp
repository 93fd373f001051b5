// SPDX-License-Identifier: Apache-2.0
//
// Deterministic received-signal-strength model per beam plus noisy
// observation synthesis with detection truncation.
//
// The base station sits at the origin with the array along the x-axis;
// the user terminal is at (x, y) with y > 0 inside the room.
//
// A note on units: the logarithmic RSS is
//
//     P_i = 20*log10(Pt*Gr*lambda^2 / (16*L*pi^2)) + 20*log10(G_i) - 40*log10(d)
//
// with Pt in mW and Gr, L linear. This is an amplitude-style budget: it
// equals 20*log10 of the Friis received power in mW, i.e. exactly double
// the conventional 10*log10 dBm figure. rss_linear_watts() evaluates the
// Friis law directly; the pair satisfies
//
//     rss_dbm == 20*log10(rss_linear_watts * 1000)
//
// wherever the gain is nonzero. All thresholds, noise sigmas, and CRLB
// values in this library live consistently in this doubled-dB domain.

#ifndef SWEEPLOC_RSS_MODEL_HPP
#define SWEEPLOC_RSS_MODEL_HPP

#include <string>
#include <utility>
#include <vector>

#include "sweeploc/array_model.hpp"
#include "sweeploc/rng.hpp"

namespace sweeploc {

struct LinkBudget {
    double tx_power_dbm = 38.5;
    double rx_gain_db = 0.0;
    double loss_db = 0.0;
    double carrier_hz = 60e9;

    double wavelength_m() const { return 299792458.0 / carrier_hz; }

    bool operator==(const LinkBudget&) const = default;
};

void validate(const LinkBudget& link, const std::string& key_prefix = "link.");

struct Position {
    double x = 0.0; // m
    double y = 0.0; // m

    bool operator==(const Position&) const = default;
};

/// Per-beam RSS samples with their detection mask. rss_dbm[i] is only
/// meaningful where detected[i] is true.
struct ObservationVector {
    std::vector<double> rss_dbm;
    std::vector<unsigned char> detected;
    double sigma_db = 0.0;

    int size() const { return static_cast<int>(rss_dbm.size()); }
    int detected_count() const;
};

/// Finite stand-in for "below any physical floor": pattern nulls map to
/// this value so downstream comparisons stay total-ordered (never NaN).
inline constexpr double kRssFloorDbm = -300.0;

/// (azimuth, distance) of `ue` seen from the base station. Throws
/// std::domain_error at the origin.
std::pair<double, double> azimuth_and_distance(const Position& ue);

/// Constant term of the logarithmic RSS, 20*log10(Pt_mW*Gr*lambda^2/(16*L*pi^2)).
double rss_const_db(const LinkBudget& link);

/// Logarithmic RSS of one beam at `ue`. Returns kRssFloorDbm where the
/// beam gain vanishes or the level falls below the floor.
double rss_dbm(const Position& ue, int beam_index, const ArrayConfig& array,
               const BeamSet& beams, const LinkBudget& link);

/// Friis received power in watts for one beam.
double rss_linear_watts(const Position& ue, int beam_index, const ArrayConfig& array,
                        const BeamSet& beams, const LinkBudget& link);

/// Noiseless RSS of every beam, element i == rss_dbm(ue, i, ...).
std::vector<double> exact_profile(const Position& ue, const ArrayConfig& array,
                                  const BeamSet& beams, const LinkBudget& link);

/// exact_profile into a caller-owned buffer (resized to N).
void exact_profile_into(const Position& ue, const ArrayConfig& array,
                        const BeamSet& beams, const LinkBudget& link,
                        std::vector<double>& out);

/// One noisy sweep: s_i = p_i + n_i with n_i iid Gaussian(0, sigma^2),
/// detected_i = (s_i >= threshold_dbm). A vector with zero detections is
/// a valid (unlocalizable) outcome. `noiseless` must be the exact profile
/// of the pose being observed.
ObservationVector synthesize_observation(const std::vector<double>& noiseless,
                                         double sigma_db, double threshold_dbm,
                                         RngStream& rng);

/// Convenience overload that computes the exact profile itself.
ObservationVector synthesize_observation(const Position& ue, const ArrayConfig& array,
                                         const BeamSet& beams, const LinkBudget& link,
                                         double sigma_db, double threshold_dbm,
                                         RngStream& rng);

} // namespace sweeploc

#endif // SWEEPLOC_RSS_MODEL_HPP
