// SPDX-License-Identifier: Apache-2.0

#include "sweeploc/rss_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sweeploc {

namespace {

constexpr double kPi = 3.141592653589793238462643;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

} // namespace

void validate(const LinkBudget& link, const std::string& key_prefix) {
    if (!(link.carrier_hz > 0.0))
        throw std::invalid_argument(key_prefix + "carrier_hz: must be > 0");
    if (link.loss_db < 0.0)
        throw std::invalid_argument(key_prefix + "loss_db: must be >= 0");
    if (!std::isfinite(link.tx_power_dbm) || !std::isfinite(link.rx_gain_db))
        throw std::invalid_argument(key_prefix + "tx_power_dbm/rx_gain_db: must be finite");
}

int ObservationVector::detected_count() const {
    int count = 0;
    for (unsigned char d : detected) count += d ? 1 : 0;
    return count;
}

std::pair<double, double> azimuth_and_distance(const Position& ue) {
    const double d = std::hypot(ue.x, ue.y);
    if (d == 0.0)
        throw std::domain_error("azimuth_and_distance: UE at the base station (d = 0)");
    const double phi = std::acos(ue.x / d);
    return {phi, d};
}

double rss_const_db(const LinkBudget& link) {
    const double pt_mw = db_to_linear(link.tx_power_dbm);
    const double gr = db_to_linear(link.rx_gain_db);
    const double loss = db_to_linear(link.loss_db);
    const double lambda = link.wavelength_m();
    return 20.0 * std::log10(pt_mw * gr * lambda * lambda / (16.0 * loss * kPi * kPi));
}

double rss_dbm(const Position& ue, int beam_index, const ArrayConfig& array,
               const BeamSet& beams, const LinkBudget& link) {
    const auto [phi, d] = azimuth_and_distance(ue);
    const double gain = beam_gain(phi, beam_index, array, beams);
    if (gain <= 0.0) return kRssFloorDbm;
    const double base = rss_const_db(link) - 40.0 * std::log10(d);
    const double value = base + 20.0 * std::log10(gain);
    return value < kRssFloorDbm ? kRssFloorDbm : value;
}

double rss_linear_watts(const Position& ue, int beam_index, const ArrayConfig& array,
                        const BeamSet& beams, const LinkBudget& link) {
    const auto [phi, d] = azimuth_and_distance(ue);
    const double gain = beam_gain(phi, beam_index, array, beams);
    if (gain <= 0.0) return 0.0;
    const double pt_w = db_to_linear(link.tx_power_dbm) * 1e-3;
    const double gr = db_to_linear(link.rx_gain_db);
    const double loss = db_to_linear(link.loss_db);
    const double ratio = link.wavelength_m() / (4.0 * kPi * d);
    return pt_w * gain * gr * ratio * ratio / loss;
}

std::vector<double> exact_profile(const Position& ue, const ArrayConfig& array,
                                  const BeamSet& beams, const LinkBudget& link) {
    std::vector<double> profile;
    exact_profile_into(ue, array, beams, link, profile);
    return profile;
}

void exact_profile_into(const Position& ue, const ArrayConfig& array,
                        const BeamSet& beams, const LinkBudget& link,
                        std::vector<double>& out) {
    const double d = std::hypot(ue.x, ue.y);
    if (d == 0.0)
        throw std::domain_error("exact_profile: UE at the base station (d = 0)");
    const int n = beams.size();
    const double base = rss_const_db(link) - 40.0 * std::log10(d);
    // cos(azimuth) is x/d by definition; skip the acos round trip
    const double cos_term = 2.0 * kPi * array.spacing_wavelengths * (ue.x / d);
    out.resize(n);
    for (int i = 0; i < n; ++i) {
        const double gain = array.efficiency *
            array_factor_magnitude(cos_term + beams.phases[i], array.n_elements);
        if (gain <= 0.0) {
            out[i] = kRssFloorDbm;
            continue;
        }
        const double value = base + 20.0 * std::log10(gain);
        out[i] = value < kRssFloorDbm ? kRssFloorDbm : value;
    }
}

ObservationVector synthesize_observation(const std::vector<double>& noiseless,
                                         double sigma_db, double threshold_dbm,
                                         RngStream& rng) {
    if (!(sigma_db > 0.0))
        throw std::invalid_argument("synthesize_observation: sigma_db must be > 0");
    ObservationVector obs;
    obs.sigma_db = sigma_db;
    const int n = static_cast<int>(noiseless.size());
    obs.rss_dbm.resize(n);
    obs.detected.resize(n);
    for (int i = 0; i < n; ++i) {
        const double sample = noiseless[i] + sigma_db * rng.gaussian();
        obs.rss_dbm[i] = sample;
        obs.detected[i] = sample >= threshold_dbm ? 1 : 0;
    }
    return obs;
}

ObservationVector synthesize_observation(const Position& ue, const ArrayConfig& array,
                                         const BeamSet& beams, const LinkBudget& link,
                                         double sigma_db, double threshold_dbm,
                                         RngStream& rng) {
    return synthesize_observation(exact_profile(ue, array, beams, link), sigma_db,
                                  threshold_dbm, rng);
}

} // namespace sweeploc
