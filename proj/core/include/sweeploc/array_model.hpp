// SPDX-License-Identifier: Apache-2.0
//
// Uniform linear array factor, sector-sweep beam construction, and beam
// gain versus azimuth.
//
// Conventions used throughout:
//   - the array lies on the x-axis with the first element at the origin,
//   - azimuth phi is measured from the positive x-axis, phi in [0, pi],
//   - a beam is a progressive inter-element phase offset beta, so the
//     element-space phase of beam i at azimuth phi is
//         psi_i = 2*pi*spacing_wavelengths*cos(phi) + beta_i.
//
// Gain here is the amplitude-style quantity eps_r * |A(psi)| with A the
// complex array factor; it enters the received-power model as
// 20*log10(gain). It is not the conventional power directivity |A|^2/N.

#ifndef SWEEPLOC_ARRAY_MODEL_HPP
#define SWEEPLOC_ARRAY_MODEL_HPP

#include <complex>
#include <string>
#include <vector>

namespace sweeploc {

struct ArrayConfig {
    int n_elements = 32;
    double spacing_wavelengths = 0.5;
    double efficiency = 1.0;

    bool operator==(const ArrayConfig&) const = default;
};

/// Throws std::invalid_argument if a field is out of range. `key_prefix`
/// is prepended to the offending field name in the message.
void validate(const ArrayConfig& array, const std::string& key_prefix = "array.");

/// One sector-sweep beam per element: boresight angles and the phase
/// offsets that steer them.
struct BeamSet {
    std::vector<double> phases;     // beta_i [rad]
    std::vector<double> boresights; // theta_i [rad], strictly increasing in (0, pi)

    int size() const { return static_cast<int>(phases.size()); }
};

/// Complex array factor sum_{m=0}^{n-1} exp(j*m*psi), evaluated term by
/// term. This is the reference the closed form is checked against.
std::complex<double> array_factor_complex(double psi, int n);

/// |sin(n*psi/2) / sin(psi/2)|, the closed form of the magnitude of
/// array_factor_complex. Removable singularities at psi = 2*pi*m return
/// the limit n. Result is in [0, n].
double array_factor_magnitude(double psi, int n);

/// d(ln|A|)/dpsi of the array factor: (n/2)*cot(n*psi/2) - (1/2)*cot(psi/2).
/// The removable singularity at psi = 2*pi*m evaluates by series expansion
/// (the limit is 0 at psi = 2*pi*m exactly); the true nulls of |A| remain
/// genuine poles and are the caller's business to mask.
double array_factor_log_magnitude_dpsi(double psi, int n);

/// Build the sweep's beam set for `array`: boresights theta_i slice the
/// half circle uniformly, theta_i = pi*(i + 1/2)/N for i = 0..N-1, and
/// phases beta_i = -2*pi*spacing*cos(theta_i) steer each beam onto its
/// boresight.
BeamSet sls_beam_set(const ArrayConfig& array);

/// Linear (amplitude) gain of beam `beam_index` at azimuth `phi`.
/// Indices are 0-based; out of range throws std::out_of_range.
double beam_gain(double phi, int beam_index, const ArrayConfig& array,
                 const BeamSet& beams);

} // namespace sweeploc

#endif // SWEEPLOC_ARRAY_MODEL_HPP
