// SPDX-License-Identifier: Apache-2.0

#include "sweeploc/array_model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sweeploc {

namespace {

constexpr double kPi = 3.141592653589793238462643;
constexpr double kTwoPi = 2.0 * kPi;

double sinc(double t) {
    return t == 0.0 ? 1.0 : std::sin(t) / t;
}

} // namespace

void validate(const ArrayConfig& array, const std::string& key_prefix) {
    if (array.n_elements < 1)
        throw std::invalid_argument(key_prefix + "n_elements: must be >= 1");
    if (!(array.spacing_wavelengths > 0.0))
        throw std::invalid_argument(key_prefix + "spacing_wavelengths: must be > 0");
    if (!(array.efficiency > 0.0) || array.efficiency > 1.0)
        throw std::invalid_argument(key_prefix + "efficiency: must be in (0, 1]");
}

std::complex<double> array_factor_complex(double psi, int n) {
    if (n < 1) throw std::invalid_argument("array_factor_complex: n must be >= 1");
    std::complex<double> sum = 0.0;
    for (int m = 0; m < n; ++m)
        sum += std::complex<double>(std::cos(m * psi), std::sin(m * psi));
    return sum;
}

double array_factor_magnitude(double psi, int n) {
    if (n < 1) throw std::invalid_argument("array_factor_magnitude: n must be >= 1");
    if (n == 1) return 1.0;
    const double half_sin = std::sin(0.5 * psi);
    if (std::abs(half_sin) >= 1e-8)
        return std::abs(std::sin(0.5 * n * psi) / half_sin);
    // Removable singularity at psi = 2*pi*m: reduce to u near 0 and use the
    // sinc form, exact for u != 0 and equal to the limit n at u == 0.
    const double u = std::remainder(psi, kTwoPi);
    return n * std::abs(sinc(0.5 * n * u) / sinc(0.5 * u));
}

double array_factor_log_magnitude_dpsi(double psi, int n) {
    if (n < 1) throw std::invalid_argument("array_factor_log_magnitude_dpsi: n must be >= 1");
    if (n == 1) return 0.0;
    const double u = std::remainder(psi, kTwoPi);
    if (std::abs(u) < 1e-4) {
        // Series around the aligned-phasor point; both cotangents carry a
        // 1/u pole that cancels exactly.
        const double nn = static_cast<double>(n) * n;
        return -(nn - 1.0) * u / 12.0 - (nn * nn - 1.0) * u * u * u / 720.0;
    }
    return 0.5 * n / std::tan(0.5 * n * psi) - 0.5 / std::tan(0.5 * psi);
}

BeamSet sls_beam_set(const ArrayConfig& array) {
    validate(array);
    const int n = array.n_elements;
    BeamSet beams;
    beams.phases.resize(n);
    beams.boresights.resize(n);
    for (int i = 0; i < n; ++i) {
        const double theta = kPi * (i + 0.5) / n;
        beams.boresights[i] = theta;
        beams.phases[i] = -kTwoPi * array.spacing_wavelengths * std::cos(theta);
    }
    return beams;
}

double beam_gain(double phi, int beam_index, const ArrayConfig& array,
                 const BeamSet& beams) {
    if (beam_index < 0 || beam_index >= beams.size())
        throw std::out_of_range("beam_gain: beam_index " + std::to_string(beam_index) +
                                " outside [0, " + std::to_string(beams.size()) + ")");
    const double psi = kTwoPi * array.spacing_wavelengths * std::cos(phi) +
                       beams.phases[beam_index];
    return array.efficiency * array_factor_magnitude(psi, array.n_elements);
}

} // namespace sweeploc
