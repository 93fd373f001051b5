// SPDX-License-Identifier: Apache-2.0
//
// Analytic RSS Jacobian, Fisher information, and position error bounds.
//
// Two derivative forms are provided for the per-beam RSS partials:
//
//   exact_chain - the true gradient of the logarithmic RSS,
//       (20/ln10) * ( dln|A|/dpsi * dpsi/dx_m  -  (2/d) * dd/dx_m ),
//       valid for any element spacing. This is the form that matches
//       finite differences of rss_dbm and the one the Fisher information
//       and the estimator use.
//
//   unchained - the same ingredients without the 1/G and 1/d chain
//       factors, (20/ln10) * (dG/dx_m - 2 * dd/dx_m), built on the
//       half-wavelength gain G = sin(N*psi)/sin(psi) with
//       psi = pi*x/d + beta. Kept for comparison experiments; it does
//       not pass finite-difference validation (by construction).
//
// Beams whose gain is below 1e-6 linear, or whose direction is singular
// for the requested form, are excluded: their log-gain derivative blows
// up without carrying usable information in the measurement model.

#ifndef SWEEPLOC_CRLB_HPP
#define SWEEPLOC_CRLB_HPP

#include <array>
#include <limits>
#include <vector>

#include "sweeploc/rss_model.hpp"

namespace sweeploc {

enum class JacobianForm { exact_chain, unchained };

/// N rows of (dP_i/dx, dP_i/dy) in dB per meter. Rows flagged invalid are
/// zero-filled and contribute nothing downstream.
struct JacobianMatrix {
    std::vector<std::array<double, 2>> rows;
    std::vector<unsigned char> valid;
};

/// Unnormalized Fisher information of the UE coordinates, H^T H / sigma^2.
struct FisherInfo {
    double j_xx = 0.0;
    double j_xy = 0.0;
    double j_yy = 0.0;
};

inline constexpr double kMinBeamGain = 1e-6;      // linear-gain validity floor
inline constexpr double kMinSinPsi = 1e-10;       // half-wave form singularity guard
inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Half-wavelength steered gain G = sin(n*psi)/sin(psi), psi = pi*x/d + beta.
/// This is the signed gain the analytic partials below differentiate.
double halfwave_gain(const Position& ue, double beta, int n);

/// dG/dx of halfwave_gain: pi*y^2*(n*cos(n*psi) - cot(psi)*sin(n*psi)) / (sin(psi)*d^3).
/// Throws std::domain_error when |sin(psi)| < kMinSinPsi (callers mask the beam).
double halfwave_gain_dx(const Position& ue, double beta, int n);

/// dG/dy of halfwave_gain: -pi*x*y*(n*cos(n*psi) - cot(psi)*sin(n*psi)) / (sin(psi)*d^3).
double halfwave_gain_dy(const Position& ue, double beta, int n);

/// One Jacobian row. Returns false (and zero-fills `out`) when the beam is
/// singular or its gain is below kMinBeamGain at this pose.
bool rss_jacobian_row(const Position& ue, const ArrayConfig& array,
                      const BeamSet& beams, int beam_index, JacobianForm form,
                      double out[2]);

/// Full Jacobian of the RSS profile with respect to the UE coordinates.
/// The unchained form requires spacing_wavelengths == 0.5.
JacobianMatrix rss_jacobian(const Position& ue, const ArrayConfig& array,
                            const BeamSet& beams, JacobianForm form);

/// H^T H / sigma^2 over the beams where beam_mask is true (empty mask means
/// every beam). Rows use the exact_chain form.
FisherInfo fim(const Position& ue, const ArrayConfig& array, const BeamSet& beams,
               double sigma_db, const std::vector<unsigned char>& beam_mask = {});

/// Position-error lower bound sqrt(tr(J^-1)) in meters, computed as
/// sigma * sqrt((S_xx + S_yy) / (S_xx*S_yy - S_xy^2)) from the unscaled
/// H^T H sums. Returns kUnbounded when the information matrix is singular
/// to working precision (a blindspot), never NaN.
double crlb_rmse(const Position& ue, const ArrayConfig& array, const BeamSet& beams,
                 double sigma_db, const std::vector<unsigned char>& beam_mask = {});

/// Large-N approximation of one RSS partial: n * A_m with
/// A_m = (20/ln10) * (-pi*y*x_m*cos(n*psi)/(sin(psi)*d^3)), x_1 = x, x_2 = y.
/// `coord` selects m (0 for x, 1 for y). Throws std::domain_error on
/// singular directions.
double asymptotic_rss_partial(const Position& ue, double beta, int coord, int n);

/// Bound assembled from large-N partial sums: (sigma^2/n) * sqrt((s11 + s22)
/// / (s11*s22 - s12^2)). Returns kUnbounded when the denominator is not
/// positive to working precision.
double asymptotic_bound_from_sums(double s11, double s22, double s12, int n,
                                  double sigma_db);

/// Large-N bound over the beam set. The A_1 and A_2 vectors produced by
/// asymptotic_rss_partial are exactly proportional across beams (A_1/A_2 ==
/// x/y for every beam), so the sum Gram matrix is singular by construction
/// and the bound degenerates to kUnbounded at essentially every pose. It is
/// provided for completeness; use crlb_rmse for a usable bound.
double asymptotic_crlb(const Position& ue, const ArrayConfig& array,
                       const BeamSet& beams, double sigma_db);

} // namespace sweeploc

#endif // SWEEPLOC_CRLB_HPP
