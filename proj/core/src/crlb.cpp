// SPDX-License-Identifier: Apache-2.0

#include "sweeploc/crlb.hpp"

#include <cmath>
#include <stdexcept>

namespace sweeploc {

namespace {

constexpr double kPi = 3.141592653589793238462643;
constexpr double kDbPerNep = 8.685889638065035; // 20 / ln(10)

struct Pose {
    double x, y, d;
};

Pose pose_of(const Position& ue) {
    const double d = std::hypot(ue.x, ue.y);
    if (d == 0.0)
        throw std::domain_error("degenerate geometry: UE at the base station");
    return {ue.x, ue.y, d};
}

/// Shared factor of the half-wavelength gain partials:
/// (n*cos(n*psi) - cot(psi)*sin(n*psi)) / (sin(psi) * d^3).
double halfwave_core(double psi, int n, double d) {
    const double s = std::sin(psi);
    if (std::abs(s) < kMinSinPsi)
        throw std::domain_error("singular beam direction: |sin(psi)| below guard");
    const double c = std::cos(psi);
    return (n * std::cos(n * psi) - (c / s) * std::sin(n * psi)) / (s * d * d * d);
}

} // namespace

double halfwave_gain(const Position& ue, double beta, int n) {
    const Pose p = pose_of(ue);
    const double psi = kPi * p.x / p.d + beta;
    return std::sin(n * psi) / std::sin(psi);
}

double halfwave_gain_dx(const Position& ue, double beta, int n) {
    const Pose p = pose_of(ue);
    const double psi = kPi * p.x / p.d + beta;
    return kPi * p.y * p.y * halfwave_core(psi, n, p.d);
}

double halfwave_gain_dy(const Position& ue, double beta, int n) {
    const Pose p = pose_of(ue);
    const double psi = kPi * p.x / p.d + beta;
    return -kPi * p.x * p.y * halfwave_core(psi, n, p.d);
}

bool rss_jacobian_row(const Position& ue, const ArrayConfig& array,
                      const BeamSet& beams, int beam_index, JacobianForm form,
                      double out[2]) {
    out[0] = 0.0;
    out[1] = 0.0;
    const Pose p = pose_of(ue);
    const double beta = beams.phases[beam_index];
    const int n = array.n_elements;

    if (form == JacobianForm::exact_chain) {
        const double k = 2.0 * kPi * array.spacing_wavelengths;
        const double psi = k * p.x / p.d + beta;
        const double gain = array.efficiency * array_factor_magnitude(psi, n);
        if (gain < kMinBeamGain) return false;
        const double dlog = array_factor_log_magnitude_dpsi(psi, n);
        const double d3 = p.d * p.d * p.d;
        const double dpsi_dx = k * p.y * p.y / d3;
        const double dpsi_dy = -k * p.x * p.y / d3;
        const double d2 = p.d * p.d;
        out[0] = kDbPerNep * (dlog * dpsi_dx - 2.0 * p.x / d2);
        out[1] = kDbPerNep * (dlog * dpsi_dy - 2.0 * p.y / d2);
        return true;
    }

    // unchained: raw gain and distance partials without the log-chain factors
    const double psi = kPi * p.x / p.d + beta;
    if (std::abs(std::sin(psi)) < kMinSinPsi) return false;
    const double core = halfwave_core(psi, n, p.d);
    const double dgx = kPi * p.y * p.y * core;
    const double dgy = -kPi * p.x * p.y * core;
    out[0] = kDbPerNep * (dgx - 2.0 * p.x / p.d);
    out[1] = kDbPerNep * (dgy - 2.0 * p.y / p.d);
    return true;
}

JacobianMatrix rss_jacobian(const Position& ue, const ArrayConfig& array,
                            const BeamSet& beams, JacobianForm form) {
    if (form == JacobianForm::unchained &&
        std::abs(array.spacing_wavelengths - 0.5) > 1e-12)
        throw std::invalid_argument(
            "rss_jacobian: unchained form requires half-wavelength spacing");
    const int n = beams.size();
    JacobianMatrix jac;
    jac.rows.resize(n);
    jac.valid.resize(n);
    for (int i = 0; i < n; ++i) {
        double row[2];
        jac.valid[i] = rss_jacobian_row(ue, array, beams, i, form, row) ? 1 : 0;
        jac.rows[i] = {row[0], row[1]};
    }
    return jac;
}

namespace {

struct InfoSums {
    double s_xx = 0.0, s_xy = 0.0, s_yy = 0.0;
};

InfoSums info_sums(const Position& ue, const ArrayConfig& array, const BeamSet& beams,
                   const std::vector<unsigned char>& beam_mask) {
    if (!beam_mask.empty() && static_cast<int>(beam_mask.size()) != beams.size())
        throw std::invalid_argument("beam_mask size does not match the beam set");
    InfoSums s;
    for (int i = 0; i < beams.size(); ++i) {
        if (!beam_mask.empty() && !beam_mask[i]) continue;
        double row[2];
        if (!rss_jacobian_row(ue, array, beams, i, JacobianForm::exact_chain, row))
            continue;
        s.s_xx += row[0] * row[0];
        s.s_xy += row[0] * row[1];
        s.s_yy += row[1] * row[1];
    }
    return s;
}

} // namespace

FisherInfo fim(const Position& ue, const ArrayConfig& array, const BeamSet& beams,
               double sigma_db, const std::vector<unsigned char>& beam_mask) {
    if (!(sigma_db > 0.0))
        throw std::invalid_argument("fim: sigma_db must be > 0");
    const InfoSums s = info_sums(ue, array, beams, beam_mask);
    const double inv_var = 1.0 / (sigma_db * sigma_db);
    return {s.s_xx * inv_var, s.s_xy * inv_var, s.s_yy * inv_var};
}

double crlb_rmse(const Position& ue, const ArrayConfig& array, const BeamSet& beams,
                 double sigma_db, const std::vector<unsigned char>& beam_mask) {
    if (!(sigma_db > 0.0))
        throw std::invalid_argument("crlb_rmse: sigma_db must be > 0");
    const InfoSums s = info_sums(ue, array, beams, beam_mask);
    const double det = s.s_xx * s.s_yy - s.s_xy * s.s_xy;
    if (!(det > 1e-15 * s.s_xx * s.s_yy)) return kUnbounded;
    return sigma_db * std::sqrt((s.s_xx + s.s_yy) / det);
}

double asymptotic_rss_partial(const Position& ue, double beta, int coord, int n) {
    if (coord != 0 && coord != 1)
        throw std::invalid_argument("asymptotic_rss_partial: coord must be 0 or 1");
    const Pose p = pose_of(ue);
    const double psi = kPi * p.x / p.d + beta;
    const double s = std::sin(psi);
    if (std::abs(s) < kMinSinPsi)
        throw std::domain_error("singular beam direction: |sin(psi)| below guard");
    const double xm = coord == 0 ? p.x : p.y;
    const double a = kDbPerNep *
        (-kPi * p.y * xm * std::cos(n * psi) / (s * p.d * p.d * p.d));
    return n * a;
}

double asymptotic_bound_from_sums(double s11, double s22, double s12, int n,
                                  double sigma_db) {
    const double det = s11 * s22 - s12 * s12;
    if (!(det > 1e-15 * s11 * s22)) return kUnbounded;
    return sigma_db * sigma_db / n * std::sqrt((s11 + s22) / det);
}

double asymptotic_crlb(const Position& ue, const ArrayConfig& array,
                       const BeamSet& beams, double sigma_db) {
    if (!(sigma_db > 0.0))
        throw std::invalid_argument("asymptotic_crlb: sigma_db must be > 0");
    const int n = array.n_elements;
    double s11 = 0.0, s22 = 0.0, s12 = 0.0;
    int usable = 0;
    for (int i = 0; i < beams.size(); ++i) {
        double a1, a2;
        try {
            a1 = asymptotic_rss_partial(ue, beams.phases[i], 0, n) / n;
            a2 = asymptotic_rss_partial(ue, beams.phases[i], 1, n) / n;
        } catch (const std::domain_error&) {
            continue;
        }
        s11 += a1 * a1;
        s22 += a2 * a2;
        s12 += a1 * a2;
        ++usable;
    }
    if (usable < 2) return kUnbounded;
    return asymptotic_bound_from_sums(s11, s22, s12, n, sigma_db);
}

} // namespace sweeploc
