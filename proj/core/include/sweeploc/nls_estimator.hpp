// SPDX-License-Identifier: Apache-2.0
//
// Nonlinear least-squares position estimation from a truncated sweep
// observation: minimize ||s - p(x)||^2 over the detected beams.

#ifndef SWEEPLOC_NLS_ESTIMATOR_HPP
#define SWEEPLOC_NLS_ESTIMATOR_HPP

#include <optional>
#include <string>
#include <vector>

#include "sweeploc/crlb.hpp"
#include "sweeploc/errors.hpp"
#include "sweeploc/rss_model.hpp"

namespace sweeploc {

enum class EstimatorMethod {
    /// Levenberg-style damped Gauss-Newton on the normal equations. The
    /// default workhorse: accepted steps never increase the residual.
    gauss_newton_damped,
    /// The bare update x <- x - H^T (s - p(x)) with no normal-matrix solve
    /// and no damping. This iteration ascends the squared residual near a
    /// minimum (the step is +grad of the cost); it is kept only for
    /// comparison experiments.
    newton_transpose,
};

struct EstimatorConfig {
    EstimatorMethod method = EstimatorMethod::gauss_newton_damped;
    int max_iterations = 100;
    double step_tolerance = 1e-4; // m
    int multistart_grid = 5;      // starts per axis
    double damping_initial = 1e-2;

    bool operator==(const EstimatorConfig&) const = default;
};

void validate(const EstimatorConfig& cfg, const std::string& key_prefix = "estimator.");

/// Axis-aligned search region; estimates and iterates are clamped to it.
struct Rect {
    double x_min = 0.0, x_max = 0.0;
    double y_min = 0.0, y_max = 0.0;

    Position clamp(const Position& p) const;
};

struct EstimatorResult {
    Position estimate{};
    int iterations = 0;
    bool converged = false;   // final accepted step was below step_tolerance
    double residual_norm = 0.0; // dB, over detected beams
    int detected_count = 0;
};

/// Residual s_i - p_i(candidate) over the detected beams only.
/// Throws UnlocalizableError when nothing was detected.
std::vector<double> residual(const Position& candidate, const ObservationVector& obs,
                             const ArrayConfig& array, const BeamSet& beams,
                             const LinkBudget& link);

/// One literal transpose update x - H^T r (exact_chain rows, detected
/// beams). Always defined; a zero residual is a fixed point.
Position newton_transpose_step(const Position& candidate, const ObservationVector& obs,
                               const ArrayConfig& array, const BeamSet& beams,
                               const LinkBudget& link);

struct GnStep {
    Position next{};      // accepted ? trial point : candidate unchanged
    double damping = 0.0; // updated damping for the following step
    bool accepted = false;
    bool solved = false;  // normal equations solvable after retries
    double step_norm = 0.0;
};

/// One damped Gauss-Newton step: solve (H^T H + damping*diag(H^T H)) dx =
/// H^T r, then accept the trial iff it lowers the squared residual.
/// Damping halves on acceptance and grows 4x on rejection; a singular
/// damped system is retried with escalated damping up to 10 times.
/// When `clamp_region` is given the trial point is clamped before it is
/// evaluated.
GnStep gauss_newton_step(const Position& candidate, const ObservationVector& obs,
                         const ArrayConfig& array, const BeamSet& beams,
                         const LinkBudget& link, double damping,
                         const Rect* clamp_region = nullptr);

/// Full multistart estimate. Seeds are a uniform multistart_grid x
/// multistart_grid grid over `search_region` plus the minima of the
/// ray-reduced cost (the range that best fits the detected levels has a
/// closed form along any fixed azimuth, leaving a cheap 1-D scan around
/// the strongest detected boresight). The run with the smallest residual
/// norm wins; exact ties prefer smaller |x|, then lexicographic (x, y).
/// The result is clamped to the region. Throws UnlocalizableError when the
/// observation has no detected beams.
EstimatorResult estimate(const ObservationVector& obs, const ArrayConfig& array,
                         const BeamSet& beams, const LinkBudget& link,
                         const EstimatorConfig& cfg, const Rect& search_region);

} // namespace sweeploc

#endif // SWEEPLOC_NLS_ESTIMATOR_HPP
