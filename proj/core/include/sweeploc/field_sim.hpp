// SPDX-License-Identifier: Apache-2.0
//
// Grid sweeps over the room, Monte-Carlo estimator trials, and the
// summary metrics (median RMSE, error-bound coverage, empirical CDFs).
//
// Every field is a pure function of (configuration, master_seed): grid
// cells own their derived RNG streams, so results are byte-identical for
// any worker count.

#ifndef SWEEPLOC_FIELD_SIM_HPP
#define SWEEPLOC_FIELD_SIM_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "sweeploc/nls_estimator.hpp"

namespace sweeploc {

/// Rectangular room with the base station at the origin, centered on one
/// side wall: x in [-width/2, width/2], y in (0, depth]. Sample points sit
/// at x = -width/2 + (ix+1/2)*step and y = (iy+1)*step, which keeps every
/// cell farther than one grid step from the base station.
struct RoomSpec {
    double width = 8.0;
    double depth = 8.0;
    double grid_step = 0.1;

    int nx() const;
    int ny() const;
    int cell_count() const { return nx() * ny(); }
    double x_at(int ix) const { return -0.5 * width + (ix + 0.5) * grid_step; }
    double y_at(int iy) const { return (iy + 1.0) * grid_step; }
    Position cell_position(int cell_index) const;

    bool operator==(const RoomSpec&) const = default;
};

void validate(const RoomSpec& room, const std::string& key_prefix = "room.");

enum class FieldKind { rss_max_dbm, crlb_m, nlse_rmse_m };

/// Per-cell scalar results over the room grid, row-major by y then x.
/// Unbounded cells carry +inf in `values` and a set `unbounded` flag.
struct FieldMap {
    RoomSpec room;
    FieldKind kind = FieldKind::rss_max_dbm;
    std::vector<double> values;
    std::vector<unsigned char> unbounded;

    double at(int ix, int iy) const { return values[iy * room.nx() + ix]; }
};

enum class CrlbMaskMode {
    detected,  // only beams whose noiseless RSS clears the threshold
    all_beams, // idealized bound; every beam contributes
};

struct MetricsSummary {
    int n_elements = 0;
    std::string variant; // "crlb" or "nlse"
    double median_rmse_m = 0.0;
    double one_meter_coverage_pct = 0.0;
    double coverage_probability = 0.0;
    std::vector<std::pair<double, double>> cdf; // (error_m, probability)
};

/// Search region used for estimation inside `room`: the room rectangle
/// with a 1 mm standoff above y = 0 so candidates can never reach the
/// degenerate base-station point.
Rect estimation_region(const RoomSpec& room);

/// Best achievable RSS over all beams, per cell.
FieldMap rss_max_field(const RoomSpec& room, const ArrayConfig& array,
                       const BeamSet& beams, const LinkBudget& link,
                       int workers = 0);

/// Position error bound per cell, kUnbounded where the cell is a blindspot.
/// In detected mode the beam mask keeps the beams whose noiseless RSS is at
/// or above threshold_dbm.
FieldMap crlb_field(const RoomSpec& room, const ArrayConfig& array,
                    const BeamSet& beams, const LinkBudget& link,
                    double sigma_db, double threshold_dbm, CrlbMaskMode mode,
                    int workers = 0);

/// Monte-Carlo estimator RMSE per cell over `trials` noisy sweeps. Trials
/// with zero detections are recorded as non-localized; cells localizing in
/// fewer than half their trials are flagged unbounded. RMSE averages the
/// localized trials only.
FieldMap nlse_rmse_field(const RoomSpec& room, const ArrayConfig& array,
                         const BeamSet& beams, const LinkBudget& link,
                         double sigma_db, double threshold_dbm, int trials,
                         std::uint64_t master_seed, const EstimatorConfig& est_cfg,
                         int workers = 0);

/// Median over all cells, unbounded cells participating as +inf. Reports
/// +inf ("no median coverage") when half or more of the cells are unbounded.
double median_rmse(const FieldMap& field);

/// Percentage of cells with a finite value at or below `bound_m`.
double error_bound_coverage(const FieldMap& field, double bound_m);

/// Empirical CDF of the finite cell values, normalized by the total cell
/// count: it plateaus at the localization coverage probability.
std::vector<std::pair<double, double>> rmse_cdf(const FieldMap& field);

/// Reduce a field to its summary metrics.
MetricsSummary summarize_field(const FieldMap& field, int n_elements,
                               const std::string& variant);

/// For each N in n_list: build the beam set, evaluate the error-bound field
/// and the estimator RMSE field, and reduce both to summaries (two rows per
/// N, "crlb" then "nlse"). The bound rows use the idealized all-beams mode,
/// which is the curve a noise calibration can actually fit; the map
/// subcommands expose the truncation-aware field separately.
std::vector<MetricsSummary> sweep_over_n(const RoomSpec& room,
                                         const ArrayConfig& array_template,
                                         const LinkBudget& link, double sigma_db,
                                         double threshold_dbm,
                                         const std::vector<int>& n_list, int trials,
                                         std::uint64_t master_seed,
                                         const EstimatorConfig& est_cfg,
                                         int workers = 0);

struct CalibrationResult {
    double sigma_db = 0.0;
    double median_n4_m = 0.0;
    double median_n8_m = 0.0;
    double target_n4_m = 0.0;
    double target_n8_m = 0.0;
    double max_rel_error = 0.0;
    bool within_tolerance = false;
};

/// Search sigma_db over a log grid for the value whose all-beams bound
/// medians at N=4 and N=8 best match the targets (minimax relative error).
/// The bound is exactly linear in sigma, so the medians are evaluated once
/// at sigma = 1 and scaled across the grid.
CalibrationResult calibrate_sigma(const RoomSpec& room, const ArrayConfig& array_template,
                                  const LinkBudget& link, double target_n4_m,
                                  double target_n8_m, double rel_tolerance,
                                  int workers = 0);

} // namespace sweeploc

#endif // SWEEPLOC_FIELD_SIM_HPP
