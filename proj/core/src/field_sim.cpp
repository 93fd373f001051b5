// SPDX-License-Identifier: Apache-2.0

#include "sweeploc/field_sim.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "sweeploc/crlb.hpp"

namespace sweeploc {

namespace {

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Run fn(i) for i in [0, count) across `workers` threads, contiguous
/// blocks. Each index owns its output slot, so the split never changes
/// the result.
template <typename Fn>
void parallel_for(int count, int workers, Fn&& fn) {
    workers = std::min(resolve_workers(workers), std::max(count, 1));
    if (workers <= 1) {
        for (int i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::exception_ptr error;
    std::mutex error_mutex;
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const int begin = w * chunk;
        const int end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&, begin, end] {
            try {
                for (int i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

FieldMap make_field(const RoomSpec& room, FieldKind kind) {
    FieldMap field;
    field.room = room;
    field.kind = kind;
    field.values.assign(room.cell_count(), 0.0);
    field.unbounded.assign(room.cell_count(), 0);
    return field;
}

} // namespace

Rect estimation_region(const RoomSpec& room) {
    const double y_min = std::min(1e-3, 0.5 * room.depth);
    return {-0.5 * room.width, 0.5 * room.width, y_min, room.depth};
}

int RoomSpec::nx() const {
    return static_cast<int>(std::lround(width / grid_step));
}

int RoomSpec::ny() const {
    return static_cast<int>(std::lround(depth / grid_step));
}

Position RoomSpec::cell_position(int cell_index) const {
    const int cols = nx();
    return {x_at(cell_index % cols), y_at(cell_index / cols)};
}

void validate(const RoomSpec& room, const std::string& key_prefix) {
    if (!(room.width > 0.0))
        throw std::invalid_argument(key_prefix + "width: must be > 0");
    if (!(room.depth > 0.0))
        throw std::invalid_argument(key_prefix + "depth: must be > 0");
    if (!(room.grid_step > 0.0))
        throw std::invalid_argument(key_prefix + "grid_step: must be > 0");
    if (room.nx() < 1 || room.ny() < 1)
        throw std::invalid_argument(key_prefix + "grid_step: grid has no cells");
}

FieldMap rss_max_field(const RoomSpec& room, const ArrayConfig& array,
                       const BeamSet& beams, const LinkBudget& link, int workers) {
    validate(room);
    FieldMap field = make_field(room, FieldKind::rss_max_dbm);
    parallel_for(room.cell_count(), workers, [&](int cell) {
        std::vector<double> profile;
        exact_profile_into(room.cell_position(cell), array, beams, link, profile);
        field.values[cell] = *std::max_element(profile.begin(), profile.end());
    });
    return field;
}

FieldMap crlb_field(const RoomSpec& room, const ArrayConfig& array,
                    const BeamSet& beams, const LinkBudget& link, double sigma_db,
                    double threshold_dbm, CrlbMaskMode mode, int workers) {
    validate(room);
    FieldMap field = make_field(room, FieldKind::crlb_m);
    parallel_for(room.cell_count(), workers, [&](int cell) {
        const Position pos = room.cell_position(cell);
        std::vector<unsigned char> mask;
        if (mode == CrlbMaskMode::detected) {
            std::vector<double> profile;
            exact_profile_into(pos, array, beams, link, profile);
            mask.resize(profile.size());
            for (std::size_t i = 0; i < profile.size(); ++i)
                mask[i] = profile[i] >= threshold_dbm ? 1 : 0;
        }
        const double bound = crlb_rmse(pos, array, beams, sigma_db, mask);
        field.values[cell] = bound;
        field.unbounded[cell] = std::isinf(bound) ? 1 : 0;
    });
    return field;
}

FieldMap nlse_rmse_field(const RoomSpec& room, const ArrayConfig& array,
                         const BeamSet& beams, const LinkBudget& link,
                         double sigma_db, double threshold_dbm, int trials,
                         std::uint64_t master_seed, const EstimatorConfig& est_cfg,
                         int workers) {
    validate(room);
    validate(est_cfg);
    if (trials < 1)
        throw std::invalid_argument("nlse_rmse_field: trials must be >= 1");
    FieldMap field = make_field(room, FieldKind::nlse_rmse_m);
    const Rect region = estimation_region(room);
    parallel_for(room.cell_count(), workers, [&](int cell) {
        const Position truth = room.cell_position(cell);
        std::vector<double> profile;
        exact_profile_into(truth, array, beams, link, profile);
        int localized = 0;
        double sum_sq = 0.0;
        for (int t = 0; t < trials; ++t) {
            RngStream rng = RngStream::for_cell_trial(master_seed,
                                                      static_cast<std::uint64_t>(cell),
                                                      static_cast<std::uint64_t>(t));
            const ObservationVector obs =
                synthesize_observation(profile, sigma_db, threshold_dbm, rng);
            if (obs.detected_count() == 0) continue;
            const EstimatorResult est =
                estimate(obs, array, beams, link, est_cfg, region);
            const double dx = est.estimate.x - truth.x;
            const double dy = est.estimate.y - truth.y;
            sum_sq += dx * dx + dy * dy;
            ++localized;
        }
        if (2 * localized < trials) {
            field.values[cell] = kUnbounded;
            field.unbounded[cell] = 1;
        } else {
            field.values[cell] = std::sqrt(sum_sq / localized);
        }
    });
    return field;
}

double median_rmse(const FieldMap& field) {
    if (field.values.empty())
        throw std::invalid_argument("median_rmse: field has no cells");
    std::vector<double> sorted = field.values;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();
    if (n % 2 == 1) return sorted[n / 2];
    return 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
}

double error_bound_coverage(const FieldMap& field, double bound_m) {
    if (field.values.empty()) return 0.0;
    int count = 0;
    for (double v : field.values)
        if (std::isfinite(v) && v <= bound_m) ++count;
    // same division as rmse_cdf, so CDF(b) * 100 matches this exactly
    return (count / static_cast<double>(field.values.size())) * 100.0;
}

std::vector<std::pair<double, double>> rmse_cdf(const FieldMap& field) {
    std::vector<double> finite;
    finite.reserve(field.values.size());
    for (double v : field.values)
        if (std::isfinite(v)) finite.push_back(v);
    std::sort(finite.begin(), finite.end());
    std::vector<std::pair<double, double>> cdf;
    cdf.reserve(finite.size());
    const double total = static_cast<double>(field.values.size());
    for (std::size_t k = 0; k < finite.size(); ++k)
        cdf.emplace_back(finite[k], (k + 1) / total);
    return cdf;
}

MetricsSummary summarize_field(const FieldMap& field, int n_elements,
                               const std::string& variant) {
    MetricsSummary summary;
    summary.n_elements = n_elements;
    summary.variant = variant;
    summary.median_rmse_m = median_rmse(field);
    summary.one_meter_coverage_pct = error_bound_coverage(field, 1.0);
    summary.cdf = rmse_cdf(field);
    summary.coverage_probability =
        summary.cdf.empty() ? 0.0 : summary.cdf.back().second;
    return summary;
}

std::vector<MetricsSummary> sweep_over_n(const RoomSpec& room,
                                         const ArrayConfig& array_template,
                                         const LinkBudget& link, double sigma_db,
                                         double threshold_dbm,
                                         const std::vector<int>& n_list, int trials,
                                         std::uint64_t master_seed,
                                         const EstimatorConfig& est_cfg, int workers) {
    if (n_list.empty())
        throw std::invalid_argument("sweep_over_n: n_list must not be empty");
    std::vector<MetricsSummary> summaries;
    summaries.reserve(2 * n_list.size());
    for (int n : n_list) {
        ArrayConfig array = array_template;
        array.n_elements = n;
        validate(array);
        const BeamSet beams = sls_beam_set(array);
        const FieldMap bound = crlb_field(room, array, beams, link, sigma_db,
                                          threshold_dbm, CrlbMaskMode::all_beams,
                                          workers);
        summaries.push_back(summarize_field(bound, n, "crlb"));
        const FieldMap rmse = nlse_rmse_field(room, array, beams, link, sigma_db,
                                              threshold_dbm, trials, master_seed,
                                              est_cfg, workers);
        summaries.push_back(summarize_field(rmse, n, "nlse"));
    }
    return summaries;
}

CalibrationResult calibrate_sigma(const RoomSpec& room,
                                  const ArrayConfig& array_template,
                                  const LinkBudget& link, double target_n4_m,
                                  double target_n8_m, double rel_tolerance,
                                  int workers) {
    CalibrationResult result;
    result.target_n4_m = target_n4_m;
    result.target_n8_m = target_n8_m;

    // The bound is exactly linear in sigma, so one unit-sigma median per N
    // is enough to evaluate the whole search grid.
    double unit_median[2];
    const int n_values[2] = {4, 8};
    for (int j = 0; j < 2; ++j) {
        ArrayConfig array = array_template;
        array.n_elements = n_values[j];
        const BeamSet beams = sls_beam_set(array);
        const FieldMap field = crlb_field(room, array, beams, link, 1.0, 0.0,
                                          CrlbMaskMode::all_beams, workers);
        unit_median[j] = median_rmse(field);
    }
    if (!std::isfinite(unit_median[0]) || !std::isfinite(unit_median[1])) {
        result.sigma_db = 0.0;
        result.median_n4_m = unit_median[0];
        result.median_n8_m = unit_median[1];
        result.max_rel_error = kUnbounded;
        result.within_tolerance = false;
        return result;
    }

    constexpr int kGridPoints = 801;
    double best_sigma = 0.0;
    double best_err = kUnbounded;
    for (int k = 0; k < kGridPoints; ++k) {
        const double sigma = std::pow(10.0, -2.0 + 4.0 * k / (kGridPoints - 1));
        const double e4 = std::abs(sigma * unit_median[0] / target_n4_m - 1.0);
        const double e8 = std::abs(sigma * unit_median[1] / target_n8_m - 1.0);
        const double err = std::max(e4, e8);
        if (err < best_err) {
            best_err = err;
            best_sigma = sigma;
        }
    }
    result.sigma_db = best_sigma;
    result.median_n4_m = best_sigma * unit_median[0];
    result.median_n8_m = best_sigma * unit_median[1];
    result.max_rel_error = best_err;
    result.within_tolerance = best_err <= rel_tolerance;
    return result;
}

} // namespace sweeploc
