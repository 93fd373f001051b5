// SPDX-License-Identifier: Apache-2.0

#include "sweeploc/subcommands.hpp"

#include <cstdio>
#include <stdexcept>

#include "sweeploc/csv.hpp"

namespace sweeploc {

namespace {

// Calibration targets: the reference median error-bound levels the noise
// sigma is fitted against, and the acceptance band of the fit.
constexpr double kCalibrationTargetN4M = 0.74;
constexpr double kCalibrationTargetN8M = 0.11;
constexpr double kCalibrationTolerance = 0.15;

std::string run_one(const std::string& name, const SimulationConfig& cfg,
                    int workers, bool* calibration_ok) {
    const BeamSet beams = sls_beam_set(cfg.array);
    if (name == "rss-map") {
        return field_csv(rss_max_field(cfg.room, cfg.array, beams, cfg.link, workers));
    }
    if (name == "crlb-map") {
        return field_csv(crlb_field(cfg.room, cfg.array, beams, cfg.link, cfg.sigma_db,
                                    cfg.threshold_dbm, cfg.crlb_mask_mode, workers));
    }
    if (name == "nlse-map") {
        return field_csv(nlse_rmse_field(cfg.room, cfg.array, beams, cfg.link,
                                         cfg.sigma_db, cfg.threshold_dbm, cfg.trials,
                                         cfg.master_seed, cfg.estimator, workers));
    }
    if (name == "sweep-n") {
        return summary_csv(sweep_over_n(cfg.room, cfg.array, cfg.link, cfg.sigma_db,
                                        cfg.threshold_dbm, cfg.n_list, cfg.trials,
                                        cfg.master_seed, cfg.estimator, workers));
    }
    if (name == "cdf") {
        return cdf_csv(sweep_over_n(cfg.room, cfg.array, cfg.link, cfg.sigma_db,
                                    cfg.threshold_dbm, cfg.n_list, cfg.trials,
                                    cfg.master_seed, cfg.estimator, workers));
    }
    if (name == "calibrate") {
        const CalibrationResult result =
            calibrate_sigma(cfg.room, cfg.array, cfg.link, kCalibrationTargetN4M,
                            kCalibrationTargetN8M, kCalibrationTolerance, workers);
        *calibration_ok = result.within_tolerance;
        if (!result.within_tolerance) {
            std::fprintf(stderr,
                         "calibrate: no sigma matches both targets within %.0f%%: "
                         "best sigma_db=%.6g gives median(N=4)=%.4g m (target %.3g) "
                         "and median(N=8)=%.4g m (target %.3g), max relative error "
                         "%.3g\n",
                         100.0 * kCalibrationTolerance, result.sigma_db,
                         result.median_n4_m, result.target_n4_m, result.median_n8_m,
                         result.target_n8_m, result.max_rel_error);
        }
        return calibration_csv(result);
    }
    throw std::invalid_argument("unknown subcommand '" + name + "'");
}

} // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = {
        "rss-map", "crlb-map", "nlse-map", "sweep-n", "cdf", "calibrate"};
    return names;
}

int run_subcommand(const std::string& name, const SimulationConfig& cfg,
                   const std::string& out_path, int workers) {
    bool calibration_ok = true;
    std::string content;
    try {
        validate(cfg);
        content = run_one(name, cfg, workers, &calibration_ok);
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "%s: %s\n", name.c_str(), e.what());
        return kExitConfig;
    }
    try {
        write_text_file(out_path, content);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s: %s\n", name.c_str(), e.what());
        return kExitIo;
    }
    return calibration_ok ? kExitOk : kExitCalibration;
}

} // namespace sweeploc
