// SPDX-License-Identifier: Apache-2.0
//
// CSV emission for fields, sweep summaries, CDFs, and calibration output.
// Values are written with 9 significant digits; +inf prints as "inf".
// Output is deterministic byte-for-byte for a given input.

#ifndef SWEEPLOC_CSV_HPP
#define SWEEPLOC_CSV_HPP

#include <string>
#include <vector>

#include "sweeploc/field_sim.hpp"

namespace sweeploc {

/// %.9g formatting used for every numeric CSV cell.
std::string format_g9(double v);

/// Header "x_m,y_m,value,unbounded", one row per cell, row-major by y then x.
std::string field_csv(const FieldMap& field);

/// Header "n,variant,median_rmse_m,one_meter_coverage_pct,coverage_probability".
std::string summary_csv(const std::vector<MetricsSummary>& summaries);

/// Header "n,variant,error_m,probability", the full empirical CDF per summary.
std::string cdf_csv(const std::vector<MetricsSummary>& summaries);

/// Header "sigma_db,median_crlb_n4_m,median_crlb_n8_m,target_n4_m,target_n8_m,
/// max_rel_error,within_tolerance".
std::string calibration_csv(const CalibrationResult& result);

/// Write `content` to `path`, throwing std::runtime_error on any I/O failure.
void write_text_file(const std::string& path, const std::string& content);

} // namespace sweeploc

#endif // SWEEPLOC_CSV_HPP
