// SPDX-License-Identifier: Apache-2.0

#include "sweeploc/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace sweeploc {

std::string format_g9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

std::string field_csv(const FieldMap& field) {
    std::string out = "x_m,y_m,value,unbounded\n";
    out.reserve(out.size() + field.values.size() * 32);
    const int nx = field.room.nx();
    const int ny = field.room.ny();
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const int cell = iy * nx + ix;
            out += format_g9(field.room.x_at(ix));
            out += ',';
            out += format_g9(field.room.y_at(iy));
            out += ',';
            out += format_g9(field.values[cell]);
            out += ',';
            out += field.unbounded[cell] ? '1' : '0';
            out += '\n';
        }
    }
    return out;
}

std::string summary_csv(const std::vector<MetricsSummary>& summaries) {
    std::string out =
        "n,variant,median_rmse_m,one_meter_coverage_pct,coverage_probability\n";
    for (const MetricsSummary& s : summaries) {
        out += std::to_string(s.n_elements);
        out += ',';
        out += s.variant;
        out += ',';
        out += format_g9(s.median_rmse_m);
        out += ',';
        out += format_g9(s.one_meter_coverage_pct);
        out += ',';
        out += format_g9(s.coverage_probability);
        out += '\n';
    }
    return out;
}

std::string cdf_csv(const std::vector<MetricsSummary>& summaries) {
    std::string out = "n,variant,error_m,probability\n";
    for (const MetricsSummary& s : summaries) {
        for (const auto& [error_m, probability] : s.cdf) {
            out += std::to_string(s.n_elements);
            out += ',';
            out += s.variant;
            out += ',';
            out += format_g9(error_m);
            out += ',';
            out += format_g9(probability);
            out += '\n';
        }
    }
    return out;
}

std::string calibration_csv(const CalibrationResult& result) {
    std::string out =
        "sigma_db,median_crlb_n4_m,median_crlb_n8_m,target_n4_m,target_n8_m,"
        "max_rel_error,within_tolerance\n";
    out += format_g9(result.sigma_db);
    out += ',';
    out += format_g9(result.median_n4_m);
    out += ',';
    out += format_g9(result.median_n8_m);
    out += ',';
    out += format_g9(result.target_n4_m);
    out += ',';
    out += format_g9(result.target_n8_m);
    out += ',';
    out += format_g9(result.max_rel_error);
    out += ',';
    out += result.within_tolerance ? '1' : '0';
    out += '\n';
    return out;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file)
        throw std::runtime_error("cannot open '" + path + "' for writing");
    file.write(content.data(), static_cast<std::streamsize>(content.size()));
    file.flush();
    if (!file)
        throw std::runtime_error("write to '" + path + "' failed");
}

} // namespace sweeploc
