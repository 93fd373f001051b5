// SPDX-License-Identifier: Apache-2.0

#include "sweeploc/sim_config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

namespace sweeploc {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(int line, const std::string& message) {
    throw std::invalid_argument("line " + std::to_string(line) + ": " + message);
}

double parse_double(const std::string& value, int line, const std::string& key) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        fail(line, key + ": expected a number, got '" + value + "'");
    return v;
}

long long parse_int(const std::string& value, int line, const std::string& key) {
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE)
        fail(line, key + ": expected an integer, got '" + value + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& value, int line, const std::string& key) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || errno == ERANGE ||
        value.find('-') != std::string::npos)
        fail(line, key + ": expected an unsigned integer, got '" + value + "'");
    return static_cast<std::uint64_t>(v);
}

std::vector<int> parse_int_list(const std::string& value, int line,
                                const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(line, key + ": empty list element");
        out.push_back(static_cast<int>(parse_int(item, line, key)));
    }
    if (out.empty()) fail(line, key + ": list must not be empty");
    return out;
}

EstimatorMethod parse_method(const std::string& value, int line) {
    if (value == "gauss-newton-damped") return EstimatorMethod::gauss_newton_damped;
    if (value == "newton-transpose") return EstimatorMethod::newton_transpose;
    fail(line, "estimator.method: unknown method '" + value +
                   "' (expected gauss-newton-damped or newton-transpose)");
}

CrlbMaskMode parse_mask_mode(const std::string& value, int line) {
    if (value == "detected") return CrlbMaskMode::detected;
    if (value == "all") return CrlbMaskMode::all_beams;
    fail(line, "crlb_mask_mode: unknown mode '" + value +
                   "' (expected detected or all)");
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string to_string(EstimatorMethod method) {
    return method == EstimatorMethod::gauss_newton_damped ? "gauss-newton-damped"
                                                          : "newton-transpose";
}

std::string to_string(CrlbMaskMode mode) {
    return mode == CrlbMaskMode::detected ? "detected" : "all";
}

void validate(const SimulationConfig& cfg) {
    validate(cfg.room, "room.");
    validate(cfg.array, "array.");
    validate(cfg.link, "link.");
    validate(cfg.estimator, "estimator.");
    if (!(cfg.sigma_db > 0.0))
        throw std::invalid_argument("sigma_db: must be > 0");
    if (!(cfg.threshold_dbm > -1e9 && cfg.threshold_dbm < 1e9))
        throw std::invalid_argument("threshold_dbm: must be finite");
    if (cfg.n_list.empty())
        throw std::invalid_argument("n_list: must not be empty");
    for (int n : cfg.n_list)
        if (n < 1) throw std::invalid_argument("n_list: every N must be >= 1");
    if (cfg.trials < 1)
        throw std::invalid_argument("trials: must be >= 1");
}

SimulationConfig parse_simulation_config(const std::string& text) {
    SimulationConfig cfg;
    std::stringstream stream(text);
    std::string raw;
    int line = 0;
    while (std::getline(stream, raw)) {
        ++line;
        const std::size_t hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        const std::string stripped = trim(raw);
        if (stripped.empty()) continue;
        const std::size_t eq = stripped.find('=');
        if (eq == std::string::npos)
            fail(line, "expected 'key = value', got '" + stripped + "'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (key.empty()) fail(line, "missing key before '='");
        if (value.empty()) fail(line, key + ": missing value");

        if (key == "room.width") cfg.room.width = parse_double(value, line, key);
        else if (key == "room.depth") cfg.room.depth = parse_double(value, line, key);
        else if (key == "room.grid_step") cfg.room.grid_step = parse_double(value, line, key);
        else if (key == "array.n_elements") cfg.array.n_elements = static_cast<int>(parse_int(value, line, key));
        else if (key == "array.spacing_wavelengths") cfg.array.spacing_wavelengths = parse_double(value, line, key);
        else if (key == "array.efficiency") cfg.array.efficiency = parse_double(value, line, key);
        else if (key == "link.tx_power_dbm") cfg.link.tx_power_dbm = parse_double(value, line, key);
        else if (key == "link.rx_gain_db") cfg.link.rx_gain_db = parse_double(value, line, key);
        else if (key == "link.loss_db") cfg.link.loss_db = parse_double(value, line, key);
        else if (key == "link.carrier_hz") cfg.link.carrier_hz = parse_double(value, line, key);
        else if (key == "estimator.method") cfg.estimator.method = parse_method(value, line);
        else if (key == "estimator.max_iterations") cfg.estimator.max_iterations = static_cast<int>(parse_int(value, line, key));
        else if (key == "estimator.step_tolerance") cfg.estimator.step_tolerance = parse_double(value, line, key);
        else if (key == "estimator.multistart_grid") cfg.estimator.multistart_grid = static_cast<int>(parse_int(value, line, key));
        else if (key == "estimator.damping_initial") cfg.estimator.damping_initial = parse_double(value, line, key);
        else if (key == "sigma_db") cfg.sigma_db = parse_double(value, line, key);
        else if (key == "threshold_dbm") cfg.threshold_dbm = parse_double(value, line, key);
        else if (key == "master_seed") cfg.master_seed = parse_u64(value, line, key);
        else if (key == "n_list") cfg.n_list = parse_int_list(value, line, key);
        else if (key == "trials") cfg.trials = static_cast<int>(parse_int(value, line, key));
        else if (key == "crlb_mask_mode") cfg.crlb_mask_mode = parse_mask_mode(value, line);
        else fail(line, "unknown key '" + key + "'");
    }
    validate(cfg);
    return cfg;
}

std::string serialize_simulation_config(const SimulationConfig& cfg) {
    std::ostringstream out;
    out << "room.width = " << format_full(cfg.room.width) << "\n";
    out << "room.depth = " << format_full(cfg.room.depth) << "\n";
    out << "room.grid_step = " << format_full(cfg.room.grid_step) << "\n";
    out << "array.n_elements = " << cfg.array.n_elements << "\n";
    out << "array.spacing_wavelengths = " << format_full(cfg.array.spacing_wavelengths) << "\n";
    out << "array.efficiency = " << format_full(cfg.array.efficiency) << "\n";
    out << "link.tx_power_dbm = " << format_full(cfg.link.tx_power_dbm) << "\n";
    out << "link.rx_gain_db = " << format_full(cfg.link.rx_gain_db) << "\n";
    out << "link.loss_db = " << format_full(cfg.link.loss_db) << "\n";
    out << "link.carrier_hz = " << format_full(cfg.link.carrier_hz) << "\n";
    out << "estimator.method = " << to_string(cfg.estimator.method) << "\n";
    out << "estimator.max_iterations = " << cfg.estimator.max_iterations << "\n";
    out << "estimator.step_tolerance = " << format_full(cfg.estimator.step_tolerance) << "\n";
    out << "estimator.multistart_grid = " << cfg.estimator.multistart_grid << "\n";
    out << "estimator.damping_initial = " << format_full(cfg.estimator.damping_initial) << "\n";
    out << "sigma_db = " << format_full(cfg.sigma_db) << "\n";
    out << "threshold_dbm = " << format_full(cfg.threshold_dbm) << "\n";
    out << "master_seed = " << cfg.master_seed << "\n";
    out << "n_list = ";
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i)
        out << (i ? "," : "") << cfg.n_list[i];
    out << "\n";
    out << "trials = " << cfg.trials << "\n";
    out << "crlb_mask_mode = " << to_string(cfg.crlb_mask_mode) << "\n";
    return out.str();
}

} // namespace sweeploc
