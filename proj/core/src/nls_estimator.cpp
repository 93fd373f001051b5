// SPDX-License-Identifier: Apache-2.0

#include "sweeploc/nls_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sweeploc {

namespace {

constexpr double kPi = 3.141592653589793238462643;
constexpr double kDbPerNep = 8.685889638065035; // 20 / ln(10)
constexpr double kDampingMin = 1e-12;
constexpr double kDampingMax = 1e12;

/// Everything that is constant across iterations of one estimate call.
struct Problem {
    const ObservationVector& obs;
    const ArrayConfig& array;
    const BeamSet& beams;
    double const_db;
    std::vector<int> detected;
};

Problem make_problem(const ObservationVector& obs, const ArrayConfig& array,
                     const BeamSet& beams, const LinkBudget& link) {
    Problem p{obs, array, beams, rss_const_db(link), {}};
    for (int i = 0; i < obs.size(); ++i)
        if (obs.detected[i]) p.detected.push_back(i);
    return p;
}

double beam_rss_from_gain(double base, double gain) {
    if (gain <= 0.0) return kRssFloorDbm;
    const double v = base + 20.0 * std::log10(gain);
    return v < kRssFloorDbm ? kRssFloorDbm : v;
}

double beam_rss(const Problem& p, double base, double psi) {
    const double gain =
        p.array.efficiency * array_factor_magnitude(psi, p.array.n_elements);
    return beam_rss_from_gain(base, gain);
}

double squared_residual(const Problem& p, const Position& pos) {
    const double d = std::hypot(pos.x, pos.y);
    if (d < 1e-9) return std::numeric_limits<double>::max();
    const double base = p.const_db - 40.0 * std::log10(d);
    const double cos_term = 2.0 * kPi * p.array.spacing_wavelengths * (pos.x / d);
    double ssr = 0.0;
    for (int i : p.detected) {
        const double r =
            p.obs.rss_dbm[i] - beam_rss(p, base, cos_term + p.beams.phases[i]);
        ssr += r * r;
    }
    return ssr;
}

/// Normal-equation sums at `pos`: H^T H, H^T r and the squared residual,
/// restricted to detected beams. Rows below the gain validity floor are
/// dropped from H but their residual still counts.
struct NormalEq {
    double a11 = 0.0, a12 = 0.0, a22 = 0.0;
    double g1 = 0.0, g2 = 0.0;
    double ssr = 0.0;
};

NormalEq normal_equations(const Problem& p, const Position& pos) {
    NormalEq eq;
    const double d = std::hypot(pos.x, pos.y);
    if (d < 1e-9) {
        eq.ssr = std::numeric_limits<double>::max();
        return eq;
    }
    const double base = p.const_db - 40.0 * std::log10(d);
    const double k = 2.0 * kPi * p.array.spacing_wavelengths;
    const double cos_term = k * (pos.x / d);
    const double d2 = d * d;
    const double d3 = d2 * d;
    const double dpsi_dx = k * pos.y * pos.y / d3;
    const double dpsi_dy = -k * pos.x * pos.y / d3;
    const int n = p.array.n_elements;
    for (int i : p.detected) {
        const double psi = cos_term + p.beams.phases[i];
        const double gain = p.array.efficiency * array_factor_magnitude(psi, n);
        const double rss = beam_rss_from_gain(base, gain);
        const double r = p.obs.rss_dbm[i] - rss;
        eq.ssr += r * r;
        if (gain < kMinBeamGain) continue;
        const double dlog = array_factor_log_magnitude_dpsi(psi, n);
        const double hx = kDbPerNep * (dlog * dpsi_dx - 2.0 * pos.x / d2);
        const double hy = kDbPerNep * (dlog * dpsi_dy - 2.0 * pos.y / d2);
        eq.a11 += hx * hx;
        eq.a12 += hx * hy;
        eq.a22 += hy * hy;
        eq.g1 += hx * r;
        eq.g2 += hy * r;
    }
    return eq;
}

bool solve_damped(const NormalEq& eq, double damping, double* dx, double* dy) {
    const double m11 = eq.a11 * (1.0 + damping);
    const double m22 = eq.a22 * (1.0 + damping);
    const double det = m11 * m22 - eq.a12 * eq.a12;
    const double scale = std::max(std::abs(m11 * m22), eq.a12 * eq.a12);
    if (!(det > 1e-14 * scale) || scale == 0.0) return false;
    *dx = (m22 * eq.g1 - eq.a12 * eq.g2) / det;
    *dy = (m11 * eq.g2 - eq.a12 * eq.g1) / det;
    return true;
}

GnStep damped_step(const Problem& p, const Position& candidate, double damping,
                   const Rect* clamp_region) {
    GnStep step;
    step.next = candidate;
    step.damping = damping;
    const NormalEq eq = normal_equations(p, candidate);
    double dx = 0.0, dy = 0.0;
    bool solved = false;
    for (int attempt = 0; attempt < 10; ++attempt) {
        if (solve_damped(eq, step.damping, &dx, &dy)) {
            solved = true;
            break;
        }
        step.damping *= 4.0;
    }
    step.solved = solved;
    if (!solved) return step;

    Position trial{candidate.x + dx, candidate.y + dy};
    if (clamp_region) trial = clamp_region->clamp(trial);
    const double trial_ssr = squared_residual(p, trial);
    step.step_norm = std::hypot(trial.x - candidate.x, trial.y - candidate.y);
    if (trial_ssr < eq.ssr) {
        step.accepted = true;
        step.next = trial;
        step.damping = std::max(step.damping * 0.5, kDampingMin);
    } else {
        step.accepted = false;
        step.damping *= 4.0;
    }
    return step;
}

Position transpose_step(const Problem& p, const Position& candidate) {
    const NormalEq eq = normal_equations(p, candidate);
    return {candidate.x - eq.g1, candidate.y - eq.g2};
}

struct RunOutcome {
    Position pos{};
    double ssr = 0.0;
    int iterations = 0;
    bool converged = false;
};

RunOutcome run_from(const Problem& p, const EstimatorConfig& cfg, Position seed,
                    const Rect& region) {
    RunOutcome out;
    out.pos = region.clamp(seed);
    double damping = cfg.damping_initial;
    for (int iter = 0; iter < cfg.max_iterations; ++iter) {
        out.iterations = iter + 1;
        if (cfg.method == EstimatorMethod::gauss_newton_damped) {
            const GnStep step = damped_step(p, out.pos, damping, &region);
            damping = step.damping;
            if (!step.solved) break;
            if (step.accepted) {
                out.pos = step.next;
                if (step.step_norm < cfg.step_tolerance) {
                    out.converged = true;
                    break;
                }
            } else if (damping > kDampingMax) {
                break;
            }
        } else {
            const Position next = region.clamp(transpose_step(p, out.pos));
            const double moved = std::hypot(next.x - out.pos.x, next.y - out.pos.y);
            out.pos = next;
            if (moved < cfg.step_tolerance) {
                out.converged = true;
                break;
            }
        }
    }
    out.ssr = squared_residual(p, out.pos);
    return out;
}

/// Seeds from the ray-reduced objective. Along a fixed azimuth the gains
/// are constant and only the -40*log10(d) term varies, so the best range
/// for that azimuth is closed-form: with a_i = s_i - C - 20*log10(g_i),
/// log10(d*) = -mean(a_i)/40 and the ray cost is the variance of the a_i.
/// A dense scan of that cost over the sector neighborhood of the strongest
/// detected beam locates the global valley that a coarse 2-D grid misses.
void append_ray_seeds(const Problem& p, const Rect& region,
                      std::vector<Position>& seeds) {
    int best = p.detected.front();
    for (int i : p.detected)
        if (p.obs.rss_dbm[i] > p.obs.rss_dbm[best]) best = i;

    const int n = p.array.n_elements;
    const double half_window = 2.5 * kPi / n;
    const double phi_lo = std::max(p.beams.boresights[best] - half_window, 1e-3);
    const double phi_hi = std::min(p.beams.boresights[best] + half_window, kPi - 1e-3);
    constexpr int kScan = 1024;
    const double k = 2.0 * kPi * p.array.spacing_wavelengths;

    std::vector<double> cost(kScan);
    std::vector<double> range(kScan);
    for (int s = 0; s < kScan; ++s) {
        const double phi = phi_lo + (s + 0.5) * (phi_hi - phi_lo) / kScan;
        const double cos_phi = std::cos(phi);
        double sum = 0.0, sum_sq = 0.0;
        for (int i : p.detected) {
            const double gain = std::max(
                p.array.efficiency *
                    array_factor_magnitude(k * cos_phi + p.beams.phases[i], n),
                1e-12);
            const double a = p.obs.rss_dbm[i] - p.const_db - 20.0 * std::log10(gain);
            sum += a;
            sum_sq += a * a;
        }
        const double count = static_cast<double>(p.detected.size());
        const double mean = sum / count;
        cost[s] = sum_sq - count * mean * mean;
        range[s] = std::clamp(std::pow(10.0, -mean / 40.0), 0.02, 1e3);
    }

    std::vector<std::pair<double, int>> minima;
    for (int s = 0; s < kScan; ++s) {
        const bool left_ok = s == 0 || cost[s] <= cost[s - 1];
        const bool right_ok = s == kScan - 1 || cost[s] <= cost[s + 1];
        if (left_ok && right_ok) minima.emplace_back(cost[s], s);
    }
    std::sort(minima.begin(), minima.end());
    const std::size_t keep = std::min<std::size_t>(minima.size(), 6);
    for (std::size_t j = 0; j < keep; ++j) {
        const int s = minima[j].second;
        const double phi = phi_lo + (s + 0.5) * (phi_hi - phi_lo) / kScan;
        seeds.push_back(region.clamp(
            {range[s] * std::cos(phi), range[s] * std::sin(phi)}));
    }
}

/// Ordering for multistart selection: smaller residual wins. Observations
/// with only two detected beams admit several exact-fit positions, so runs
/// can tie at numerical dust; such near-ties resolve toward the strongest
/// detected beam's sector (the measurement says the UE is there), then
/// toward smaller |x|, then lexicographic (x, y). Deterministic throughout.
bool better_outcome(const RunOutcome& a, const RunOutcome& b, double theta_best) {
    // Converged runs carry residual dust up to (||H|| * step_tolerance)^2,
    // so the band has to be loose enough to recognize exact-fit ties.
    const double tie_band = 0.05 * std::max(1.0, std::max(a.ssr, b.ssr));
    if (std::abs(a.ssr - b.ssr) > tie_band) return a.ssr < b.ssr;
    const double off_a = std::abs(std::atan2(a.pos.y, a.pos.x) - theta_best);
    const double off_b = std::abs(std::atan2(b.pos.y, b.pos.x) - theta_best);
    if (off_a != off_b) return off_a < off_b;
    if (std::abs(a.pos.x) != std::abs(b.pos.x))
        return std::abs(a.pos.x) < std::abs(b.pos.x);
    if (a.pos.x != b.pos.x) return a.pos.x < b.pos.x;
    return a.pos.y < b.pos.y;
}

} // namespace

void validate(const EstimatorConfig& cfg, const std::string& key_prefix) {
    if (cfg.max_iterations < 1)
        throw std::invalid_argument(key_prefix + "max_iterations: must be >= 1");
    if (!(cfg.step_tolerance > 0.0))
        throw std::invalid_argument(key_prefix + "step_tolerance: must be > 0");
    if (cfg.multistart_grid < 1)
        throw std::invalid_argument(key_prefix + "multistart_grid: must be >= 1");
    if (!(cfg.damping_initial > 0.0))
        throw std::invalid_argument(key_prefix + "damping_initial: must be > 0");
}

Position Rect::clamp(const Position& p) const {
    return {std::clamp(p.x, x_min, x_max), std::clamp(p.y, y_min, y_max)};
}

std::vector<double> residual(const Position& candidate, const ObservationVector& obs,
                             const ArrayConfig& array, const BeamSet& beams,
                             const LinkBudget& link) {
    const Problem p = make_problem(obs, array, beams, link);
    if (p.detected.empty())
        throw UnlocalizableError("residual: observation has no detected beams");
    const double d = std::hypot(candidate.x, candidate.y);
    if (d == 0.0)
        throw std::domain_error("residual: candidate at the base station");
    const double base = p.const_db - 40.0 * std::log10(d);
    const double cos_term = 2.0 * kPi * array.spacing_wavelengths * (candidate.x / d);
    std::vector<double> r;
    r.reserve(p.detected.size());
    for (int i : p.detected)
        r.push_back(obs.rss_dbm[i] - beam_rss(p, base, cos_term + beams.phases[i]));
    return r;
}

Position newton_transpose_step(const Position& candidate, const ObservationVector& obs,
                               const ArrayConfig& array, const BeamSet& beams,
                               const LinkBudget& link) {
    const Problem p = make_problem(obs, array, beams, link);
    if (p.detected.empty())
        throw UnlocalizableError("newton_transpose_step: no detected beams");
    return transpose_step(p, candidate);
}

GnStep gauss_newton_step(const Position& candidate, const ObservationVector& obs,
                         const ArrayConfig& array, const BeamSet& beams,
                         const LinkBudget& link, double damping,
                         const Rect* clamp_region) {
    const Problem p = make_problem(obs, array, beams, link);
    if (p.detected.empty())
        throw UnlocalizableError("gauss_newton_step: no detected beams");
    return damped_step(p, candidate, damping, clamp_region);
}

EstimatorResult estimate(const ObservationVector& obs, const ArrayConfig& array,
                         const BeamSet& beams, const LinkBudget& link,
                         const EstimatorConfig& cfg, const Rect& search_region) {
    validate(cfg);
    if (!(search_region.x_max >= search_region.x_min) ||
        !(search_region.y_max >= search_region.y_min))
        throw std::invalid_argument("estimate: empty search region");
    const Problem p = make_problem(obs, array, beams, link);
    if (p.detected.empty())
        throw UnlocalizableError("estimate: observation has no detected beams");

    const int g = cfg.multistart_grid;
    const double w = search_region.x_max - search_region.x_min;
    const double h = search_region.y_max - search_region.y_min;

    // Uniform multistart grid, augmented with seeds from the ray-reduced
    // objective. The acquisition surface is multimodal from the side lobes,
    // and a coarse grid alone measurably misses the global basin at larger N.
    std::vector<Position> seeds;
    if (p.detected.size() == 1) {
        // Rank-deficient observation: the residual vanishes along a whole
        // ridge, so multistart would pick an arbitrary ridge point. Seed the
        // sector center at the peak-inverted range, the minimal-expected-
        // error point, and let the iteration zero the level radially.
        const int i = p.detected.front();
        const double peak_db =
            20.0 * std::log10(array.efficiency * array.n_elements);
        const double range = std::clamp(
            std::pow(10.0, (p.const_db + peak_db - obs.rss_dbm[i]) / 40.0), 0.02,
            1e3);
        const double theta = beams.boresights[i];
        seeds.push_back(search_region.clamp(
            {range * std::cos(theta), range * std::sin(theta)}));
    } else {
        seeds.reserve(static_cast<std::size_t>(g) * g + 6);
        for (int gy = 0; gy < g; ++gy)
            for (int gx = 0; gx < g; ++gx)
                seeds.push_back({search_region.x_min + (gx + 0.5) * w / g,
                                 search_region.y_min + (gy + 0.5) * h / g});
        append_ray_seeds(p, search_region, seeds);
    }

    int strongest = p.detected.front();
    for (int i : p.detected)
        if (obs.rss_dbm[i] > obs.rss_dbm[strongest]) strongest = i;
    const double theta_best = beams.boresights[strongest];

    RunOutcome best;
    bool have_best = false;
    int best_iterations = 0;
    bool best_converged = false;
    for (const Position& seed : seeds) {
        const RunOutcome out = run_from(p, cfg, seed, search_region);
        if (!have_best || better_outcome(out, best, theta_best)) {
            best = out;
            best_iterations = out.iterations;
            best_converged = out.converged;
            have_best = true;
        }
    }

    EstimatorResult result;
    result.estimate = best.pos;
    result.iterations = best_iterations;
    result.converged = best_converged;
    result.residual_norm = std::sqrt(best.ssr);
    result.detected_count = static_cast<int>(p.detected.size());
    return result;
}

} // namespace sweeploc
