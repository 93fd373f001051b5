// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sweeploc/field_sim.hpp"
#include "sweeploc/nls_estimator.hpp"
#include "test_util.hpp"

using namespace sweeploc;

namespace {

constexpr double kPi = 3.141592653589793238462643;

const LinkBudget kLink{};
const Rect kRoomRegion{-4.0, 4.0, 1e-3, 8.0};

/// Noiseless observation with detection truncation at `threshold`: the
/// beams a receiver would actually report.
ObservationVector noiseless_obs(const Position& truth, const ArrayConfig& array,
                                const BeamSet& beams, double threshold = -73.0) {
    ObservationVector obs;
    obs.rss_dbm = exact_profile(truth, array, beams, kLink);
    obs.detected.resize(obs.rss_dbm.size());
    for (std::size_t i = 0; i < obs.rss_dbm.size(); ++i)
        obs.detected[i] = obs.rss_dbm[i] >= threshold ? 1 : 0;
    obs.sigma_db = 1.0;
    return obs;
}

/// Cancel the (tiny) floating-point residual so r(truth) is exactly zero.
void zero_residual_at(const Position& truth, ObservationVector& obs,
                      const ArrayConfig& array, const BeamSet& beams) {
    const auto r = residual(truth, obs, array, beams, kLink);
    std::size_t j = 0;
    for (std::size_t i = 0; i < obs.rss_dbm.size(); ++i)
        if (obs.detected[i]) obs.rss_dbm[i] -= r[j++];
}

double ssr(const Position& candidate, const ObservationVector& obs,
           const ArrayConfig& array, const BeamSet& beams) {
    double total = 0.0;
    for (double r : residual(candidate, obs, array, beams, kLink)) total += r * r;
    return total;
}

} // namespace

TEST_CASE("residual: exactness at the truth and masking contract") {
    const ArrayConfig array{8, 0.5, 1.0};
    const BeamSet beams = sls_beam_set(array);
    const Position truth{1.0, 2.0};

    SUBCASE("zero residual at the true pose for a noiseless observation") {
        const auto obs = noiseless_obs(truth, array, beams);
        for (double r : residual(truth, obs, array, beams, kLink))
            CHECK(std::abs(r) < 1e-12);
    }
    SUBCASE("residual length equals the detected count, in beam order") {
        ObservationVector obs = noiseless_obs(truth, array, beams);
        obs.detected.assign(8, 0);
        obs.detected[2] = obs.detected[5] = 1;
        const auto r = residual(truth, obs, array, beams, kLink);
        REQUIRE(r.size() == 2);
        CHECK(std::abs(r[0]) < 1e-12);
        CHECK(std::abs(r[1]) < 1e-12);
    }
    SUBCASE("zero detections is unlocalizable") {
        ObservationVector obs = noiseless_obs(truth, array, beams);
        obs.detected.assign(8, 0);
        CHECK_THROWS_AS(residual(truth, obs, array, beams, kLink), UnlocalizableError);
    }
}

TEST_CASE("residual at the truth beats a 1 m offset in expectation") {
    const ArrayConfig array{8, 0.5, 1.0};
    const BeamSet beams = sls_beam_set(array);
    const Position truth{1.0, 2.0};
    const auto profile = exact_profile(truth, array, beams, kLink);
    double at_truth = 0.0, offset = 0.0;
    for (int t = 0; t < 1000; ++t) {
        RngStream rng = RngStream::for_cell_trial(5, 0, static_cast<std::uint64_t>(t));
        const auto obs = synthesize_observation(profile, 1.0, -1e9, rng);
        at_truth += ssr(truth, obs, array, beams);
        offset += ssr({truth.x + 1.0, truth.y}, obs, array, beams);
    }
    CHECK(at_truth / 1000.0 < offset / 1000.0);
}

TEST_CASE("transpose update: fixed points") {
    const ArrayConfig array{8, 0.5, 1.0};
    const BeamSet beams = sls_beam_set(array);

    SUBCASE("zero residual does not move") {
        const Position truth{1.0, 2.0};
        ObservationVector obs = noiseless_obs(truth, array, beams);
        zero_residual_at(truth, obs, array, beams);
        const Position next = newton_transpose_step(truth, obs, array, beams, kLink);
        CHECK(next.x == truth.x);
        CHECK(next.y == truth.y);
    }
    SUBCASE("invalid (null-gain) rows zero the update") {
        // Park the candidate on a null of beam 0: psi = -pi/4 zeroes
        // sin(4*psi) while sin(psi/2) stays finite, so the row is dropped
        // and H^T r vanishes even though the residual is large.
        const double cos_phi = (-kPi / 4 - beams.phases[0]) / kPi;
        REQUIRE(std::abs(cos_phi) <= 1.0);
        const double phi = std::acos(cos_phi);
        const Position on_null{3.0 * std::cos(phi), 3.0 * std::sin(phi)};
        const auto [p, d] = azimuth_and_distance(on_null);
        REQUIRE(beam_gain(p, 0, array, beams) < 1e-6);

        ObservationVector obs;
        obs.rss_dbm.assign(8, -60.0);
        obs.detected.assign(8, 0);
        obs.detected[0] = 1;
        obs.sigma_db = 2.0;

        const Position next = newton_transpose_step(on_null, obs, array, beams, kLink);
        CHECK(next.x == on_null.x);
        CHECK(next.y == on_null.y);

        const GnStep step =
            gauss_newton_step(on_null, obs, array, beams, kLink, 1e-2, nullptr);
        CHECK_FALSE(step.solved);
        CHECK(step.next.x == on_null.x);
        CHECK(step.next.y == on_null.y);
    }
}

TEST_CASE("transpose update ascends the squared residual near the optimum") {
    const ArrayConfig array{8, 0.5, 1.0};
    const BeamSet beams = sls_beam_set(array);
    const Position truth{1.5, 2.5};
    const auto obs = noiseless_obs(truth, array, beams);
    const Position start{truth.x + 1e-3, truth.y - 1e-3};
    const double before = ssr(start, obs, array, beams);
    const Position after = newton_transpose_step(start, obs, array, beams, kLink);
    CHECK(ssr(after, obs, array, beams) > before);
}

TEST_CASE("damped Gauss-Newton step behavior") {
    const ArrayConfig array{16, 0.5, 1.0};
    const BeamSet beams = sls_beam_set(array);

    SUBCASE("one accepted step near the optimum contracts the error") {
        const Position truth{1.0, 3.0};
        const auto obs = noiseless_obs(truth, array, beams);
        const Position start{truth.x + 1e-3, truth.y - 1e-3};
        const GnStep step = gauss_newton_step(start, obs, array, beams, kLink, 1e-4,
                                              &kRoomRegion);
        REQUIRE(step.solved);
        REQUIRE(step.accepted);
        const double before = std::hypot(start.x - truth.x, start.y - truth.y);
        const double after =
            std::hypot(step.next.x - truth.x, step.next.y - truth.y);
        CHECK(after < 0.1 * before);
        CHECK(step.damping == doctest::Approx(0.5e-4));
    }
    SUBCASE("iterating the step from 0.2 m away recovers the truth") {
        const Position truth{1.0, 3.0};
        const auto obs = noiseless_obs(truth, array, beams);
        Position pos{truth.x + 0.14, truth.y + 0.14};
        double damping = 1e-2;
        for (int k = 0; k < 100; ++k) {
            const GnStep step =
                gauss_newton_step(pos, obs, array, beams, kLink, damping, &kRoomRegion);
            damping = step.damping;
            if (!step.solved) break;
            pos = step.next;
            if (step.accepted && step.step_norm < 1e-7) break;
        }
        CHECK(std::hypot(pos.x - truth.x, pos.y - truth.y) < 1e-3);
    }
    SUBCASE("rejected steps hold position; accepted steps never raise the residual") {
        const Position truth{-1.0, 2.4};
        const auto profile = exact_profile(truth, array, beams, kLink);
        RngStream rng = RngStream::for_cell_trial(17, 3, 1);
        const auto obs = synthesize_observation(profile, 2.0, -1e9, rng);
        Position pos{3.5, 7.5};
        double damping = 1e-2;
        double current = ssr(pos, obs, array, beams);
        for (int k = 0; k < 40; ++k) {
            const GnStep step =
                gauss_newton_step(pos, obs, array, beams, kLink, damping, &kRoomRegion);
            if (!step.solved) break;
            if (step.accepted) {
                const double next_ssr = ssr(step.next, obs, array, beams);
                CHECK(next_ssr < current);
                current = next_ssr;
                pos = step.next;
            } else {
                CHECK(step.next.x == pos.x);
                CHECK(step.next.y == pos.y);
                CHECK(step.damping > damping);
            }
            damping = step.damping;
        }
    }
}

TEST_CASE("multistart estimation") {
    const EstimatorConfig cfg{};

    SUBCASE("noiseless 32-element observation pins the pose to a millimeter") {
        const ArrayConfig array{32, 0.5, 1.0};
        const BeamSet beams = sls_beam_set(array);
        const Position truth{1.0, 3.0};
        const auto obs = noiseless_obs(truth, array, beams);
        REQUIRE(obs.detected_count() >= 1);
        const EstimatorResult result =
            estimate(obs, array, beams, kLink, cfg, kRoomRegion);
        CHECK(std::hypot(result.estimate.x - truth.x, result.estimate.y - truth.y) <
              1e-3);
        CHECK(result.converged);
        CHECK(result.detected_count == obs.detected_count());
        CHECK(result.residual_norm < 1e-2);
    }
    SUBCASE("zero detections throws") {
        const ArrayConfig array{8, 0.5, 1.0};
        const BeamSet beams = sls_beam_set(array);
        ObservationVector obs;
        obs.rss_dbm.assign(8, -200.0);
        obs.detected.assign(8, 0);
        obs.sigma_db = 2.0;
        CHECK_THROWS_AS(estimate(obs, array, beams, kLink, cfg, kRoomRegion),
                        UnlocalizableError);
    }
    SUBCASE("a broadside pose stays pinned to the mirror axis") {
        const ArrayConfig array{16, 0.5, 1.0};
        const BeamSet beams = sls_beam_set(array);
        const Position truth{0.0, 3.0};
        const auto obs = noiseless_obs(truth, array, beams);
        const EstimatorResult result =
            estimate(obs, array, beams, kLink, cfg, kRoomRegion);
        CHECK(std::abs(result.estimate.x) < 1e-6);
        CHECK(result.estimate.y == doctest::Approx(3.0).epsilon(1e-6));
    }
    SUBCASE("noiseless consistency with threshold-truncated detection") {
        TestRng rng(31337);
        for (int n : {8, 16}) {
            const ArrayConfig array{n, 0.5, 1.0};
            const BeamSet beams = sls_beam_set(array);
            int checked = 0;
            while (checked < 8) {
                const Position truth{rng.uniform(-3.5, 3.5), rng.uniform(0.5, 7.5)};
                ObservationVector obs;
                obs.rss_dbm = exact_profile(truth, array, beams, kLink);
                obs.detected.resize(n);
                for (int i = 0; i < n; ++i)
                    obs.detected[i] = obs.rss_dbm[i] >= -73.0 ? 1 : 0;
                obs.sigma_db = 1.0;
                if (obs.detected_count() < 3) continue;
                const EstimatorResult result =
                    estimate(obs, array, beams, kLink, cfg, kRoomRegion);
                CHECK(std::hypot(result.estimate.x - truth.x,
                                 result.estimate.y - truth.y) < 1e-3);
                ++checked;
            }
        }
    }
    SUBCASE("estimation is deterministic") {
        const ArrayConfig array{16, 0.5, 1.0};
        const BeamSet beams = sls_beam_set(array);
        const auto profile = exact_profile({2.0, 2.0}, array, beams, kLink);
        RngStream rng = RngStream::for_cell_trial(9, 100, 5);
        const auto obs = synthesize_observation(profile, 2.0, -73.0, rng);
        if (obs.detected_count() > 0) {
            const EstimatorResult a = estimate(obs, array, beams, kLink, cfg, kRoomRegion);
            const EstimatorResult b = estimate(obs, array, beams, kLink, cfg, kRoomRegion);
            CHECK(a.estimate.x == b.estimate.x);
            CHECK(a.estimate.y == b.estimate.y);
            CHECK(a.residual_norm == b.residual_norm);
            CHECK(a.iterations == b.iterations);
        }
    }
}

TEST_CASE("estimator config validation") {
    EstimatorConfig cfg;
    cfg.max_iterations = 0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = {};
    cfg.step_tolerance = 0.0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    cfg = {};
    cfg.multistart_grid = 0;
    CHECK_THROWS_AS(validate(cfg), std::invalid_argument);
    CHECK_NOTHROW(validate(EstimatorConfig{}));
}
