// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "sweeploc/field_sim.hpp"

using namespace sweeploc;

namespace {

const LinkBudget kLink{};

void BM_array_factor_magnitude(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    double psi = 0.37;
    for (auto _ : state) {
        benchmark::DoNotOptimize(array_factor_magnitude(psi, n));
        psi += 1e-3;
    }
}
BENCHMARK(BM_array_factor_magnitude)->Arg(8)->Arg(32)->Arg(64);

void BM_array_factor_complex_sum(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    double psi = 0.37;
    for (auto _ : state) {
        benchmark::DoNotOptimize(array_factor_complex(psi, n));
        psi += 1e-3;
    }
}
BENCHMARK(BM_array_factor_complex_sum)->Arg(8)->Arg(32)->Arg(64);

void BM_exact_profile(benchmark::State& state) {
    const ArrayConfig array{static_cast<int>(state.range(0)), 0.5, 1.0};
    const BeamSet beams = sls_beam_set(array);
    std::vector<double> profile;
    for (auto _ : state) {
        exact_profile_into({1.3, 2.6}, array, beams, kLink, profile);
        benchmark::DoNotOptimize(profile.data());
    }
}
BENCHMARK(BM_exact_profile)->Arg(8)->Arg(32);

void BM_jacobian(benchmark::State& state) {
    const ArrayConfig array{static_cast<int>(state.range(0)), 0.5, 1.0};
    const BeamSet beams = sls_beam_set(array);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            rss_jacobian({1.3, 2.6}, array, beams, JacobianForm::exact_chain));
    }
}
BENCHMARK(BM_jacobian)->Arg(8)->Arg(32);

void BM_crlb_cell(benchmark::State& state) {
    const ArrayConfig array{static_cast<int>(state.range(0)), 0.5, 1.0};
    const BeamSet beams = sls_beam_set(array);
    for (auto _ : state) {
        benchmark::DoNotOptimize(crlb_rmse({1.3, 2.6}, array, beams, 1.7));
    }
}
BENCHMARK(BM_crlb_cell)->Arg(8)->Arg(32)->Arg(64);

void BM_estimate_trial(benchmark::State& state) {
    const ArrayConfig array{static_cast<int>(state.range(0)), 0.5, 1.0};
    const BeamSet beams = sls_beam_set(array);
    const Position truth{1.2, 3.1};
    const auto profile = exact_profile(truth, array, beams, kLink);
    const Rect region{-4.0, 4.0, 1e-3, 8.0};
    std::uint64_t trial = 0;
    for (auto _ : state) {
        RngStream rng = RngStream::for_cell_trial(11, 0, trial++);
        const ObservationVector obs =
            synthesize_observation(profile, 1.7, -73.0, rng);
        if (obs.detected_count() == 0) continue;
        benchmark::DoNotOptimize(estimate(obs, array, beams, kLink, {}, region));
    }
}
BENCHMARK(BM_estimate_trial)->Arg(8)->Arg(32);

void BM_crlb_field_80x80(benchmark::State& state) {
    const ArrayConfig array{32, 0.5, 1.0};
    const BeamSet beams = sls_beam_set(array);
    for (auto _ : state) {
        benchmark::DoNotOptimize(crlb_field(RoomSpec{}, array, beams, kLink, 1.7,
                                            -73.0, CrlbMaskMode::detected));
    }
}
BENCHMARK(BM_crlb_field_80x80)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
