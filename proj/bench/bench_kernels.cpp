// Times the serial and OpenMP detector kernels on one random window.
// Usage: bench_kernels [height] [width] [channels] [n] [repeats]

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

#include "vts/kernels.hpp"

namespace {

vts::TensorGrid random_grid(int h, int w, int c, std::mt19937_64& rng, float lo, float hi) {
    std::uniform_real_distribution<float> d(lo, hi);
    std::vector<float> v(std::size_t(h) * std::size_t(w) * std::size_t(c));
    for (auto& x : v) x = d(rng);
    return vts::TensorGrid(h, w, c, std::move(v));
}

template <typename Fn>
double best_ms(int repeats, Fn&& fn) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

int arg(int argc, char** argv, int i, int fallback) {
    return argc > i ? std::atoi(argv[i]) : fallback;
}

}  // namespace

int main(int argc, char** argv) {
    const int h = arg(argc, argv, 1, 256);
    const int w = arg(argc, argv, 2, 256);
    const int c = arg(argc, argv, 3, 16);
    const int n = arg(argc, argv, 4, 2);
    const int repeats = arg(argc, argv, 5, 5);
    const int frames = 2 * n + 1;

    std::mt19937_64 rng(7);
    std::vector<vts::TensorGrid> feats;
    std::vector<vts::TensorGrid> confs;
    for (int i = 0; i < frames; ++i) {
        feats.push_back(random_grid(h, w, c, rng, -1.0f, 1.0f));
        confs.push_back(random_grid(h, w, 1, rng, 0.0f, 1.0f));
    }
    const auto flow = vts::FlowField::uniform(h, w, 0.37f, -1.25f);
    const auto params = vts::TransformParams::identity(c);

    std::printf("grid %dx%dx%d, window %d frames, %d worker threads\n", h, w, c, frames, vts::worker_threads());
    std::printf("%-22s %12s %12s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

    const auto report = [&](const char* name, auto serial, auto parallel) {
        const double s = best_ms(repeats, serial);
        const double p = best_ms(repeats, parallel);
        std::printf("%-22s %12.3f %12.3f %8.2fx\n", name, s, p, s / p);
    };

    namespace ks = vts::kernels::serial;
    namespace ko = vts::kernels::omp;
    report("warp", [&] { (void)ks::warp(feats[0], flow); }, [&] { (void)ko::warp(feats[0], flow); });
    report("transform_features", [&] { (void)ks::transform_features(feats[0], params); },
           [&] { (void)ko::transform_features(feats[0], params); });
    report("similarity_energy", [&] { (void)ks::similarity_energy(feats[0], feats[1]); },
           [&] { (void)ko::similarity_energy(feats[0], feats[1]); });

    std::vector<vts::TensorGrid> sims;
    for (const auto& f : feats) sims.push_back(ks::similarity_energy(f, feats[std::size_t(n)]));
    report("aggregation_weights", [&] { (void)ks::aggregation_weights(sims, confs); },
           [&] { (void)ko::aggregation_weights(sims, confs); });
    const auto weights = ks::aggregation_weights(sims, confs);
    report("weighted_sum", [&] { (void)ks::weighted_sum(weights, confs); },
           [&] { (void)ko::weighted_sum(weights, confs); });
    report("mask_statistic", [&] { (void)ks::mask_statistic(feats[0]); }, [&] { (void)ko::mask_statistic(feats[0]); });
    return 0;
}
