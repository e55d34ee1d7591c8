#pragma once

#include <cstdint>
#include <functional>

#include "smoothrast/losses.hpp"

namespace smoothrast {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_hat = 1e-8;
    int max_iterations = 2000;
    int log_every = 10;
    int snapshot_every = 0;    // 0 = no intermediate snapshots
    bool cosine_decay = false;  // anneal the learning rate to 0 over the run

    void validate() const;
};

struct OptState {
    std::vector<double> m, v;
    int64_t step = 0;

    explicit OptState(size_t n) : m(n, 0.0), v(n, 0.0) {}
};

// Standard bias-corrected Adam update, in place.
void adam_step(std::vector<double>& params, const std::vector<double>& grads, OptState& state,
               const AdamConfig& cfg);

struct RunTrace {
    struct Row {
        int iter;
        LossReport::Values losses;
    };
    std::vector<Row> rows;
    std::vector<std::pair<int, ShapeParams>> snapshots;
    uint64_t seed = 0;
};

struct OptimizeOptions {
    bool optimize_translation = true;
    bool optimize_scale = true;
    uint64_t seed = 1;
    // called after each iteration with the decoded mesh
    std::function<void(int, const Mesh&, const LossReport::Values&)> on_iteration;
};

struct View {
    Image target;
    Camera camera;
};

std::pair<ShapeParams, RunTrace> optimize(const Mesh& base, const std::vector<View>& views,
                                          const RenderParams& render_params,
                                          const LossWeights& loss_weights,
                                          const AdamConfig& adam_cfg, ShapeParams init,
                                          const OptimizeOptions& opts = {});

// Seeded xorshift-style generator used for all probe/scene randomness.
struct Rng {
    uint64_t state;
    explicit Rng(uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}
    uint64_t next() {
        uint64_t x = state;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        return state = x;
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int index(int n) { return static_cast<int>(next() % static_cast<uint64_t>(n)); }
};

struct GradCheckReport {
    double max_abs_err = 0.0;
    double max_rel_err = 0.0;
    int probes = 0;
};

// Compares reverse-mode gradients of the pixel-sum of a render against
// central finite differences at randomly probed vertex coordinates.
GradCheckReport gradcheck_render(const Mesh& mesh, const Camera& camera,
                                 const RenderParams& render_params, int n_probes, double step,
                                 uint64_t seed = 1);

}  // namespace smoothrast
