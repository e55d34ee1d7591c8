#include "smoothrast/optim.hpp"

#include <cmath>
#include <iostream>
#include <stdexcept>
#include <string>

namespace smoothrast {

void AdamConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("AdamConfig: learning_rate <= 0");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
        throw std::invalid_argument("AdamConfig: betas must be in [0, 1)");
    if (max_iterations < 0) throw std::invalid_argument("AdamConfig: max_iterations < 0");
}

void adam_step(std::vector<double>& params, const std::vector<double>& grads, OptState& state,
               const AdamConfig& cfg) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: length mismatch");
    for (size_t i = 0; i < grads.size(); ++i)
        if (!std::isfinite(grads[i]))
            throw std::runtime_error("adam_step: non-finite gradient at parameter " +
                                     std::to_string(i));
    state.step += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));
    double lr = cfg.learning_rate;
    if (cfg.cosine_decay && cfg.max_iterations > 0) {
        const double t = std::min(static_cast<double>(state.step - 1),
                                  static_cast<double>(cfg.max_iterations));
        lr *= 0.5 * (1.0 + std::cos(M_PI * t / static_cast<double>(cfg.max_iterations)));
    }
    for (size_t i = 0; i < params.size(); ++i) {
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * grads[i];
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + cfg.eps_hat);
    }
}

namespace {

// Flat parameter vector layout: [raw_offsets..., translation xyz, log_scale].
std::vector<double> pack(const ShapeParams& p) {
    std::vector<double> flat = p.raw_offsets;
    flat.push_back(p.translation.x);
    flat.push_back(p.translation.y);
    flat.push_back(p.translation.z);
    flat.push_back(p.log_scale);
    return flat;
}

void unpack(const std::vector<double>& flat, ShapeParams& p) {
    const size_t n = p.raw_offsets.size();
    std::copy(flat.begin(), flat.begin() + n, p.raw_offsets.begin());
    p.translation = {flat[n], flat[n + 1], flat[n + 2]};
    p.log_scale = flat[n + 3];
}

}  // namespace

std::pair<ShapeParams, RunTrace> optimize(const Mesh& base, const std::vector<View>& views,
                                          const RenderParams& render_params,
                                          const LossWeights& loss_weights,
                                          const AdamConfig& adam_cfg, ShapeParams init,
                                          const OptimizeOptions& opts) {
    if (views.empty()) throw std::invalid_argument("optimize: need at least one target view");
    for (const View& v : views)
        if (v.target.width != v.camera.width || v.target.height != v.camera.height)
            throw std::invalid_argument("optimize: target dimensions do not match camera");
    adam_cfg.validate();
    base.validate();
    Adjacency adj(base);

    ShapeParams params = std::move(init);
    std::vector<double> flat = pack(params);
    OptState state(flat.size());
    RunTrace trace;
    trace.seed = opts.seed;

    size_t reserve_hint = 0;
    for (int iter = 0; iter < adam_cfg.max_iterations; ++iter) {
        Tape tape;
        tape.reserve(reserve_hint);
        ParamVars pv = lift_params(tape, params);
        DiffMesh dm = apply_params(tape, base, pv, params);

        std::vector<RenderResult> rendered;
        std::vector<Image> targets;
        rendered.reserve(views.size());
        targets.reserve(views.size());
        try {
            for (const View& v : views) {
                rendered.push_back(render(tape, dm, v.camera, render_params));
                targets.push_back(v.target);
            }
        } catch (const FrustumError& e) {
            std::cerr << "optimize: frustum violation at iteration " << iter << ": " << e.what()
                      << "\n";
            throw;
        }
        LossReport report = total_loss(tape, rendered, targets, dm, adj, loss_weights);
        if (loss_weights.lambda_offset > 0.0 && !pv.raw_offsets.empty()) {
            // |mean offset|^2 over all vertices (after symmetry mirroring).
            // A uniform offset field and a translation produce the same mesh,
            // so the mean offset is a pure gauge mode; pinning it to zero
            // leaves every achievable mesh achievable but makes the
            // translation parameter match the rigid part of the deformation.
            std::vector<DVec3> offsets = decode_offsets(tape, pv, params, base);
            DVec3 mean = offsets[0];
            for (size_t i = 1; i < offsets.size(); ++i) mean = mean + offsets[i];
            const double inv = 1.0 / static_cast<double>(offsets.size());
            Var pen = (mean.x * mean.x + mean.y * mean.y + mean.z * mean.z) * (inv * inv);
            report.total = report.total + pen * loss_weights.lambda_offset;
        }
        if (!std::isfinite(report.total.value()))
            throw std::runtime_error("optimize: non-finite loss at iteration " +
                                     std::to_string(iter));
        reserve_hint = tape.size();

        std::vector<double> adjoints = tape.backward(report.total);
        std::vector<double> grads(flat.size(), 0.0);
        const size_t n = params.raw_offsets.size();
        for (size_t i = 0; i < n; ++i) grads[i] = adjoints[pv.raw_offsets[i].idx];
        if (opts.optimize_translation) {
            grads[n + 0] = adjoints[pv.translation.x.idx];
            grads[n + 1] = adjoints[pv.translation.y.idx];
            grads[n + 2] = adjoints[pv.translation.z.idx];
        }
        if (opts.optimize_scale) grads[n + 3] = adjoints[pv.log_scale.idx];

        adam_step(flat, grads, state, adam_cfg);
        unpack(flat, params);

        LossReport::Values vals = report.values();
        if (adam_cfg.log_every > 0 && iter % adam_cfg.log_every == 0)
            trace.rows.push_back({iter, vals});
        if (adam_cfg.snapshot_every > 0 && iter % adam_cfg.snapshot_every == 0)
            trace.snapshots.emplace_back(iter, params);
        if (opts.on_iteration) opts.on_iteration(iter, apply_params_plain(base, params), vals);
    }
    return {params, trace};
}

GradCheckReport gradcheck_render(const Mesh& mesh, const Camera& camera,
                                 const RenderParams& render_params, int n_probes, double step,
                                 uint64_t seed) {
    if (n_probes < 1) throw std::invalid_argument("gradcheck_render: n_probes must be >= 1");
    if (!(step > 0.0)) throw std::invalid_argument("gradcheck_render: step must be > 0");

    auto pixel_sum_eval = [&](const Mesh& m) {
        Tape tape;
        DiffMesh dm = lift_mesh(tape, m, false);
        RenderResult r = render(tape, dm, camera, render_params);
        double sum = 0.0;
        for (const Var& p : r.pixels) sum += p.value();
        return sum;
    };

    Tape tape;
    DiffMesh dm = lift_mesh(tape, mesh, true);
    RenderResult r = render(tape, dm, camera, render_params);
    Var total = r.pixels[0];
    for (size_t i = 1; i < r.pixels.size(); ++i) total = total + r.pixels[i];
    std::vector<double> adjoints = tape.backward(total);

    Rng rng(seed);
    GradCheckReport rep;
    Mesh probe_mesh = mesh;
    for (int p = 0; p < n_probes; ++p) {
        const int v = rng.index(static_cast<int>(mesh.vertices.size()));
        const int c = rng.index(3);
        const double analytic = adjoints[dm.vertices[v][c].idx];

        const double orig = probe_mesh.vertices[v][c];
        probe_mesh.vertices[v][c] = orig + step;
        const double fp = pixel_sum_eval(probe_mesh);
        probe_mesh.vertices[v][c] = orig - step;
        const double fm = pixel_sum_eval(probe_mesh);
        probe_mesh.vertices[v][c] = orig;
        const double fd = (fp - fm) / (2.0 * step);

        const double abs_err = std::abs(analytic - fd);
        const double scale = std::max({std::abs(analytic), std::abs(fd), 1e-6});
        rep.max_abs_err = std::max(rep.max_abs_err, abs_err);
        rep.max_rel_err = std::max(rep.max_rel_err, abs_err / scale);
        rep.probes += 1;
    }
    return rep;
}

}  // namespace smoothrast
