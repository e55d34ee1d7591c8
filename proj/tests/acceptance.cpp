// Acceptance suite: one pass/fail line per criterion, exit code = number
// of failures. Reference values come from independent oracles (hard
// z-buffer rasterizer, closed forms, finite differences) in oracles.hpp.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "smoothrast/optim.hpp"

using namespace smoothrast;

namespace {

int g_failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("criterion %d [%s]: %s (%s)\n", id, pass ? "PASS" : "FAIL", name.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

uint64_t fnv1a(const void* data, size_t n, uint64_t h = 0xcbf29ce484222325ull) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < n; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

uint64_t hash_doubles(const std::vector<double>& v, uint64_t h = 0xcbf29ce484222325ull) {
    return fnv1a(v.data(), v.size() * sizeof(double), h);
}

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---- criterion 1: gradient correctness on random scenes ----

struct Crit1Result {
    bool pass = false;
    std::string detail;
    uint64_t hash = 0xcbf29ce484222325ull;
};

Crit1Result criterion1() {
    Rng rng(2024);
    std::vector<double> rel_errors;
    Crit1Result res;

    for (int scene = 0; scene < 200; ++scene) {
        // Random triangles (position, orientation, size, shape jitter) staged
        // at view distance ~30. The FD step below is an absolute 1e-5 world
        // units, so the scene scale is chosen large enough that the step is
        // a ~1e-5 px screen perturbation; close-up scenes make central FD
        // itself inaccurate (truncation) without any gradient error.
        const int n_tris = 5 + rng.index(36);
        Mesh m;
        for (int t = 0; t < n_tris; ++t) {
            const Vec3 c{rng.uniform(-9, 9), rng.uniform(-9, 9), rng.uniform(-4, 4)};
            Vec3 a{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            Vec3 b{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
            a = a / std::max(norm(a), 1e-9);
            b = b - a * dot(a, b);
            b = b / std::max(norm(b), 1e-9);
            const double r = rng.uniform(1.0, 2.2);
            const int base = static_cast<int>(m.vertices.size());
            for (int k = 0; k < 3; ++k) {
                const double th = 2.0943951023931953 * k + rng.uniform(-0.3, 0.3);
                m.vertices.push_back(c + a * (r * std::cos(th)) + b * (r * std::sin(th)));
            }
            m.faces.push_back({base, base + 1, base + 2});
        }
        Camera cam;
        cam.width = cam.height = 32;
        cam.eye = {0, 0, -30};
        RenderParams params;
        params.s = rng.uniform(5.0, 100.0);
        params.o = rng.uniform(5.0, 100.0);
        // pinned behind the scene; the auto background depth is a
        // non-differentiated scene-setup heuristic, so FD through it would
        // probe a dependence the gradient deliberately excludes
        params.background_depth = 45.0;

        Tape tape;
        DiffMesh dm = lift_mesh(tape, m, true);
        RenderResult r = render(tape, dm, cam, params);
        Var total = r.pixels[0];
        for (size_t i = 1; i < r.pixels.size(); ++i) total = total + r.pixels[i];
        std::vector<double> adj = tape.backward(total);

        double grad_scale = 0.0;
        for (const DVec3& v : dm.vertices)
            for (int c = 0; c < 3; ++c) grad_scale = std::max(grad_scale, std::abs(adj[v[c].idx]));
        // the relative-error floor is taken relative to the scene's own
        // gradient magnitude; an absolute floor is meaningless across the
        // random s/o scales, and FD noise would dominate true-zero entries
        const double floor = std::max(1e-6, 1e-6 * grad_scale);

        res.hash = hash_doubles(r.image().intensities, res.hash);

        auto pixel_sum = [&](const Mesh& probe) {
            Tape t2;
            RenderResult r2 = render(t2, lift_mesh(t2, probe, false), cam, params);
            double acc = 0.0;
            for (const Var& p : r2.pixels) acc += p.value();
            return acc;
        };
        for (int probe = 0; probe < 3; ++probe) {
            const int v = rng.index(static_cast<int>(m.vertices.size()));
            const int c = rng.index(3);
            const double h = 1e-5;
            Mesh mp = m, mm = m;
            mp.vertices[v][c] += h;
            mm.vertices[v][c] -= h;
            const double fd = (pixel_sum(mp) - pixel_sum(mm)) / (2 * h);
            const double an = adj[dm.vertices[v][c].idx];
            rel_errors.push_back(std::abs(an - fd) /
                                 std::max({std::abs(an), std::abs(fd), floor}));
        }
        res.hash = hash_doubles(rel_errors, res.hash);
    }
    std::sort(rel_errors.begin(), rel_errors.end());
    const double max_err = rel_errors.back();
    const double median = rel_errors[rel_errors.size() / 2];
    res.pass = max_err < 1e-3 && median < 1e-6;
    res.detail = fmt("max rel %.3e (< 1e-3), median %.3e (< 1e-6), %zu probes", max_err, median,
                     rel_errors.size());
    return res;
}

// ---- criterion 2: occlusion smoothness through a depth crossing ----

bool criterion2(std::string& detail) {
    const double s = 25.0, o = 25.0, c1 = 0.2, c2 = 0.8;
    Camera cam;
    cam.width = cam.height = 32;
    const double px = 16.5, py = 16.5;
    const int px_i = 16, py_i = 16;

    // direct evaluation helper returning the double value only
    auto value_at = [&](double z1) {
        Tape t;
        RenderParams params;
        params.s = s;
        params.o = o;
        std::vector<ScreenTriangle> tris(2);
        const double xs[2][3] = {{2, 30, 16}, {1, 29, 15}};
        const double ys[2][3] = {{2, 2, 30}, {3, 3, 31}};
        for (int i = 0; i < 2; ++i) {
            for (int k = 0; k < 3; ++k) {
                tris[i].x[k] = t.constant(xs[i][k]);
                tris[i].y[k] = t.constant(ys[i][k]);
                tris[i].z[k] = t.constant(i == 0 ? z1 : 2.0);
            }
            Var lens[3];
            for (int k = 0; k < 3; ++k) {
                int k1 = (k + 1) % 3;
                lens[k] = sqrt(square(tris[i].x[k1] - tris[i].x[k]) +
                               square(tris[i].y[k1] - tris[i].y[k]) + 1e-24);
            }
            tris[i].m = softmin_scalar(std::span<const Var>(lens, 3), s);
            tris[i].shade = t.constant(i == 0 ? c1 : c2);
        }
        add_background(tris, t, cam, params, 10.0, 2.5);
        RenderResult r = render_screen(t, tris, cam, params);
        return r.pixels[py_i * cam.width + px_i].value();
    };

    double worst_blend = 0.0, worst_jump = 0.0, worst_grad = 0.0, vmin = 1.0;
    const double z_lo = 1.5, z_hi = 2.5, dz_step = (z_hi - z_lo) / 50.0;
    const double jump_bound = o * std::abs(c2 - c1) * dz_step / 3.0;
    double prev = 0.0;
    for (int k = 0; k <= 50; ++k) {
        const double z1 = z_lo + k * dz_step;
        const double val = value_at(z1);

        // (a) closed-form blend where both faces are fully visible
        const double blend = c1 / (1.0 + std::exp(-o * (2.0 - z1))) +
                             c2 / (1.0 + std::exp(-o * (z1 - 2.0)));
        worst_blend = std::max(worst_blend, std::abs(val - blend));

        // (b) no jump above the o*|dc|*dz/3 bound
        if (k > 0) worst_jump = std::max(worst_jump, std::abs(val - prev));
        prev = val;

        // (c) FD-consistent derivative wrt the swept depth, incl. z1 = 2.0
        {
            Tape t;
            Var z1v = t.leaf(z1, true);
            RenderParams params;
            params.s = s;
            params.o = o;
            std::vector<ScreenTriangle> tris(2);
            const double xs[2][3] = {{2, 30, 16}, {1, 29, 15}};
            const double ys[2][3] = {{2, 2, 30}, {3, 3, 31}};
            for (int i = 0; i < 2; ++i) {
                for (int kk = 0; kk < 3; ++kk) {
                    tris[i].x[kk] = t.constant(xs[i][kk]);
                    tris[i].y[kk] = t.constant(ys[i][kk]);
                    tris[i].z[kk] = (i == 0) ? z1v : t.constant(2.0);
                }
                Var lens[3];
                for (int kk = 0; kk < 3; ++kk) {
                    int k1 = (kk + 1) % 3;
                    lens[kk] = sqrt(square(tris[i].x[k1] - tris[i].x[kk]) +
                                    square(tris[i].y[k1] - tris[i].y[kk]) + 1e-24);
                }
                tris[i].m = softmin_scalar(std::span<const Var>(lens, 3), s);
                tris[i].shade = t.constant(i == 0 ? c1 : c2);
            }
            add_background(tris, t, cam, params, 10.0, 2.5);
            // both faces must be fully visible at the probed pixel for the
            // closed-form blend to apply
            vmin = std::min({vmin, visibility(px, py, tris[0], params).value(),
                             visibility(px, py, tris[1], params).value()});
            RenderResult r = render_screen(t, tris, cam, params);
            std::vector<double> adj = t.backward(r.pixels[py_i * cam.width + px_i]);
            const double an = adj[z1v.idx];
            const double h = 1e-6;
            const double fd = (value_at(z1 + h) - value_at(z1 - h)) / (2 * h);
            worst_grad = std::max(worst_grad,
                                  std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-6}));
        }
    }
    detail = fmt("min V %.6f (> 0.999), blend dev %.2e (< 1e-6), max jump %.3f (bound %.3f), "
                 "grad rel %.2e (< 1e-3)",
                 vmin, worst_blend, worst_jump, jump_bound, worst_grad);
    return vmin > 0.999 && worst_blend < 1e-6 && worst_jump <= jump_bound && worst_grad < 1e-3;
}

// ---- criterion 3: hard-rasterizer limit ----

struct Crit3Result {
    bool pass = false;
    std::string detail;
    uint64_t hash = 0;
};

Crit3Result criterion3() {
    Mesh m = icosphere(2);
    Camera cam;
    cam.width = cam.height = 128;
    auto ref = oracle::render_hard(m, cam, Lighting{}, 1.0);

    // background placed just behind the sphere; a deep background loses the
    // depth-vs-coverage race near the silhouette at high o (the documented
    // soft-renderer halo) and has no hard-limit counterpart
    auto render_at = [&](double so) {
        RenderParams p;
        p.s = p.o = so;
        p.background_depth = 4.1;
        return render_image(m, cam, p);
    };

    Image sharp = render_at(200.0);
    int close = 0;
    for (size_t i = 0; i < ref.size(); ++i)
        if (std::abs(sharp.intensities[i] - ref[i]) <= 2.0 / 255.0) ++close;
    const double frac = static_cast<double>(close) / static_cast<double>(ref.size());

    double prev_l1 = 1e9;
    bool monotone = true;
    std::string l1s;
    Crit3Result res;
    for (double so : {5.0, 25.0, 100.0, 200.0}) {
        Image img = (so == 200.0) ? sharp : render_at(so);
        double l1 = 0.0;
        for (size_t i = 0; i < ref.size(); ++i) l1 += std::abs(img.intensities[i] - ref[i]);
        l1 /= static_cast<double>(ref.size());
        if (l1 > prev_l1) monotone = false;
        prev_l1 = l1;
        l1s += fmt(" %.5f", l1);
        res.hash = hash_doubles(img.intensities, res.hash ? res.hash : 0xcbf29ce484222325ull);
    }
    res.pass = frac >= 0.95 && monotone;
    res.detail = fmt("%.2f%% within 2/255 (>= 95%%), L1 along s=o grid diagonal:%s (%s)",
                     100.0 * frac, l1s.c_str(), monotone ? "non-increasing" : "NOT monotone");
    return res;
}

// ---- criterion 4: opacity bleed-through closed form ----

bool criterion4(std::string& detail) {
    const double z_front = 1.3, z_back = 1.9;
    double worst = 0.0, prev_rear = 1.0;
    bool decreasing = true;
    for (double o : {1.0, 5.0, 25.0, 100.0}) {
        Tape t;
        std::vector<Var> depths{t.leaf(z_front), t.leaf(z_back)};
        std::vector<Var> vis{t.constant(1.0), t.constant(1.0)};
        auto w = smooth_zbuffer(depths, vis, o, 0.0);
        const double rear = w[1].value();
        const double closed = 1.0 / (1.0 + std::exp(o * (z_back - z_front)));
        worst = std::max(worst, std::abs(rear - closed));
        if (rear >= prev_rear) decreasing = false;
        prev_rear = rear;
    }
    detail = fmt("max |weight - sigmoid(-o dz)| = %.2e (< 1e-9), %s in o", worst,
                 decreasing ? "strictly decreasing" : "NOT decreasing");
    return worst < 1e-9 && decreasing;
}

// ---- criterion 5: wsoftmax identity ----

bool criterion5(std::string& detail) {
    Rng rng(5);
    double worst = 0.0, worst_sum = 0.0;
    for (int rep = 0; rep < 10000; ++rep) {
        const int n = 2 + rng.index(7);
        Tape t;
        std::vector<Var> x, w;
        std::vector<double> ref_arg(n);
        for (int i = 0; i < n; ++i) {
            const double xi = rng.uniform(-50.0, 50.0);
            const double wi = rng.uniform(1e-6, 1.0);
            x.push_back(t.leaf(xi));
            w.push_back(t.leaf(wi));
            ref_arg[i] = xi + std::log(wi);
        }
        // reference: plain softmax of x + log w
        const double hi = *std::max_element(ref_arg.begin(), ref_arg.end());
        double den = 0.0;
        for (double a : ref_arg) den += std::exp(a - hi);

        auto out = wsoftmax(x, w, 0.0);
        double sum = 0.0;
        for (int i = 0; i < n; ++i) {
            worst = std::max(worst, std::abs(out[i].value() - std::exp(ref_arg[i] - hi) / den));
            sum += out[i].value();
        }
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
    detail = fmt("max |wsoftmax - softmax(x+log w)| = %.2e, max |sum-1| = %.2e (both < 1e-12)",
                 worst, worst_sum);
    return worst < 1e-12 && worst_sum < 1e-12;
}

// ---- criterion 6: partition of unity; empty scene ----

bool criterion6(std::string& detail) {
    double worst = 0.0;

    auto check_scene = [&](const Mesh& m, const RenderParams& p, const Camera& cam) {
        Tape t;
        RasterBuffers buf;
        render(t, lift_mesh(t, m, false), cam, p, &buf);
        for (const auto& entries : buf.pixels) {
            double sum = 0.0;
            for (const auto& e : entries) sum += e.weight.value();
            worst = std::max(worst, std::abs(sum - 1.0));
        }
    };

    Camera cam;
    cam.width = cam.height = 32;
    RenderParams p;
    check_scene(icosphere(1), p, cam);

    Rng rng(6);
    Mesh rand_scene;
    for (int t = 0; t < 10; ++t) {
        const int b = 3 * t;
        for (int k = 0; k < 3; ++k)
            rand_scene.vertices.push_back(
                {rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)});
        rand_scene.faces.push_back({b, b + 1, b + 2});
    }
    RenderParams p2;
    p2.s = 80.0;
    p2.o = 40.0;
    check_scene(rand_scene, p2, cam);

    // empty scene: exactly the background intensity at every pixel
    Mesh empty;
    Image img = render_image(empty, cam, RenderParams{});
    bool exact = true;
    for (double v : img.intensities) exact = exact && (v == 1.0);

    detail = fmt("max |sum(weights) - 1| = %.2e (< 1e-9), empty scene %s", worst,
                 exact ? "exactly background" : "NOT exact");
    return worst < 1e-9 && exact;
}

// ---- criterion 7: regularizer suite ----

double eval_reg(const Mesh& m, int which) {
    Tape t;
    DiffMesh dm = lift_mesh(t, m, false);
    Adjacency adj(m);
    switch (which) {
        case 0: return reg_normal_angle(dm, adj).value();
        case 1: return reg_edge_length(dm, adj).value();
        default: return reg_laplacian(dm, adj).value();
    }
}

bool criterion7(std::string& detail) {
    // flat triangulated grid: zero normal loss
    Mesh grid;
    const int n = 4;
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            grid.vertices.push_back({static_cast<double>(i), static_cast<double>(j), 0.0});
    auto id = [n](int i, int j) { return j * (n + 1) + i; };
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            grid.faces.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            grid.faces.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }
    const double flat_normal = eval_reg(grid, 0);

    // equilateral edges: icosahedron
    const double equi_edge = eval_reg(icosphere(0), 1);

    // centroid-coincident vertices: zero Laplacian
    Mesh collapsed = icosphere(0);
    for (Vec3& v : collapsed.vertices) v = {0.25, -0.5, 0.75};
    const double lap0 = eval_reg(collapsed, 2);

    // rigid-motion invariance
    Mesh base = icosphere(1);
    const double ca = std::cos(0.83), sa = std::sin(0.83);
    Mesh moved = base;
    for (Vec3& v : moved.vertices) {
        const Vec3 r{ca * v.x - sa * v.y, sa * v.x + ca * v.y, v.z};
        v = r + Vec3{0.4, -0.7, 1.1};
    }
    double worst_inv = 0.0;
    for (int which = 0; which < 3; ++which)
        worst_inv = std::max(worst_inv, std::abs(eval_reg(moved, which) - eval_reg(base, which)));

    // FD gradients on a perturbed icosahedron
    Mesh pm = icosphere(0);
    Rng rng(7);
    for (Vec3& v : pm.vertices)
        v = v + Vec3{rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05)};
    double worst_fd = 0.0;
    for (int which = 0; which < 3; ++which) {
        Tape t;
        DiffMesh dm = lift_mesh(t, pm, true);
        Adjacency adj(pm);
        Var loss = which == 0 ? reg_normal_angle(dm, adj)
                              : (which == 1 ? reg_edge_length(dm, adj) : reg_laplacian(dm, adj));
        auto adjnt = t.backward(loss);
        for (int probe = 0; probe < 10; ++probe) {
            const int v = rng.index(static_cast<int>(pm.vertices.size()));
            const int c = rng.index(3);
            const double h = 1e-6;
            Mesh mp = pm, mm = pm;
            mp.vertices[v][c] += h;
            mm.vertices[v][c] -= h;
            const double fd = (eval_reg(mp, which) - eval_reg(mm, which)) / (2 * h);
            const double an = adjnt[dm.vertices[v][c].idx];
            worst_fd = std::max(worst_fd,
                                std::abs(an - fd) / std::max({std::abs(an), std::abs(fd), 1e-4}));
        }
    }
    detail = fmt("flat normal %.1e, equilateral edge %.1e, collapsed laplacian %.1e, "
                 "rigid dev %.1e (< 1e-9), FD rel %.1e (< 1e-5)",
                 flat_normal, equi_edge, lap0, worst_inv, worst_fd);
    return flat_normal < 1e-12 && equi_edge < 1e-9 && lap0 < 1e-9 && worst_inv < 1e-9 &&
           worst_fd < 1e-5;
}

// ---- criterion 8: inverse-rendering recovery ----

struct Crit8Result {
    bool pass = false;
    std::string detail;
    uint64_t hash = 0xcbf29ce484222325ull;
};

Crit8Result criterion8() {
    Mesh base = icosphere(2);
    RenderParams rp;
    // sharp enough that the image optimum pins the geometry tightly to the
    // truth; at soft settings the loss basin is flat enough that late
    // iterations drift within it without lowering the vertex error
    rp.s = 50.0;
    rp.o = 50.0;

    // ground truth: translation + a smooth radial bump
    ShapeParams truth = ShapeParams::zero(base);
    truth.translation = {0.2, 0.0, 0.0};
    const Vec3 bump_center{0.0, 1.0, 0.0};
    for (size_t i = 0; i < base.vertices.size(); ++i) {
        const Vec3 v = base.vertices[i];
        const Vec3 d = v - bump_center;
        const double amp = 0.15 * std::exp(-dot(d, d) / 0.3);
        for (int c = 0; c < 3; ++c) {
            const double off = amp * v[c];
            truth.raw_offsets[3 * i + c] = std::log((1.0 + off) / (1.0 - off));
        }
    }
    Mesh target_mesh = apply_params_plain(base, truth);

    Crit8Result res;
    std::vector<View> views;
    for (int k = 0; k < 4; ++k) {
        Camera cam;
        const double az = k * M_PI / 2.0;
        cam.eye = {3.0 * std::sin(az), 0.0, -3.0 * std::cos(az)};
        cam.look_at = {0, 0, 0};
        cam.width = cam.height = 64;
        views.push_back({render_image(target_mesh, cam, rp), cam});
        res.hash = hash_doubles(views.back().target.intensities, res.hash);
    }

    AdamConfig cfg;
    cfg.max_iterations = 2000;
    cfg.learning_rate = 2e-3;
    // constant-rate Adam orbits the minimum once converged, which makes the
    // late vertex-error windows wobble; annealing settles it monotonically
    cfg.cosine_decay = true;
    cfg.log_every = 1;
    OptimizeOptions opts;
    opts.seed = 11;
    std::vector<double> vert_err;
    vert_err.reserve(2000);
    opts.on_iteration = [&](int iter, const Mesh& m, const LossReport::Values& v) {
        double acc = 0.0;
        for (size_t i = 0; i < m.vertices.size(); ++i)
            acc += norm(m.vertices[i] - target_mesh.vertices[i]);
        vert_err.push_back(acc / static_cast<double>(m.vertices.size()));
        if (iter % 200 == 0)
            std::fprintf(stderr, "  criterion 8: iter %d total %.5f vert err %.5f\n", iter,
                         v.total, vert_err.back());
    };

    // mirror symmetry: a symmetric offset field cannot absorb an x/z
    // translation (off_x(-x) = -off_x(x)), so the translation component of
    // the deformation is identifiable instead of trading off against offsets;
    // the truth bump amp(v)*v is itself mirror-symmetric, hence representable
    auto [fin, trace] = optimize(base, views, rp, LossWeights{}, cfg,
                                 ShapeParams::zero(base, /*symmetric=*/true), opts);

    const double t_err = norm(fin.translation - Vec3{0.2, 0.0, 0.0});
    const double loss0 = trace.rows.front().losses.total;
    const double loss1 = trace.rows.back().losses.total;

    // trailing-100-iteration window means of the vertex error
    bool windows_monotone = true;
    double prev_mean = 1e18;
    for (size_t w = 0; w + 100 <= vert_err.size(); w += 100) {
        double mean = 0.0;
        for (size_t i = w; i < w + 100; ++i) mean += vert_err[i];
        mean /= 100.0;
        std::fprintf(stderr, "  criterion 8: window %zu mean vert err %.6f\n", w / 100, mean);
        if (mean > prev_mean) windows_monotone = false;
        prev_mean = mean;
    }

    res.hash = hash_doubles(vert_err, res.hash);
    for (const auto& row : trace.rows) {
        res.hash = fnv1a(&row.iter, sizeof row.iter, res.hash);
        res.hash = fnv1a(&row.losses, sizeof row.losses, res.hash);
    }
    Mesh final_mesh = apply_params_plain(base, fin);
    for (const Vec3& v : final_mesh.vertices) res.hash = fnv1a(&v, sizeof v, res.hash);

    res.pass = t_err < 0.02 && loss1 < 0.2 * loss0 && windows_monotone;
    res.detail = fmt("translation err %.4f (< 0.02), loss %.5f -> %.5f (%.1f%%, < 20%%), "
                     "window means %s",
                     t_err, loss0, loss1, 100.0 * loss1 / loss0,
                     windows_monotone ? "monotone" : "NOT monotone");
    return res;
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    Crit1Result c1 = criterion1();
    report(1, "gradient correctness on random scenes", c1.pass, c1.detail);

    std::string detail;
    report(2, "occlusion smoothness through a depth crossing", criterion2(detail), detail);

    Crit3Result c3 = criterion3();
    report(3, "hard-rasterizer limit", c3.pass, c3.detail);

    report(4, "opacity bleed-through closed form", criterion4(detail), detail);
    report(5, "weighted softmax identity", criterion5(detail), detail);
    report(6, "partition of unity / empty scene", criterion6(detail), detail);
    report(7, "regularizer suite", criterion7(detail), detail);

    Crit8Result c8 = criterion8();
    report(8, "inverse-rendering recovery", c8.pass, c8.detail);

    std::fprintf(stderr, "rerunning criteria 1, 3, 8 for determinism (%.0fs elapsed)\n",
                 elapsed());
    Crit1Result c1b = criterion1();
    Crit3Result c3b = criterion3();
    Crit8Result c8b = criterion8();
    const bool det = c1.hash == c1b.hash && c3.hash == c3b.hash && c8.hash == c8b.hash;
    report(9, "determinism of criteria 1, 3, 8", det,
           fmt("hashes %s (images, traces, meshes hashed bit-for-bit)",
               det ? "identical" : "DIFFER"));

    std::printf("%d of 9 criteria passed in %.0fs\n", 9 - g_failures, elapsed());
    return g_failures;
}
