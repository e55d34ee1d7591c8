#include "smoothrast/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

namespace smoothrast {

void RenderParams::validate() const {
    if (!(s > 0.0)) throw std::invalid_argument("RenderParams: s must be > 0");
    if (!(o > 0.0)) throw std::invalid_argument("RenderParams: o must be > 0");
    auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!in01(lighting.k_ambient) || !in01(lighting.k_diffuse) || !in01(lighting.k_specular))
        throw std::invalid_argument("RenderParams: lighting coefficients must be in [0,1]");
    if (!(lighting.shininess > 0.0)) throw std::invalid_argument("RenderParams: shininess <= 0");
    if (!in01(background_intensity))
        throw std::invalid_argument("RenderParams: background_intensity out of [0,1]");
    if (std::abs(norm(lighting.light_dir) - 1.0) > 1e-9)
        throw std::invalid_argument("RenderParams: light_dir must be unit length");
}

Image RenderResult::image() const {
    Image img;
    img.width = width;
    img.height = height;
    img.intensities.reserve(pixels.size());
    for (const Var& p : pixels)
        img.intensities.push_back(std::clamp(p.value(), 0.0, 1.0));
    return img;
}

std::vector<Var> wsoftmax(std::span<const Var> x, std::span<const Var> w, double eps) {
    if (x.size() != w.size() || x.empty())
        throw std::invalid_argument("wsoftmax: size mismatch or empty input");
    std::vector<Var> a;
    a.reserve(x.size());
    double hi = -std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < x.size(); ++i) {
        // log() itself floors at 1e-300, so eps = 0 means "exact log w"
        Var ai = x[i] + (eps > 0.0 ? log(w[i] + eps) : log(w[i]));
        hi = std::max(hi, ai.value());
        a.push_back(ai);
    }
    std::vector<Var> e;
    e.reserve(a.size());
    Var den = exp(a[0] - hi);
    e.push_back(den);
    for (size_t i = 1; i < a.size(); ++i) {
        e.push_back(exp(a[i] - hi));
        den = den + e.back();
    }
    std::vector<Var> out;
    out.reserve(e.size());
    for (const Var& ei : e) out.push_back(ei / den);
    return out;
}

namespace {

// Scaled directed edge distance: det[[v2x-v1x, v1x-px],[v2y-v1y, v1y-py]] * s/m.
// The s/m factor is pre-multiplied into the edge components.
struct EdgeFrame {
    Var sex[3], sey[3];   // edge vector * s/m
    Var x0[3], y0[3];     // edge start points
    double sexv[3], seyv[3], x0v[3], y0v[3];
};

EdgeFrame edge_frame(const ScreenTriangle& tri, double s) {
    EdgeFrame f;
    Var s_over_m = s / (tri.m + 1e-9);
    for (int k = 0; k < 3; ++k) {
        int k1 = (k + 1) % 3;
        f.sex[k] = (tri.x[k1] - tri.x[k]) * s_over_m;
        f.sey[k] = (tri.y[k1] - tri.y[k]) * s_over_m;
        f.x0[k] = tri.x[k];
        f.y0[k] = tri.y[k];
        f.sexv[k] = f.sex[k].value();
        f.seyv[k] = f.sey[k].value();
        f.x0v[k] = f.x0[k].value();
        f.y0v[k] = f.y0[k].value();
    }
    return f;
}

inline double softplus_d(double x) { return x > 60.0 ? x : std::log1p(std::exp(std::max(x, -60.0))); }
inline double log_add_exp_d(double a, double b) {
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(std::max(lo - hi, -60.0)));
}

// log of the (orientation-invariant) visibility in plain doubles; exact
// in log-space even where the sigmoids underflow.
double log_visibility_value(const EdgeFrame& f, double px, double py, bool orient_inv) {
    double lp = 0.0, lm = 0.0;
    for (int k = 0; k < 3; ++k) {
        double t = f.sexv[k] * (f.y0v[k] - py) - (f.x0v[k] - px) * f.seyv[k];
        lp -= softplus_d(-t);
        lm -= softplus_d(t);
    }
    return orient_inv ? log_add_exp_d(lp, lm) : lp;
}

Var log_visibility_var(const EdgeFrame& f, double px, double py, bool orient_inv) {
    Var t[3];
    for (int k = 0; k < 3; ++k)
        t[k] = f.sex[k] * (f.y0[k] - py) - (f.x0[k] - px) * f.sey[k];
    Var lp = -(softplus(-t[0]) + softplus(-t[1]) + softplus(-t[2]));
    if (!orient_inv) return lp;
    Var lm = -(softplus(t[0]) + softplus(t[1]) + softplus(t[2]));
    // log(exp(lp) + exp(lm)) with a constant shift
    double hi = std::max(lp.value(), lm.value());
    return log(exp(lp - hi) + exp(lm - hi)) + hi;
}

}  // namespace

Var visibility(double px, double py, const ScreenTriangle& tri, const RenderParams& params) {
    EdgeFrame f = edge_frame(tri, params.s);
    Var t[3];
    for (int k = 0; k < 3; ++k)
        t[k] = f.sex[k] * (f.y0[k] - py) - (f.x0[k] - px) * f.sey[k];
    Var vpos = sigmoid(t[0]) * sigmoid(t[1]) * sigmoid(t[2]);
    Var v = params.orientation_invariant
                ? vpos + sigmoid(-t[0]) * sigmoid(-t[1]) * sigmoid(-t[2])
                : vpos;
    if (params.visibility_decay_tau > 0.0) {
        Var cx = (tri.x[0] + tri.x[1] + tri.x[2]) / 3.0;
        Var cy = (tri.y[0] + tri.y[1] + tri.y[2]) / 3.0;
        Var d2 = square(cx - px) + square(cy - py);
        v = v * exp(-(d2 / params.visibility_decay_tau));
    }
    return v;
}

DepthPlane::DepthPlane(const ScreenTriangle& tri) {
    Var dx1 = tri.x[1] - tri.x[0], dy1 = tri.y[1] - tri.y[0], dz1 = tri.z[1] - tri.z[0];
    Var dx2 = tri.x[2] - tri.x[0], dy2 = tri.y[2] - tri.y[0], dz2 = tri.z[2] - tri.z[0];
    Var det = dx1 * dy2 - dx2 * dy1;  // twice the signed pixel area
    // G ~ 1/det for healthy triangles, -> 0 smoothly as the triangle
    // degenerates; w = det*G blends the plane toward the mean depth.
    Var g = det / (det * det + 1e-18);
    Var w = det * g;
    Var a = (dz1 * dy2 - dz2 * dy1) * g * w;
    Var b = (dx1 * dz2 - dx2 * dz1) * g * w;
    Var mean = (tri.z[0] + tri.z[1] + tri.z[2]) / 3.0;
    za = a;
    zb = b;
    zc = w * tri.z[0] + (1.0 - w) * mean - a * tri.x[0] - b * tri.y[0];
}

Var smooth_zdepth(double px, double py, const ScreenTriangle& tri) {
    return DepthPlane(tri).at(px, py);
}

std::vector<Var> smooth_zbuffer(std::span<const Var> depths, std::span<const Var> visibilities,
                                double o, double eps) {
    std::vector<Var> scaled;
    scaled.reserve(depths.size());
    for (const Var& d : depths) scaled.push_back(d * o);
    return wsoftmin(scaled, visibilities, eps);
}

Var smooth_clamp01(Var x) {
    constexpr double beta = 32.0;
    return 1.0 - softplus((1.0 - x) * beta) / beta;
}

Var shade(const DVec3& normal, const DVec3& view_dir, const Lighting& l) {
    Var ndotl = dot(normal, l.light_dir);
    Var diffuse = smooth_abs(ndotl);
    Var c = diffuse * l.k_diffuse + l.k_ambient;
    if (l.k_specular > 0.0) {
        DVec3 h{view_dir.x + l.light_dir.x, view_dir.y + l.light_dir.y,
                view_dir.z + l.light_dir.z};
        h = normalized_smooth(h);
        Var ndoth = dot(normal, h);
        // smooth max(x, 0) so the specular lobe stays differentiable
        Var lobe = softplus(ndoth * 32.0) / 32.0;
        c = c + pow(lobe, l.shininess) * l.k_specular;
    }
    return smooth_clamp01(c);
}

void add_background(std::vector<ScreenTriangle>& tris, Tape& tape, const Camera& cam,
                    const RenderParams& params, double background_depth,
                    double scene_max_depth) {
    if (background_depth <= scene_max_depth)
        std::cerr << "smoothrast: warning: background depth " << background_depth
                  << " does not exceed scene max depth " << scene_max_depth << "\n";
    const double w = cam.width, h = cam.height;
    const double cx[4] = {-w, 2 * w, 2 * w, -w};
    const double cy[4] = {-h, -h, 2 * h, 2 * h};
    const int quad[2][3] = {{0, 1, 2}, {0, 2, 3}};
    for (const auto& q : quad) {
        ScreenTriangle t;
        for (int k = 0; k < 3; ++k) {
            t.x[k] = tape.constant(cx[q[k]]);
            t.y[k] = tape.constant(cy[q[k]]);
            t.z[k] = tape.constant(background_depth);
        }
        Var lens[3];
        for (int k = 0; k < 3; ++k) {
            int k1 = (k + 1) % 3;
            lens[k] = sqrt(square(t.x[k1] - t.x[k]) + square(t.y[k1] - t.y[k]) +
                           kSmoothAbsEps * kSmoothAbsEps);
        }
        t.m = softmin_scalar(std::span<const Var>(lens, 3), params.s);
        t.shade = tape.constant(params.background_intensity);
        tris.push_back(t);
    }
}

RenderResult render_screen(Tape& tape, const std::vector<ScreenTriangle>& tris,
                           const Camera& cam, const RenderParams& params,
                           RasterBuffers* buffers) {
    params.validate();
    if (tris.empty())
        throw std::invalid_argument("render_screen: no triangles (background missing)");
    const int n = static_cast<int>(tris.size());
    const bool oi = params.orientation_invariant;
    const bool interp = params.depth_mode == RenderParams::DepthMode::Interpolated;

    std::vector<EdgeFrame> frames;
    frames.reserve(n);
    std::vector<Var> depth_const;   // centroid depth per triangle
    std::vector<double> depth_val;
    std::vector<DepthPlane> planes;
    std::vector<double> shade_val;
    for (const ScreenTriangle& t : tris) {
        frames.push_back(edge_frame(t, params.s));
        Var zc = (t.z[0] + t.z[1] + t.z[2]) / 3.0;
        depth_const.push_back(zc);
        depth_val.push_back(zc.value());
        if (interp) planes.emplace_back(t);
        shade_val.push_back(t.shade.value());
    }

    // Triangles whose softmin argument falls more than this far below the
    // per-pixel maximum contribute < 1e-20 of the blend and are skipped.
    constexpr double kArgWindow = 46.0;

    if (buffers) {
        buffers->width = cam.width;
        buffers->height = cam.height;
        buffers->pixels.assign(static_cast<size_t>(cam.width) * cam.height, {});
    }

    RenderResult result;
    result.width = cam.width;
    result.height = cam.height;
    result.pixels.reserve(static_cast<size_t>(cam.width) * cam.height);
    std::vector<double> args(n);
    std::vector<int> included;
    included.reserve(32);

    for (int py_i = 0; py_i < cam.height; ++py_i) {
        const double py = py_i + 0.5;
        for (int px_i = 0; px_i < cam.width; ++px_i) {
            const double px = px_i + 0.5;

            // scout pass in plain doubles: softmin arguments per triangle
            double hi = -std::numeric_limits<double>::infinity();
            for (int i = 0; i < n; ++i) {
                double zv = depth_val[i];
                if (interp) {
                    zv = planes[i].za.value() * px + planes[i].zb.value() * py +
                         planes[i].zc.value();
                }
                args[i] = -params.o * zv + log_visibility_value(frames[i], px, py, oi);
                hi = std::max(hi, args[i]);
            }
            included.clear();
            for (int i = 0; i < n; ++i)
                if (args[i] >= hi - kArgWindow) included.push_back(i);

            // taped pass over the surviving triangles
            Var den, num;
            bool first = true;
            std::vector<Var> weights_e;
            if (buffers) weights_e.reserve(included.size());
            std::vector<Var> logv_store;
            if (buffers) logv_store.reserve(included.size());
            for (int i : included) {
                Var logv = log_visibility_var(frames[i], px, py, oi);
                Var z = interp ? planes[i].at(px, py) : depth_const[i];
                Var e = exp(logv - z * params.o - hi);
                if (buffers) {
                    weights_e.push_back(e);
                    logv_store.push_back(logv);
                }
                if (first) {
                    den = e;
                    num = e * tris[i].shade;
                    first = false;
                } else {
                    den = den + e;
                    num = num + e * tris[i].shade;
                }
            }
            Var intensity = num / den;
            if (buffers) {
                auto& entries = buffers->pixels[py_i * cam.width + px_i];
                for (size_t k = 0; k < included.size(); ++k)
                    entries.push_back({included[k], exp(logv_store[k]), weights_e[k] / den});
            }
            result.pixels.push_back(intensity);
        }
    }
    return result;
}

RenderResult render(Tape& tape, const DiffMesh& mesh, const Camera& cam,
                    const RenderParams& params, RasterBuffers* buffers) {
    params.validate();
    std::vector<ScreenTriangle> tris = view_project(mesh, cam, params.s);

    double scene_max_depth = 0.0;
    for (const ScreenTriangle& t : tris)
        for (int k = 0; k < 3; ++k) scene_max_depth = std::max(scene_max_depth, t.z[k].value());

    // per-face flat shade from world-space geometry
    for (size_t f = 0; f < tris.size(); ++f) {
        FaceGeometry g = face_geometry(mesh, static_cast<int>(f));
        DVec3 view{-(g.centroid.x - cam.eye.x), -(g.centroid.y - cam.eye.y),
                   -(g.centroid.z - cam.eye.z)};
        tris[f].shade = shade(g.normal, normalized_smooth(view), params.lighting);
    }

    double bg_depth = params.background_depth;
    if (bg_depth <= 0.0) {
        // auto: 10x the scene bounding radius, but always behind the scene
        Vec3 c{0, 0, 0};
        for (const DVec3& v : mesh.vertices) c = c + v.value();
        if (!mesh.vertices.empty()) c = c / static_cast<double>(mesh.vertices.size());
        double radius = 1.0;
        for (const DVec3& v : mesh.vertices) radius = std::max(radius, norm(v.value() - c));
        bg_depth = std::max(10.0 * radius, scene_max_depth + radius);
    }
    add_background(tris, tape, cam, params, bg_depth, scene_max_depth);
    return render_screen(tape, tris, cam, params, buffers);
}

Image render_image(const Mesh& mesh, const Camera& cam, const RenderParams& params) {
    Tape tape;
    DiffMesh dm = lift_mesh(tape, mesh, false);
    RenderResult r = render(tape, dm, cam, params);
    return r.image();
}

}  // namespace smoothrast
