#pragma once

#include <vector>

#include "smoothrast/camera.hpp"

namespace smoothrast {

struct Lighting {
    Vec3 light_dir{0.3713906763541037, 0.5570860145311556, -0.7427813527082074};  // unit
    double k_ambient = 0.3;
    double k_diffuse = 0.6;
    double k_specular = 0.1;
    double shininess = 16.0;
};

struct RenderParams {
    double s = 25.0;  // edge steepness of the visibility sigmoids
    double o = 25.0;  // opacity: depth scale inside the weighted softmin
    Lighting lighting;
    double background_intensity = 1.0;
    double background_depth = 0.0;  // 0 = auto (10x scene bounding radius)
    double eps = 1e-12;             // generic numeric floor
    bool orientation_invariant = true;  // V+ + V- form; single-sided when off
    bool double_sided_shading = true;   // |n.l| diffuse term
    // depth fed to the softmin: per-triangle mean of vertex depths
    // (default) or barycentric plane interpolation
    enum class DepthMode { Centroid, Interpolated };
    DepthMode depth_mode = DepthMode::Centroid;
    // experimental: multiply V by exp(-d^2/tau) beyond the triangle; off by default
    double visibility_decay_tau = 0.0;

    void validate() const;
};

struct Image {
    int width = 0, height = 0;
    std::vector<double> intensities;  // row-major, [0,1]

    Image() = default;
    Image(int w, int h, double fill = 0.0) : width(w), height(h), intensities(w * h, fill) {}
    double& at(int x, int y) { return intensities[y * width + x]; }
    double at(int x, int y) const { return intensities[y * width + x]; }
};

// Weighted softmax: out_i = exp(x_i) * w_i / sum_j exp(x_j) * w_j,
// evaluated as softmax(x_i + log(w_i + eps)) in shifted log-space.
std::vector<Var> wsoftmax(std::span<const Var> x, std::span<const Var> w, double eps = 1e-12);
inline std::vector<Var> wsoftmin(std::span<const Var> x, std::span<const Var> w,
                                 double eps = 1e-12) {
    std::vector<Var> neg;
    neg.reserve(x.size());
    for (const Var& v : x) neg.push_back(-v);
    return wsoftmax(neg, w, eps);
}

// Soft coverage of a pixel center by a screen triangle: product over the
// three directed edge distances of sigmoid(det * s / m), plus the mirrored
// product when orientation invariance is on.
Var visibility(double px, double py, const ScreenTriangle& tri, const RenderParams& params);

// Per-pixel depth of the triangle's screen-space plane, extrapolated
// outside the triangle; near-degenerate triangles blend smoothly to the
// mean vertex depth.
struct DepthPlane {
    Var za, zb, zc;  // depth(px,py) = za*px + zb*py + zc
    DepthPlane(const ScreenTriangle& tri);
    Var at(double px, double py) const { return za * px + zb * py + zc; }
};
Var smooth_zdepth(double px, double py, const ScreenTriangle& tri);

// Blend weights over triangles at one pixel: wsoftmin(o * depth, V).
std::vector<Var> smooth_zbuffer(std::span<const Var> depths, std::span<const Var> visibilities,
                                double o, double eps = 1e-12);

// Blinn-Phong + diffuse + ambient grayscale, double-sided (|n.l|), with a
// smooth saturation keeping the result in (~0, 1).
Var shade(const DVec3& normal, const DVec3& view_dir, const Lighting& lighting);
Var smooth_clamp01(Var x);  // 1 - softplus(beta*(1-x))/beta, beta = 32

// Appends two triangles spanning the pixel rectangle with margin, at
// constant depth `background_depth`, shaded at background_intensity.
// Warns on stderr if the background does not sit behind the scene.
void add_background(std::vector<ScreenTriangle>& tris, Tape& tape, const Camera& cam,
                    const RenderParams& params, double background_depth,
                    double scene_max_depth);

// Optional per-pixel blend-weight capture for diagnostics and tests.
struct RasterBuffers {
    int width = 0, height = 0;
    // per pixel: (triangle index, visibility, blend weight)
    struct Entry {
        int tri;
        Var visibility;
        Var weight;
    };
    std::vector<std::vector<Entry>> pixels;
};

struct RenderResult {
    int width = 0, height = 0;
    std::vector<Var> pixels;  // row-major, differentiable
    Image image() const;      // clipped snapshot of current values
};

// Full differentiable render of projected triangles (shades must be set;
// background already appended by the caller via add_background).
RenderResult render_screen(Tape& tape, const std::vector<ScreenTriangle>& tris,
                           const Camera& cam, const RenderParams& params,
                           RasterBuffers* buffers = nullptr);

// Projects, shades, adds background, rasterizes.
RenderResult render(Tape& tape, const DiffMesh& mesh, const Camera& cam,
                    const RenderParams& params, RasterBuffers* buffers = nullptr);

Image render_image(const Mesh& mesh, const Camera& cam, const RenderParams& params);

}  // namespace smoothrast
