#pragma once

#include <stdexcept>
#include <vector>

#include "smoothrast/mesh.hpp"

namespace smoothrast {

struct Camera {
    Vec3 eye{0, 0, -3};
    Vec3 look_at{0, 0, 0};
    Vec3 up{0, 1, 0};
    double fov_y = 0.7853981633974483;  // radians
    int width = 64;
    int height = 64;
    double near = 0.05;

    void validate() const;

    // Orthonormal view basis: right, up, forward (forward points at look_at).
    struct Basis {
        Vec3 right, up, forward;
    };
    Basis basis() const;
    double focal() const;  // pixels
};

struct FrustumError : std::runtime_error {
    int vertex;
    FrustumError(int v, double z, double near);
};

// Pixel-space triangle: origin top-left, +x right, +y down, pixel
// centers at integer+0.5. z is view-space depth (world units).
struct ScreenTriangle {
    Var x[3], y[3], z[3];
    Var m;        // softmin of the three pixel-space edge lengths
    Var shade;    // flat per-face grayscale, filled by the renderer
};

// Differentiable pinhole projection of one point.
struct ProjectedPoint {
    Var x, y, z;
};
ProjectedPoint project_point(const DVec3& p, const Camera& cam);

// Softmin of values with temperature tau: sum_i softmax(-tau*x)_i * x_i.
Var softmin_scalar(std::span<const Var> xs, double tau);

// Projects every face of the mesh; softmin_temperature is the steepness
// s shared with the rasterizer. Throws FrustumError if any vertex lands
// closer than the near plane.
std::vector<ScreenTriangle> view_project(const DiffMesh& mesh, const Camera& cam,
                                         double softmin_temperature);

}  // namespace smoothrast
