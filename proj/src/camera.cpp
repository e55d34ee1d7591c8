#include "smoothrast/camera.hpp"

#include <cmath>
#include <string>

namespace smoothrast {

void Camera::validate() const {
    Vec3 dir = look_at - eye;
    if (norm(dir) < 1e-12) throw std::invalid_argument("Camera: eye == look_at");
    if (norm(cross(dir, up)) < 1e-9 * norm(dir) * norm(up))
        throw std::invalid_argument("Camera: up parallel to view direction");
    if (!(fov_y > 0.0 && fov_y < M_PI)) throw std::invalid_argument("Camera: fov_y out of (0, pi)");
    if (width <= 0 || height <= 0) throw std::invalid_argument("Camera: non-positive dimensions");
    if (!(near > 0.0)) throw std::invalid_argument("Camera: near must be > 0");
}

Camera::Basis Camera::basis() const {
    Vec3 forward = normalized(look_at - eye);
    Vec3 right = normalized(cross(up, forward));
    Vec3 upv = cross(forward, right);
    return {right, upv, forward};
}

double Camera::focal() const { return (height / 2.0) / std::tan(fov_y / 2.0); }

FrustumError::FrustumError(int v, double z, double near)
    : std::runtime_error("vertex " + std::to_string(v) + " at view depth " + std::to_string(z) +
                         " is in front of the near plane (" + std::to_string(near) + ")"),
      vertex(v) {}

ProjectedPoint project_point(const DVec3& p, const Camera& cam) {
    const Camera::Basis b = cam.basis();
    DVec3 rel{p.x - cam.eye.x, p.y - cam.eye.y, p.z - cam.eye.z};
    Var xv = dot(rel, b.right);
    Var yv = dot(rel, b.up);
    Var zv = dot(rel, b.forward);
    const double f = cam.focal();
    return {(xv / zv) * f + cam.width / 2.0, (yv / zv) * (-f) + cam.height / 2.0, zv};
}

Var softmin_scalar(std::span<const Var> xs, double tau) {
    // softmax(-tau*x) weights computed with a constant max shift
    double lo = xs[0].value();
    for (const Var& x : xs) lo = std::min(lo, x.value());
    std::vector<Var> e;
    e.reserve(xs.size());
    for (const Var& x : xs) e.push_back(exp((x - lo) * (-tau)));
    Var den = e[0];
    Var acc = e[0] * xs[0];
    for (size_t i = 1; i < xs.size(); ++i) {
        den = den + e[i];
        acc = acc + e[i] * xs[i];
    }
    return acc / den;
}

std::vector<ScreenTriangle> view_project(const DiffMesh& mesh, const Camera& cam,
                                         double softmin_temperature) {
    cam.validate();
    std::vector<ProjectedPoint> proj;
    proj.reserve(mesh.vertices.size());
    for (size_t i = 0; i < mesh.vertices.size(); ++i) {
        ProjectedPoint pp = project_point(mesh.vertices[i], cam);
        if (pp.z.value() < cam.near)
            throw FrustumError(static_cast<int>(i), pp.z.value(), cam.near);
        proj.push_back(pp);
    }
    std::vector<ScreenTriangle> tris;
    tris.reserve(mesh.faces->size());
    for (const Face& f : *mesh.faces) {
        ScreenTriangle t;
        for (int k = 0; k < 3; ++k) {
            t.x[k] = proj[f[k]].x;
            t.y[k] = proj[f[k]].y;
            t.z[k] = proj[f[k]].z;
        }
        Var lens[3];
        for (int k = 0; k < 3; ++k) {
            Var dx = t.x[(k + 1) % 3] - t.x[k];
            Var dy = t.y[(k + 1) % 3] - t.y[k];
            lens[k] = sqrt(dx * dx + dy * dy + kSmoothAbsEps * kSmoothAbsEps);
        }
        t.m = softmin_scalar(std::span<const Var>(lens, 3), softmin_temperature);
        tris.push_back(t);
    }
    return tris;
}

}  // namespace smoothrast
