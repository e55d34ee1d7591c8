#include "smoothrast/losses.hpp"

#include <stdexcept>
#include <string>

namespace smoothrast {

void LossWeights::validate() const {
    if (lambda_image < 0 || lambda_normal < 0 || lambda_edge < 0 || lambda_laplacian < 0 ||
        lambda_offset < 0)
        throw std::invalid_argument("LossWeights: weights must be nonnegative");
}

Var image_l1(const RenderResult& rendered, const Image& target) {
    if (rendered.width != target.width || rendered.height != target.height)
        throw std::invalid_argument("image_l1: dimension mismatch");
    Var acc = smooth_abs(rendered.pixels[0] - target.intensities[0]);
    for (size_t i = 1; i < rendered.pixels.size(); ++i)
        acc = acc + smooth_abs(rendered.pixels[i] - target.intensities[i]);
    return acc / static_cast<double>(rendered.pixels.size());
}

Var reg_normal_angle(const DiffMesh& mesh, const Adjacency& adj) {
    Tape& t = *mesh.vertices[0].x.tape;
    std::vector<DVec3> normals;
    normals.reserve(mesh.faces->size());
    for (size_t f = 0; f < mesh.faces->size(); ++f)
        normals.push_back(face_geometry(mesh, static_cast<int>(f)).normal);
    Var acc = t.constant(0.0);
    int count = 0;
    for (const Adjacency::Edge& e : adj.edges) {
        if (e.f1 < 0) continue;  // boundary edge
        DVec3 d = normals[e.f0] - normals[e.f1];
        acc = acc + dot(d, d);
        ++count;
    }
    return count > 0 ? acc / static_cast<double>(count) : acc;
}

Var reg_edge_length(const DiffMesh& mesh, const Adjacency& adj) {
    if (adj.edges.empty()) throw std::invalid_argument("reg_edge_length: mesh has no edges");
    std::vector<Var> lens;
    lens.reserve(adj.edges.size());
    Var sum;
    for (size_t i = 0; i < adj.edges.size(); ++i) {
        const Adjacency::Edge& e = adj.edges[i];
        DVec3 d = mesh.vertices[e.v1] - mesh.vertices[e.v0];
        Var len = sqrt(dot(d, d) + kSmoothAbsEps * kSmoothAbsEps);
        lens.push_back(len);
        sum = i == 0 ? len : sum + len;
    }
    Var mean = sum / static_cast<double>(lens.size());
    Var acc = smooth_abs(lens[0] - mean);
    for (size_t i = 1; i < lens.size(); ++i) acc = acc + smooth_abs(lens[i] - mean);
    return acc / static_cast<double>(lens.size());
}

Var reg_laplacian(const DiffMesh& mesh, const Adjacency& adj) {
    Tape& t = *mesh.vertices[0].x.tape;
    Var acc = t.constant(0.0);
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
        const std::vector<int>& nb = adj.vertex_neighbors[v];
        if (nb.empty())
            throw std::runtime_error("reg_laplacian: vertex " + std::to_string(v) +
                                     " is isolated (dissociated from the mesh)");
        DVec3 mean = mesh.vertices[nb[0]];
        for (size_t k = 1; k < nb.size(); ++k) mean = mean + mesh.vertices[nb[k]];
        mean = mean * (1.0 / static_cast<double>(nb.size()));
        DVec3 d = mesh.vertices[v] - mean;
        acc = acc + sqrt(dot(d, d) + kSmoothAbsEps * kSmoothAbsEps);
    }
    return acc / static_cast<double>(mesh.vertices.size());
}

LossReport total_loss(Tape& tape, const std::vector<RenderResult>& rendered,
                      const std::vector<Image>& targets, const DiffMesh& mesh,
                      const Adjacency& adj, const LossWeights& weights) {
    weights.validate();
    if (rendered.size() != targets.size() || rendered.empty())
        throw std::invalid_argument("total_loss: rendered/target view count mismatch");
    LossReport r;
    Var img = image_l1(rendered[0], targets[0]);
    for (size_t v = 1; v < rendered.size(); ++v)
        img = img + image_l1(rendered[v], targets[v]);
    r.image_l1 = img / static_cast<double>(rendered.size());
    r.reg_normal = reg_normal_angle(mesh, adj);
    r.reg_edge = reg_edge_length(mesh, adj);
    r.reg_laplacian = reg_laplacian(mesh, adj);
    r.total = r.image_l1 * weights.lambda_image + r.reg_normal * weights.lambda_normal +
              r.reg_edge * weights.lambda_edge + r.reg_laplacian * weights.lambda_laplacian;
    (void)tape;
    return r;
}

}  // namespace smoothrast
