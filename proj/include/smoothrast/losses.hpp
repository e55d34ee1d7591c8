#pragma once

#include "smoothrast/renderer.hpp"

namespace smoothrast {

struct LossWeights {
    double lambda_image = 1.0;
    double lambda_normal = 0.03;
    double lambda_edge = 0.01;
    double lambda_laplacian = 0.003;
    // Gauge-fixing penalty |mean offset|^2 on the decoded per-vertex offsets.
    // A uniform offset field is indistinguishable from a translation, so
    // without this term the translation/offset split is arbitrary; pinning
    // the mean offset to zero makes the translation parameter report the
    // rigid part of the deformation without constraining the mesh itself.
    // Applied by optimize(), which owns the shape parameters; 0 disables it.
    double lambda_offset = 0.0;

    void validate() const;
};

struct LossReport {
    Var image_l1, reg_normal, reg_edge, reg_laplacian, total;

    struct Values {
        double image_l1, reg_normal, reg_edge, reg_laplacian, total;
    };
    Values values() const {
        return {image_l1.value(), reg_normal.value(), reg_edge.value(), reg_laplacian.value(),
                total.value()};
    }
};

// Mean absolute per-pixel difference (smooth |.|), resolution-independent.
Var image_l1(const RenderResult& rendered, const Image& target);

// Mean over interior edges of |n_f0 - n_f1|^2 = 2 - 2 cos(angle).
Var reg_normal_angle(const DiffMesh& mesh, const Adjacency& adj);

// Mean over edges of smooth |len(e) - mean_len|.
Var reg_edge_length(const DiffMesh& mesh, const Adjacency& adj);

// Mean over vertices of the uniform-Laplacian magnitude
// |v - mean(neighbors)|; throws naming any isolated vertex.
Var reg_laplacian(const DiffMesh& mesh, const Adjacency& adj);

LossReport total_loss(Tape& tape, const std::vector<RenderResult>& rendered,
                      const std::vector<Image>& targets, const DiffMesh& mesh,
                      const Adjacency& adj, const LossWeights& weights);

}  // namespace smoothrast
