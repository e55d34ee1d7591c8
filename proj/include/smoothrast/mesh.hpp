#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "smoothrast/vec.hpp"

namespace smoothrast {

using Face = std::array<int, 3>;

struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Face> faces;

    void validate() const;  // throws on bad indices / non-finite coords
};

// Unit icosphere; level 0 is the icosahedron (12/20), each level
// quadruples the face count. Levels above 6 are rejected.
Mesh icosphere(int subdivision_level);

Mesh load_obj(const std::string& path);
void save_obj(const Mesh& mesh, const std::string& path);

struct Adjacency {
    struct Edge {
        int v0, v1;           // v0 < v1
        int f0, f1;           // incident faces, f1 = -1 on boundary
    };
    std::vector<Edge> edges;
    std::vector<std::vector<int>> vertex_neighbors;

    explicit Adjacency(const Mesh& mesh);
};

// Mirror symmetry across the x=0 and z=0 planes (optionally also y=0):
// vertices in the non-negative orthant of the mirrored axes are free, the
// rest receive reflected offsets.
struct SymmetrySpec {
    std::vector<int> free_vertices;          // representative indices
    std::vector<int> representative;         // per vertex: index into free_vertices
    std::vector<int> slot_of_free;           // per vertex: slot if free, else -1
    std::vector<bool> flip_x, flip_y, flip_z;  // per vertex: reflected components
    std::vector<bool> on_plane_x, on_plane_y, on_plane_z;  // free verts pinned to a plane
    bool mirror_y = false;

    // Throws if the mesh is not symmetric under the mirror planes.
    static SymmetrySpec build(const Mesh& base, double tol = 1e-6, bool mirror_y = false);
};

struct ShapeParams {
    std::vector<double> raw_offsets;  // 3 * free vertex count, unconstrained
    Vec3 translation{0, 0, 0};
    double log_scale = 0.0;
    std::optional<SymmetrySpec> symmetry;
    double max_offset = 1.0;

    size_t free_vertex_count(const Mesh& base) const {
        return symmetry ? symmetry->free_vertices.size() : base.vertices.size();
    }
    static ShapeParams zero(const Mesh& base, bool symmetric = false, double max_offset = 1.0);
};

// Differentiable handles for the shape parameters on one tape.
struct ParamVars {
    std::vector<Var> raw_offsets;
    DVec3 translation;
    Var log_scale;
};

// Differentiable mesh: per-vertex positions on a tape, topology shared.
struct DiffMesh {
    std::vector<DVec3> vertices;
    const std::vector<Face>* faces = nullptr;
};

ParamVars lift_params(Tape& tape, const ShapeParams& params, bool requires_grad = true);

// Per-vertex offset field decoded from raw parameters, with symmetry
// mirroring applied: offset = max_offset * (2*sigmoid(raw) - 1).
std::vector<DVec3> decode_offsets(Tape& tape, const ParamVars& pv, const ShapeParams& params,
                                  const Mesh& base);

// v_out = exp(log_scale) * (v_base + offset) + translation.
DiffMesh apply_params(Tape& tape, const Mesh& base, const ParamVars& pv,
                      const ShapeParams& params);

// Non-differentiable decode (scratch tape internally).
Mesh apply_params_plain(const Mesh& base, const ShapeParams& params);

DiffMesh lift_mesh(Tape& tape, const Mesh& mesh, bool requires_grad = true);

struct FaceGeometry {
    DVec3 normal;    // unit (smooth-guarded) geometric normal
    DVec3 centroid;
    std::array<Var, 3> edge_lengths;  // |v1-v0|, |v2-v1|, |v0-v2|
};

FaceGeometry face_geometry(const DiffMesh& mesh, int face);

}  // namespace smoothrast
