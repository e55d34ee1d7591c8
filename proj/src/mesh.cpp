#include "smoothrast/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace smoothrast {

void Mesh::validate() const {
    const int n = static_cast<int>(vertices.size());
    for (const Vec3& v : vertices)
        if (!std::isfinite(v.x) || !std::isfinite(v.y) || !std::isfinite(v.z))
            throw std::invalid_argument("Mesh: non-finite vertex coordinate");
    for (size_t f = 0; f < faces.size(); ++f) {
        const Face& face = faces[f];
        for (int i : face)
            if (i < 0 || i >= n)
                throw std::invalid_argument("Mesh: face " + std::to_string(f) +
                                            " index out of range");
        if (face[0] == face[1] || face[1] == face[2] || face[0] == face[2])
            throw std::invalid_argument("Mesh: face " + std::to_string(f) +
                                        " repeats a vertex");
    }
}

Mesh icosphere(int level) {
    if (level < 0) throw std::invalid_argument("icosphere: level must be >= 0");
    if (level > 6) throw std::invalid_argument("icosphere: level > 6 rejected");

    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    Mesh m;
    m.vertices = {{-1, phi, 0}, {1, phi, 0},  {-1, -phi, 0}, {1, -phi, 0},
                  {0, -1, phi}, {0, 1, phi},  {0, -1, -phi}, {0, 1, -phi},
                  {phi, 0, -1}, {phi, 0, 1},  {-phi, 0, -1}, {-phi, 0, 1}};
    for (Vec3& v : m.vertices) v = normalized(v);
    m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
               {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
               {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
               {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};

    for (int l = 0; l < level; ++l) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Vec3 p = normalized((m.vertices[a] + m.vertices[b]) * 0.5);
            m.vertices.push_back(p);
            int idx = static_cast<int>(m.vertices.size()) - 1;
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<Face> next;
        next.reserve(m.faces.size() * 4);
        for (const Face& f : m.faces) {
            int a = mid(f[0], f[1]), b = mid(f[1], f[2]), c = mid(f[2], f[0]);
            next.push_back({f[0], a, c});
            next.push_back({f[1], b, a});
            next.push_back({f[2], c, b});
            next.push_back({a, b, c});
        }
        m.faces = std::move(next);
    }
    return m;
}

Mesh load_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_obj: cannot open " + path);
    Mesh m;
    std::string line;
    int lineno = 0;
    auto fail = [&](const std::string& msg) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + msg);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ss >> v.x >> v.y >> v.z)) fail("malformed vertex record");
            m.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ss >> tok) {
                // accept v, v/vt, v/vt/vn, v//vn forms; we use only v
                size_t slash = tok.find('/');
                int i = 0;
                try {
                    i = std::stoi(slash == std::string::npos ? tok : tok.substr(0, slash));
                } catch (...) {
                    fail("malformed face index '" + tok + "'");
                }
                if (i <= 0) fail("non-positive face index");
                if (i > static_cast<int>(m.vertices.size())) fail("face index out of range");
                idx.push_back(i - 1);
            }
            if (idx.size() < 3) fail("face with fewer than 3 vertices");
            for (size_t k = 1; k + 1 < idx.size(); ++k)
                m.faces.push_back({idx[0], idx[k], idx[k + 1]});
        }
        // other record types (vn, vt, o, g, s, mtllib, usemtl) are ignored
    }
    m.validate();
    return m;
}

void save_obj(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_obj: cannot open " + path);
    char buf[128];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof buf, "v %.9g %.9g %.9g\n", v.x, v.y, v.z);
        out << buf;
    }
    for (const Face& f : mesh.faces)
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    if (!out) throw std::runtime_error("save_obj: write failed for " + path);
}

Adjacency::Adjacency(const Mesh& mesh) {
    std::map<std::pair<int, int>, int> edge_index;
    vertex_neighbors.resize(mesh.vertices.size());
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const Face& face = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            auto [a, b] = std::minmax(face[k], face[(k + 1) % 3]);
            auto it = edge_index.find({a, b});
            if (it == edge_index.end()) {
                edge_index.emplace(std::make_pair(a, b), static_cast<int>(edges.size()));
                edges.push_back({a, b, static_cast<int>(f), -1});
                vertex_neighbors[a].push_back(b);
                vertex_neighbors[b].push_back(a);
            } else {
                Edge& e = edges[it->second];
                if (e.f1 != -1)
                    throw std::invalid_argument("Adjacency: edge shared by >2 faces");
                e.f1 = static_cast<int>(f);
            }
        }
    }
}

SymmetrySpec SymmetrySpec::build(const Mesh& base, double tol) {
    const size_t n = base.vertices.size();
    SymmetrySpec s;
    s.representative.assign(n, -1);
    s.slot_of_free.assign(n, -1);
    s.flip_x.assign(n, false);
    s.flip_z.assign(n, false);

    const double plane_tol = 1e-9;
    auto canonical = [&](const Vec3& v) {
        Vec3 c = v;
        if (c.x < -plane_tol) c.x = -c.x;
        if (c.z < -plane_tol) c.z = -c.z;
        return c;
    };
    auto nearest = [&](const Vec3& p) {
        int best = -1;
        double best_d2 = tol * tol;
        for (size_t i = 0; i < n; ++i) {
            Vec3 d = base.vertices[i] - p;
            double d2 = dot(d, d);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = static_cast<int>(i);
            }
        }
        return best;
    };

    for (size_t i = 0; i < n; ++i) {
        const Vec3& v = base.vertices[i];
        bool free_x = v.x >= -plane_tol;
        bool free_z = v.z >= -plane_tol;
        if (free_x && free_z) {
            s.slot_of_free[i] = static_cast<int>(s.free_vertices.size());
            s.free_vertices.push_back(static_cast<int>(i));
            s.on_plane_x.push_back(std::abs(v.x) < plane_tol);
            s.on_plane_z.push_back(std::abs(v.z) < plane_tol);
        }
    }
    for (size_t i = 0; i < n; ++i) {
        const Vec3& v = base.vertices[i];
        int rep_vertex = nearest(canonical(v));
        if (rep_vertex < 0 || s.slot_of_free[rep_vertex] < 0)
            throw std::invalid_argument(
                "SymmetrySpec: base mesh is not symmetric under x=0/z=0 planes "
                "(vertex " + std::to_string(i) + " has no mirror image)");
        s.representative[i] = s.slot_of_free[rep_vertex];
        s.flip_x[i] = v.x < -plane_tol;
        s.flip_z[i] = v.z < -plane_tol;
    }
    return s;
}

ShapeParams ShapeParams::zero(const Mesh& base, bool symmetric, double max_offset) {
    ShapeParams p;
    p.max_offset = max_offset;
    if (symmetric) p.symmetry = SymmetrySpec::build(base);
    p.raw_offsets.assign(3 * p.free_vertex_count(base), 0.0);
    return p;
}

ParamVars lift_params(Tape& tape, const ShapeParams& params, bool requires_grad) {
    ParamVars pv;
    pv.raw_offsets.reserve(params.raw_offsets.size());
    for (double r : params.raw_offsets) pv.raw_offsets.push_back(tape.leaf(r, requires_grad));
    pv.translation = lift(tape, params.translation, requires_grad);
    pv.log_scale = tape.leaf(params.log_scale, requires_grad);
    return pv;
}

std::vector<DVec3> decode_offsets(Tape& tape, const ParamVars& pv, const ShapeParams& params,
                                  const Mesh& base) {
    const size_t n_free = params.free_vertex_count(base);
    if (pv.raw_offsets.size() != 3 * n_free)
        throw std::invalid_argument("decode_offsets: raw_offsets length mismatch (have " +
                                    std::to_string(pv.raw_offsets.size()) + ", need " +
                                    std::to_string(3 * n_free) + ")");
    // offset = max_offset * (2*sigmoid(raw) - 1), strictly inside the bound
    std::vector<DVec3> free_off;
    free_off.reserve(n_free);
    for (size_t k = 0; k < n_free; ++k) {
        auto decode = [&](size_t j) {
            return (sigmoid(pv.raw_offsets[3 * k + j]) * 2.0 - 1.0) * params.max_offset;
        };
        free_off.push_back({decode(0), decode(1), decode(2)});
    }

    if (!params.symmetry) return free_off;

    const SymmetrySpec& sym = *params.symmetry;
    Var zero = tape.constant(0.0);
    // vertices on a mirror plane stay in it
    for (size_t slot = 0; slot < sym.free_vertices.size(); ++slot) {
        if (sym.on_plane_x[slot]) free_off[slot].x = zero;
        if (sym.on_plane_z[slot]) free_off[slot].z = zero;
    }
    std::vector<DVec3> full;
    full.reserve(base.vertices.size());
    for (size_t i = 0; i < base.vertices.size(); ++i) {
        DVec3 o = free_off[sym.representative[i]];
        if (sym.flip_x[i]) o.x = -o.x;
        if (sym.flip_z[i]) o.z = -o.z;
        full.push_back(o);
    }
    return full;
}

DiffMesh apply_params(Tape& tape, const Mesh& base, const ParamVars& pv,
                      const ShapeParams& params) {
    std::vector<DVec3> offsets = decode_offsets(tape, pv, params, base);
    Var scale = exp(pv.log_scale);
    DiffMesh out;
    out.faces = &base.faces;
    out.vertices.reserve(base.vertices.size());
    for (size_t i = 0; i < base.vertices.size(); ++i) {
        DVec3 p = offsets[i] + lift(tape, base.vertices[i]);
        out.vertices.push_back(p * scale + pv.translation);
    }
    return out;
}

Mesh apply_params_plain(const Mesh& base, const ShapeParams& params) {
    Tape scratch;
    ParamVars pv = lift_params(scratch, params, false);
    DiffMesh dm = apply_params(scratch, base, pv, params);
    Mesh out;
    out.faces = base.faces;
    out.vertices.reserve(dm.vertices.size());
    for (const DVec3& v : dm.vertices) out.vertices.push_back(v.value());
    return out;
}

DiffMesh lift_mesh(Tape& tape, const Mesh& mesh, bool requires_grad) {
    DiffMesh dm;
    dm.faces = &mesh.faces;
    dm.vertices.reserve(mesh.vertices.size());
    for (const Vec3& v : mesh.vertices) dm.vertices.push_back(lift(tape, v, requires_grad));
    return dm;
}

FaceGeometry face_geometry(const DiffMesh& mesh, int face) {
    const Face& f = (*mesh.faces)[face];
    const DVec3& a = mesh.vertices[f[0]];
    const DVec3& b = mesh.vertices[f[1]];
    const DVec3& c = mesh.vertices[f[2]];
    FaceGeometry g;
    g.normal = normalized_smooth(cross(b - a, c - a));
    g.centroid = (a + b + c) * (1.0 / 3.0);
    DVec3 e0 = b - a, e1 = c - b, e2 = a - c;
    g.edge_lengths = {sqrt(dot(e0, e0) + kSmoothAbsEps * kSmoothAbsEps),
                      sqrt(dot(e1, e1) + kSmoothAbsEps * kSmoothAbsEps),
                      sqrt(dot(e2, e2) + kSmoothAbsEps * kSmoothAbsEps)};
    return g;
}

}  // namespace smoothrast
