#include "smoothrast/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace smoothrast {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown config key '" + where + it.key() + "'");
}

Vec3 parse_vec3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3)
        throw ConfigError("'" + where + "' must be an array of 3 numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

template <typename T>
void get_if(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

Camera parse_camera(const json& j, const std::string& where) {
    reject_unknown(j, {"eye", "look_at", "up", "fov_y_deg", "width", "height", "near"}, where);
    Camera c;
    if (j.contains("eye")) c.eye = parse_vec3(j.at("eye"), where + "eye");
    if (j.contains("look_at")) c.look_at = parse_vec3(j.at("look_at"), where + "look_at");
    if (j.contains("up")) c.up = parse_vec3(j.at("up"), where + "up");
    if (j.contains("fov_y_deg")) c.fov_y = j.at("fov_y_deg").get<double>() * M_PI / 180.0;
    get_if(j, "width", c.width);
    get_if(j, "height", c.height);
    get_if(j, "near", c.near);
    c.validate();
    return c;
}

}  // namespace

Mesh SceneConfig::load_mesh() const {
    return mesh_path ? load_obj(*mesh_path) : icosphere(base_level);
}

SceneConfig SceneConfig::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

SceneConfig SceneConfig::from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(j, {"mesh", "cameras", "render", "losses", "adam", "shape", "seed",
                       "output_dir"},
                   "");
    SceneConfig c;
    if (j.contains("mesh")) {
        const json& m = j.at("mesh");
        reject_unknown(m, {"path", "base_level"}, "mesh.");
        if (m.contains("path") && m.contains("base_level"))
            throw ConfigError("mesh.path and mesh.base_level are mutually exclusive");
        if (m.contains("path")) c.mesh_path = m.at("path").get<std::string>();
        if (m.contains("base_level")) c.base_level = m.at("base_level").get<int>();
    }
    if (j.contains("cameras")) {
        if (!j.at("cameras").is_array() || j.at("cameras").empty())
            throw ConfigError("'cameras' must be a non-empty array");
        for (const json& cj : j.at("cameras"))
            c.cameras.push_back(parse_camera(cj, "cameras[]."));
    } else {
        c.cameras.push_back(Camera{});
    }
    if (j.contains("render")) {
        const json& r = j.at("render");
        reject_unknown(r,
                       {"s", "o", "light_dir", "k_ambient", "k_diffuse", "k_specular",
                        "shininess", "background_intensity", "background_depth", "eps",
                        "orientation_invariant", "double_sided_shading", "depth_mode",
                        "visibility_decay_tau"},
                       "render.");
        get_if(r, "s", c.render.s);
        get_if(r, "o", c.render.o);
        if (r.contains("light_dir"))
            c.render.lighting.light_dir = normalized(parse_vec3(r.at("light_dir"), "render.light_dir"));
        get_if(r, "k_ambient", c.render.lighting.k_ambient);
        get_if(r, "k_diffuse", c.render.lighting.k_diffuse);
        get_if(r, "k_specular", c.render.lighting.k_specular);
        get_if(r, "shininess", c.render.lighting.shininess);
        get_if(r, "background_intensity", c.render.background_intensity);
        get_if(r, "background_depth", c.render.background_depth);
        get_if(r, "eps", c.render.eps);
        get_if(r, "orientation_invariant", c.render.orientation_invariant);
        get_if(r, "double_sided_shading", c.render.double_sided_shading);
        get_if(r, "visibility_decay_tau", c.render.visibility_decay_tau);
        if (r.contains("depth_mode")) {
            std::string dm = r.at("depth_mode").get<std::string>();
            if (dm == "centroid") c.render.depth_mode = RenderParams::DepthMode::Centroid;
            else if (dm == "interpolated") c.render.depth_mode = RenderParams::DepthMode::Interpolated;
            else throw ConfigError("render.depth_mode must be 'centroid' or 'interpolated'");
        }
        c.render.validate();
    }
    if (j.contains("losses")) {
        const json& l = j.at("losses");
        reject_unknown(l,
                       {"lambda_image", "lambda_normal", "lambda_edge", "lambda_laplacian",
                        "lambda_offset"},
                       "losses.");
        get_if(l, "lambda_image", c.losses.lambda_image);
        get_if(l, "lambda_normal", c.losses.lambda_normal);
        get_if(l, "lambda_edge", c.losses.lambda_edge);
        get_if(l, "lambda_laplacian", c.losses.lambda_laplacian);
        get_if(l, "lambda_offset", c.losses.lambda_offset);
        c.losses.validate();
    }
    if (j.contains("adam")) {
        const json& a = j.at("adam");
        reject_unknown(a,
                       {"learning_rate", "beta1", "beta2", "eps_hat", "max_iterations",
                        "log_every", "snapshot_every", "cosine_decay"},
                       "adam.");
        get_if(a, "learning_rate", c.adam.learning_rate);
        get_if(a, "beta1", c.adam.beta1);
        get_if(a, "beta2", c.adam.beta2);
        get_if(a, "eps_hat", c.adam.eps_hat);
        get_if(a, "max_iterations", c.adam.max_iterations);
        get_if(a, "log_every", c.adam.log_every);
        get_if(a, "snapshot_every", c.adam.snapshot_every);
        get_if(a, "cosine_decay", c.adam.cosine_decay);
        c.adam.validate();
    }
    if (j.contains("shape")) {
        const json& s = j.at("shape");
        reject_unknown(s, {"max_offset", "symmetry", "optimize_translation", "optimize_scale"},
                       "shape.");
        get_if(s, "max_offset", c.shape.max_offset);
        get_if(s, "symmetry", c.shape.symmetry);
        get_if(s, "optimize_translation", c.shape.optimize_translation);
        get_if(s, "optimize_scale", c.shape.optimize_scale);
        if (!(c.shape.max_offset > 0)) throw ConfigError("shape.max_offset must be > 0");
    }
    get_if(j, "seed", c.seed);
    get_if(j, "output_dir", c.output_dir);
    return c;
}

std::string SceneConfig::to_json_text() const {
    json j;
    if (mesh_path) j["mesh"] = {{"path", *mesh_path}};
    else j["mesh"] = {{"base_level", base_level}};
    j["cameras"] = json::array();
    for (const Camera& c : cameras)
        j["cameras"].push_back({{"eye", vec3_json(c.eye)},
                                {"look_at", vec3_json(c.look_at)},
                                {"up", vec3_json(c.up)},
                                {"fov_y_deg", c.fov_y * 180.0 / M_PI},
                                {"width", c.width},
                                {"height", c.height},
                                {"near", c.near}});
    j["render"] = {
        {"s", render.s},
        {"o", render.o},
        {"light_dir", vec3_json(render.lighting.light_dir)},
        {"k_ambient", render.lighting.k_ambient},
        {"k_diffuse", render.lighting.k_diffuse},
        {"k_specular", render.lighting.k_specular},
        {"shininess", render.lighting.shininess},
        {"background_intensity", render.background_intensity},
        {"background_depth", render.background_depth},
        {"eps", render.eps},
        {"orientation_invariant", render.orientation_invariant},
        {"double_sided_shading", render.double_sided_shading},
        {"depth_mode",
         render.depth_mode == RenderParams::DepthMode::Centroid ? "centroid" : "interpolated"},
        {"visibility_decay_tau", render.visibility_decay_tau}};
    j["losses"] = {{"lambda_image", losses.lambda_image},
                   {"lambda_normal", losses.lambda_normal},
                   {"lambda_edge", losses.lambda_edge},
                   {"lambda_laplacian", losses.lambda_laplacian},
                   {"lambda_offset", losses.lambda_offset}};
    j["adam"] = {{"learning_rate", adam.learning_rate},
                 {"beta1", adam.beta1},
                 {"beta2", adam.beta2},
                 {"eps_hat", adam.eps_hat},
                 {"max_iterations", adam.max_iterations},
                 {"log_every", adam.log_every},
                 {"snapshot_every", adam.snapshot_every},
                 {"cosine_decay", adam.cosine_decay}};
    j["shape"] = {{"max_offset", shape.max_offset},
                  {"symmetry", shape.symmetry},
                  {"optimize_translation", shape.optimize_translation},
                  {"optimize_scale", shape.optimize_scale}};
    j["seed"] = seed;
    j["output_dir"] = output_dir;
    return j.dump(2) + "\n";
}

}  // namespace smoothrast
