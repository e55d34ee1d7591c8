#pragma once

#include <optional>
#include <string>

#include "smoothrast/optim.hpp"

namespace smoothrast {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ShapeConfig {
    double max_offset = 1.0;
    bool symmetry = false;
    bool optimize_translation = true;
    bool optimize_scale = true;
};

struct SceneConfig {
    std::optional<std::string> mesh_path;  // exclusive with base_level
    int base_level = 2;
    std::vector<Camera> cameras;
    RenderParams render;
    LossWeights losses;
    AdamConfig adam;
    ShapeConfig shape;
    uint64_t seed = 1;
    std::string output_dir = "runs";

    Mesh load_mesh() const;

    // Parses and validates; unknown keys are rejected with their path.
    static SceneConfig from_json_file(const std::string& path);
    static SceneConfig from_json_text(const std::string& text);
    // Fully-resolved config with all defaults expanded.
    std::string to_json_text() const;
};

}  // namespace smoothrast
