#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "smoothrast/config.hpp"
#include "smoothrast/imageio.hpp"

namespace fs = std::filesystem;
using namespace smoothrast;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitFrustum = 3;
constexpr int kExitTargets = 4;
constexpr int kExitThreshold = 5;

std::vector<double> parse_values(const std::string& list) {
    std::vector<double> out;
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
    fs::path p(path);
    fs::path ext = p.extension();
    p.replace_extension();
    return p.string() + suffix + ext.string();
}

std::string format_num(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

void write_trace_csv(const RunTrace& trace, const std::string& path) {
    std::ofstream out(path);
    out << "iter,image_l1,reg_normal,reg_edge,reg_laplacian,total\n";
    char buf[256];
    for (const RunTrace::Row& r : trace.rows) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.iter,
                      r.losses.image_l1, r.losses.reg_normal, r.losses.reg_edge,
                      r.losses.reg_laplacian, r.losses.total);
        out << buf;
    }
}

void write_params_json(const ShapeParams& p, const std::string& path) {
    std::ofstream out(path);
    out << "{\n  \"translation\": [" << p.translation.x << ", " << p.translation.y << ", "
        << p.translation.z << "],\n  \"log_scale\": " << p.log_scale
        << ",\n  \"max_offset\": " << p.max_offset << ",\n  \"raw_offsets\": [";
    for (size_t i = 0; i < p.raw_offsets.size(); ++i)
        out << (i ? ", " : "") << p.raw_offsets[i];
    out << "]\n}\n";
}

int cmd_render(const SceneConfig& cfg, const std::string& out_path,
               const std::vector<std::string>& sweeps) {
    Mesh mesh = cfg.load_mesh();
    std::vector<double> sweep_s, sweep_o;
    for (const std::string& sw : sweeps) {
        auto eq = sw.find('=');
        if (eq == std::string::npos) throw ConfigError("--sweep expects s=... or o=...");
        std::string key = sw.substr(0, eq);
        if (key == "s") sweep_s = parse_values(sw.substr(eq + 1));
        else if (key == "o") sweep_o = parse_values(sw.substr(eq + 1));
        else throw ConfigError("--sweep key must be 's' or 'o'");
    }
    if (sweep_s.empty()) sweep_s = {cfg.render.s};
    if (sweep_o.empty()) sweep_o = {cfg.render.o};
    const bool sweeping = sweep_s.size() > 1 || sweep_o.size() > 1 || !sweeps.empty();

    for (double s : sweep_s) {
        for (double o : sweep_o) {
            RenderParams params = cfg.render;
            params.s = s;
            params.o = o;
            for (size_t c = 0; c < cfg.cameras.size(); ++c) {
                Image img = render_image(mesh, cfg.cameras[c], params);
                std::string path = out_path;
                if (sweeping) path = with_suffix(path, "_s" + format_num(s) + "_o" + format_num(o));
                if (cfg.cameras.size() > 1)
                    path = with_suffix(path, "_cam" + std::to_string(c));
                save_image(img, path);
            }
        }
    }
    return 0;
}

int cmd_optimize(SceneConfig cfg, const std::string& targets_dir, int iters_override,
                 std::string run_name) {
    if (iters_override >= 0) cfg.adam.max_iterations = iters_override;

    std::vector<std::string> target_files;
    for (const auto& entry : fs::directory_iterator(targets_dir)) {
        std::string ext = entry.path().extension().string();
        if (ext == ".pgm" || ext == ".png") target_files.push_back(entry.path().string());
    }
    std::sort(target_files.begin(), target_files.end());
    if (target_files.size() != cfg.cameras.size()) {
        std::cerr << "smoothrast: " << target_files.size() << " target image(s) in "
                  << targets_dir << " but " << cfg.cameras.size() << " camera(s) configured\n";
        return kExitTargets;
    }

    Mesh base = cfg.load_mesh();
    std::vector<View> views;
    for (size_t i = 0; i < target_files.size(); ++i) {
        View v{load_image(target_files[i]), cfg.cameras[i]};
        if (v.target.width != v.camera.width || v.target.height != v.camera.height) {
            std::cerr << "smoothrast: target " << target_files[i]
                      << " dimensions do not match camera " << i << "\n";
            return kExitTargets;
        }
        views.push_back(std::move(v));
    }

    if (run_name.empty()) {
        auto now = std::chrono::system_clock::now().time_since_epoch();
        auto secs = std::chrono::duration_cast<std::chrono::seconds>(now).count();
        run_name = std::to_string(secs) + "-seed" + std::to_string(cfg.seed);
    }
    fs::path run_dir = fs::path(cfg.output_dir) / run_name;
    fs::create_directories(run_dir);
    {
        std::ofstream out(run_dir / "config.json");
        out << cfg.to_json_text();
    }

    ShapeParams init = ShapeParams::zero(base, cfg.shape.symmetry, cfg.shape.max_offset);
    OptimizeOptions opts;
    opts.optimize_translation = cfg.shape.optimize_translation;
    opts.optimize_scale = cfg.shape.optimize_scale;
    opts.seed = cfg.seed;
    int log_every = std::max(1, cfg.adam.log_every);
    opts.on_iteration = [&](int iter, const Mesh&, const LossReport::Values& v) {
        if (iter % log_every == 0)
            std::cout << "iter " << iter << " total " << v.total << " image_l1 " << v.image_l1
                      << "\n";
    };

    auto [final_params, trace] =
        optimize(base, views, cfg.render, cfg.losses, cfg.adam, init, opts);

    write_trace_csv(trace, (run_dir / "trace.csv").string());
    for (const auto& [iter, snap] : trace.snapshots) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%06d.obj", iter);
        save_obj(apply_params_plain(base, snap), (run_dir / name).string());
    }
    Mesh final_mesh = apply_params_plain(base, final_params);
    save_obj(final_mesh, (run_dir / "final.obj").string());
    write_params_json(final_params, (run_dir / "params.json").string());
    for (size_t c = 0; c < cfg.cameras.size(); ++c) {
        char name[64];
        std::snprintf(name, sizeof name, "final_view_%03zu.pgm", c);
        save_image(render_image(final_mesh, cfg.cameras[c], cfg.render),
                   (run_dir / name).string());
    }
    std::cout << "run directory: " << run_dir.string() << "\n";
    return 0;
}

int cmd_gradcheck(const SceneConfig& cfg, int probes, double step, double threshold) {
    Mesh mesh = cfg.load_mesh();
    std::printf("%-10s %-12s %-14s %-14s\n", "camera", "probes", "max_abs_err", "max_rel_err");
    double worst = 0.0;
    for (size_t c = 0; c < cfg.cameras.size(); ++c) {
        GradCheckReport rep =
            gradcheck_render(mesh, cfg.cameras[c], cfg.render, probes, step, cfg.seed);
        std::printf("%-10zu %-12d %-14.3e %-14.3e\n", c, rep.probes, rep.max_abs_err,
                    rep.max_rel_err);
        worst = std::max(worst, rep.max_rel_err);
    }
    if (worst > threshold) {
        std::cerr << "smoothrast: gradcheck max relative error " << worst
                  << " exceeds threshold " << threshold << "\n";
        return kExitThreshold;
    }
    return 0;
}

int cmd_make_sphere(int level, const std::string& out) {
    save_obj(icosphere(level), out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"smoothrast: smooth differentiable rasterizer and inverse renderer"};
    app.require_subcommand(1);

    // SMOOTHRAST_THREADS caps worker parallelism. The renderer is currently
    // single-threaded (deterministic, bit-reproducible), which satisfies any
    // positive cap; a malformed value is a configuration error.
    if (const char* threads_env = std::getenv("SMOOTHRAST_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(threads_env, &end, 10);
        if (end == threads_env || *end != '\0' || cap < 1) {
            std::fprintf(stderr, "error: SMOOTHRAST_THREADS must be a positive integer, got '%s'\n",
                         threads_env);
            return kExitConfig;
        }
    }

    std::string config_path, out_path = "out.pgm", targets_dir, run_name;
    std::vector<std::string> sweeps;
    int iters = -1, probes = 16, level = 2;
    double step = 1e-5, threshold = 1e-3;

    CLI::App* render = app.add_subcommand("render", "render the configured scene");
    render->add_option("--config", config_path)->required();
    render->add_option("--out", out_path, "output image path (.pgm/.png/.f64)");
    render->add_option("--sweep", sweeps, "s=a,b,c and/or o=x,y,z grids");

    CLI::App* optimize = app.add_subcommand("optimize", "fit the mesh to target images");
    optimize->add_option("--config", config_path)->required();
    optimize->add_option("--targets", targets_dir, "directory of target images")->required();
    optimize->add_option("--iters", iters, "override adam.max_iterations");
    optimize->add_option("--run-name", run_name, "fixed run directory name");

    CLI::App* gradcheck = app.add_subcommand("gradcheck", "verify render gradients vs FD");
    gradcheck->add_option("--config", config_path)->required();
    gradcheck->add_option("--probes", probes);
    gradcheck->add_option("--step", step);
    gradcheck->add_option("--threshold", threshold);

    CLI::App* make_sphere = app.add_subcommand("make-sphere", "write an icosphere OBJ");
    make_sphere->add_option("--level", level);
    make_sphere->add_option("--out", out_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (make_sphere->parsed()) return cmd_make_sphere(level, out_path);
        SceneConfig cfg = SceneConfig::from_json_file(config_path);
        if (render->parsed()) return cmd_render(cfg, out_path, sweeps);
        if (optimize->parsed()) return cmd_optimize(cfg, targets_dir, iters, run_name);
        if (gradcheck->parsed()) return cmd_gradcheck(cfg, probes, step, threshold);
    } catch (const ConfigError& e) {
        std::cerr << "smoothrast: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "smoothrast: config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const FrustumError& e) {
        std::cerr << "smoothrast: frustum error: " << e.what() << "\n";
        return kExitFrustum;
    } catch (const std::exception& e) {
        std::cerr << "smoothrast: " << e.what() << "\n";
        return kExitIo;
    }
    return 0;
}
