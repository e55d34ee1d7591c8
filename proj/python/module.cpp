#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "smoothrast/config.hpp"
#include "smoothrast/imageio.hpp"

namespace py = pybind11;
using namespace smoothrast;

namespace {

Mesh mesh_from_arrays(py::array_t<double> vertices, py::array_t<int> faces) {
    auto v = vertices.unchecked<2>();
    auto f = faces.unchecked<2>();
    if (v.shape(1) != 3 || f.shape(1) != 3)
        throw std::invalid_argument("vertices and faces must have shape (N, 3)");
    Mesh m;
    for (py::ssize_t i = 0; i < v.shape(0); ++i)
        m.vertices.push_back({v(i, 0), v(i, 1), v(i, 2)});
    for (py::ssize_t i = 0; i < f.shape(0); ++i)
        m.faces.push_back({f(i, 0), f(i, 1), f(i, 2)});
    m.validate();
    return m;
}

py::tuple mesh_to_arrays(const Mesh& m) {
    py::array_t<double> v({static_cast<py::ssize_t>(m.vertices.size()), py::ssize_t(3)});
    py::array_t<int> f({static_cast<py::ssize_t>(m.faces.size()), py::ssize_t(3)});
    auto vm = v.mutable_unchecked<2>();
    auto fm = f.mutable_unchecked<2>();
    for (size_t i = 0; i < m.vertices.size(); ++i)
        for (int k = 0; k < 3; ++k) vm(i, k) = m.vertices[i][k];
    for (size_t i = 0; i < m.faces.size(); ++i)
        for (int k = 0; k < 3; ++k) fm(i, k) = m.faces[i][k];
    return py::make_tuple(v, f);
}

py::array_t<double> image_to_array(const Image& img) {
    py::array_t<double> a({py::ssize_t(img.height), py::ssize_t(img.width)});
    std::copy(img.intensities.begin(), img.intensities.end(), a.mutable_data());
    return a;
}

Image image_from_array(py::array_t<double> a) {
    auto r = a.unchecked<2>();
    Image img(static_cast<int>(r.shape(1)), static_cast<int>(r.shape(0)));
    for (py::ssize_t y = 0; y < r.shape(0); ++y)
        for (py::ssize_t x = 0; x < r.shape(1); ++x) img.at(static_cast<int>(x), static_cast<int>(y)) = r(y, x);
    return img;
}

}  // namespace

PYBIND11_MODULE(_smoothrast, m) {
    m.doc() = "smooth differentiable triangle rasterizer";

    py::class_<Camera>(m, "Camera")
        .def(py::init<>())
        .def_readwrite("eye", &Camera::eye)
        .def_readwrite("look_at", &Camera::look_at)
        .def_readwrite("up", &Camera::up)
        .def_readwrite("fov_y", &Camera::fov_y)
        .def_readwrite("width", &Camera::width)
        .def_readwrite("height", &Camera::height)
        .def_readwrite("near", &Camera::near);

    py::class_<Vec3>(m, "Vec3")
        .def(py::init([](double x, double y, double z) { return Vec3{x, y, z}; }))
        .def_readwrite("x", &Vec3::x)
        .def_readwrite("y", &Vec3::y)
        .def_readwrite("z", &Vec3::z);

    py::class_<Lighting>(m, "Lighting")
        .def(py::init<>())
        .def_readwrite("light_dir", &Lighting::light_dir)
        .def_readwrite("k_ambient", &Lighting::k_ambient)
        .def_readwrite("k_diffuse", &Lighting::k_diffuse)
        .def_readwrite("k_specular", &Lighting::k_specular)
        .def_readwrite("shininess", &Lighting::shininess);

    py::class_<RenderParams>(m, "RenderParams")
        .def(py::init<>())
        .def_readwrite("s", &RenderParams::s)
        .def_readwrite("o", &RenderParams::o)
        .def_readwrite("lighting", &RenderParams::lighting)
        .def_readwrite("background_intensity", &RenderParams::background_intensity)
        .def_readwrite("background_depth", &RenderParams::background_depth)
        .def_readwrite("orientation_invariant", &RenderParams::orientation_invariant);

    m.def("icosphere", [](int level) { return mesh_to_arrays(icosphere(level)); },
          py::arg("level"), "unit icosphere as (vertices, faces) arrays");

    m.def("load_obj", [](const std::string& path) { return mesh_to_arrays(load_obj(path)); });
    m.def("save_obj", [](py::array_t<double> v, py::array_t<int> f, const std::string& path) {
        save_obj(mesh_from_arrays(v, f), path);
    });

    m.def(
        "render",
        [](py::array_t<double> v, py::array_t<int> f, const Camera& cam,
           const RenderParams& params) {
            return image_to_array(render_image(mesh_from_arrays(v, f), cam, params));
        },
        py::arg("vertices"), py::arg("faces"), py::arg("camera"),
        py::arg("params") = RenderParams{}, "grayscale render as a (H, W) float array");

    m.def(
        "render_gradient",
        [](py::array_t<double> v, py::array_t<int> f, const Camera& cam,
           const RenderParams& params, py::array_t<double> loss_weights) {
            // gradient of sum(weights * image) with respect to vertices
            Mesh mesh = mesh_from_arrays(v, f);
            Image w = image_from_array(loss_weights);
            Tape tape;
            DiffMesh dm = lift_mesh(tape, mesh, true);
            RenderResult r = render(tape, dm, cam, params);
            if (w.width != r.width || w.height != r.height)
                throw std::invalid_argument("loss_weights shape must match the image");
            Var total = r.pixels[0] * w.intensities[0];
            for (size_t i = 1; i < r.pixels.size(); ++i)
                total = total + r.pixels[i] * w.intensities[i];
            std::vector<double> adj = tape.backward(total);
            py::array_t<double> g(
                {static_cast<py::ssize_t>(mesh.vertices.size()), py::ssize_t(3)});
            auto gm = g.mutable_unchecked<2>();
            for (size_t i = 0; i < mesh.vertices.size(); ++i)
                for (int k = 0; k < 3; ++k) gm(i, k) = adj[dm.vertices[i][k].idx];
            return g;
        },
        py::arg("vertices"), py::arg("faces"), py::arg("camera"), py::arg("params"),
        py::arg("loss_weights"),
        "reverse-mode d(sum(loss_weights * image))/d(vertices), shape (V, 3)");

    m.def(
        "image_l1",
        [](py::array_t<double> a, py::array_t<double> b) {
            Image ia = image_from_array(a), ib = image_from_array(b);
            if (ia.width != ib.width || ia.height != ib.height)
                throw std::invalid_argument("image dimensions differ");
            double acc = 0.0;
            for (size_t i = 0; i < ia.intensities.size(); ++i)
                acc += std::abs(ia.intensities[i] - ib.intensities[i]);
            return acc / static_cast<double>(ia.intensities.size());
        },
        "mean absolute pixel difference");

    m.def(
        "gradcheck",
        [](py::array_t<double> v, py::array_t<int> f, const Camera& cam,
           const RenderParams& params, int probes, double step, uint64_t seed) {
            GradCheckReport rep =
                gradcheck_render(mesh_from_arrays(v, f), cam, params, probes, step, seed);
            return py::make_tuple(rep.max_abs_err, rep.max_rel_err, rep.probes);
        },
        py::arg("vertices"), py::arg("faces"), py::arg("camera"), py::arg("params"),
        py::arg("probes") = 16, py::arg("step") = 1e-5, py::arg("seed") = 1,
        "(max_abs_err, max_rel_err, probes) of reverse-mode vs central differences");

    m.def("load_image", [](const std::string& path) { return image_to_array(load_image(path)); });
    m.def("save_image", [](py::array_t<double> img, const std::string& path) {
        save_image(image_from_array(img), path);
    });
}
