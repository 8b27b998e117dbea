// Python bindings for the core operations: suites, spectral bases,
// nonlinear response simulation, metrics, and trained surrogates.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "gms/dataset.hpp"
#include "gms/error.hpp"
#include "gms/ground_motion.hpp"
#include "gms/intensity.hpp"
#include "gms/metrics.hpp"
#include "gms/newmark.hpp"
#include "gms/regression/model.hpp"
#include "gms/rng.hpp"
#include "gms/shear_model.hpp"
#include "gms/spectral_basis.hpp"
#include "gms/synthetic.hpp"

#include <memory>
#include <string>
#include <vector>

namespace py = pybind11;

namespace {

gms::linalg::Matrix to_matrix(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 2) {
        throw gms::Error("expected a 2-D float array");
    }
    gms::linalg::Matrix m(static_cast<std::size_t>(a.shape(0)),
                          static_cast<std::size_t>(a.shape(1)));
    auto r = a.unchecked<2>();
    for (py::ssize_t i = 0; i < a.shape(0); ++i) {
        for (py::ssize_t j = 0; j < a.shape(1); ++j) {
            m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = r(i, j);
        }
    }
    return m;
}

py::array_t<double> to_numpy(const gms::linalg::Matrix& m) {
    py::array_t<double> out({m.rows(), m.cols()});
    auto w = out.mutable_unchecked<2>();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            w(static_cast<py::ssize_t>(i), static_cast<py::ssize_t>(j)) = m(i, j);
        }
    }
    return out;
}

gms::GroundMotionRecord make_record(const std::vector<double>& accel, double dt,
                                    const std::string& id) {
    gms::GroundMotionRecord r;
    r.id = id;
    r.dt = dt;
    r.accel = accel;
    r.validate();
    return r;
}

std::vector<gms::StorySpec> stories_from_dicts(const py::list& stories) {
    nlohmann::json spec;
    spec["stories"] = nlohmann::json::array();
    for (const auto& item : stories) {
        const py::dict d = item.cast<py::dict>();
        nlohmann::json story;
        for (const auto& kv : d) {
            story[kv.first.cast<std::string>()] = kv.second.cast<double>();
        }
        spec["stories"].push_back(story);
    }
    // Reuse the strict JSON parser so python and CLI accept the same schema.
    gms::ShearModel model = gms::ShearModel::from_json(spec);
    std::vector<gms::StorySpec> out;
    for (std::size_t i = 0; i < model.n_dof(); ++i) {
        const gms::StoryAssembly& s = model.story(i);
        out.push_back({s.spring.k(), s.spring.fy(), s.xi, s.spring.hardening_ratio()});
    }
    return out;
}

/// Owning wrapper so python can hold, apply, and persist a trained model.
struct PyModel {
    std::shared_ptr<const gms::regression::Regressor> model;

    std::string kind() const { return gms::regression::kind_name(model->kind()); }
    py::array_t<double> predict(
        const py::array_t<double, py::array::c_style | py::array::forcecast>& x) const {
        return to_numpy(model->predict(to_matrix(x)));
    }
    std::string hyperparameters() const { return model->hyperparameters().dump(); }
    void save(const std::string& path) const { gms::regression::save_model(*model, path); }
};

} // namespace

PYBIND11_MODULE(_gms, m) {
    m.doc() = "Spectral ground-motion bases and nonlinear response surrogates";

    // Translators run newest-first, so the base class goes first and the
    // derived ConfigError registration takes precedence over it.
    py::register_exception<gms::Error>(m, "GmsError", PyExc_RuntimeError);
    py::register_exception<gms::ConfigError>(m, "GmsConfigError", PyExc_ValueError);

    py::class_<gms::SuiteMatrix>(m, "Suite")
        .def_readonly("dt", &gms::SuiteMatrix::dt)
        .def_readonly("n_steps", &gms::SuiteMatrix::n_steps)
        .def_readonly("record_ids", &gms::SuiteMatrix::record_ids)
        .def_property_readonly("m", &gms::SuiteMatrix::m)
        .def_property_readonly("data",
                               [](const gms::SuiteMatrix& s) { return to_numpy(s.data); })
        .def("save", [](const gms::SuiteMatrix& s, const std::string& path) {
            gms::save_suite(s, path);
        });

    m.def("synthetic_suite", &gms::synthetic_suite, py::arg("count"), py::arg("seed"),
          py::arg("dt"), py::arg("duration"),
          "Deterministic synthetic strong-motion suite on a common grid");
    m.def("load_suite", [](const std::string& path) { return gms::load_suite(path); },
          py::arg("path"));

    py::class_<gms::SpectralBasis>(m, "Basis")
        .def_readonly("p", &gms::SpectralBasis::p)
        .def_readonly("n_steps", &gms::SpectralBasis::n_steps)
        .def_readonly("dt", &gms::SpectralBasis::dt)
        .def_readonly("basis_id", &gms::SpectralBasis::basis_id)
        .def_readonly("singular_values", &gms::SpectralBasis::singular_values)
        .def_property_readonly("u", [](const gms::SpectralBasis& b) { return to_numpy(b.u); })
        .def_property_readonly("sigma",
                               [](const gms::SpectralBasis& b) { return to_numpy(b.sigma); })
        .def("save", [](const gms::SpectralBasis& b, const std::string& path) {
            gms::save_basis(b, path);
        });

    m.def("svd_basis", &gms::svd_thin, py::arg("suite"),
          "Thin SVD of the suite: orthonormal directions plus per-record weights");
    m.def("truncate_rank", &gms::truncate_rank, py::arg("basis"), py::arg("p"));
    m.def("truncate_variance", &gms::truncate_variance, py::arg("basis"), py::arg("tau"));
    m.def("load_basis", [](const std::string& path) { return gms::load_basis(path); },
          py::arg("path"));
    m.def("explained_variance", [](const gms::SpectralBasis& b) {
        const gms::ExplainedVariance ev = gms::explained_variance(b);
        return py::make_tuple(ev.per_vector, ev.cumulative);
    });

    m.def(
        "project",
        [](const gms::SpectralBasis& basis, const std::vector<double>& accel) {
            const auto wv = gms::project(basis, make_record(accel, basis.dt, "python"));
            return wv.w;
        },
        py::arg("basis"), py::arg("accel"),
        "Weights of a motion already on the basis grid (length n_steps, dt fixed)");
    m.def(
        "reconstruct",
        [](const gms::SpectralBasis& basis, const std::vector<double>& w) {
            gms::WeightVector wv;
            wv.w = w;
            wv.basis_id = basis.basis_id;
            return gms::reconstruct(basis, wv).accel;
        },
        py::arg("basis"), py::arg("w"));
    m.def("weight_bounds", [](const gms::SpectralBasis& basis) {
        const gms::WeightBounds b = gms::weight_bounds(basis);
        return py::make_tuple(b.lo, b.hi);
    });
    m.def(
        "sample_weights",
        [](const gms::SpectralBasis& basis, std::size_t count, std::uint64_t seed) {
            const gms::WeightBounds b = gms::weight_bounds(basis);
            gms::linalg::Matrix out(count, basis.p);
            for (std::size_t i = 0; i < count; ++i) {
                gms::rng::Stream stream(seed, gms::rng::Space::WeightSample, i);
                const gms::WeightVector wv = gms::sample_weights(b, stream);
                for (std::size_t j = 0; j < basis.p; ++j) {
                    out(i, j) = wv.w[j];
                }
            }
            return to_numpy(out);
        },
        py::arg("basis"), py::arg("count"), py::arg("seed"));

    m.def(
        "simulate",
        [](const std::vector<double>& accel, double dt, const py::list& stories) {
            gms::ShearModel model(stories_from_dicts(stories));
            const gms::ResponseHistory history =
                gms::newmark_solve(model, make_record(accel, dt, "python"));
            const gms::EDP edp = gms::extract_edps(history);
            py::dict out;
            out["peak_roof_disp"] = edp.peak_roof_disp;
            out["peak_floor_accel_g"] = edp.peak_floor_accel_g();
            out["u"] = to_numpy(history.u);
            out["a_total"] = to_numpy(history.a_total);
            return out;
        },
        py::arg("accel"), py::arg("dt"), py::arg("stories"),
        "Nonlinear time-history analysis; accel in g, stories as dicts of E/Fy/xi[/b]");

    m.def(
        "intensity_measures",
        [](const std::vector<double>& accel, double dt) {
            const gms::IMReport r = gms::im_report(make_record(accel, dt, "python"));
            py::dict out;
            out["pga_g"] = r.pga;
            out["arias_m_per_s"] = r.arias;
            out["lambda1"] = r.lambda1;
            return out;
        },
        py::arg("accel"), py::arg("dt"));

    m.def(
        "r2_score",
        [](const py::array_t<double, py::array::c_style | py::array::forcecast>& y,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& yhat) {
            const gms::R2 r = gms::r2_score(to_matrix(y), to_matrix(yhat));
            py::dict out;
            out["per_target"] = r.per_target;
            out["mean"] = r.mean;
            return out;
        },
        py::arg("y"), py::arg("yhat"), "Variance-ratio R^2 (per target and mean)");

    py::class_<PyModel>(m, "Model")
        .def_property_readonly("kind", &PyModel::kind)
        .def("predict", &PyModel::predict, py::arg("x"))
        .def("hyperparameters", &PyModel::hyperparameters)
        .def("save", &PyModel::save, py::arg("path"));

    m.def(
        "fit",
        [](const std::string& kind,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& x,
           const py::array_t<double, py::array::c_style | py::array::forcecast>& y,
           const std::string& hyper_json, std::uint64_t seed) {
            const gms::linalg::Matrix xm = to_matrix(x);
            const gms::linalg::Matrix ym = to_matrix(y);
            std::vector<std::size_t> rows(xm.rows());
            for (std::size_t i = 0; i < rows.size(); ++i) {
                rows[i] = i;
            }
            const nlohmann::json hyper =
                hyper_json.empty() ? nlohmann::json::object() : nlohmann::json::parse(hyper_json);
            PyModel out;
            out.model = gms::regression::fit(gms::regression::kind_from_name(kind), xm, ym, rows,
                                             hyper, seed);
            return out;
        },
        py::arg("kind"), py::arg("x"), py::arg("y"), py::arg("hyper_json") = std::string(),
        py::arg("seed") = 0,
        "Fit a surrogate on every row of (x, y); hyper_json uses the CLI schema");
    m.def(
        "load_model",
        [](const std::string& path) {
            PyModel out;
            out.model = gms::regression::load_model(path);
            return out;
        },
        py::arg("path"));
}
