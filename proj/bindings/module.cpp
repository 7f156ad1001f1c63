// Python bindings for the core simulation and estimation operations.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmn/harness.hpp"

namespace py = pybind11;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Perceptive mobile network simulation and sensing toolkit";

  py::class_<pmn::UlaConfig>(m, "UlaConfig")
      .def(py::init<int>(), py::arg("elements"))
      .def_readwrite("elements", &pmn::UlaConfig::elements);

  py::class_<pmn::OfdmGrid>(m, "OfdmGrid")
      .def(py::init<>())
      .def_readwrite("n_subcarriers", &pmn::OfdmGrid::n_subcarriers)
      .def_readwrite("bandwidth_hz", &pmn::OfdmGrid::bandwidth_hz)
      .def_readwrite("cp_fraction", &pmn::OfdmGrid::cp_fraction)
      .def_readwrite("grid_factor", &pmn::OfdmGrid::grid_factor)
      .def("subcarrier_spacing_hz", &pmn::OfdmGrid::subcarrier_spacing_hz)
      .def("block_period_s", &pmn::OfdmGrid::block_period_s)
      .def("delay_resolution_s", &pmn::OfdmGrid::delay_resolution_s)
      .def("delay_grid_size", &pmn::OfdmGrid::delay_grid_size);

  py::class_<pmn::PathParams>(m, "PathParams")
      .def(py::init<>())
      .def_readwrite("delay_s", &pmn::PathParams::delay_s)
      .def_readwrite("doppler_hz", &pmn::PathParams::doppler_hz)
      .def_readwrite("aoa_rad", &pmn::PathParams::aoa_rad)
      .def_readwrite("aod_rad", &pmn::PathParams::aod_rad)
      .def_readwrite("amp", &pmn::PathParams::amp)
      .def_readwrite("source", &pmn::PathParams::source)
      .def_readwrite("is_clutter", &pmn::PathParams::is_clutter);

  py::class_<pmn::Scene>(m, "Scene")
      .def(py::init<>())
      .def_readwrite("links", &pmn::Scene::links)
      .def_readwrite("static_period_s", &pmn::Scene::static_period_s)
      .def_readwrite("carrier_hz", &pmn::Scene::carrier_hz)
      .def("all_paths", &pmn::Scene::all_paths);

  py::class_<pmn::PathEstimate>(m, "PathEstimate")
      .def(py::init<>())
      .def_readwrite("delay_bin", &pmn::PathEstimate::delay_bin)
      .def_readwrite("delay_s", &pmn::PathEstimate::delay_s)
      .def_readwrite("aoa_rad", &pmn::PathEstimate::aoa_rad)
      .def_readwrite("aod_rad", &pmn::PathEstimate::aod_rad)
      .def_readwrite("doppler_hz", &pmn::PathEstimate::doppler_hz)
      .def_readwrite("power", &pmn::PathEstimate::power)
      .def_readwrite("source", &pmn::PathEstimate::source);

  py::class_<pmn::ClutterState>(m, "ClutterState")
      .def(py::init<Eigen::Index, Eigen::Index, double, double>(), py::arg("rows"),
           py::arg("cols"), py::arg("alpha"), py::arg("sample_interval_s"))
      .def("update", &pmn::ClutterState::update)
      .def("subtract", &pmn::ClutterState::subtract)
      .def("background", &pmn::ClutterState::background,
           py::return_value_policy::copy)
      .def("alpha", &pmn::ClutterState::alpha)
      .def("updates", &pmn::ClutterState::updates);

  m.def("steering", &pmn::steering, py::arg("cfg"), py::arg("angle_rad"),
        "Array response of a half-wavelength uniform linear array");
  m.def("pathloss", &pmn::pathloss, py::arg("distance_m"), py::arg("exponent"));
  m.def(
      "freq_channel",
      [](const std::vector<pmn::PathParams>& link, int n, double t,
         const pmn::OfdmGrid& grid, int m_rx, int m_tx) {
        return pmn::freq_channel(link, n, t, grid, pmn::UlaConfig{m_rx},
                                 pmn::UlaConfig{m_tx});
      },
      py::arg("link"), py::arg("n"), py::arg("t"), py::arg("grid"),
      py::arg("m_rx"), py::arg("m_tx"));
  m.def("thermal_noise_power", &pmn::thermal_noise_power);
  m.def("dbm_to_watts", &pmn::dbm_to_watts);
  m.def("watts_to_dbm", &pmn::watts_to_dbm);
  m.def("nr_type_b_indexes", &pmn::nr_type_b_indexes, py::arg("n_total"));
  m.def("rho_closed_form", &pmn::rho_closed_form, py::arg("alpha"),
        py::arg("doppler_hz"), py::arg("sample_interval_s"), py::arg("p"),
        "Closed-form background response to a unit Doppler phasor");
  m.def("residual_noise_var", &pmn::residual_noise_var, py::arg("sigma2"),
        py::arg("alpha"), py::arg("p"));

  m.def(
      "run_experiment_json",
      [](const std::string& config_json) {
        const auto config = pmn::ExperimentConfig::from_json(config_json);
        const auto results = pmn::run_experiment(config);
        const pmn::Summary s = pmn::summarize(results);
        py::dict out;
        out["runs"] = s.runs;
        out["truth_count"] = s.truth_count;
        out["matched"] = s.matched;
        out["false_alarms"] = s.false_alarms;
        out["detection_rate"] = s.detection_rate;
        out["delay_rmse_s"] = s.delay_rmse_s;
        out["aoa_phase_rmse_rad"] = s.aoa_phase_rmse_rad;
        out["doppler_rmse_hz"] = s.doppler_rmse_hz;
        return out;
      },
      py::arg("config_json"),
      "Runs a full experiment from a JSON config string; returns the summary");

  m.def(
      "sample_scene_json",
      [](const std::string& config_json, std::uint64_t seed) {
        const auto config = pmn::ExperimentConfig::from_json(config_json);
        const pmn::Scene scene =
            pmn::sample_scene(config.clusters, seed, config.scene_options());
        return pmn::scene_to_json(scene);
      },
      py::arg("config_json"), py::arg("seed"),
      "Samples one scene from a JSON config string; returns scene JSON");
}
