// Python bindings for the simulator core. Reports cross the boundary as
// JSON text so the python side stays schema-free.

#include <optional>
#include <sstream>
#include <string>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sttsim/attack.hpp"
#include "sttsim/config.hpp"
#include "sttsim/harness.hpp"
#include "sttsim/physics.hpp"
#include "sttsim/trace.hpp"

namespace py = pybind11;
using namespace sttsim;

namespace {

RunConfig config_from_text(const std::string& text, bool apply_env) {
    return parse_config_text(text, apply_env);
}

std::string run_json(const std::string& config_text,
                     const std::string& trace_text, bool apply_env) {
    const RunConfig cfg = config_from_text(config_text, apply_env);
    if (trace_text.empty()) {
        return report_to_json_text(run_simulation(cfg));
    }
    std::istringstream in(trace_text);
    return report_to_json_text(run_simulation(cfg, parse_trace(in)));
}

std::string sweep_csv(const std::string& config_text, const std::string& axis,
                      bool apply_env) {
    const RunConfig cfg = config_from_text(config_text, apply_env);
    return sweep_to_csv_text(run_sweep(cfg, axis));
}

std::string generate_trace_text(const std::string& config_text,
                                std::optional<std::uint64_t> seed) {
    SyntheticTraceSpec spec;
    std::uint64_t use_seed = seed.value_or(1);
    if (!config_text.empty()) {
        const RunConfig cfg = config_from_text(config_text, false);
        spec = cfg.synthetic_spec();
        if (spec.length == 0) spec.length = SyntheticTraceSpec{}.length;
        if (!seed) use_seed = cfg.trace.seed;
    }
    std::ostringstream out;
    write_trace(out, generate_trace(spec, use_seed));
    return out.str();
}

std::int64_t detection_lead_from_text(const std::string& config_text,
                                      std::size_t episode_index) {
    const RunConfig cfg = config_from_text(config_text, false);
    return detection_lead(cfg.sensor, cfg.attack, episode_index);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "trace-driven SRAM/STT-RAM cache hierarchy simulator";
    m.attr("__version__") = "0.1.0";

    py::class_<MtjParams>(m, "MtjParams")
        .def(py::init<>())
        .def_readwrite("fit_constant_s", &MtjParams::fit_constant_s)
        .def_readwrite("fit_exponent", &MtjParams::fit_exponent)
        .def_readwrite("energy_barrier_j", &MtjParams::energy_barrier_j)
        .def_readwrite("boltzmann_j_per_k", &MtjParams::boltzmann_j_per_k)
        .def_readwrite("nominal_temperature_k",
                       &MtjParams::nominal_temperature_k)
        .def_readwrite("critical_strength", &MtjParams::critical_strength)
        .def("validate", &MtjParams::validate);

    m.def("thermal_barrier", &thermal_barrier, py::arg("params"),
          py::arg("temperature_k"),
          "thermal stability factor E / (kB * T)");
    m.def("retention_time", &retention_time, py::arg("params"),
          py::arg("barrier"), "retention seconds C * e^(k * barrier)");
    m.def("effective_barrier", &effective_barrier, py::arg("params"),
          py::arg("strength"), "barrier under a normalized field strength");
    m.def("flip_probability", &flip_probability, py::arg("params"),
          py::arg("strength"), py::arg("dt_s"),
          "per-window flip probability 1 - e^(-dt / t_ret)");

    m.def("run_json", &run_json, py::arg("config_text"),
          py::arg("trace_text") = std::string(), py::arg("apply_env") = false,
          "simulate and return the report as a JSON string");
    m.def("sweep_csv", &sweep_csv, py::arg("config_text"), py::arg("axis"),
          py::arg("apply_env") = false,
          "run a sweep and return the summary table as CSV text");
    m.def("generate_trace_text", &generate_trace_text,
          py::arg("config_text") = std::string(),
          py::arg("seed") = std::nullopt,
          "deterministic synthetic trace in the R/W text format");
    m.def("detection_lead", &detection_lead_from_text, py::arg("config_text"),
          py::arg("episode_index") = 0,
          "cycles between sensor assert and functional field strength");
    m.def("canonical_config",
          [](const std::string& text) {
              return config_from_text(text, false).canonical_text();
          },
          py::arg("config_text"),
          "config with every key materialized in schema order");
    m.def("config_hash",
          [](const std::string& text) {
              return config_from_text(text, false).config_hash();
          },
          py::arg("config_text"));
}
