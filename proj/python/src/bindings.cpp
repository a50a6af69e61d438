#include "avsup/backend.hpp"
#include "avsup/context.hpp"
#include "avsup/dynamics.hpp"
#include "avsup/io.hpp"
#include "avsup/lateral_control.hpp"
#include "avsup/riccati.hpp"
#include "avsup/rules.hpp"
#include "avsup/sim.hpp"

#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

namespace py = pybind11;
using namespace avsup;

namespace {

// Lets a Python callable act as the decision source: f(question, sim_time) -> str.
class CallableBackend final : public DecisionBackend {
public:
    explicit CallableBackend(std::function<std::string(const std::string&, double)> fn)
        : fn_(std::move(fn)) {}

    BackendReply decide(const DecisionQuery& q) override
    {
        return {RawResponse{fn_(q.question, q.sim_time)}, 0.0, "python"};
    }
    BackendKind kind() const override { return BackendKind::Oracle; }

private:
    std::function<std::string(const std::string&, double)> fn_;
};

py::dict steps_as_arrays(const SimLog& log)
{
    const auto n = static_cast<py::ssize_t>(log.steps.size());
    auto column = [n]() { return py::array_t<double>(n); };
    py::array_t<double> t = column(), x = column(), y = column(), yaw = column(), vx = column(),
                        vy = column(), r = column(), accel = column(), steer = column(),
                        ref = column();
    py::array_t<int> req(n);
    py::array_t<bool> hit(n);
    const std::size_t peds = log.pedestrian_names.size();
    py::array_t<double> ped_y({n, static_cast<py::ssize_t>(peds)});

    auto T = t.mutable_unchecked<1>();
    auto X = x.mutable_unchecked<1>();
    auto Y = y.mutable_unchecked<1>();
    auto Yaw = yaw.mutable_unchecked<1>();
    auto Vx = vx.mutable_unchecked<1>();
    auto Vy = vy.mutable_unchecked<1>();
    auto R = r.mutable_unchecked<1>();
    auto A = accel.mutable_unchecked<1>();
    auto S = steer.mutable_unchecked<1>();
    auto Ref = ref.mutable_unchecked<1>();
    auto Req = req.mutable_unchecked<1>();
    auto Hit = hit.mutable_unchecked<1>();
    auto P = ped_y.mutable_unchecked<2>();
    for (py::ssize_t k = 0; k < n; ++k) {
        const StepRecord& s = log.steps[static_cast<std::size_t>(k)];
        T(k) = s.time;
        X(k) = s.state.x_world;
        Y(k) = s.state.y_world;
        Yaw(k) = s.state.yaw;
        Vx(k) = s.state.vx_body;
        Vy(k) = s.state.vy_body;
        R(k) = s.state.yaw_rate;
        A(k) = s.accel_cmd;
        S(k) = s.steer_cmd;
        Ref(k) = s.lateral_ref;
        Req(k) = s.decision.requirement_id();
        Hit(k) = s.collision;
        for (std::size_t i = 0; i < peds; ++i) {
            P(k, static_cast<py::ssize_t>(i)) = s.ped_y[i];
        }
    }
    py::dict d;
    d["time"] = t;
    d["x"] = x;
    d["y"] = y;
    d["yaw"] = yaw;
    d["vx"] = vx;
    d["vy"] = vy;
    d["yaw_rate"] = r;
    d["accel_cmd"] = accel;
    d["steer_cmd"] = steer;
    d["lateral_ref"] = ref;
    d["req_id"] = req;
    d["collision"] = hit;
    d["ped_y"] = ped_y;
    return d;
}

} // namespace

PYBIND11_MODULE(_avsup, m)
{
    m.doc() = "Supervisory control simulator core";

    py::register_exception<BackendError>(m, "BackendError");
    py::register_exception<IoError>(m, "IoError");
    py::register_exception<RiccatiError>(m, "RiccatiError");
    py::register_exception<ModelSpeedError>(m, "ModelSpeedError", PyExc_ValueError);

    // dynamics
    py::class_<VehicleParams>(m, "VehicleParams")
        .def(py::init<>())
        .def_readwrite("mass", &VehicleParams::mass)
        .def_readwrite("yaw_inertia", &VehicleParams::yaw_inertia)
        .def_readwrite("dist_front_axle", &VehicleParams::dist_front_axle)
        .def_readwrite("dist_rear_axle", &VehicleParams::dist_rear_axle)
        .def_readwrite("cornering_stiffness_front", &VehicleParams::cornering_stiffness_front)
        .def_readwrite("cornering_stiffness_rear", &VehicleParams::cornering_stiffness_rear);

    py::class_<VehicleState>(m, "VehicleState")
        .def(py::init<>())
        .def(py::init([](double x, double y, double yaw, double vx, double vy, double r) {
                 return VehicleState{x, y, yaw, vx, vy, r};
             }),
             py::arg("x_world") = 0.0, py::arg("y_world") = 0.0, py::arg("yaw") = 0.0,
             py::arg("vx_body") = 0.0, py::arg("vy_body") = 0.0, py::arg("yaw_rate") = 0.0)
        .def_readwrite("x_world", &VehicleState::x_world)
        .def_readwrite("y_world", &VehicleState::y_world)
        .def_readwrite("yaw", &VehicleState::yaw)
        .def_readwrite("vx_body", &VehicleState::vx_body)
        .def_readwrite("vy_body", &VehicleState::vy_body)
        .def_readwrite("yaw_rate", &VehicleState::yaw_rate)
        .def(py::self == py::self)
        .def("__repr__", [](const VehicleState& s) {
            std::ostringstream ss;
            ss << "VehicleState(x=" << s.x_world << ", y=" << s.y_world << ", yaw=" << s.yaw
               << ", vx=" << s.vx_body << ", vy=" << s.vy_body << ", r=" << s.yaw_rate << ")";
            return ss.str();
        });

    m.def(
        "step_euler",
        [](const VehicleState& s, double steer, double accel, double dt, const VehicleParams& p) {
            return step_euler(s, {steer, accel}, dt, p);
        },
        py::arg("state"), py::arg("steer") = 0.0, py::arg("accel") = 0.0, py::arg("dt") = 0.01,
        py::arg("params") = VehicleParams{});

    // Riccati / LQR
    m.def(
        "solve_care",
        [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const Eigen::MatrixXd& q,
           const Eigen::MatrixXd& r) { return solve_care(a, b, q, r).solution; },
        py::arg("a"), py::arg("b"), py::arg("q"), py::arg("r"),
        "Stabilizing solution P of A'P + PA - P B R^-1 B' P + Q = 0");
    m.def(
        "linear_lateral_model",
        [](double speed, const VehicleParams& p) {
            const LinearLateralModel lm = build_linear_model(speed, p);
            return py::make_tuple(Eigen::MatrixXd(lm.state_matrix),
                                  Eigen::MatrixXd(lm.input_matrix));
        },
        py::arg("speed"), py::arg("params") = VehicleParams{});
    m.def(
        "lqr_gain",
        [](double speed, const VehicleParams& p) {
            return Eigen::RowVectorXd(
                synthesize_gain(speed, p, LqrWeights::lateral_tracking()).gains);
        },
        py::arg("speed"), py::arg("params") = VehicleParams{},
        "Lateral tracking gain K for the linearized model at `speed`");

    // rules
    py::enum_<CrossingPhase>(m, "CrossingPhase")
        .value("Crossed", CrossingPhase::Crossed)
        .value("CloseToCrossing", CrossingPhase::CloseToCrossing)
        .value("MiddleOfRoad", CrossingPhase::MiddleOfRoad)
        .value("OnRoad", CrossingPhase::OnRoad)
        .value("NotOnPath", CrossingPhase::NotOnPath);

    py::class_<Decision>(m, "Decision")
        .def_static("for_requirement", &Decision::for_requirement, py::arg("id"))
        .def_static("neutral", &Decision::neutral)
        .def_property_readonly("requirement_id", &Decision::requirement_id)
        .def_property_readonly("accel", &Decision::accel)
        .def_property_readonly("nudge",
                               [](const Decision& d) { return static_cast<int>(d.nudge()); })
        .def_property_readonly("is_neutral", &Decision::is_neutral)
        .def(py::self == py::self)
        .def("__str__", &render_decision)
        .def("__repr__", [](const Decision& d) { return "Decision(" + render_decision(d) + ")"; });

    m.def("stopping_distance", &stopping_distance, py::arg("speed"), py::arg("decel"));
    m.def(
        "classify_pedestrian",
        [](const VehicleState& ego, double ped_x, double ped_y, double crossing_speed,
           bool started) {
            return classify_pedestrian(ego, {ped_x, ped_y, crossing_speed, started},
                                       RoadGeometry{}, 0.0);
        },
        py::arg("ego"), py::arg("ped_x"), py::arg("ped_y"), py::arg("crossing_speed"),
        py::arg("started") = true);
    m.def(
        "evaluate_rules",
        [](CrossingPhase phase, double gap, double speed, double target, bool has_nudged) {
            return evaluate_rules(phase, gap, speed, target, has_nudged, BrakingProfile{});
        },
        py::arg("phase"), py::arg("gap"), py::arg("ego_speed"), py::arg("target_speed") = 10.0,
        py::arg("has_nudged") = false, "Decision for one pedestrian, or None");
    m.def(
        "arbitrate", [](const std::vector<Decision>& ds) { return arbitrate(ds); },
        py::arg("decisions"));

    // context translation
    m.def("render_system_prompt", &render_system_prompt);
    m.def(
        "render_question",
        [](const VehicleState& ego, const std::string& name, CrossingPhase phase, double gap,
           double target, bool has_nudged) {
            const RuleInputs in{phase, gap, ego.vx_body, target, has_nudged, BrakingProfile{}};
            return render_question(make_situation_report(ego, 0.0, name, in));
        },
        py::arg("ego"), py::arg("pedestrian"), py::arg("phase"), py::arg("gap"),
        py::arg("target_speed") = 10.0, py::arg("has_nudged") = false);
    m.def(
        "parse_response",
        [](const std::string& text) {
            const ParseResult r = parse_response(text);
            return py::make_tuple(std::string(to_string(r.status)), r.decision, r.detail);
        },
        py::arg("text"), "Returns (status, decision or None, detail)");
    m.def("render_decision", &render_decision, py::arg("decision"));

    // scenario and simulation
    py::class_<Pedestrian>(m, "Pedestrian")
        .def(py::init([](std::string name, double x, double speed, double y, double delay) {
                 return Pedestrian{std::move(name), x, speed, y, delay};
             }),
             py::arg("name"), py::arg("x"), py::arg("crossing_speed"),
             py::arg("lateral_position") = 0.0, py::arg("start_delay") = 0.0)
        .def_readwrite("name", &Pedestrian::name)
        .def_readwrite("x", &Pedestrian::distance_from_ego_x0)
        .def_readwrite("crossing_speed", &Pedestrian::crossing_speed)
        .def_readwrite("lateral_position", &Pedestrian::lateral_position)
        .def_readwrite("start_delay", &Pedestrian::start_delay);

    py::class_<Scenario>(m, "Scenario")
        .def(py::init<>())
        .def_readwrite("initial_state", &Scenario::initial_state)
        .def_readwrite("target_speed", &Scenario::target_speed)
        .def_readwrite("pedestrians", &Scenario::pedestrians)
        .def_readwrite("dt", &Scenario::dt)
        .def_readwrite("decision_period", &Scenario::decision_period)
        .def_readwrite("duration", &Scenario::duration)
        .def_readwrite("vehicle", &Scenario::vehicle)
        .def("to_json", &scenario_to_json)
        .def_static("from_json", &scenario_from_json, py::arg("text"));

    m.def("build_paper_scenario", &build_paper_scenario, py::arg("decision_period") = 0.5);
    m.def("load_scenario", &load_scenario, py::arg("path"));
    m.def("save_scenario", &save_scenario, py::arg("scenario"), py::arg("path"));

    py::enum_<BackendKind>(m, "BackendKind")
        .value("Oracle", BackendKind::Oracle)
        .value("Llm", BackendKind::Llm)
        .value("Replay", BackendKind::Replay);

    py::class_<BackendConfig>(m, "BackendConfig")
        .def(py::init<>())
        .def_readwrite("kind", &BackendConfig::kind)
        .def_readwrite("api_key_env_name", &BackendConfig::api_key_env_name)
        .def_readwrite("model_identifier", &BackendConfig::model_identifier)
        .def_readwrite("endpoint", &BackendConfig::endpoint)
        .def_readwrite("min_request_interval", &BackendConfig::min_request_interval)
        .def_readwrite("request_timeout", &BackendConfig::request_timeout)
        .def_readwrite("max_retries", &BackendConfig::max_retries)
        .def_readwrite("transcript_path", &BackendConfig::transcript_path);

    py::class_<TranscriptEntry>(m, "TranscriptEntry")
        .def_readonly("sim_time", &TranscriptEntry::sim_time)
        .def_readonly("question", &TranscriptEntry::question)
        .def_readonly("response", &TranscriptEntry::response)
        .def_readonly("latency", &TranscriptEntry::latency)
        .def_readonly("backend_kind", &TranscriptEntry::backend_kind);

    py::class_<DecisionEvent>(m, "DecisionEvent")
        .def_readonly("time", &DecisionEvent::time)
        .def_readonly("decision", &DecisionEvent::decision)
        .def_readonly("pedestrian", &DecisionEvent::pedestrian)
        .def_readonly("held", &DecisionEvent::held)
        .def_readonly("fail_safe", &DecisionEvent::fail_safe);

    py::class_<CollisionEvent>(m, "CollisionEvent")
        .def_readonly("time", &CollisionEvent::time)
        .def_readonly("pedestrian", &CollisionEvent::pedestrian);

    py::class_<SimSummary>(m, "SimSummary")
        .def_readonly("min_gap", &SimSummary::min_gap)
        .def_readonly("min_speed", &SimSummary::min_speed)
        .def_readonly("final_speed", &SimSummary::final_speed)
        .def_readonly("collision", &SimSummary::collision)
        .def_readonly("malformed_responses", &SimSummary::malformed_responses)
        .def_readonly("inconsistent_responses", &SimSummary::inconsistent_responses)
        .def_readonly("backend_errors", &SimSummary::backend_errors)
        .def_readonly("aborted", &SimSummary::aborted)
        .def_readonly("abort_reason", &SimSummary::abort_reason);

    py::class_<SimLog>(m, "SimLog")
        .def_readonly("pedestrian_names", &SimLog::pedestrian_names)
        .def_readonly("transcript", &SimLog::transcript)
        .def_readonly("decisions", &SimLog::decisions)
        .def_readonly("collisions", &SimLog::collisions)
        .def_readonly("summary", &SimLog::summary)
        .def("__len__", [](const SimLog& l) { return l.steps.size(); })
        .def("arrays", &steps_as_arrays, "Per-step columns as numpy arrays")
        .def("csv", [](const SimLog& l) {
            std::ostringstream ss;
            write_csv(l, ss);
            return ss.str();
        });

    m.def(
        "run",
        [](const Scenario& sc, const BackendConfig& cfg) {
            py::gil_scoped_release release;
            return run(sc, cfg);
        },
        py::arg("scenario"), py::arg("config") = BackendConfig{});
    m.def(
        "run_with",
        [](const Scenario& sc, std::function<std::string(const std::string&, double)> fn) {
            CallableBackend backend(std::move(fn));
            return run(sc, backend);
        },
        py::arg("scenario"), py::arg("decide"),
        "Run with a Python callable decide(question, sim_time) -> reply text");

    m.def("export_csv", &export_csv, py::arg("log"), py::arg("path"));
    m.def("emit_plots", &emit_plots, py::arg("log"), py::arg("directory"));
    m.def("record_transcript",
          [](const std::vector<TranscriptEntry>& e, const std::filesystem::path& p) {
              record_transcript(e, p);
          },
          py::arg("entries"), py::arg("path"));

    m.attr("CSV_SCHEMA_VERSION") = kCsvSchemaVersion;
    m.attr("ABSENT_GAP") = kAbsentGap;
}
