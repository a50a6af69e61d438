#include "avsup/cli.hpp"

#include "avsup/io.hpp"
#include "avsup/sim.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

namespace avsup::cli {

RunOptions parse_args(const std::vector<std::string>& args)
{
    RunOptions opts;
    CLI::App app{"Supervisory-control simulator: LQR-tracked bicycle model with a rule/LLM "
                 "monitor braking and nudging for jaywalking pedestrians",
                 "avsup"};

    bool paper = false;
    std::string scenario;
    std::string backend = "oracle";
    std::string transcript;
    std::string output = opts.output_directory.string();
    std::string dump;
    double period = 0.0;
    double dt = 0.0;
    double duration = 0.0;

    auto* paper_opt = app.add_flag("--paper-scenario", paper,
                                   "Use the built-in two-pedestrian scenario (default)");
    auto* scenario_opt =
        app.add_option("--scenario", scenario, "JSON scenario file")->check(CLI::ExistingFile);
    paper_opt->excludes(scenario_opt);
    app.add_option("--backend", backend, "Decision source")
        ->check(CLI::IsMember({"oracle", "llm", "replay"}));
    auto* period_opt = app.add_option("--period", period, "Decision period [s]");
    auto* dt_opt = app.add_option("--dt", dt, "Integration step [s]");
    auto* duration_opt = app.add_option("--duration", duration, "Simulated time limit [s]");
    app.add_option("--output", output, "Output directory")->capture_default_str();
    app.add_flag("--plots", opts.emit_plots, "Write speed/lateral/trajectory SVG plots");
    app.add_flag("--record-transcript", opts.record_transcript,
                 "Write the question/response exchanges to transcript.jsonl");
    app.add_option("--transcript", transcript, "Transcript to replay (replay backend)");
    app.add_option("--model", opts.backend.model_identifier, "Model identifier (llm backend)")
        ->capture_default_str();
    app.add_option("--endpoint", opts.backend.endpoint, "Model API base URL (llm backend)")
        ->capture_default_str();
    app.add_option("--api-key-env", opts.backend.api_key_env_name,
                   "Environment variable holding the API key")
        ->capture_default_str();
    app.add_option("--min-interval", opts.backend.min_request_interval,
                   "Minimum spacing between model requests [s]")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app.add_option("--timeout", opts.backend.request_timeout, "Per-request timeout [s]")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    app.add_option("--max-retries", opts.backend.max_retries, "Retries per request")
        ->capture_default_str()
        ->check(CLI::NonNegativeNumber);
    app.add_option("--dump-scenario", dump, "Write the effective scenario as JSON");
    app.add_flag("--quiet", opts.quiet, "Only print the summary line");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested(app.help());
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (!scenario.empty()) {
        opts.scenario_path = scenario;
    }
    opts.backend.kind = *parse_backend_kind(backend);
    if (!transcript.empty()) {
        opts.backend.transcript_path = transcript;
    }
    if (opts.backend.kind == BackendKind::Replay && transcript.empty()) {
        throw UsageError("--backend replay requires --transcript");
    }
    opts.output_directory = output;
    if (!dump.empty()) {
        opts.dump_scenario = dump;
    }
    if (period_opt->count() > 0) {
        if (!(period > 0.0)) throw UsageError("--period must be positive");
        opts.decision_period = period;
    }
    if (dt_opt->count() > 0) {
        if (!(dt > 0.0)) throw UsageError("--dt must be positive");
        opts.dt = dt;
    }
    if (duration_opt->count() > 0) {
        if (!(duration > 0.0)) throw UsageError("--duration must be positive");
        opts.duration = duration;
    }
    if (opts.decision_period || opts.dt) {
        const double p = opts.decision_period.value_or(0.5);
        const double d = opts.dt.value_or(0.01);
        if (!is_step_multiple(p, d)) {
            throw UsageError("--period must be an integer multiple of --dt");
        }
    }
    return opts;
}

int run(const RunOptions& options, std::ostream& out, std::ostream& err)
{
    Scenario scenario;
    try {
        scenario = options.scenario_path ? load_scenario(*options.scenario_path)
                                         : build_paper_scenario(0.5);
    } catch (const IoError& e) {
        err << "avsup: " << e.what() << '\n';
        return kIoFailure;
    }
    if (options.decision_period) scenario.decision_period = *options.decision_period;
    if (options.dt) scenario.dt = *options.dt;
    if (options.duration) scenario.duration = *options.duration;
    try {
        scenario.validate();
    } catch (const std::invalid_argument& e) {
        err << "avsup: invalid scenario: " << e.what() << '\n';
        return kUsage;
    }

    std::error_code ec;
    std::filesystem::create_directories(options.output_directory, ec);
    if (ec) {
        err << "avsup: cannot create " << options.output_directory << ": " << ec.message() << '\n';
        return kIoFailure;
    }

    const SimLog log = avsup::run(scenario, options.backend);

    try {
        if (options.dump_scenario) {
            save_scenario(scenario, *options.dump_scenario);
        }
        export_csv(log, options.output_directory / "trajectory.csv");
        if (options.record_transcript) {
            record_transcript(log.transcript, options.output_directory / "transcript.jsonl");
        }
        if (options.emit_plots) {
            emit_plots(log, options.output_directory);
        }
    } catch (const std::exception& e) {
        err << "avsup: " << e.what() << '\n';
        return kIoFailure;
    }

    if (!options.quiet) {
        for (const auto& d : log.decisions) {
            out << "t=" << d.time << "s  " << render_decision(d.decision);
            if (!d.pedestrian.empty()) out << "  (" << d.pedestrian << ")";
            if (d.held) out << "  [held after failed exchange]";
            if (d.fail_safe) out << "  [fail-safe braking]";
            out << '\n';
        }
        for (const auto& c : log.collisions) {
            out << "t=" << c.time << "s  Oups! overlap with " << c.pedestrian << '\n';
        }
    }
    out << "steps=" << log.steps.size() << " min_speed=" << log.summary.min_speed
        << " final_speed=" << log.summary.final_speed << " min_gap=" << log.summary.min_gap
        << " collisions=" << log.collisions.size() << '\n';

    if (log.summary.aborted) {
        err << "avsup: backend failure: " << log.summary.abort_reason << '\n';
        return kBackendFailure;
    }
    return log.summary.collision ? kCollision : kOk;
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    std::vector<std::string> args(argv + std::min(argc, 1), argv + argc);
    try {
        return run(parse_args(args), out, err);
    } catch (const HelpRequested& h) {
        out << h.what();
        return kOk;
    } catch (const UsageError& e) {
        err << "avsup: " << e.what() << "\nRun with --help for usage.\n";
        return kUsage;
    }
}

} // namespace avsup::cli
