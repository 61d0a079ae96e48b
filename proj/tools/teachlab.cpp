// Command-line front end for the teaching experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "httplib.h"
#include "json.hpp"

#include "teachlab/analysis.hpp"
#include "teachlab/harness.hpp"
#include "teachlab/json_io.hpp"
#include "teachlab/oracle.hpp"
#include "teachlab/service.hpp"
#include "teachlab/teachers.hpp"

using namespace teachlab;
using nlohmann::json;

namespace {

struct Globals {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
};

harness::ExperimentConfig load(const Globals& g) {
    harness::ExperimentConfig config;
    if (!g.config_path.empty()) config = harness::load_config(g.config_path);
    if (g.seed) config.master_seed = *g.seed;
    if (g.threads) config.threads = g.threads;
    config.validate();
    return config;
}

// Writes to `path`, or stdout when it is empty or "-".
template <typename Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty() || path == "-") {
        fn(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    fn(out);
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return in;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Scalar-feedback stabilization experiments"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Override the master seed");
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");

    auto* train = app.add_subcommand("train-oracle", "Train the oracle Q-table");
    std::string train_out;
    bool partial = false;
    train->add_option("-o,--out", train_out, "Q-table CSV (default stdout)");
    train->add_flag("--partial", partial, "Write the partially trained behaviour checkpoint instead");

    auto* gen = app.add_subcommand("gen-sessions", "Generate the 200-clip session");
    std::string gen_out;
    gen->add_option("-o,--out", gen_out, "Transitions CSV (default stdout)");

    auto* sim = app.add_subcommand("simulate-teachers", "Simulate the teacher cohort's feedback");
    std::string sim_sessions, sim_out, sim_profiles;
    sim->add_option("--sessions", sim_sessions, "Transitions CSV (default: generate)")->check(CLI::ExistingFile);
    sim->add_option("-o,--out", sim_out, "Feedback CSV (default stdout)");
    sim->add_option("--profiles", sim_profiles, "Also write teacher profiles as JSON");

    auto* run = app.add_subcommand("run-experiment", "Train and evaluate TAMER under every condition");
    std::string run_out, run_format = "csv", run_feedback, run_sessions;
    run->add_option("-o,--out", run_out, "Results file (default stdout)");
    run->add_option("--format", run_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    run->add_option("--feedback", run_feedback, "Feedback CSV to use instead of simulated teachers")
        ->check(CLI::ExistingFile);
    run->add_option("--sessions", run_sessions, "Transitions CSV the feedback refers to")->check(CLI::ExistingFile);

    auto* an = app.add_subcommand("analyze", "Self-agreement, bias and oracle correlations of a feedback CSV");
    std::string an_feedback, an_sessions, an_oracle, an_out;
    an->add_option("feedback", an_feedback, "Feedback CSV")->required()->check(CLI::ExistingFile);
    an->add_option("--sessions", an_sessions, "Transitions CSV, enables correlations")->check(CLI::ExistingFile);
    an->add_option("--oracle", an_oracle, "Oracle Q-table CSV (default: train one)")->check(CLI::ExistingFile);
    an->add_option("-o,--out", an_out, "JSON report (default stdout)");

    auto* serve = app.add_subcommand("serve", "Run the teaching service");
    std::string host = "127.0.0.1";
    int port = 8080;
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Listen port")->check(CLI::Range(1, 65535));

    CLI11_PARSE(app, argc, argv);

    try {
        const auto config = load(g);

        if (*train) {
            env::Rng rng(harness::derive_seed(config.master_seed, partial ? "behaviour" : "oracle"));
            if (partial) {
                const auto cp = oracle::train_partial(config.env, config.behaviour, rng);
                std::fprintf(stderr, "checkpoint after %d episodes (attempt %d), success rate %.3f\n",
                             cp.episodes, cp.attempt, cp.success_rate);
                with_output(train_out, [&](std::ostream& out) { oracle::write_csv(cp.q, out); });
            } else {
                const auto q = oracle::train_q(config.env, config.oracle, rng);
                with_output(train_out, [&](std::ostream& out) { oracle::write_csv(q, out); });
            }
        } else if (*gen) {
            const auto world = harness::build_world(config);
            std::fprintf(stderr, "session drawn %d time(s); behaviour success rate %.3f\n",
                         world.session_draws, world.behaviour.success_rate);
            with_output(gen_out, [&](std::ostream& out) { harness::write_transitions_csv(world.session, out); });
        } else if (*sim) {
            std::optional<harness::World> world;
            std::vector<env::Transition> clips;
            oracle::QTable q;
            if (sim_sessions.empty()) {
                world = harness::build_world(config);
                clips = world->session;
                q = world->oracle;
            } else {
                auto in = open_input(sim_sessions);
                clips = harness::read_transitions_csv(in);
                env::Rng rng(harness::derive_seed(config.master_seed, "oracle"));
                q = oracle::train_q(config.env, config.oracle, rng);
            }
            const auto cohort = teachers::generate_cohort(
                config.teachers_per_modality, harness::derive_seed(config.master_seed, "cohort"), config.cohort);
            std::vector<FeedbackLog> logs;
            for (const auto& t : cohort) logs.push_back(teachers::simulate_log(t, clips, q, config.target_scale));
            with_output(sim_out, [&](std::ostream& out) { harness::write_feedback_csv(logs, out); });
            if (!sim_profiles.empty())
                with_output(sim_profiles, [&](std::ostream& out) { out << json(cohort).dump(2) << '\n'; });
        } else if (*run) {
            if (run_feedback.empty() != run_sessions.empty())
                throw std::invalid_argument("--feedback and --sessions must be given together");
            harness::ResultsTable table;
            if (run_feedback.empty()) {
                table = harness::run_experiment(config);
            } else {
                const auto logs = harness::ingest_log(run_feedback);
                auto in = open_input(run_sessions);
                const auto clips = harness::read_transitions_csv(in);
                table = harness::run_experiment(config, clips, logs);
            }
            const auto format = run_format == "json" ? harness::ResultFormat::Json : harness::ResultFormat::Csv;
            with_output(run_out, [&](std::ostream& out) { harness::emit_results(table, format, out); });
        } else if (*an) {
            const auto logs = harness::ingest_log(an_feedback);
            json report;
            std::vector<FeedbackLog> binary, scalar;
            for (const auto& log : logs) (log.modality == Modality::Binary ? binary : scalar).push_back(log);
            if (!binary.empty()) {
                const std::vector<double> th{0.0};
                report["binary_agreement"] = analysis::agreement_report(binary, th);
            }
            if (!scalar.empty()) {
                const std::vector<double> th{0.0, 1.0, 2.0};
                report["scalar_agreement"] = analysis::agreement_report(scalar, th);
            }
            if (!binary.empty() && !scalar.empty()) report["calibration"] = teachers::verify_calibration(logs);
            json bias = json::array();
            for (const auto& log : logs) {
                const auto b = analysis::session_bias(log);
                bias.push_back({{"teacher_id", log.teacher_id},
                                {"delta", b.delta},
                                {"class", analysis::to_string(b.kind)}});
            }
            report["bias"] = bias;
            if (!an_sessions.empty()) {
                auto in = open_input(an_sessions);
                const auto clips = harness::read_transitions_csv(in);
                oracle::QTable q;
                if (an_oracle.empty()) {
                    env::Rng rng(harness::derive_seed(config.master_seed, "oracle"));
                    q = oracle::train_q(config.env, config.oracle, rng);
                } else {
                    auto qin = open_input(an_oracle);
                    q = oracle::read_csv(qin);
                }
                json corr = json::array();
                for (const auto& log : logs) corr.push_back(analysis::correlation_report(log, q, clips));
                report["correlations"] = corr;
            }
            with_output(an_out, [&](std::ostream& out) { out << report.dump(2) << '\n'; });
        } else if (*serve) {
            service::ServiceConfig sc;
            sc.env = config.env;
            sc.behaviour = config.behaviour;
            sc.session = config.session;
            sc.seed = config.master_seed;
            sc.tamer_alpha = config.tamer_alpha;
            sc.steady_k = config.steady_k;
            service::TeachService svc(std::move(sc));
            httplib::Server server;
            service::register_routes(server, svc);
            std::fprintf(stderr, "listening on %s:%d\n", host.c_str(), port);
            if (!server.listen(host, port)) throw std::runtime_error("cannot listen on port " + std::to_string(port));
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "teachlab: %s\n", e.what());
        return 1;
    }
    return 0;
}
