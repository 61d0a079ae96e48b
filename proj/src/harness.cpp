#include "teachlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "json.hpp"

#include "teachlab/baselines.hpp"
#include "teachlab/steady.hpp"
#include "teachlab/tamer.hpp"

namespace teachlab::harness {

namespace {

constexpr std::array<std::string_view, 6> kConditionNames{
    "binary", "raw_scalar", "midpoint", "sliding_window", "steady", "env_reward_ceiling"};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    unsigned workers = threads != 0 ? threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

bool needs_modality(Condition c, Modality m) {
    switch (c) {
        case Condition::Binary: return m == Modality::Binary;
        case Condition::EnvCeiling: return true;
        default: return m == Modality::Scalar;
    }
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') cell.pop_back();
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

std::string_view to_string(Condition c) { return kConditionNames[static_cast<std::size_t>(c)]; }

Condition condition_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kConditionNames.size(); ++i)
        if (kConditionNames[i] == name) return static_cast<Condition>(i);
    throw std::invalid_argument("unknown condition '" + std::string(name) + "'");
}

void ExperimentConfig::validate() const {
    env.validate();
    if (conditions.empty()) throw std::invalid_argument("experiment needs at least one condition");
    if (eval_runs < 1) throw std::invalid_argument("eval_runs must be at least 1");
    if (teachers_per_modality < 1) throw std::invalid_argument("teachers_per_modality must be >= 1");
    if (session_attempts < 0) throw std::invalid_argument("session_attempts must be non-negative");
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stream, std::uint64_t index) {
    // FNV-1a over the stream name, mixed with the master seed and index.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : stream) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(splitmix64(master ^ h) + index);
}

World build_world(const ExperimentConfig& config) {
    config.validate();
    World w;
    env::Rng oracle_rng(derive_seed(config.master_seed, "oracle"));
    w.oracle = oracle::train_q(config.env, config.oracle, oracle_rng);

    env::Rng behaviour_rng(derive_seed(config.master_seed, "behaviour"));
    w.behaviour = oracle::train_partial(config.env, config.behaviour, behaviour_rng);

    env::Rng session_rng(derive_seed(config.master_seed, "session"));
    const auto policy =
        oracle::epsilon_greedy_policy(w.behaviour.q, config.behaviour.behaviour_epsilon);
    const int draws = std::max(1, config.session_attempts);
    for (w.session_draws = 1;; ++w.session_draws) {
        w.session = env::generate_session(policy, config.env, session_rng, config.session);
        if (config.session_attempts == 0 || session_learnable(w.session, config)) return w;
        if (w.session_draws == draws)
            throw std::runtime_error("no learnable session within " + std::to_string(draws) + " draws");
    }
}

bool session_learnable(std::span<const env::Transition> clips, const ExperimentConfig& config) {
    std::vector<tamer::FeedbackLogEntry> entries;
    entries.reserve(clips.size());
    for (const auto& t : clips) entries.emplace_back(t, t.env_reward);
    const tamer::HTable h = tamer::train_from_log(entries, config.tamer_alpha);
    env::EnvConfig quiet = config.env;
    quiet.slip_prob = 0.0;
    env::Rng rng(0);
    const auto policy = env::deterministic_policy([&h](const env::GridPose& s) { return h.act(s); });
    return env::generate_trajectory(policy, quiet, rng).success;
}

std::vector<double> transform_log(Condition c, const FeedbackLog& log,
                                  std::span<const env::Transition> clips,
                                  const ExperimentConfig& config) {
    if (!needs_modality(c, log.modality))
        throw std::invalid_argument("condition " + std::string(to_string(c)) + " cannot use " +
                                    std::string(to_string(log.modality)) + " feedback");
    if (log.events.size() != clips.size())
        throw std::invalid_argument("log and clip sequence differ in length");

    std::vector<double> signals;
    signals.reserve(clips.size());
    switch (c) {
        case Condition::EnvCeiling:
            for (const auto& t : clips) signals.push_back(t.env_reward);
            break;
        case Condition::Binary:
            for (const auto& e : log.events)
                signals.push_back(baselines::binary_passthrough(e.value_token()));
            break;
        case Condition::RawScalar:
            for (const auto& e : log.events) signals.push_back(baselines::raw_offset(e.value));
            break;
        case Condition::Midpoint:
            for (const auto& e : log.events) signals.push_back(baselines::midpoint_classify(e.value));
            break;
        case Condition::SlidingWindow: {
            baselines::WindowState window(config.window_capacity);
            for (const auto& e : log.events) signals.push_back(window.classify(e.value));
            break;
        }
        case Condition::Steady: {
            steady::SteadyState state(steady::SteadyConfig{config.steady_k, 0.0, 10.0});
            for (const auto& e : log.events) signals.push_back(state.process(e.value).shaped_reward);
            break;
        }
    }
    return signals;
}

std::vector<ConditionSummary> ResultsTable::summary() const {
    std::map<Condition, std::vector<double>> by;
    for (const auto& r : rows) by[r.condition].push_back(r.mean_return);
    std::vector<ConditionSummary> out;
    for (const auto& [c, v] : by) {
        ConditionSummary s;
        s.condition = c;
        s.models = static_cast<int>(v.size());
        s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        double ss = 0.0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
        out.push_back(s);
    }
    return out;
}

std::optional<double> ResultsTable::cohort_mean(Condition c) const {
    for (const auto& s : summary())
        if (s.condition == c) return s.mean;
    return std::nullopt;
}

const ResultRow* ResultsTable::find(Condition c, int pair_index) const {
    for (const auto& r : rows)
        if (r.condition == c && r.pair_index == pair_index) return &r;
    return nullptr;
}

ResultsTable run_experiment(const ExperimentConfig& config, std::span<const env::Transition> clips,
                            std::span<const FeedbackLog> logs) {
    config.validate();
    struct Job {
        Condition condition;
        const FeedbackLog* log;
        int pair;
    };
    std::vector<const FeedbackLog*> binary, scalar;
    for (const auto& log : logs) {
        log.validate();
        for (std::size_t i = 0; i < clips.size() && i < log.events.size(); ++i)
            if (log.events[i].transition_id != clips[i].id)
                throw std::invalid_argument("teacher " + log.teacher_id + " clip " +
                                            std::to_string(i) + " does not match the session");
        (log.modality == Modality::Binary ? binary : scalar).push_back(&log);
    }
    const int pairs = static_cast<int>(std::max(binary.size(), scalar.size()));

    std::vector<Job> jobs;
    for (Condition c : config.conditions) {
        for (int i = 0; i < pairs; ++i) {
            const auto ui = static_cast<std::size_t>(i);
            const FeedbackLog* log = nullptr;
            if (c == Condition::Binary) {
                if (ui < binary.size()) log = binary[ui];
            } else if (ui < scalar.size()) {
                log = scalar[ui];
            } else if (c == Condition::EnvCeiling && ui < binary.size()) {
                log = binary[ui];
            }
            if (log != nullptr) jobs.push_back({c, log, i});
        }
    }

    std::vector<ResultRow> rows(jobs.size());
    parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
        const Job& job = jobs[j];
        const auto signals = transform_log(job.condition, *job.log, clips, config);
        std::vector<tamer::FeedbackLogEntry> entries;
        entries.reserve(clips.size());
        for (std::size_t i = 0; i < clips.size(); ++i) entries.emplace_back(clips[i], signals[i]);
        const tamer::HTable h = tamer::train_from_log(entries, config.tamer_alpha);

        // Every condition for a pair replays the same evaluation noise.
        env::Rng eval_rng(derive_seed(config.master_seed, "eval", static_cast<std::uint64_t>(job.pair)));
        const auto ev = tamer::evaluate(h, config.env, config.eval_runs, eval_rng);

        ResultRow row;
        row.condition = job.condition;
        char id[16];
        std::snprintf(id, sizeof id, "E%02d", job.pair);
        row.teacher_id = job.condition == Condition::EnvCeiling ? std::string(id) : job.log->teacher_id;
        row.pair_index = job.pair;
        row.mean_return = ev.mean;
        row.returns = ev.returns;
        rows[j] = std::move(row);
    });

    std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
        if (a.condition != b.condition) return a.condition < b.condition;
        return a.pair_index < b.pair_index;
    });
    return ResultsTable{std::move(rows)};
}

ResultsTable run_experiment(const ExperimentConfig& config) {
    const World world = build_world(config);
    const auto cohort = teachers::generate_cohort(
        config.teachers_per_modality, derive_seed(config.master_seed, "cohort"), config.cohort);
    std::vector<FeedbackLog> logs;
    logs.reserve(cohort.size());
    for (const auto& p : cohort)
        logs.push_back(teachers::simulate_log(p, world.session, world.oracle, config.target_scale));
    return run_experiment(config, world.session, logs);
}

void write_feedback_csv(std::span<const FeedbackLog> logs, std::ostream& out) {
    out << kFeedbackCsvHeader << '\n';
    for (const auto& log : logs)
        for (const auto& e : log.events)
            out << e.teacher_id << ',' << to_string(e.modality) << ',' << e.clip_index << ','
                << e.session << ',' << e.transition_id << ',' << e.value_token() << ','
                << e.timestamp_ms << '\n';
}

std::vector<FeedbackLog> read_feedback_csv(std::istream& in, bool require_complete) {
    static const std::array<std::string_view, 7> kColumns{
        "teacher_id", "modality", "clip_index", "session", "transition_id", "value", "timestamp_ms"};
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("feedback CSV: empty input, header expected");
    const auto header = split_csv_line(line);
    std::array<std::size_t, 7> col{};
    for (std::size_t k = 0; k < kColumns.size(); ++k) {
        const auto it = std::find(header.begin(), header.end(), kColumns[k]);
        if (it == header.end())
            throw SchemaError("feedback CSV: missing column '" + std::string(kColumns[k]) + "'");
        col[k] = static_cast<std::size_t>(it - header.begin());
    }

    std::vector<FeedbackLog> logs;
    std::unordered_map<std::string, std::size_t> by_id;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty() || line == "\r") continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw SchemaError("feedback CSV row " + std::to_string(row) + ": expected " +
                              std::to_string(header.size()) + " cells, got " +
                              std::to_string(cells.size()));
        auto cell = [&](std::size_t k) -> const std::string& { return cells[col[k]]; };
        auto fail = [&](std::size_t k, const std::string& why) {
            return SchemaError("feedback CSV row " + std::to_string(row) + ", column '" +
                               std::string(kColumns[k]) + "': " + why);
        };
        auto integer = [&](std::size_t k) -> long long {
            try {
                std::size_t used = 0;
                const long long v = std::stoll(cell(k), &used);
                if (used != cell(k).size()) throw std::invalid_argument("trailing characters");
                return v;
            } catch (const std::exception&) {
                throw fail(k, "expected an integer, got '" + cell(k) + "'");
            }
        };

        FeedbackEvent e;
        e.teacher_id = cell(0);
        if (e.teacher_id.empty()) throw fail(0, "empty teacher id");
        try {
            e.modality = modality_from_string(cell(1));
        } catch (const std::invalid_argument& ex) {
            throw fail(1, ex.what());
        }
        e.clip_index = static_cast<int>(integer(2));
        e.session = static_cast<int>(integer(3));
        const long long tid = integer(4);
        if (tid < 0) throw fail(4, "negative transition id");
        e.transition_id = static_cast<std::uint64_t>(tid);
        try {
            e.value = parse_feedback_value(e.modality, cell(5));
        } catch (const std::invalid_argument& ex) {
            throw fail(5, ex.what());
        }
        e.timestamp_ms = integer(6);

        auto [it, fresh] = by_id.try_emplace(e.teacher_id, logs.size());
        if (fresh) logs.push_back(FeedbackLog{e.teacher_id, e.modality, {}});
        FeedbackLog& log = logs[it->second];
        if (log.modality != e.modality)
            throw fail(1, "teacher " + e.teacher_id + " mixes modalities");
        log.events.push_back(std::move(e));
    }
    for (auto& log : logs) {
        std::stable_sort(log.events.begin(), log.events.end(),
                         [](const FeedbackEvent& a, const FeedbackEvent& b) { return a.clip_index < b.clip_index; });
        try {
            if (require_complete) {
                log.validate();
            } else {
                log.validate_prefix();
            }
        } catch (const std::invalid_argument& ex) {
            throw SchemaError(std::string("feedback CSV: ") + ex.what());
        }
    }
    return logs;
}

std::vector<FeedbackLog> ingest_log(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_feedback_csv(in, true);
}

void write_transitions_csv(std::span<const env::Transition> clips, std::ostream& out) {
    out << "clip_index,transition_id,x,y,z,action,next_x,next_y,next_z,env_reward,terminal,outcome\n";
    char reward[40];
    for (std::size_t i = 0; i < clips.size(); ++i) {
        const auto& t = clips[i];
        std::snprintf(reward, sizeof reward, "%.17g", t.env_reward);
        out << i << ',' << t.id << ',' << t.state.x << ',' << t.state.y << ',' << t.state.z << ','
            << env::to_string(t.action) << ',' << t.next_state.x << ',' << t.next_state.y << ','
            << t.next_state.z << ',' << reward << ',' << (t.terminal ? 1 : 0) << ','
            << env::to_string(t.outcome) << '\n';
    }
}

std::vector<env::Transition> read_transitions_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("transition CSV: empty input");
    std::vector<env::Transition> out;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto c = split_csv_line(line);
        if (c.size() != 12)
            throw SchemaError("transition CSV row " + std::to_string(row) + ": expected 12 cells");
        try {
            env::Transition t;
            t.id = std::stoull(c[1]);
            t.state = {std::stoi(c[2]), std::stoi(c[3]), std::stoi(c[4])};
            t.action = env::action_from_string(c[5]);
            t.next_state = {std::stoi(c[6]), std::stoi(c[7]), std::stoi(c[8])};
            t.env_reward = std::stod(c[9]);
            t.terminal = c[10] == "1";
            t.outcome = env::outcome_from_string(c[11]);
            out.push_back(t);
        } catch (const std::exception& ex) {
            throw SchemaError("transition CSV row " + std::to_string(row) + ": " + ex.what());
        }
    }
    return out;
}

void emit_results(const ResultsTable& table, ResultFormat format, std::ostream& out) {
    if (table.rows.empty()) throw std::invalid_argument("emit_results: empty results table");
    const auto summary = table.summary();
    if (format == ResultFormat::Csv) {
        out << "condition,teacher_id,mean_return\n";
        for (const auto& r : table.rows)
            out << to_string(r.condition) << ',' << r.teacher_id << ',' << format_double(r.mean_return)
                << '\n';
        for (const auto& s : summary) {
            out << to_string(s.condition) << ",cohort_mean," << format_double(s.mean) << '\n';
            out << to_string(s.condition) << ",cohort_sd," << format_double(s.sd) << '\n';
        }
        return;
    }
    nlohmann::ordered_json j;
    j["schema_version"] = 1;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : table.rows) {
        nlohmann::ordered_json row;
        row["condition"] = to_string(r.condition);
        row["teacher_id"] = r.teacher_id;
        row["mean_return"] = r.mean_return;
        row["returns"] = r.returns;
        j["rows"].push_back(std::move(row));
    }
    j["summary"] = nlohmann::ordered_json::array();
    for (const auto& s : summary) {
        nlohmann::ordered_json row;
        row["condition"] = to_string(s.condition);
        row["models"] = s.models;
        row["cohort_mean"] = s.mean;
        row["cohort_sd"] = s.sd;
        j["summary"].push_back(std::move(row));
    }
    out << j.dump(2) << '\n';
}

void emit_results(const ResultsTable& table, ResultFormat format, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    emit_results(table, format, out);
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace teachlab::harness
