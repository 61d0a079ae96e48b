#include "teachlab/service.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "httplib.h"

#include "teachlab/baselines.hpp"
#include "teachlab/harness.hpp"
#include "teachlab/json_io.hpp"

using nlohmann::json;

namespace teachlab::service {

std::string_view to_string(Mode m) { return m == Mode::Replay ? "replay" : "live"; }

Mode mode_from_string(std::string_view name) {
    if (name == "replay") return Mode::Replay;
    if (name == "live") return Mode::Live;
    throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

struct TeachService::Session {
    std::mutex mutex;
    std::string id;
    Modality modality = Modality::Scalar;
    Mode mode = Mode::Replay;
    std::vector<env::Transition> script;
    std::vector<FeedbackEvent> events;
    std::optional<env::Transition> pending;
    int cursor = 0;

    // Live mode only.
    env::Rng rng;
    std::optional<steady::SteadyState> steady;
    std::optional<tamer::HTable> h;
    env::GridPose pose;
    int episode_steps = 0;
    std::optional<steady::LabeledFeedback> last_labeled;
    int presses = 0;
    int episodes = 0;
};

TeachService::TeachService(ServiceConfig config) : config_(std::move(config)) {
    config_.env.validate();
    if (!config_.clock) {
        config_.clock = [] {
            using namespace std::chrono;
            return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
        };
    }
}

TeachService::~TeachService() = default;

const oracle::QTable& TeachService::behaviour() const {
    std::call_once(behaviour_once_, [this] {
        env::Rng rng(harness::derive_seed(config_.seed, "behaviour"));
        behaviour_ = oracle::train_partial(config_.env, config_.behaviour, rng).q;
    });
    return behaviour_;
}

std::vector<env::Transition> TeachService::script_for(std::uint64_t seed) const {
    env::Rng rng(harness::derive_seed(seed, "service-script"));
    const auto policy = oracle::epsilon_greedy_policy(behaviour(), config_.behaviour.behaviour_epsilon);
    return env::generate_session(policy, config_.env, rng, config_.session);
}

std::string TeachService::create_session(Modality modality, Mode mode, std::uint64_t seed) {
    auto s = std::make_shared<Session>();
    s->modality = modality;
    s->mode = mode;
    if (mode == Mode::Replay) {
        s->script = script_for(seed);
    } else {
        s->rng.seed(harness::derive_seed(seed, "service-live"));
        s->h.emplace(config_.tamer_alpha);
        if (modality == Modality::Scalar)
            s->steady.emplace(steady::SteadyConfig{config_.steady_k, 0.0, 10.0});
        s->pose = config_.env.start_pose;
    }
    std::lock_guard lock(registry_mutex_);
    char id[32];
    std::snprintf(id, sizeof id, "s%06llu", static_cast<unsigned long long>(next_id_++));
    s->id = id;
    sessions_.emplace(s->id, s);
    return s->id;
}

std::shared_ptr<TeachService::Session> TeachService::find(const std::string& id) const {
    std::lock_guard lock(registry_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) throw SessionNotFound("unknown session '" + id + "'");
    return it->second;
}

std::size_t TeachService::session_count() const {
    std::lock_guard lock(registry_mutex_);
    return sessions_.size();
}

namespace {

Histogram histogram(const steady::SteadyState& s) {
    const auto lo = static_cast<int>(std::floor(s.config().min_value));
    const auto hi = static_cast<int>(std::ceil(s.config().max_value));
    Histogram out{std::vector<int>(static_cast<std::size_t>(hi - lo + 1), 0),
                  std::vector<int>(static_cast<std::size_t>(hi - lo + 1), 0)};
    auto fill = [lo](std::vector<int>& bins, std::span<const double> values) {
        for (double v : values) ++bins[static_cast<std::size_t>(std::lround(v) - lo)];
    };
    fill(out.positive, s.positive().sorted());
    fill(out.negative, s.negative().sorted());
    // Warm-up values are not in either distribution yet.
    return out;
}

}  // namespace

StepView TeachService::get_step(const std::string& id) {
    const auto s = find(id);
    std::lock_guard lock(s->mutex);
    StepView view;
    view.session_id = s->id;
    view.modality = s->modality;
    view.mode = s->mode;
    view.index = s->cursor;
    view.done = s->cursor >= kClipsPerLog;
    if (s->steady && s->steady->initialized()) view.histograms = histogram(*s->steady);
    if (view.done) return view;

    if (!s->pending) {
        if (s->mode == Mode::Replay) {
            s->pending = s->script[static_cast<std::size_t>(s->cursor)];
        } else {
            env::Transition t = env::step(config_.env, s->pose, s->h->act(s->pose), s->rng);
            t.id = static_cast<std::uint64_t>(s->cursor);
            ++s->episode_steps;
            if (!t.terminal && s->episode_steps >= config_.env.step_cap) {
                t.terminal = true;
                t.outcome = env::Outcome::Cap;
            }
            s->pending = t;
        }
    }
    view.transition = s->pending;
    return view;
}

FeedbackAck TeachService::post_feedback(const std::string& id, std::string_view token) {
    const auto s = find(id);
    std::lock_guard lock(s->mutex);
    if (s->cursor >= kClipsPerLog) throw SessionConflict("session " + s->id + " is complete");
    if (!s->pending) throw SessionConflict("no step awaiting feedback in session " + s->id);

    FeedbackEvent e;
    e.teacher_id = s->id;
    e.modality = s->modality;
    e.clip_index = s->cursor;
    e.session = s->cursor < kClipsPerSession ? 1 : 2;
    e.transition_id = s->pending->id;
    e.value = parse_feedback_value(s->modality, token);
    e.timestamp_ms = config_.clock();

    FeedbackAck ack;
    ack.index = s->cursor;
    if (s->mode == Mode::Live) {
        double signal = 0.0;
        if (s->steady) {
            const auto labeled = s->steady->process(e.value);
            s->last_labeled = labeled;
            ack.labeled = labeled;
            signal = labeled.shaped_reward;
        } else {
            signal = baselines::binary_passthrough(e.value_token());
        }
        ack.signal = signal;
        s->h->update(*s->pending, signal);
        if (s->pending->terminal) {
            s->presses += s->pending->outcome == env::Outcome::Press ? 1 : 0;
            ++s->episodes;
            s->pose = config_.env.start_pose;
            s->episode_steps = 0;
        } else {
            s->pose = s->pending->next_state;
        }
    }
    s->events.push_back(std::move(e));
    s->pending.reset();
    ++s->cursor;
    ack.done = s->cursor >= kClipsPerLog;
    return ack;
}

std::string TeachService::export_session(const std::string& id) {
    const auto s = find(id);
    std::lock_guard lock(s->mutex);
    if (s->events.empty()) throw SessionConflict("session " + s->id + " has no feedback to export");
    const FeedbackLog log{s->id, s->modality, s->events};
    std::ostringstream out;
    harness::write_feedback_csv(std::span<const FeedbackLog>(&log, 1), out);
    return out.str();
}

json TeachService::metrics(const std::string& id) {
    const auto s = find(id);
    std::lock_guard lock(s->mutex);
    json j = {{"session_id", s->id},
              {"modality", teachlab::to_string(s->modality)},
              {"mode", to_string(s->mode)},
              {"cursor", s->cursor},
              {"total", kClipsPerLog},
              {"done", s->cursor >= kClipsPerLog},
              {"feedback_pending", s->pending.has_value()},
              {"events", s->events.size()}};
    if (s->mode == Mode::Live) {
        j["episodes"] = s->episodes;
        j["presses"] = s->presses;
        j["pose"] = s->pose;
    }
    if (s->steady) {
        j["steady"] = *s->steady;
        j["last_feedback"] = s->last_labeled ? json(*s->last_labeled) : json(nullptr);
    }
    return j;
}

json to_json(const StepView& v) {
    json j = {{"session_id", v.session_id},
              {"modality", teachlab::to_string(v.modality)},
              {"mode", to_string(v.mode)},
              {"index", v.index},
              {"total", v.total},
              {"done", v.done}};
    if (v.transition) {
        const auto& t = *v.transition;
        j["before"] = t.state;
        j["after"] = t.next_state;
        j["action"] = env::to_string(t.action);
        j["env_reward"] = t.env_reward;
        j["terminal"] = t.terminal;
        j["outcome"] = env::to_string(t.outcome);
        j["transition_id"] = t.id;
    }
    if (v.histograms)
        j["histograms"] = {{"positive", v.histograms->positive}, {"negative", v.histograms->negative}};
    return j;
}

json to_json(const FeedbackAck& a) {
    json j = {{"index", a.index}, {"done", a.done}};
    if (a.labeled) j["labeled"] = *a.labeled;
    if (a.signal) j["signal"] = *a.signal;
    return j;
}

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
    try {
        fn();
    } catch (const SessionNotFound& e) {
        send_json(res, 404, {{"error", e.what()}});
    } catch (const SessionConflict& e) {
        send_json(res, 409, {{"error", e.what()}});
    } catch (const json::exception& e) {
        send_json(res, 400, {{"error", std::string("malformed request: ") + e.what()}});
    } catch (const std::invalid_argument& e) {
        send_json(res, 400, {{"error", e.what()}});
    } catch (const std::exception& e) {
        send_json(res, 500, {{"error", e.what()}});
    }
}

}  // namespace

void register_routes(httplib::Server& server, TeachService& service) {
    server.Post("/api/session", [&service](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            const json body = req.body.empty() ? json::object() : json::parse(req.body);
            const auto modality = modality_from_string(body.value("modality", std::string("scalar")));
            const auto mode = mode_from_string(body.value("mode", std::string("replay")));
            const auto seed = body.value("seed", std::uint64_t{1});
            send_json(res, 201, {{"session_id", service.create_session(modality, mode, seed)}});
        });
    });
    server.Get(R"(/api/session/([^/]+)/step)", [&service](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { send_json(res, 200, to_json(service.get_step(req.matches[1]))); });
    });
    server.Post(R"(/api/session/([^/]+)/feedback)",
                [&service](const httplib::Request& req, httplib::Response& res) {
                    guarded(res, [&] {
                        const json body = json::parse(req.body);
                        const json& value = body.at("value");
                        const std::string token =
                            value.is_string() ? value.get<std::string>() : value.dump();
                        send_json(res, 200, to_json(service.post_feedback(req.matches[1], token)));
                    });
                });
    server.Get(R"(/api/session/([^/]+)/export)", [&service](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] {
            res.status = 200;
            res.set_content(service.export_session(req.matches[1]), "text/csv");
        });
    });
    server.Get(R"(/api/session/([^/]+)/metrics)", [&service](const httplib::Request& req, httplib::Response& res) {
        guarded(res, [&] { send_json(res, 200, service.metrics(req.matches[1])); });
    });
}

}  // namespace teachlab::service
