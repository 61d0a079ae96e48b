#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "teachlab/env.hpp"
#include "teachlab/feedback.hpp"
#include "teachlab/oracle.hpp"
#include "teachlab/steady.hpp"
#include "teachlab/tamer.hpp"

namespace httplib {
class Server;
}

namespace teachlab::service {

enum class Mode { Replay, Live };

std::string_view to_string(Mode m);
Mode mode_from_string(std::string_view name);

class SessionNotFound : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Turn-taking violations: feedback without a served step, or steps past the end.
class SessionConflict : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ServiceConfig {
    env::EnvConfig env;
    oracle::PartialTrainingParams behaviour;
    env::SessionOptions session;
    std::uint64_t seed = 1;
    double tamer_alpha = 0.5;
    std::size_t steady_k = 20;
    /// Milliseconds since the epoch; replaceable for reproducible exports.
    std::function<std::int64_t()> clock;
};

struct Histogram {
    std::vector<int> positive;  // counts per integer value min..max
    std::vector<int> negative;
};

struct StepView {
    std::string session_id;
    Modality modality = Modality::Scalar;
    Mode mode = Mode::Replay;
    int index = 0;
    int total = kClipsPerLog;
    bool done = false;
    std::optional<env::Transition> transition;  // empty once done
    std::optional<Histogram> histograms;        // live scalar sessions only
};

struct FeedbackAck {
    int index = 0;  // step the feedback was recorded for
    bool done = false;
    std::optional<steady::LabeledFeedback> labeled;  // live scalar sessions
    std::optional<double> signal;                    // reward given to TAMER in live mode
};

/// Session registry behind the teaching console. Each session serialises its
/// own requests; different sessions proceed in parallel.
class TeachService {
public:
    explicit TeachService(ServiceConfig config = {});
    ~TeachService();

    std::string create_session(Modality modality, Mode mode, std::uint64_t seed);
    /// Serves the current step. Repeated calls return the same step until
    /// feedback for it is posted.
    StepView get_step(const std::string& id);
    /// Records a "good"/"bad" or 0..10 token for the served step. Throws
    /// std::invalid_argument for a token that does not fit the session's
    /// modality and SessionConflict when no step is awaiting feedback.
    FeedbackAck post_feedback(const std::string& id, std::string_view token);
    /// Canonical feedback CSV of the events so far. Throws SessionConflict
    /// for a session without feedback.
    std::string export_session(const std::string& id);
    nlohmann::json metrics(const std::string& id);

    std::size_t session_count() const;
    /// Replay script shared by every replay session created with `seed`.
    std::vector<env::Transition> script_for(std::uint64_t seed) const;

private:
    struct Session;
    std::shared_ptr<Session> find(const std::string& id) const;
    const oracle::QTable& behaviour() const;

    ServiceConfig config_;
    mutable std::once_flag behaviour_once_;
    mutable oracle::QTable behaviour_;
    mutable std::mutex registry_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    std::uint64_t next_id_ = 1;
};

nlohmann::json to_json(const StepView& v);
nlohmann::json to_json(const FeedbackAck& a);

/// Installs the JSON endpoints under /api/session on `server`.
void register_routes(httplib::Server& server, TeachService& service);

}  // namespace teachlab::service
