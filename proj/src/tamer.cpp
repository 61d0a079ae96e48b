#include "teachlab/tamer.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace teachlab::tamer {

HTable::HTable(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in (0,1]");
}

void HTable::update(const env::Transition& t, double signal) {
    if (!std::isfinite(signal)) throw std::invalid_argument("TAMER signal must be finite");
    const double h = table_.value(t.state, t.action);
    table_.set(t.state, t.action, h + alpha_ * (signal - h));
    table_.add_visit(t.state, t.action);
}

HTable train_from_log(std::span<const FeedbackLogEntry> log, double alpha) {
    HTable h(alpha);
    for (const auto& [t, signal] : log) h.update(t, signal);
    return h;
}

Evaluation evaluate(const HTable& h, const env::EnvConfig& config, int runs, env::Rng& rng) {
    if (runs < 1) throw std::invalid_argument("evaluate: runs must be at least 1");
    const env::Policy policy = [&h](const env::GridPose& s, env::Rng&) { return h.act(s); };
    Evaluation ev;
    ev.returns.reserve(static_cast<std::size_t>(runs));
    for (int i = 0; i < runs; ++i)
        ev.returns.push_back(env::generate_trajectory(policy, config, rng).total_return());
    ev.mean = std::accumulate(ev.returns.begin(), ev.returns.end(), 0.0) / runs;
    return ev;
}

}  // namespace teachlab::tamer
