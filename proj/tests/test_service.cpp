#include <gtest/gtest.h>

#include <sstream>
#include <thread>

#include "httplib.h"
#include "json.hpp"

#include "teachlab/harness.hpp"
#include "teachlab/json_io.hpp"
#include "teachlab/service.hpp"

using namespace teachlab;
using nlohmann::json;
using service::Mode;
using service::TeachService;

namespace {

service::ServiceConfig fixed_clock() {
    service::ServiceConfig c;
    c.clock = [] { return std::int64_t{1700000000000}; };
    return c;
}

TeachService& shared_service() {
    static TeachService svc(fixed_clock());
    return svc;
}

void answer_all(TeachService& svc, const std::string& id, Modality m) {
    for (int i = 0; i < kClipsPerLog; ++i) {
        svc.get_step(id);
        svc.post_feedback(id, m == Modality::Binary ? (i % 3 ? "good" : "bad") : std::to_string(i % 11));
    }
}

}  // namespace

TEST(Service, ReplayServesScriptInOrder) {
    auto& svc = shared_service();
    const auto id = svc.create_session(Modality::Scalar, Mode::Replay, 4);
    const auto script = svc.script_for(4);
    ASSERT_EQ(script.size(), 200u);
    for (int i = 0; i < 5; ++i) {
        const auto step = svc.get_step(id);
        EXPECT_EQ(step.index, i);
        EXPECT_EQ(*step.transition, script[static_cast<std::size_t>(i)]);
        svc.post_feedback(id, "5");
    }
}

TEST(Service, IdsAreDistinct) {
    auto& svc = shared_service();
    const auto a = svc.create_session(Modality::Binary, Mode::Replay, 1);
    const auto b = svc.create_session(Modality::Binary, Mode::Replay, 1);
    EXPECT_NE(a, b);
    EXPECT_EQ(a.size(), 7u);
    EXPECT_EQ(a[0], 's');
}

TEST(Service, StepIsIdempotentUntilFeedback) {
    auto& svc = shared_service();
    const auto id = svc.create_session(Modality::Scalar, Mode::Live, 2);
    const auto first = svc.get_step(id);
    EXPECT_EQ(first.transition->state, env::EnvConfig{}.start_pose);
    EXPECT_EQ(svc.get_step(id).transition, first.transition);
    svc.post_feedback(id, "6");
    EXPECT_EQ(svc.get_step(id).index, 1);
}

TEST(Service, FeedbackWithoutStepConflicts) {
    auto& svc = shared_service();
    const auto id = svc.create_session(Modality::Scalar, Mode::Replay, 1);
    EXPECT_THROW(svc.post_feedback(id, "5"), service::SessionConflict);
}

TEST(Service, CompletesAfterTwoHundredSteps) {
    auto& svc = shared_service();
    const auto id = svc.create_session(Modality::Binary, Mode::Replay, 1);
    answer_all(svc, id, Modality::Binary);
    const auto step = svc.get_step(id);
    EXPECT_TRUE(step.done);
    EXPECT_FALSE(step.transition);
    EXPECT_THROW(svc.post_feedback(id, "good"), service::SessionConflict);
    EXPECT_EQ(svc.metrics(id)["events"], 200);
}

TEST(Service, RejectsValuesOutsideModality) {
    auto& svc = shared_service();
    const auto scalar = svc.create_session(Modality::Scalar, Mode::Replay, 1);
    svc.get_step(scalar);
    EXPECT_THROW(svc.post_feedback(scalar, "11"), std::invalid_argument);
    EXPECT_THROW(svc.post_feedback(scalar, "good"), std::invalid_argument);
    EXPECT_THROW(svc.post_feedback(scalar, "-1"), std::invalid_argument);
    EXPECT_EQ(svc.post_feedback(scalar, "10").index, 0);

    const auto binary = svc.create_session(Modality::Binary, Mode::Replay, 1);
    svc.get_step(binary);
    EXPECT_THROW(svc.post_feedback(binary, "7"), std::invalid_argument);
}

TEST(Service, UnknownSession) {
    EXPECT_THROW(shared_service().get_step("s999999"), service::SessionNotFound);
    EXPECT_THROW(shared_service().metrics("nope"), service::SessionNotFound);
}

TEST(Service, ExportRoundTripsThroughIngest) {
    auto& svc = shared_service();
    const auto id = svc.create_session(Modality::Scalar, Mode::Replay, 3);
    EXPECT_THROW(svc.export_session(id), service::SessionConflict);
    answer_all(svc, id, Modality::Scalar);
    std::istringstream in(svc.export_session(id));
    const auto logs = harness::read_feedback_csv(in);
    ASSERT_EQ(logs.size(), 1u);
    EXPECT_EQ(logs[0].teacher_id, id);
    EXPECT_EQ(logs[0].events[13].value, 2);
    EXPECT_EQ(logs[0].events[13].timestamp_ms, 1700000000000);
    const auto script = svc.script_for(3);
    for (int i = 0; i < kClipsPerLog; ++i) EXPECT_EQ(logs[0].events[i].transition_id, script[i].id);
}

TEST(Service, LiveSignalsMatchOfflineFilter) {
    auto& svc = shared_service();
    const auto id = svc.create_session(Modality::Scalar, Mode::Live, 5);
    steady::SteadyState offline({20, 0.0, 10.0});
    tamer::HTable h(0.5);
    for (int i = 0; i < 60; ++i) {
        const auto step = svc.get_step(id);
        EXPECT_EQ(h.act(step.transition->state), step.transition->action);
        const double f = (i * 7) % 11;
        const auto ack = svc.post_feedback(id, std::to_string(static_cast<int>(f)));
        const auto expected = offline.process(f);
        EXPECT_EQ(*ack.labeled, expected);
        EXPECT_EQ(*ack.signal, expected.shaped_reward);
        h.update(*step.transition, expected.shaped_reward);
    }
    EXPECT_TRUE(svc.get_step(id).histograms.has_value());
    EXPECT_EQ(svc.metrics(id)["steady"], json(offline));
}

TEST(Service, LiveBinaryPassesThrough) {
    auto& svc = shared_service();
    const auto id = svc.create_session(Modality::Binary, Mode::Live, 5);
    svc.get_step(id);
    EXPECT_EQ(*svc.post_feedback(id, "bad").signal, -1.0);
    svc.get_step(id);
    const auto ack = svc.post_feedback(id, "good");
    EXPECT_EQ(*ack.signal, 1.0);
    EXPECT_FALSE(ack.labeled);
}

class ServiceHttp : public ::testing::Test {
protected:
    void SetUp() override {
        service::register_routes(server_, svc_);
        port_ = server_.bind_to_any_port("127.0.0.1");
        ASSERT_GT(port_, 0);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    }
    void TearDown() override {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    std::string create(const json& body) {
        auto res = client_->Post("/api/session", body.dump(), "application/json");
        EXPECT_EQ(res->status, 201);
        return json::parse(res->body).at("session_id");
    }

    TeachService svc_{fixed_clock()};
    httplib::Server server_;
    std::thread thread_;
    int port_ = 0;
    std::unique_ptr<httplib::Client> client_;
};

TEST_F(ServiceHttp, StepFeedbackExportFlow) {
    const auto id = create({{"modality", "binary"}, {"mode", "replay"}, {"seed", 2}});
    const std::string base = "/api/session/" + id;

    auto res = client_->Post(base + "/feedback", R"({"value": "good"})", "application/json");
    EXPECT_EQ(res->status, 409);
    res = client_->Get(base + "/export");
    EXPECT_EQ(res->status, 409);

    for (int i = 0; i < kClipsPerLog; ++i) {
        res = client_->Get(base + "/step");
        ASSERT_EQ(res->status, 200);
        const auto step = json::parse(res->body);
        EXPECT_EQ(step["index"], i);
        EXPECT_TRUE(step.contains("before"));
        res = client_->Post(base + "/feedback", R"({"value": "good"})", "application/json");
        ASSERT_EQ(res->status, 200);
    }
    res = client_->Get(base + "/step");
    EXPECT_TRUE(json::parse(res->body)["done"].get<bool>());
    res = client_->Post(base + "/feedback", R"({"value": "bad"})", "application/json");
    EXPECT_EQ(res->status, 409);

    res = client_->Get(base + "/export");
    ASSERT_EQ(res->status, 200);
    EXPECT_EQ(res->get_header_value("Content-Type"), "text/csv");
    std::istringstream in(res->body);
    EXPECT_EQ(harness::read_feedback_csv(in).at(0).events.size(), 200u);

    res = client_->Get(base + "/metrics");
    ASSERT_EQ(res->status, 200);
    EXPECT_EQ(json::parse(res->body)["cursor"], 200);
}

TEST_F(ServiceHttp, ErrorStatuses) {
    const auto id = create({{"modality", "scalar"}});
    const std::string base = "/api/session/" + id;
    client_->Get(base + "/step");

    auto res = client_->Post(base + "/feedback", R"({"value": 11})", "application/json");
    EXPECT_EQ(res->status, 400);
    EXPECT_TRUE(json::parse(res->body).contains("error"));
    res = client_->Post(base + "/feedback", "{oops", "application/json");
    EXPECT_EQ(res->status, 400);
    res = client_->Post(base + "/feedback", R"({"rating": 3})", "application/json");
    EXPECT_EQ(res->status, 400);
    res = client_->Post(base + "/feedback", R"({"value": 3})", "application/json");
    EXPECT_EQ(res->status, 200);

    res = client_->Get("/api/session/s424242/step");
    EXPECT_EQ(res->status, 404);
    res = client_->Post("/api/session", R"({"modality": "ternary"})", "application/json");
    EXPECT_EQ(res->status, 400);
    res = client_->Post("/api/session", R"({"mode": "later"})", "application/json");
    EXPECT_EQ(res->status, 400);
}

TEST_F(ServiceHttp, LiveScalarReportsHistograms) {
    const auto id = create({{"modality", "scalar"}, {"mode", "live"}, {"seed", 9}});
    const std::string base = "/api/session/" + id;
    for (int i = 0; i < 25; ++i) {
        client_->Get(base + "/step");
        auto res = client_->Post(base + "/feedback", json{{"value", i % 11}}.dump(), "application/json");
        ASSERT_EQ(res->status, 200);
        EXPECT_TRUE(json::parse(res->body).contains("signal"));
    }
    const auto step = json::parse(client_->Get(base + "/step")->body);
    ASSERT_TRUE(step.contains("histograms"));
    EXPECT_EQ(step["histograms"]["positive"].size(), 11u);
}
