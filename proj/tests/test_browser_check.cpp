#include "gamesmith/browser/webdriver.hpp"

#include "gamesmith/common/errors.hpp"

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <thread>

using namespace gamesmith;
using namespace gamesmith::browser;

namespace {

// In-process fake webdriver: enough of the wire protocol for one check.
class FakeDriver {
public:
    // painted_hash != 0 simulates a canvas that differs from blank
    FakeDriver(long painted_hash, std::vector<std::string> errors)
        : painted_hash_(painted_hash), errors_(std::move(errors)) {
        server_.Post("/session", [this](const httplib::Request&, httplib::Response& res) {
            sessions_created_++;
            res.set_content(R"({"value": {"sessionId": "fake-session-1"}})", "application/json");
        });
        server_.Post("/session/fake-session-1/url",
                     [this](const httplib::Request&, httplib::Response& res) {
                         navigations_++;
                         res.set_content(R"({"value": null})", "application/json");
                     });
        server_.Post("/session/fake-session-1/execute/sync",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         executes_++;
                         nlohmann::json value;
                         const auto body = nlohmann::json::parse(req.body);
                         const std::string script = body.value("script", "");
                         if (script.find("KeyboardEvent") != std::string::npos) {
                             inputs_dispatched_++;
                             value = true;
                         } else {
                             nlohmann::json errs = nlohmann::json::array();
                             for (const auto& e : errors_) errs.push_back(e);
                             value = {{"present", true},
                                      {"hash", painted_hash_},
                                      {"blank", 0},
                                      {"errors", errs}};
                         }
                         res.set_content(nlohmann::json{{"value", value}}.dump(),
                                         "application/json");
                     });
        server_.Delete("/session/fake-session-1",
                       [this](const httplib::Request&, httplib::Response& res) {
                           disposed_++;
                           res.set_content(R"({"value": null})", "application/json");
                       });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~FakeDriver() {
        server_.stop();
        thread_.join();
    }

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_); }

    std::atomic<int> sessions_created_{0};
    std::atomic<int> navigations_{0};
    std::atomic<int> executes_{0};
    std::atomic<int> inputs_dispatched_{0};
    std::atomic<int> disposed_{0};

private:
    long painted_hash_;
    std::vector<std::string> errors_;
    httplib::Server server_;
    int port_ = 0;
    std::thread thread_;
};

core::GameArtifact tiny_game() {
    return core::GameArtifact::from_html(
        "<!DOCTYPE html><html><head><title>t</title></head>"
        "<body><canvas></canvas></body></html>");
}

} // namespace

TEST_CASE("painted canvas with no console errors is playable") {
    FakeDriver driver(12345, {});
    const RuntimeResult result = run_browser_check(tiny_game(), driver.endpoint(), 4000);
    CHECK(result.playable);
    CHECK(result.canvas_painted);
    CHECK(result.console_errors.empty());
    CHECK_FALSE(result.degraded);
    CHECK(result.duration_ms > 0);
    CHECK(driver.sessions_created_ == 1);
    CHECK(driver.navigations_ == 1);
    CHECK(driver.inputs_dispatched_ == 1);
    CHECK(driver.disposed_ == 1);
}

TEST_CASE("page error on load makes the result unplayable") {
    FakeDriver driver(777, {"ReferenceError: update is not defined"});
    const RuntimeResult result = run_browser_check(tiny_game(), driver.endpoint(), 4000);
    CHECK_FALSE(result.playable);
    CHECK(result.canvas_painted);
    REQUIRE(result.console_errors.size() == 1);
    CHECK(result.console_errors[0].find("ReferenceError") != std::string::npos);
}

TEST_CASE("blank canvas times out to not-playable") {
    FakeDriver driver(0, {});
    const RuntimeResult result = run_browser_check(tiny_game(), driver.endpoint(), 600);
    CHECK_FALSE(result.playable);
    CHECK_FALSE(result.canvas_painted);
    CHECK(driver.disposed_ == 1);
}

TEST_CASE("closed endpoint raises DriverUnavailable") {
    CHECK_THROWS_AS(run_browser_check(tiny_game(), "http://127.0.0.1:1", 500), Error);
    try {
        run_browser_check(tiny_game(), "http://127.0.0.1:1", 500);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::driver_unavailable);
    }
}

TEST_CASE("playable equals painted AND error-free") {
    // playable truth table over the two crafted fixtures above plus the
    // painted+errors case
    FakeDriver painted_clean(1, {});
    CHECK(run_browser_check(tiny_game(), painted_clean.endpoint(), 2000).playable);
    FakeDriver painted_dirty(1, {"boom"});
    CHECK_FALSE(run_browser_check(tiny_game(), painted_dirty.endpoint(), 2000).playable);
}
