#include "gamesmith/browser/webdriver.hpp"

#include "gamesmith/common/errors.hpp"
#include "gamesmith/common/text.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace fs = std::filesystem;

namespace gamesmith::browser {

namespace {

// Installed at the top of the served document so load-time errors are
// captured before any game script runs.
constexpr const char* kErrorProbe = R"(<script>
window.__gs_errors = [];
window.addEventListener('error', function (e) {
  window.__gs_errors.push(String((e && (e.message || e.error)) || 'error'));
});
</script>
)";

// Hashes the canvas image so the wire payload stays small. Compares the
// current frame against a blank canvas of the same size; webgl contexts
// fall back to toDataURL like 2d ones.
constexpr const char* kSampleScript = R"(
var out = { present: false, hash: 0, blank: 0, errors: window.__gs_errors || [] };
var c = document.querySelector('canvas');
if (!c) { return out; }
out.present = true;
function h(s) { var x = 0; for (var i = 0; i < s.length; i++) { x = (x * 31 + s.charCodeAt(i)) | 0; } return x; }
try {
  var blank = document.createElement('canvas');
  blank.width = c.width; blank.height = c.height;
  out.hash = h(c.toDataURL());
  out.blank = h(blank.toDataURL());
} catch (e) { out.errors = out.errors.concat(['probe: ' + e]); }
return out;
)";

constexpr const char* kInputScript = R"(
var c = document.querySelector('canvas');
var keys = [' ', 'ArrowLeft', 'ArrowRight', 'ArrowUp', 'ArrowDown'];
['keydown', 'keyup'].forEach(function (type) {
  keys.forEach(function (k) {
    var e = new KeyboardEvent(type, { key: k, code: k === ' ' ? 'Space' : k, bubbles: true });
    document.dispatchEvent(e);
    window.dispatchEvent(e);
  });
});
if (c) {
  var r = c.getBoundingClientRect();
  var opts = { clientX: r.left + r.width / 2, clientY: r.top + r.height / 2, bubbles: true };
  c.dispatchEvent(new MouseEvent('mousedown', opts));
  c.dispatchEvent(new MouseEvent('mouseup', opts));
  c.dispatchEvent(new MouseEvent('click', opts));
}
return true;
)";

std::string inject_probe(const std::string& html) {
    const std::string lowered = to_lower(html);
    std::size_t insert_at = 0;
    const std::size_t head = lowered.find("<head");
    if (head != std::string::npos) {
        const std::size_t end = lowered.find('>', head);
        if (end != std::string::npos) {
            insert_at = end + 1;
        }
    }
    std::string out = html;
    out.insert(insert_at, kErrorProbe);
    return out;
}

struct Session {
    httplib::Client* client;
    std::string id;

    nlohmann::json execute(const std::string& script) {
        nlohmann::json body = {{"script", script}, {"args", nlohmann::json::array()}};
        auto response = client->Post("/session/" + id + "/execute/sync", body.dump(),
                                     "application/json");
        if (!response || response->status < 200 || response->status >= 300) {
            throw std::runtime_error("execute failed");
        }
        return nlohmann::json::parse(response->body).value("value", nlohmann::json());
    }
};

struct Sample {
    bool present = false;
    bool painted = false;
    long hash = 0;
    std::vector<std::string> errors;
};

Sample read_sample(Session& session) {
    Sample sample;
    const nlohmann::json value = session.execute(kSampleScript);
    if (!value.is_object()) {
        return sample;
    }
    sample.present = value.value("present", false);
    sample.hash = value.value("hash", 0L);
    const long blank = value.value("blank", 0L);
    sample.painted = sample.present && sample.hash != blank;
    for (const auto& err : value.value("errors", nlohmann::json::array())) {
        if (err.is_string()) {
            sample.errors.push_back(err.get<std::string>());
        }
    }
    return sample;
}

} // namespace

RuntimeResult run_browser_check(const core::GameArtifact& artifact,
                                const std::string& driver_endpoint,
                                std::uint64_t timeout_ms) {
    const auto started = std::chrono::steady_clock::now();
    const auto deadline = started + std::chrono::milliseconds(timeout_ms);
    auto elapsed_ms = [&] {
        return static_cast<std::uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                              std::chrono::steady_clock::now() - started)
                                              .count());
    };

    httplib::Client client(driver_endpoint);
    client.set_connection_timeout(std::chrono::milliseconds(std::max<std::uint64_t>(timeout_ms, 1000)));
    client.set_read_timeout(std::chrono::milliseconds(std::max<std::uint64_t>(timeout_ms, 1000)));

    // Session creation failure means no Tier-2 is possible.
    nlohmann::json caps = {
        {"capabilities",
         {{"alwaysMatch",
           {{"goog:chromeOptions",
             {{"args", {"--headless=new", "--disable-gpu", "--allow-file-access-from-files"}}}}}}}}};
    auto created = client.Post("/session", caps.dump(), "application/json");
    if (!created || created->status < 200 || created->status >= 300) {
        throw Error(ErrorCode::driver_unavailable,
                    "browser driver unreachable at " + driver_endpoint);
    }
    std::string session_id;
    try {
        const nlohmann::json parsed = nlohmann::json::parse(created->body);
        session_id = parsed.at("value").value("sessionId", "");
    } catch (const nlohmann::json::exception&) {
    }
    if (session_id.empty()) {
        throw Error(ErrorCode::driver_unavailable, "browser driver returned no session id");
    }

    Session session{&client, session_id};
    RuntimeResult result;
    const fs::path page =
        fs::temp_directory_path() / ("gamesmith_check_" + digest(artifact.html) + ".html");

    try {
        {
            std::ofstream out(page);
            out << inject_probe(artifact.html);
        }
        nlohmann::json navigate = {{"url", "file://" + page.string()}};
        auto nav = client.Post("/session/" + session_id + "/url", navigate.dump(),
                               "application/json");
        if (!nav || nav->status < 200 || nav->status >= 300) {
            throw std::runtime_error("navigation failed");
        }

        // Two samples 250 ms apart per round; paint counts when either
        // sample differs from a blank canvas or the frames differ.
        Sample last;
        while (true) {
            Sample first = read_sample(session);
            std::this_thread::sleep_for(std::chrono::milliseconds(250));
            Sample second = read_sample(session);
            last = second;
            if (first.painted || second.painted ||
                (first.present && second.present && first.hash != second.hash)) {
                result.canvas_painted = true;
                break;
            }
            if (std::chrono::steady_clock::now() >= deadline) {
                break;
            }
        }

        if (result.canvas_painted) {
            session.execute(kInputScript);
            last = read_sample(session);
        }
        result.console_errors = last.errors;
    } catch (const std::exception& e) {
        result.canvas_painted = false;
        result.console_errors.push_back(std::string("driver error: ") + e.what());
    }

    client.Delete("/session/" + session_id);
    std::error_code ec;
    fs::remove(page, ec);

    result.playable = result.canvas_painted && result.console_errors.empty();
    result.duration_ms = elapsed_ms();
    return result;
}

} // namespace gamesmith::browser
