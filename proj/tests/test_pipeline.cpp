#include "gamesmith/pipeline/pipeline.hpp"

#include "gamesmith/common/errors.hpp"
#include "gamesmith/pipeline/parsers.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

namespace fs = std::filesystem;
using namespace gamesmith;
using namespace gamesmith::pipeline;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("gamesmith_pipe_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

const char* kGoodGame = R"(<!DOCTYPE html>
<html>
<head><title>Mock Game</title></head>
<body>
<canvas id="game" width="320" height="240"></canvas>
<script>
const ctx = document.getElementById('game').getContext('2d');
let hero = { x: 10, y: 10 };
function update() { hero.x += 1; }
function draw() {
  ctx.clearRect(0, 0, 320, 240);
  ctx.fillRect(hero.x, hero.y, 8, 8);
}
function loop() { update(); draw(); requestAnimationFrame(loop); }
document.addEventListener('keydown', () => { hero.y -= 2; });
window.addEventListener('load', () => { requestAnimationFrame(loop); });
</script>
</body>
</html>)";

// Never acquires a canvas context: exactly one static error.
const char* kBrokenGame = R"(<!DOCTYPE html>
<html>
<head><title>Broken Mock</title></head>
<body>
<canvas id="game" width="320" height="240"></canvas>
<script>
const painter = { fillRect: function (x, y) { this.last = [x, y]; } };
let hero = { x: 10 };
function update() { hero.x += 1; }
function draw() { painter.fillRect(hero.x, 10, 8, 8); }
function loop() { update(); draw(); requestAnimationFrame(loop); }
document.addEventListener('keydown', () => { hero.x = 0; });
requestAnimationFrame(loop);
</script>
</body>
</html>)";

std::string fenced(const std::string& html) {
    return "Here is the game:\n```html\n" + html + "\n```\n";
}

std::string plan_text(const std::string& add_entries) {
    return "Thinking about mechanics.\n```\nCURRENT_MECHANIC_SET\nPRESERVE: dash\nADD: " +
           add_entries + "\nREMOVE: stale ladder\nRECOMBINE: dash + wall jump | momentum chain\n```\n";
}

std::string eval_json(double creativity, double structural, bool realize_all) {
    nlohmann::json realization = {{"dash", true},
                                  {"wall jump", realize_all},
                                  {"echo trail", realize_all}};
    nlohmann::json doc = {
        {"creativity", creativity},
        {"playability", 8},
        {"overall", 7},
        {"realized_mechanics",
         {{{"name", "dash"}, {"description", "burst of speed"}, {"layers", {"actions"}}},
          {{"name", "echo trail"},
           {"description", "afterimages replay your path"},
           {"layers", {"observation", "transition"}}}}},
        {"realization", realization},
        {"structural_change", structural},
        {"meaningful_play", true},
        {"learnability", true},
        {"novelty_notes", "echo trail is new"},
    };
    return "Assessment follows.\n" + doc.dump(2) + "\n";
}

struct Harness {
    std::shared_ptr<llm::MockProvider> mock = std::make_shared<llm::MockProvider>();
    std::shared_ptr<store::LineageStore> store;
    PipelineConfig config;

    explicit Harness(const fs::path& root, std::uint64_t seed = 0) {
        store = std::make_shared<store::LineageStore>(root, seed);
        config.memory.top_k = 5;
    }

    Pipeline build() {
        llm::RetryPolicy policy;
        policy.max_retries = 3;
        policy.backoff_base_ms = 0;
        auto gateway = std::make_shared<llm::Gateway>(mock, nullptr, policy);
        return Pipeline(gateway, store, config);
    }

    // scripts every role for a clean single-iteration run
    void script_happy_path(bool stop = true) {
        mock->enqueue(core::Role::planning,
                      plan_text("wall jump | rebound off walls | actions,transition; "
                                "echo trail | afterimages replay your path | observation"));
        mock->enqueue(core::Role::skeleton, fenced(kGoodGame));
        mock->enqueue(core::Role::feature, fenced(kGoodGame));
        mock->enqueue(core::Role::visual, fenced(kGoodGame));
        mock->enqueue(core::Role::evaluation, eval_json(7, 0.5, true));
        mock->enqueue(core::Role::reflection,
                      stop ? "VERDICT: STOP\nMEMORY: echo trail landed | tie replay to deaths"
                           : "VERDICT: CONTINUE");
        mock->enqueue(core::Role::refinement, fenced(kGoodGame));
        mock->enqueue(core::Role::formatting, fenced(kGoodGame));
    }
};

std::size_t count_stage(const nlohmann::json& trace, const std::string& stage) {
    std::size_t count = 0;
    for (const auto& record : trace["stages"]) {
        if (record["stage"] == stage) {
            ++count;
        }
    }
    return count;
}

} // namespace

TEST_CASE("stop verdict at iteration 1 saves exactly one node") {
    TempDir tmp;
    Harness harness(tmp.path / "store");
    harness.script_happy_path(true);
    Pipeline pipe = harness.build();

    const GenerationResult result = pipe.generate({"rhythm platformer", {}, {}});
    CHECK(result.iterations_used == 1);
    CHECK_FALSE(result.node_id.empty());

    const store::LineageTree tree = harness.store->load_tree(result.lineage_id);
    CHECK(tree.nodes.size() == 1);
    CHECK(tree.root_id == result.node_id);

    const store::LineageNode node = harness.store->load_node(result.lineage_id, result.node_id);
    CHECK(node.prompt == "rhythm platformer");
    CHECK(node.iterations_used == 1);
    CHECK(node.artifact.html.find("<canvas") != std::string::npos);
    CHECK(node.mechanic_plan.preserve == std::vector<std::string>{"dash"});
    CHECK(node.mechanic_plan.add.size() == 2);
    CHECK(node.evaluation.creativity_10 == doctest::Approx(7.0));
    CHECK(node.validation.score == doctest::Approx(1.0));
    CHECK(node.reward.final_reward == doctest::Approx(node.reward.pre_gate_reward));
    CHECK(node.mechanic_delta.added.size() == 2); // root: everything added

    // memory payload persisted and value-updated once
    const auto items = harness.store->load_memory(result.lineage_id);
    REQUIRE(items.size() == 1);
    CHECK(items[0].intent == "echo trail landed");
    CHECK(items[0].visits == 1);
}

TEST_CASE("failing static checks trigger exactly one repair with re-analysis") {
    TempDir tmp;
    Harness harness(tmp.path / "store");
    harness.mock->enqueue(core::Role::planning, plan_text("wall jump | rebound | actions"));
    harness.mock->enqueue(core::Role::skeleton, fenced(kBrokenGame));
    harness.mock->enqueue(core::Role::feature, fenced(kBrokenGame));
    harness.mock->enqueue(core::Role::visual, fenced(kBrokenGame));
    harness.mock->enqueue(core::Role::repair, fenced(kGoodGame));
    harness.mock->enqueue(core::Role::evaluation, eval_json(7, 0.5, true));
    harness.mock->enqueue(core::Role::reflection, "VERDICT: STOP");
    harness.mock->enqueue(core::Role::formatting, fenced(kGoodGame));
    Pipeline pipe = harness.build();

    const GenerationResult result = pipe.generate({"fix me", {}, {}});
    const store::LineageNode node = harness.store->load_node(result.lineage_id, result.node_id);
    CHECK(node.validation.error_count == 0); // repaired artifact won

    const nlohmann::json trace = harness.store->load_trace(result.lineage_id, result.node_id);
    CHECK(count_stage(trace, "repair") == 1);
    // repair prompt carried the error list
    bool repair_seen = false;
    for (const auto& request : harness.mock->requests()) {
        if (request.role == core::Role::repair) {
            repair_seen = true;
            CHECK(request.user_text.find("canvas_context") != std::string::npos);
        }
    }
    CHECK(repair_seen);
}

TEST_CASE("continue verdicts run to the 3-iteration cap with a single node") {
    TempDir tmp;
    Harness harness(tmp.path / "store");
    harness.script_happy_path(false); // CONTINUE sticky for every reflection
    Pipeline pipe = harness.build();

    const GenerationResult result = pipe.generate({"endless tweaker", {}, {}});
    CHECK(result.iterations_used == 3);

    const store::LineageTree tree = harness.store->load_tree(result.lineage_id);
    CHECK(tree.nodes.size() == 1); // only the final state is saved

    const nlohmann::json trace = harness.store->load_trace(result.lineage_id, result.node_id);
    CHECK(count_stage(trace, "refinement") == 2);
    CHECK(count_stage(trace, "evaluation") == 3);
    CHECK(count_stage(trace, "reflection") == 3);
    CHECK(count_stage(trace, "skeleton") == 1);
}

TEST_CASE("early stop once the reward clears the bar") {
    TempDir tmp;
    Harness harness(tmp.path / "store");
    // novel mechanics (not in the seed archive) + full structural change
    // push the reward past 0.75 even though the verdict says continue
    harness.mock->enqueue(core::Role::planning,
                          plan_text("chrono weave | braid timelines into platforms | transition"));
    harness.mock->enqueue(core::Role::skeleton, fenced(kGoodGame));
    harness.mock->enqueue(core::Role::feature, fenced(kGoodGame));
    harness.mock->enqueue(core::Role::visual, fenced(kGoodGame));
    {
        nlohmann::json doc = {
            {"creativity", 9},
            {"playability", 9},
            {"overall", 9},
            {"realized_mechanics",
             {{{"name", "dash"}, {"layers", {"actions"}}},
              {{"name", "chrono weave"},
               {"description", "braid timelines into platforms"},
               {"layers", {"transition"}}}}},
            {"realization", {{"dash", true}, {"chrono weave", true}}},
            {"structural_change", 1.0},
        };
        harness.mock->enqueue(core::Role::evaluation, doc.dump());
    }
    harness.mock->enqueue(core::Role::reflection, "VERDICT: CONTINUE");
    harness.mock->enqueue(core::Role::formatting, fenced(kGoodGame));
    Pipeline pipe = harness.build();

    const GenerationResult result = pipe.generate({"time braid game", {}, {}});
    CHECK(result.iterations_used == 1);
    CHECK(result.reward.final_reward >= 0.75);
}

TEST_CASE("mechanic contract is byte-identical across the iteration-1 stages") {
    TempDir tmp;
    Harness harness(tmp.path / "store");
    harness.script_happy_path(true);
    Pipeline pipe = harness.build();
    pipe.generate({"contract check", {}, {}});

    std::string contract;
    for (const auto& request : harness.mock->requests()) {
        if (request.role == core::Role::planning) {
            continue;
        }
        if (request.role == core::Role::skeleton || request.role == core::Role::feature ||
            request.role == core::Role::visual) {
            const std::size_t start = request.user_text.find("```");
            REQUIRE(start != std::string::npos);
            const std::size_t end = request.user_text.find("```", start + 3);
            REQUIRE(end != std::string::npos);
            const std::string found = request.user_text.substr(start, end + 3 - start);
            CHECK(found.find("CURRENT_MECHANIC_SET") != std::string::npos);
            if (contract.empty()) {
                contract = found;
            } else {
                CHECK(found == contract);
            }
        }
    }
    CHECK_FALSE(contract.empty());
}

TEST_CASE("missing mechanic set falls back to an empty plan after one retry") {
    TempDir tmp;
    Harness harness(tmp.path / "store");
    harness.mock->enqueue(core::Role::planning, "no block here, just vibes");
    harness.mock->enqueue(core::Role::planning, "still no block");
    harness.mock->enqueue(core::Role::skeleton, fenced(kGoodGame));
    harness.mock->enqueue(core::Role::feature, fenced(kGoodGame));
    harness.mock->enqueue(core::Role::visual, fenced(kGoodGame));
    harness.mock->enqueue(core::Role::evaluation, eval_json(6, 0.4, true));
    harness.mock->enqueue(core::Role::reflection, "VERDICT: STOP");
    harness.mock->enqueue(core::Role::formatting, fenced(kGoodGame));
    Pipeline pipe = harness.build();

    const GenerationResult result = pipe.generate({"planless", {}, {}});
    const store::LineageNode node = harness.store->load_node(result.lineage_id, result.node_id);
    CHECK(node.mechanic_plan.empty());
    std::size_t planning_calls = 0;
    for (const auto& request : harness.mock->requests()) {
        if (request.role == core::Role::planning) {
            ++planning_calls;
        }
    }
    CHECK(planning_calls == 2);
}

TEST_CASE("unparseable evaluation twice degrades to conservative defaults") {
    TempDir tmp;
    Harness harness(tmp.path / "store");
    harness.mock->enqueue(core::Role::planning, plan_text("wall jump | rebound | actions"));
    harness.mock->enqueue(core::Role::skeleton, fenced(kGoodGame));
    harness.mock->enqueue(core::Role::feature, fenced(kGoodGame));
    harness.mock->enqueue(core::Role::visual, fenced(kGoodGame));
    harness.mock->enqueue(core::Role::evaluation, "I simply adore this game!");
    harness.mock->enqueue(core::Role::evaluation, "Still prose, no JSON.");
    harness.mock->enqueue(core::Role::reflection, "VERDICT: STOP");
    harness.mock->enqueue(core::Role::formatting, fenced(kGoodGame));
    Pipeline pipe = harness.build();

    const GenerationResult result = pipe.generate({"evaluator down", {}, {}});
    const store::LineageNode node = harness.store->load_node(result.lineage_id, result.node_id);
    CHECK(node.evaluation.creativity_10 == 0.0);
    CHECK(node.evaluation.realized_mechanics.empty());
    // reward near the floor: no realization, no novelty, cosmetic penalty on
    CHECK(node.reward.signals.cosmetic_only_penalty == 1.0);
    CHECK(result.reward.final_reward < 0.2);
}

TEST_CASE("skeleton failure with no parent raises PipelineFailed and keeps a partial trace") {
    TempDir tmp;
    Harness harness(tmp.path / "store");
    harness.mock->enqueue(core::Role::planning, plan_text("wall jump | rebound | actions"));
    for (int i = 0; i < 4; ++i) {
        harness.mock->enqueue_failure(core::Role::skeleton);
    }
    Pipeline pipe = harness.build();

    std::string lineage_id = harness.store->create_lineage("doomed");
    CHECK_THROWS_AS(pipe.generate({"doomed", lineage_id, {}}), Error);

    std::size_t partials = 0;
    for (const auto& entry :
         fs::directory_iterator(harness.store->lineage_dir(lineage_id) / "trace")) {
        if (entry.path().filename().string().rfind("partial_", 0) == 0) {
            ++partials;
        }
    }
    CHECK(partials == 1);
}

TEST_CASE("generation stage fallback reuses the previous artifact") {
    TempDir tmp;
    Harness harness(tmp.path / "store");
    harness.mock->enqueue(core::Role::planning, plan_text("wall jump | rebound | actions"));
    harness.mock->enqueue(core::Role::skeleton, fenced(kGoodGame));
    for (int i = 0; i < 4; ++i) {
        harness.mock->enqueue_failure(core::Role::feature);
    }
    harness.mock->enqueue(core::Role::visual, "no document here, oops");
    harness.mock->enqueue(core::Role::evaluation, eval_json(6, 0.4, true));
    harness.mock->enqueue(core::Role::reflection, "VERDICT: STOP");
    harness.mock->enqueue(core::Role::formatting, "also garbage");
    Pipeline pipe = harness.build();

    const GenerationResult result = pipe.generate({"fallbacks", {}, {}});
    const store::LineageNode node = harness.store->load_node(result.lineage_id, result.node_id);
    // every later stage degraded, so the skeleton artifact survived to disk
    CHECK(node.artifact.title == "Mock Game");
    CHECK(node.validation.score == doctest::Approx(1.0));
}

TEST_CASE("browser check degrades gracefully when no driver is reachable") {
    TempDir tmp;
    Harness harness(tmp.path / "store");
    harness.script_happy_path(true);
    harness.config.browser_enabled = true;
    harness.config.browser_endpoint = "http://127.0.0.1:9";
    harness.config.browser_timeout_ms = 300;
    Pipeline pipe = harness.build();

    const GenerationResult result = pipe.generate({"no driver", {}, {}});
    const store::LineageNode node = harness.store->load_node(result.lineage_id, result.node_id);
    REQUIRE(node.validation.runtime.has_value());
    CHECK(node.validation.runtime->degraded);
    CHECK(node.reward.final_reward == doctest::Approx(node.reward.pre_gate_reward));
}

TEST_CASE("evolve computes the delta against the parent's realized mechanics") {
    TempDir tmp;
    Harness harness(tmp.path / "store");
    harness.script_happy_path(true);
    Pipeline pipe = harness.build();
    const GenerationResult v1 = pipe.generate({"root game", {}, {}});

    // child realizes dash (preserved) and drops echo trail, adds grapple
    harness.mock->enqueue(core::Role::planning,
                          plan_text("grapple hook | swing across gaps | actions"));
    harness.mock->enqueue(core::Role::skeleton, fenced(kGoodGame));
    harness.mock->enqueue(core::Role::feature, fenced(kGoodGame));
    harness.mock->enqueue(core::Role::visual, fenced(kGoodGame));
    {
        nlohmann::json doc = {
            {"creativity", 7},
            {"playability", 8},
            {"overall", 7},
            {"realized_mechanics",
             {{{"name", "dash"}, {"description", "burst of speed"}, {"layers", {"actions"}}},
              {{"name", "grapple hook"},
               {"description", "swing across gaps"},
               {"layers", {"actions"}}}}},
            {"realization", {{"dash", true}, {"grapple hook", true}}},
            {"structural_change", 0.6},
        };
        harness.mock->enqueue(core::Role::evaluation, doc.dump());
    }
    harness.mock->enqueue(core::Role::reflection, "VERDICT: STOP");
    harness.mock->enqueue(core::Role::formatting, fenced(kGoodGame));

    const GenerationResult v2 = pipe.generate({"child game", v1.lineage_id, v1.node_id});
    const store::LineageNode node = harness.store->load_node(v2.lineage_id, v2.node_id);
    REQUIRE(node.parent_id == v1.node_id);
    // parent realized {dash, echo trail}; child realized {dash, grapple hook}
    CHECK(node.mechanic_delta.preserved.size() == 1);
    CHECK(node.mechanic_delta.preserved[0].first.name == "dash");
    CHECK(node.mechanic_delta.removed.size() == 1);
    CHECK(node.mechanic_delta.removed[0].name == "echo trail");
    CHECK(node.mechanic_delta.added.size() == 1);
    CHECK(node.mechanic_delta.added[0].name == "grapple hook");

    const store::LineageTree tree = harness.store->load_tree(v2.lineage_id);
    CHECK(tree.nodes.size() == 2);
    CHECK(tree.depth() == 2);
}

TEST_CASE("unknown parent node fails fast") {
    TempDir tmp;
    Harness harness(tmp.path / "store");
    harness.script_happy_path(true);
    Pipeline pipe = harness.build();
    const std::string lineage_id = harness.store->create_lineage("x");
    CHECK_THROWS_AS(pipe.generate({"child", lineage_id, std::string("v7_none")}), Error);
}

TEST_CASE("lineage memory is isolated: a run never touches another lineage's store") {
    TempDir tmp;
    Harness harness(tmp.path / "store");
    harness.script_happy_path(true);
    Pipeline pipe = harness.build();
    const GenerationResult first = pipe.generate({"lineage one", {}, {}});

    const fs::path first_memory =
        harness.store->lineage_dir(first.lineage_id) / "memory.json";
    std::string before;
    {
        std::ifstream in(first_memory);
        before.assign(std::istreambuf_iterator<char>(in), {});
    }

    harness.script_happy_path(true);
    const GenerationResult second = pipe.generate({"lineage two", {}, {}});
    CHECK(second.lineage_id != first.lineage_id);

    std::string after;
    {
        std::ifstream in(first_memory);
        after.assign(std::istreambuf_iterator<char>(in), {});
    }
    CHECK(before == after);
    CHECK_FALSE(harness.store->load_memory(second.lineage_id).empty());
}

TEST_CASE("loop_should_stop truth table") {
    CHECK(loop_should_stop(3, 0.1, false, 3, 0.75));  // cap
    CHECK(loop_should_stop(1, 0.8, false, 3, 0.75));  // reward bar
    CHECK(loop_should_stop(1, 0.1, true, 3, 0.75));   // verdict
    CHECK_FALSE(loop_should_stop(1, 0.3, false, 3, 0.75));
}
