#include "gamesmith/pipeline/parsers.hpp"

#include "gamesmith/common/errors.hpp"

#include <doctest.h>

using namespace gamesmith;
using namespace gamesmith::pipeline;

TEST_CASE("parse_mechanic_plan reads the fenced block grammar") {
    const std::string text =
        "Plan prose first.\n```\nCURRENT_MECHANIC_SET\n"
        "PRESERVE: dash\n"
        "ADD: wall-jump | rebound off walls | actions\n"
        "REMOVE: none\n"
        "RECOMBINE: dash + wall-jump | momentum chains\n```\ntrailing prose";
    const core::MechanicPlan plan = parse_mechanic_plan(text);
    REQUIRE(plan.preserve.size() == 1);
    CHECK(plan.preserve[0] == "dash");
    REQUIRE(plan.add.size() == 1);
    CHECK(plan.add[0].name == "wall-jump");
    CHECK(plan.add[0].description == "rebound off walls");
    CHECK(plan.add[0].delta_layers.count(core::StructureLayer::actions) == 1);
    CHECK(plan.remove.empty()); // "none" filtered
    REQUIRE(plan.recombine.size() == 1);
    CHECK(plan.recombine[0].description == "momentum chains");
}

TEST_CASE("parse_mechanic_plan accepts the header on the fence line") {
    const std::string text = "```CURRENT_MECHANIC_SET\nPRESERVE: dash\nADD: \nREMOVE: \n"
                             "RECOMBINE: \n```";
    const core::MechanicPlan plan = parse_mechanic_plan(text);
    CHECK(plan.preserve == std::vector<std::string>{"dash"});
}

TEST_CASE("duplicate names keep the first occurrence") {
    const std::string text = "```\nCURRENT_MECHANIC_SET\nPRESERVE: dash; dash; Dash\n"
                             "ADD: dash | again | actions\nREMOVE: dash\nRECOMBINE: \n```";
    const core::MechanicPlan plan = parse_mechanic_plan(text);
    CHECK(plan.preserve == std::vector<std::string>{"dash"});
    CHECK(plan.add.empty());    // name already claimed by preserve
    CHECK(plan.remove.empty()); // likewise
}

TEST_CASE("missing block raises MissingMechanicSet") {
    CHECK_THROWS_AS(parse_mechanic_plan("no fences at all"), Error);
    CHECK_THROWS_AS(parse_mechanic_plan("```\njust code\n```"), Error);
    try {
        parse_mechanic_plan("nope");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::missing_mechanic_set);
    }
}

TEST_CASE("contract rendering round-trips through the parser") {
    core::MechanicPlan plan;
    plan.preserve = {"dash", "shield"};
    core::MechanicDescriptor add;
    add.id = "echo-trail";
    add.name = "echo trail";
    add.description = "afterimages replay your path";
    add.delta_layers = {core::StructureLayer::observation, core::StructureLayer::transition};
    plan.add = {add};
    plan.remove = {"stale ladder"};
    plan.recombine = {{"dash", "echo trail", "dashes leave echoes"}};

    const std::string contract = render_mechanic_contract(plan);
    const core::MechanicPlan round = parse_mechanic_plan(contract);
    CHECK(round.preserve == plan.preserve);
    REQUIRE(round.add.size() == 1);
    CHECK(round.add[0].name == "echo trail");
    CHECK(round.add[0].delta_layers == add.delta_layers);
    CHECK(round.remove == plan.remove);
    REQUIRE(round.recombine.size() == 1);
    CHECK(round.recombine[0].first == "dash");
    CHECK(round.recombine[0].second == "echo trail");
}

TEST_CASE("parse_evaluation extracts the first matching JSON object") {
    std::vector<std::string> warnings;
    const std::string text =
        "Notes {not json} and then:\n"
        "{\"creativity\": 7, \"playability\": 6, \"overall\": 6,\n"
        " \"realized_mechanics\": [{\"name\": \"dash\", \"layers\": [\"actions\"]}],\n"
        " \"realization\": {\"dash\": true}, \"structural_change\": 0.4}";
    const core::EvaluationReport report = parse_evaluation(text, &warnings);
    CHECK(report.creativity_10 == doctest::Approx(7.0));
    CHECK(report.playability_10 == doctest::Approx(6.0));
    CHECK(report.structural_change_score == doctest::Approx(0.4));
    REQUIRE(report.realized_mechanics.size() == 1);
    CHECK(report.realized_mechanics[0].name == "dash");
    CHECK(report.realization_flags.at("dash"));
    CHECK_FALSE(report.meaningful_play_asserted.has_value());
}

TEST_CASE("out-of-range scores clamp with a warning") {
    std::vector<std::string> warnings;
    const std::string text = "{\"creativity\": 12, \"playability\": -3, \"overall\": 5, "
                             "\"realized_mechanics\": [], \"structural_change\": 2.0}";
    const core::EvaluationReport report = parse_evaluation(text, &warnings);
    CHECK(report.creativity_10 == 10.0);
    CHECK(report.playability_10 == 0.0);
    CHECK(report.structural_change_score == 1.0);
    CHECK(warnings.size() == 3);
}

TEST_CASE("prose with no JSON raises EvaluationUnparseable") {
    CHECK_THROWS_AS(parse_evaluation("a lovely game, ten out of ten"), Error);
    // JSON missing required keys also fails
    CHECK_THROWS_AS(parse_evaluation("{\"creativity\": 7}"), Error);
}

TEST_CASE("extract_final_html prefers a fenced full document") {
    const std::string doc = "<!DOCTYPE html><html><body>x</body></html>";
    const core::GameArtifact fenced =
        extract_final_html("intro\n```html\n" + doc + "\n```\nbye", nullptr);
    CHECK(fenced.html == doc);

    // bare document span
    const core::GameArtifact bare =
        extract_final_html("prose before " + doc + " prose after", nullptr);
    CHECK(bare.html == doc);

    // fallback to last good
    const core::GameArtifact last_good = core::GameArtifact::from_html(doc);
    std::vector<std::string> warnings;
    const core::GameArtifact kept = extract_final_html("no document here", &last_good, &warnings);
    CHECK(kept.html == doc);
    CHECK(warnings.size() == 1);

    CHECK_THROWS_AS(extract_final_html("nothing", nullptr), Error);
}

TEST_CASE("reflection parsing: verdicts and memory payloads") {
    const ReflectionOutcome stop = parse_reflection("VERDICT: STOP\nMEMORY: lesson | detail");
    CHECK(stop.stop);
    CHECK(stop.parsed);
    REQUIRE(stop.memory_payload.size() == 1);
    CHECK(stop.memory_payload[0].first == "lesson");
    CHECK(stop.memory_payload[0].second == "detail");

    const ReflectionOutcome go = parse_reflection("verdict: continue, more polish possible");
    CHECK_FALSE(go.stop);
    CHECK(go.parsed);

    const ReflectionOutcome vague = parse_reflection("hard to say anything definitive");
    CHECK_FALSE(vague.stop); // defaults to continue
    CHECK_FALSE(vague.parsed);

    const ReflectionOutcome bare = parse_reflection("I think we should STOP here.");
    CHECK(bare.stop);
}
