#include "gamesmith/cli/cli.hpp"

#include "gamesmith/browser/webdriver.hpp"
#include "gamesmith/cli/config.hpp"
#include "gamesmith/cli/report.hpp"
#include "gamesmith/common/errors.hpp"
#include "gamesmith/common/text.hpp"
#include "gamesmith/core/json.hpp"
#include "gamesmith/pipeline/pipeline.hpp"
#include "gamesmith/store/lineage_store.hpp"

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

namespace gamesmith::cli {

namespace {

std::shared_ptr<llm::Gateway> build_gateway(const CliConfig& cfg) {
    std::shared_ptr<llm::Provider> primary;
    std::shared_ptr<llm::Provider> fallback;
    if (!cfg.mock_script.empty()) {
        primary = llm::MockProvider::from_script_file(cfg.mock_script);
    } else if (!cfg.provider_url.empty()) {
        llm::HttpProviderConfig http;
        http.url = cfg.provider_url;
        http.model = cfg.provider_model;
        if (const char* key = std::getenv(cfg.api_key_env.c_str())) {
            http.api_key = key;
        }
        primary = std::make_shared<llm::HttpProvider>(http);
        if (!cfg.fallback_url.empty()) {
            llm::HttpProviderConfig fb = http;
            fb.url = cfg.fallback_url;
            fb.model = cfg.fallback_model.empty() ? cfg.provider_model : cfg.fallback_model;
            fallback = std::make_shared<llm::HttpProvider>(fb);
        }
    } else {
        throw Error(ErrorCode::config_invalid,
                    "no provider configured: set provider.url or provider.mock_script");
    }
    return std::make_shared<llm::Gateway>(primary, fallback, cfg.retry, cfg.roles);
}

pipeline::PipelineConfig pipeline_config(const CliConfig& cfg) {
    pipeline::PipelineConfig pc = cfg.pipeline;
    pc.browser_enabled = cfg.browser.enabled;
    pc.browser_endpoint = cfg.browser.endpoint;
    pc.browser_timeout_ms = cfg.browser.timeout_ms;
    return pc;
}

void print_reward_table(std::ostream& out, const reward::RewardBreakdown& reward) {
    struct Row {
        const char* name;
        double value;
        double weight;
        double term;
    };
    const auto& s = reward.signals;
    const auto& t = reward.weighted_terms;
    const Row rows[] = {
        {"mechanic_realization", s.mechanic_realization, 0.20, t[0]},
        {"structural_mechanic_change", s.structural_mechanic_change, 0.25, t[1]},
        {"relative_mechanic_novelty", s.relative_mechanic_novelty, 0.20, t[2]},
        {"llm_creativity", s.llm_creativity, 0.15, t[3]},
        {"runtime_playability", s.runtime_playability, 0.10, t[4]},
        {"cosmetic_only_penalty", s.cosmetic_only_penalty, -0.15, t[5]},
        {"regression_penalty", s.regression_penalty, -0.10, t[6]},
    };
    out << std::left << std::setw(28) << "signal" << std::right << std::setw(10) << "value"
        << std::setw(10) << "weight" << std::setw(12) << "term" << '\n';
    out << std::string(60, '-') << '\n';
    out << std::fixed << std::setprecision(4);
    for (const Row& row : rows) {
        out << std::left << std::setw(28) << row.name << std::right << std::setw(10) << row.value
            << std::setw(10) << row.weight << std::setw(12) << row.term << '\n';
    }
    out << std::string(60, '-') << '\n';
    out << std::left << std::setw(28) << "pre-gate reward" << std::right << std::setw(32)
        << reward.pre_gate_reward << '\n';
    out << std::left << std::setw(28) << "soft gate (x0.25)" << std::right << std::setw(32)
        << (reward.soft_gate_applied ? "applied" : "-") << '\n';
    out << std::left << std::setw(28) << "hard gate (x0.5)" << std::right << std::setw(32)
        << (reward.hard_gate_applied ? "applied" : "-") << '\n';
    out << std::left << std::setw(28) << "final reward" << std::right << std::setw(32)
        << reward.final_reward << '\n';
    out.unsetf(std::ios::fixed);
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::not_found, "cannot read " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"mechanic-aware iterative generation of single-file canvas games"};
    app.name("gamesmith");
    app.require_subcommand(0, 1);

    std::string config_path;
    std::string store_flag;
    std::string mock_flag;
    std::int64_t seed_flag = -1;
    app.add_option("--config", config_path, "JSON config file (or $GAMESMITH_CONFIG)");
    app.add_option("--store", store_flag, "store root directory (overrides config)");
    app.add_option("--mock-script", mock_flag, "scripted mock provider JSON (overrides config)");
    app.add_option("--seed", seed_flag, "id-generation seed (overrides config)");

    // new
    auto* cmd_new = app.add_subcommand("new", "create a lineage and generate its first version");
    std::string new_prompt;
    cmd_new->add_option("--prompt", new_prompt, "design brief")->required();

    // evolve
    auto* cmd_evolve = app.add_subcommand("evolve", "generate a child version of a saved node");
    std::string evolve_lineage, evolve_node, evolve_prompt;
    cmd_evolve->add_option("--lineage", evolve_lineage, "lineage id")->required();
    cmd_evolve->add_option("--node", evolve_node, "parent node id")->required();
    cmd_evolve->add_option("--prompt", evolve_prompt, "design brief for the child")->required();

    // show
    auto* cmd_show = app.add_subcommand("show", "print tree/node/reward/trace records");
    std::string show_what, show_lineage, show_node;
    cmd_show->add_option("what", show_what, "one of: tree, node, reward, trace")->required();
    cmd_show->add_option("--lineage", show_lineage, "lineage id")->required();
    cmd_show->add_option("--node", show_node, "node id (for node/reward/trace)");

    // validate
    auto* cmd_validate = app.add_subcommand("validate", "run the static analyzer on a game file");
    std::string validate_file;
    bool validate_browser = false;
    cmd_validate->add_option("file", validate_file, "single-file game document")->required();
    cmd_validate->add_flag("--browser", validate_browser, "also run the browser execution check");

    // archive
    auto* cmd_archive = app.add_subcommand("archive", "query the global mechanic archive");
    auto* cmd_archive_query = cmd_archive->add_subcommand("query", "planner-style archive query");
    std::string archive_prompt;
    std::size_t archive_k = 0;
    cmd_archive_query->add_option("--prompt", archive_prompt, "query text")->required();
    cmd_archive_query->add_option("--k", archive_k, "relevant-list size (default: memory top_k)");
    auto* cmd_archive_stats = cmd_archive->add_subcommand("stats", "archive usage statistics");

    // report
    auto* cmd_report = app.add_subcommand("report", "write a static HTML lineage report");
    std::string report_lineage, report_output;
    cmd_report->add_option("--lineage", report_lineage, "lineage id")->required();
    cmd_report->add_option("-o,--output", report_output, "output HTML file")->required();

    // stats
    auto* cmd_stats = app.add_subcommand("stats", "store-wide statistics");

    std::vector<const char*> argv;
    argv.push_back("gamesmith");
    for (const auto& arg : args) {
        argv.push_back(arg.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        err << app.help();
        return 2;
    }

    if (app.get_subcommands().empty()) {
        out << app.help();
        return 2;
    }

    try {
        CliConfig cfg = load_config(config_path.empty() ? std::nullopt
                                                        : std::make_optional(config_path));
        if (!store_flag.empty()) {
            cfg.store_root = store_flag;
        }
        if (!mock_flag.empty()) {
            cfg.mock_script = mock_flag;
        }
        if (seed_flag >= 0) {
            cfg.seed = static_cast<std::uint64_t>(seed_flag);
        }
        auto store = std::make_shared<store::LineageStore>(cfg.store_root, cfg.seed);

        if (cmd_new->parsed() || cmd_evolve->parsed()) {
            auto gateway = build_gateway(cfg);
            pipeline::Pipeline pipe(gateway, store, pipeline_config(cfg));
            pipeline::GenerationRequest request;
            if (cmd_new->parsed()) {
                request.prompt = new_prompt;
            } else {
                request.prompt = evolve_prompt;
                request.lineage_id = evolve_lineage;
                request.parent_node_id = evolve_node;
            }
            const pipeline::GenerationResult result = pipe.generate(request);
            nlohmann::json output = {{"lineage_id", result.lineage_id},
                                     {"node_id", result.node_id},
                                     {"final_reward", result.reward.final_reward},
                                     {"iterations_used", result.iterations_used}};
            out << output.dump(2) << '\n';
            return 0;
        }

        if (cmd_show->parsed()) {
            if (show_what == "tree") {
                out << nlohmann::json(store->load_tree(show_lineage)).dump(2) << '\n';
                return 0;
            }
            if (show_node.empty()) {
                err << "show " << show_what << " requires --node\n";
                return 2;
            }
            if (show_what == "node") {
                out << nlohmann::json(store->load_node(show_lineage, show_node)).dump(2) << '\n';
            } else if (show_what == "reward") {
                const store::LineageNode node = store->load_node(show_lineage, show_node);
                print_reward_table(out, node.reward);
            } else if (show_what == "trace") {
                out << store->load_trace(show_lineage, show_node).dump(2) << '\n';
            } else {
                err << "unknown show target \"" << show_what << "\"\n";
                return 2;
            }
            return 0;
        }

        if (cmd_validate->parsed()) {
            const std::string html = read_text_file(validate_file);
            analysis::ValidationReport report = analysis::analyze(html);
            if (validate_browser) {
                try {
                    report.runtime = browser::run_browser_check(
                        core::GameArtifact::from_html(html), cfg.browser.endpoint,
                        cfg.browser.timeout_ms);
                } catch (const Error& e) {
                    browser::RuntimeResult degraded;
                    degraded.degraded = true;
                    report.runtime = degraded;
                    err << "browser check unavailable, static analysis only: " << e.what() << '\n';
                }
            }
            out << nlohmann::json(report).dump(2) << '\n';
            return report.error_count > 0 ? 1 : 0;
        }

        if (cmd_archive_query->parsed()) {
            memory::MemoryConfig mc = cfg.pipeline.memory;
            if (archive_k > 0) {
                mc.top_k = archive_k;
            }
            const memory::ArchiveQueryResult result =
                memory::archive_query(store->load_archive(), tokenize(archive_prompt), mc);
            nlohmann::json output = {{"relevant", result.relevant},
                                     {"underexplored", result.underexplored},
                                     {"overused", result.overused},
                                     {"forbidden", result.forbidden}};
            out << output.dump(2) << '\n';
            return 0;
        }
        if (cmd_archive_stats->parsed()) {
            const memory::MechanicArchive archive = store->load_archive();
            std::size_t total_usage = 0;
            std::size_t forbidden = 0;
            double reward_sum = 0.0;
            for (const auto& entry : archive.entries) {
                total_usage += entry.usage_count;
                forbidden += entry.forbidden ? 1 : 0;
                reward_sum += entry.mean_reward;
            }
            nlohmann::json output = {
                {"entries", archive.entries.size()},
                {"total_usage", total_usage},
                {"forbidden_count", forbidden},
                {"mean_reward_avg",
                 archive.entries.empty() ? 0.0
                                         : reward_sum / static_cast<double>(archive.entries.size())}};
            out << output.dump(2) << '\n';
            return 0;
        }
        if (cmd_archive->parsed()) {
            err << "archive needs a subcommand: query or stats\n";
            return 2;
        }

        if (cmd_report->parsed()) {
            const store::LineageTree tree = store->load_tree(report_lineage);
            std::map<std::string, store::LineageNode> nodes;
            for (const auto& [node_id, edges] : tree.nodes) {
                nodes[node_id] = store->load_node(report_lineage, node_id);
            }
            const std::string html = render_report(tree, nodes);
            std::ofstream file(report_output);
            if (!file) {
                throw Error(ErrorCode::store_unwritable, "cannot write " + report_output);
            }
            file << html;
            err << "report written to " << report_output << '\n';
            return 0;
        }

        if (cmd_stats->parsed()) {
            out << nlohmann::json(store->stats()).dump(2) << '\n';
            return 0;
        }
    } catch (const Error& e) {
        err << "error (" << error_code_name(e.code()) << "): " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

} // namespace gamesmith::cli
