#include "gamesmith/cli/report.hpp"

#include "gamesmith/common/errors.hpp"

#include <cmath>
#include <sstream>

namespace gamesmith::cli {

namespace {

std::string escape_html(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out.push_back(c);
        }
    }
    return out;
}

void render_bar(std::ostream& out, const char* label, double value, double weight) {
    const double magnitude = std::fabs(value * weight);
    const int width = static_cast<int>(std::round(magnitude / 0.25 * 140.0));
    out << "<div class=\"bar-row\"><span class=\"bar-label\">" << label << "</span>"
        << "<span class=\"bar " << (weight < 0 ? "neg" : "pos") << "\" style=\"width:"
        << width << "px\"></span><span class=\"bar-value\">" << value << "</span></div>\n";
}

void render_mechanic_list(std::ostream& out, const char* title,
                          const std::vector<core::MechanicDescriptor>& mechanics) {
    if (mechanics.empty()) {
        return;
    }
    out << "<div class=\"delta-group\"><strong>" << title << ":</strong> ";
    for (std::size_t i = 0; i < mechanics.size(); ++i) {
        if (i > 0) out << ", ";
        out << escape_html(mechanics[i].name);
    }
    out << "</div>\n";
}

void render_pair_list(std::ostream& out, const char* title,
                      const std::vector<core::MechanicPair>& pairs) {
    if (pairs.empty()) {
        return;
    }
    out << "<div class=\"delta-group\"><strong>" << title << ":</strong> ";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (i > 0) out << ", ";
        out << escape_html(pairs[i].first.name) << " &rarr; " << escape_html(pairs[i].second.name);
    }
    out << "</div>\n";
}

void render_node(std::ostream& out, const store::LineageTree& tree,
                 const std::map<std::string, store::LineageNode>& nodes,
                 const std::string& node_id) {
    out << "<li>\n";
    auto it = nodes.find(node_id);
    if (it == nodes.end()) {
        out << "<div class=\"node\"><h3>" << escape_html(node_id)
            << "</h3><p>node record missing</p></div>\n";
    } else {
        const store::LineageNode& node = it->second;
        const reward::RewardBreakdown& reward = node.reward;
        out << "<div class=\"node\" id=\"" << escape_html(node_id) << "\">\n";
        out << "<h3>" << escape_html(node_id);
        if (!node.artifact.title.empty()) {
            out << " — " << escape_html(node.artifact.title);
        }
        out << "</h3>\n";
        out << "<p class=\"meta\">iterations " << node.iterations_used << " · validation "
            << node.validation.score << " · final reward <strong>" << reward.final_reward
            << "</strong>";
        if (reward.soft_gate_applied) {
            out << " <span class=\"gate soft\">soft gate ×0.25</span>";
        }
        if (reward.hard_gate_applied) {
            out << " <span class=\"gate hard\">hard gate ×0.5</span>";
        }
        out << "</p>\n<div class=\"bars\">\n";
        render_bar(out, "mechanic realization", reward.signals.mechanic_realization, 0.20);
        render_bar(out, "structural change", reward.signals.structural_mechanic_change, 0.25);
        render_bar(out, "novelty", reward.signals.relative_mechanic_novelty, 0.20);
        render_bar(out, "llm creativity", reward.signals.llm_creativity, 0.15);
        render_bar(out, "runtime playability", reward.signals.runtime_playability, 0.10);
        render_bar(out, "cosmetic-only penalty", reward.signals.cosmetic_only_penalty, -0.15);
        render_bar(out, "regression penalty", reward.signals.regression_penalty, -0.10);
        out << "</div>\n";
        render_mechanic_list(out, "added", node.mechanic_delta.added);
        render_mechanic_list(out, "removed", node.mechanic_delta.removed);
        render_pair_list(out, "modified", node.mechanic_delta.modified);
        render_pair_list(out, "preserved", node.mechanic_delta.preserved);
        out << "</div>\n";
    }
    auto edges = tree.nodes.find(node_id);
    if (edges != tree.nodes.end() && !edges->second.child_ids.empty()) {
        out << "<ul>\n";
        for (const auto& child : edges->second.child_ids) {
            render_node(out, tree, nodes, child);
        }
        out << "</ul>\n";
    }
    out << "</li>\n";
}

} // namespace

std::string render_report(const store::LineageTree& tree,
                          const std::map<std::string, store::LineageNode>& nodes) {
    if (!tree.root_id || tree.nodes.empty()) {
        throw Error(ErrorCode::empty_lineage, "lineage " + tree.lineage_id + " has no nodes");
    }
    std::ostringstream out;
    out << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
    out << "<title>lineage " << escape_html(tree.lineage_id) << "</title>\n<style>\n"
        << "body{font-family:system-ui,sans-serif;margin:2rem;color:#1c2733;}\n"
        << "ul{list-style:none;border-left:2px solid #b9c6d2;margin-left:1rem;"
        << "padding-left:1.5rem;}\n"
        << ".node{border:1px solid #d4dde5;border-radius:8px;padding:0.8rem 1rem;"
        << "margin:0.6rem 0;max-width:46rem;background:#fbfdff;}\n"
        << ".meta{color:#49606f;font-size:0.9rem;}\n"
        << ".gate{border-radius:4px;padding:0 0.4rem;font-size:0.8rem;color:#fff;}\n"
        << ".gate.soft{background:#c27d0e;} .gate.hard{background:#b33a3a;}\n"
        << ".bar-row{display:flex;align-items:center;gap:0.5rem;font-size:0.82rem;}\n"
        << ".bar-label{width:11rem;color:#41525f;} .bar{height:9px;border-radius:3px;"
        << "display:inline-block;}\n"
        << ".bar.pos{background:#4d7fb3;} .bar.neg{background:#c26565;}\n"
        << ".bar-value{color:#6a7a86;}\n"
        << ".delta-group{font-size:0.85rem;margin-top:0.25rem;}\n"
        << "</style>\n</head>\n<body>\n";
    out << "<h1>Lineage " << escape_html(tree.lineage_id) << "</h1>\n";
    if (!tree.prompt.empty()) {
        out << "<p class=\"meta\">prompt: " << escape_html(tree.prompt) << "</p>\n";
    }
    out << "<ul class=\"tree\">\n";
    render_node(out, tree, nodes, *tree.root_id);
    out << "</ul>\n</body>\n</html>\n";
    return out.str();
}

} // namespace gamesmith::cli
