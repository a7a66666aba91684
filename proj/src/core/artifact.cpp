#include "gamesmith/core/artifact.hpp"

#include "gamesmith/common/text.hpp"

namespace gamesmith::core {

std::string extract_title(const std::string& html) {
    const std::string lowered = to_lower(html);
    const std::size_t open = lowered.find("<title");
    if (open == std::string::npos) {
        return "";
    }
    const std::size_t open_end = lowered.find('>', open);
    if (open_end == std::string::npos) {
        return "";
    }
    const std::size_t close = lowered.find("</title", open_end);
    if (close == std::string::npos) {
        return "";
    }
    return trim(html.substr(open_end + 1, close - open_end - 1));
}

GameArtifact GameArtifact::from_html(std::string html) {
    GameArtifact artifact;
    artifact.title = extract_title(html);
    artifact.byte_length = html.size();
    artifact.html = std::move(html);
    return artifact;
}

const char* role_name(Role role) {
    switch (role) {
    case Role::planning: return "planning";
    case Role::skeleton: return "skeleton";
    case Role::feature: return "feature";
    case Role::visual: return "visual";
    case Role::refinement: return "refinement";
    case Role::repair: return "repair";
    case Role::evaluation: return "evaluation";
    case Role::reflection: return "reflection";
    case Role::formatting: return "formatting";
    }
    return "unknown";
}

std::optional<Role> role_from_name(const std::string& name) {
    const std::string lowered = to_lower(trim(name));
    for (std::size_t i = 0; i < kRoleCount; ++i) {
        const Role role = static_cast<Role>(i);
        if (lowered == role_name(role)) {
            return role;
        }
    }
    return std::nullopt;
}

RoleProfile default_role_profile(Role role) {
    switch (role) {
    case Role::planning: return {role, 0.7, 12000};
    case Role::skeleton: return {role, 0.7, 4096};
    case Role::feature: return {role, 0.8, 16000};
    case Role::visual: return {role, 0.8, 20000};
    case Role::refinement: return {role, 0.7, 24000};
    case Role::repair: return {role, 0.3, 20000};
    case Role::evaluation: return {role, 0.2, 4000};
    case Role::reflection: return {role, 0.3, 3000};
    case Role::formatting: return {role, 0.2, 5000};
    }
    return {role, 0.7, 4096};
}

} // namespace gamesmith::core
