// config.hpp - run configuration: flow tunables plus pipeline mode, stage
// toggles, and the reproducibility seed. JSON on disk; unknown keys rejected.
#pragma once

#include <cstdint>
#include <string>

#include "avocado/flow_params.hpp"

namespace avocado {

struct RunConfig {
    FlowParams params;
    // "volume-preserving" (alpha = 1), "unconstrained" (alpha = 0), or a path
    // to a scalar alpha(x) volume resolved at register time.
    std::string mode = "volume-preserving";
    std::uint64_t seed = 0;

    // Applies the mode to params.alpha_incomp for the constant cases. Field
    // modes are resolved by the caller, which owns file access.
    bool mode_is_field_path() const {
        return mode != "volume-preserving" && mode != "unconstrained";
    }
    void apply_mode() {
        if (mode == "volume-preserving")
            params.alpha_incomp = 1.0;
        else if (mode == "unconstrained")
            params.alpha_incomp = 0.0;
    }
};

RunConfig parse_config_text(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string config_to_text(const RunConfig& config);
void save_config(const RunConfig& config, const std::string& path);

}  // namespace avocado
