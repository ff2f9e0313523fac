#include "avocado/config.hpp"

#include <fstream>

#include <json.hpp>

namespace avocado {

namespace {

using nlohmann::json;

template <typename T>
void take(json& j, const char* key, T& out) {
    if (auto it = j.find(key); it != j.end()) {
        try {
            out = it->get<T>();
        } catch (const json::exception&) {
            throw DataError(std::string("config: bad value type for key '") + key + "'");
        }
        j.erase(it);
    }
}

}  // namespace

RunConfig parse_config_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw DataError(std::string("config: parse error: ") + e.what());
    }
    if (!j.is_object()) throw DataError("config: top level must be a JSON object");

    RunConfig c;
    take(j, "dt", c.params.dt);
    take(j, "eps_rbf", c.params.eps_rbf);
    take(j, "eps_user", c.params.eps_user);
    take(j, "eps_image", c.params.eps_image);
    take(j, "alpha_cn", c.params.alpha_cn);
    take(j, "gamma", c.params.gamma);
    take(j, "max_iter_landmark", c.params.max_iter_landmark);
    take(j, "max_iter_intensity", c.params.max_iter_intensity);
    take(j, "skip_rigid", c.params.skip_rigid);
    take(j, "skip_landmark", c.params.skip_landmark);
    take(j, "skip_intensity", c.params.skip_intensity);
    take(j, "mode", c.mode);
    take(j, "seed", c.seed);

    if (!j.empty())
        throw DataError("config: unknown key '" + j.begin().key() + "'");

    c.apply_mode();
    c.params.validate();
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("config: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_config_text(text);
}

std::string config_to_text(const RunConfig& config) {
    json j;
    j["dt"] = config.params.dt;
    j["eps_rbf"] = config.params.eps_rbf;
    j["eps_user"] = config.params.eps_user;
    j["eps_image"] = config.params.eps_image;
    j["alpha_cn"] = config.params.alpha_cn;
    j["gamma"] = config.params.gamma;
    j["max_iter_landmark"] = config.params.max_iter_landmark;
    j["max_iter_intensity"] = config.params.max_iter_intensity;
    j["skip_rigid"] = config.params.skip_rigid;
    j["skip_landmark"] = config.params.skip_landmark;
    j["skip_intensity"] = config.params.skip_intensity;
    j["mode"] = config.mode;
    j["seed"] = config.seed;
    return j.dump(2) + "\n";
}

void save_config(const RunConfig& config, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("config: cannot write " + path);
    out << config_to_text(config);
}

}  // namespace avocado
