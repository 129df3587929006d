#include "epinet/io/run_config.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace epinet::io {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const char* first = value.data();
    const char* last = value.data() + value.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last) throw ConfigError("bad value for " + key + ": '" + value + "'");
    return out;
}

std::string format_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

std::map<std::string, std::string> parse_key_values(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        out[key] = value;
    }
    return out;
}

void apply_key_values(RunConfig& cfg, const std::map<std::string, std::string>& pairs) {
    for (const auto& [key, value] : pairs) {
        auto& n = cfg.net;
        if (key == "angular_extent") n.angular_extent = parse_number<int>(key, value);
        else if (key == "patch_size") n.patch = parse_number<int>(key, value);
        else if (key == "stream_width") n.stream_width = parse_number<int>(key, value);
        else if (key == "merge_width") n.merge_width = parse_number<int>(key, value);
        else if (key == "n_streams") n.n_streams = parse_number<int>(key, value);
        else if (key == "stream_blocks") n.stream_blocks = parse_number<int>(key, value);
        else if (key == "merge_blocks") n.merge_blocks = parse_number<int>(key, value);
        else if (key == "disparity_range") n.disparity_range = parse_number<float>(key, value);
        else if (key == "bn_momentum") n.bn_momentum = parse_number<double>(key, value);
        else if (key == "bn_epsilon") n.bn_epsilon = parse_number<double>(key, value);
        else if (key == "lr") cfg.lr = parse_number<double>(key, value);
        else if (key == "lr_final") cfg.lr_final = parse_number<double>(key, value);
        else if (key == "lr_decay_at") cfg.lr_decay_at = parse_number<double>(key, value);
        else if (key == "batch") cfg.batch = parse_number<int>(key, value);
        else if (key == "iters") cfg.iters = parse_number<int>(key, value);
        else if (key == "patches") cfg.patches = parse_number<int>(key, value);
        else if (key == "log_every") cfg.log_every = parse_number<int>(key, value);
        else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
        else throw ConfigError("unknown config key '" + key + "'");
    }
}

RunConfig load_run_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    RunConfig cfg;
    apply_key_values(cfg, parse_key_values(ss.str()));
    return cfg;
}

std::string to_key_values(const RunConfig& cfg) {
    std::ostringstream os;
    const auto& n = cfg.net;
    os << "angular_extent = " << n.angular_extent << "\n"
       << "patch_size = " << n.patch << "\n"
       << "stream_width = " << n.stream_width << "\n"
       << "merge_width = " << n.merge_width << "\n"
       << "n_streams = " << n.n_streams << "\n"
       << "stream_blocks = " << n.stream_blocks << "\n"
       << "merge_blocks = " << n.merge_blocks << "\n"
       << "disparity_range = " << format_double(n.disparity_range) << "\n"
       << "bn_momentum = " << format_double(n.bn_momentum) << "\n"
       << "bn_epsilon = " << format_double(n.bn_epsilon) << "\n"
       << "lr = " << format_double(cfg.lr) << "\n"
       << "lr_final = " << format_double(cfg.lr_final) << "\n"
       << "lr_decay_at = " << format_double(cfg.lr_decay_at) << "\n"
       << "batch = " << cfg.batch << "\n"
       << "iters = " << cfg.iters << "\n"
       << "patches = " << cfg.patches << "\n"
       << "log_every = " << cfg.log_every << "\n"
       << "seed = " << cfg.seed << "\n";
    return os.str();
}

void validate(const RunConfig& cfg) {
    cfg.net.validate();
    if (!(cfg.lr > 0.0) || !(cfg.lr_final > 0.0)) throw ConfigError("learning rates must be positive");
    if (cfg.lr_decay_at < 0.0 || cfg.lr_decay_at > 1.0) throw ConfigError("lr_decay_at must lie in [0, 1]");
    if (cfg.batch < 1) throw ConfigError("batch must be at least 1");
    if (cfg.iters < 0) throw ConfigError("iters must be non-negative");
    if (cfg.patches < 1) throw ConfigError("patches must be at least 1");
    if (cfg.log_every < 1) throw ConfigError("log_every must be at least 1");
}

nlohmann::json config_to_json(const model::EpinetConfig& c) {
    return {{"n_streams", c.n_streams},         {"angular_extent", c.angular_extent},
            {"stream_blocks", c.stream_blocks}, {"merge_blocks", c.merge_blocks},
            {"stream_width", c.stream_width},   {"merge_width", c.merge_width},
            {"patch", c.patch},                 {"disparity_range", c.disparity_range},
            {"bn_momentum", c.bn_momentum},     {"bn_epsilon", c.bn_epsilon}};
}

model::EpinetConfig config_from_json(const nlohmann::json& j) {
    model::EpinetConfig c;
    c.n_streams = j.at("n_streams").get<int>();
    c.angular_extent = j.at("angular_extent").get<int>();
    c.stream_blocks = j.at("stream_blocks").get<int>();
    c.merge_blocks = j.at("merge_blocks").get<int>();
    c.stream_width = j.at("stream_width").get<int>();
    c.merge_width = j.at("merge_width").get<int>();
    c.patch = j.at("patch").get<int>();
    c.disparity_range = j.at("disparity_range").get<float>();
    c.bn_momentum = j.at("bn_momentum").get<double>();
    c.bn_epsilon = j.at("bn_epsilon").get<double>();
    return c;
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
    return {{"net", config_to_json(cfg.net)}, {"lr", cfg.lr},           {"lr_final", cfg.lr_final},
            {"lr_decay_at", cfg.lr_decay_at}, {"batch", cfg.batch},     {"iters", cfg.iters},
            {"patches", cfg.patches},         {"log_every", cfg.log_every}, {"seed", cfg.seed}};
}

}  // namespace epinet::io
