#include "epinet/io/params.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <vector>

#include "epinet/io/run_config.hpp"

namespace epinet::io {
namespace {

using nlohmann::json;

struct TensorRef {
    std::string name;
    std::vector<int> shape;
    std::vector<float>* values;
};

std::vector<TensorRef> tensor_table(model::Epinet& net) {
    std::vector<TensorRef> out;
    for (auto* p : net.parameters()) out.push_back({p->name, p->shape, &p->value});
    for (auto* bn : net.batch_norms()) {
        const int c = static_cast<int>(bn->running_mean.size());
        out.push_back({bn->gamma.name.substr(0, bn->gamma.name.rfind('.')) + ".running_mean", {c}, &bn->running_mean});
        out.push_back({bn->gamma.name.substr(0, bn->gamma.name.rfind('.')) + ".running_var", {c}, &bn->running_var});
    }
    return out;
}

void put_u32(std::string& s, std::uint32_t v) {
    for (int k = 0; k < 4; ++k) s.push_back(static_cast<char>((v >> (8 * k)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

struct Container {
    json header;
    std::string payload;
};

Container read_container(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string bytes = ss.str();
    if (bytes.size() < 16 || std::memcmp(bytes.data(), kParamsMagic, 8) != 0) {
        throw ParseError(path.string() + ": not a parameter container");
    }
    const auto* u = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint32_t version = get_u32(u + 8);
    if (version != kParamsVersion) {
        throw ParseError(path.string() + ": unsupported container version " + std::to_string(version));
    }
    const std::uint32_t hlen = get_u32(u + 12);
    if (bytes.size() < 16 + static_cast<std::size_t>(hlen)) throw ParseError(path.string() + ": truncated header");
    Container c;
    try {
        c.header = json::parse(bytes.begin() + 16, bytes.begin() + 16 + hlen);
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": malformed header: " + e.what());
    }
    c.payload = bytes.substr(16 + hlen);
    return c;
}

model::EpinetConfig config_of(const json& header) {
    try {
        return config_from_json(header.at("config"));
    } catch (const json::exception& e) {
        throw ParseError(std::string("parameter header lacks a valid config: ") + e.what());
    }
}

}  // namespace

void save_params(const std::filesystem::path& path, model::Epinet& net) {
    const auto table = tensor_table(net);
    json header;
    header["config"] = config_to_json(net.config());
    header["tensors"] = json::array();
    for (const auto& t : table) header["tensors"].push_back({{"name", t.name}, {"shape", t.shape}});
    const std::string htext = header.dump();
    std::string out(kParamsMagic, 8);
    put_u32(out, kParamsVersion);
    put_u32(out, static_cast<std::uint32_t>(htext.size()));
    out += htext;
    for (const auto& t : table)
        for (float v : *t.values) put_u32(out, std::bit_cast<std::uint32_t>(v));
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string() + " for writing");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("failed writing " + path.string());
}

model::EpinetConfig read_params_config(const std::filesystem::path& path) {
    return config_of(read_container(path).header);
}

void load_params(const std::filesystem::path& path, model::Epinet& net) {
    const Container c = read_container(path);
    const auto table = tensor_table(net);
    const json* tensors = nullptr;
    try {
        tensors = &c.header.at("tensors");
    } catch (const json::exception&) {
        throw ParseError(path.string() + ": header lacks a tensor table");
    }
    if (!tensors->is_array()) throw ParseError(path.string() + ": tensor table is not an array");
    for (std::size_t i = 0; i < table.size(); ++i) {
        if (i >= tensors->size()) throw ConfigError("parameter file lacks layer " + table[i].name);
        const json& entry = (*tensors)[i];
        std::string name;
        std::vector<int> shape;
        try {
            name = entry.at("name").get<std::string>();
            shape = entry.at("shape").get<std::vector<int>>();
        } catch (const json::exception&) {
            throw ParseError(path.string() + ": malformed tensor entry " + std::to_string(i));
        }
        if (name != table[i].name || shape != table[i].shape) {
            std::string have, want;
            for (int d : shape) have += (have.empty() ? "" : "x") + std::to_string(d);
            for (int d : table[i].shape) want += (want.empty() ? "" : "x") + std::to_string(d);
            throw ConfigError("shape mismatch at layer " + table[i].name + ": file has " + name + " [" + have +
                              "], network expects [" + want + "]");
        }
    }
    if (tensors->size() != table.size()) {
        throw ConfigError("parameter file has " + std::to_string(tensors->size()) + " tensors, network expects " +
                          std::to_string(table.size()));
    }
    std::size_t total = 0;
    for (const auto& t : table) total += t.values->size();
    if (c.payload.size() != 4 * total) {
        throw ParseError(path.string() + ": payload holds " + std::to_string(c.payload.size()) + " bytes, expected " +
                         std::to_string(4 * total));
    }
    const auto* p = reinterpret_cast<const unsigned char*>(c.payload.data());
    for (const auto& t : table) {
        for (float& v : *t.values) {
            v = std::bit_cast<float>(get_u32(p));
            p += 4;
        }
    }
}

model::Epinet load_model(const std::filesystem::path& path) {
    model::Epinet net(read_params_config(path));
    load_params(path, net);
    return net;
}

}  // namespace epinet::io
