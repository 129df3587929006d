#include "epinet/cli/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

#include "epinet/error.hpp"

namespace epinet::cli {

std::string blob_hash(const std::string& content) {
    const std::string header = "blob " + std::to_string(content.size()) + std::string(1, '\0');
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha1(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), header.data(), header.size()) != 1 ||
        EVP_DigestUpdate(ctx.get(), content.data(), content.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest, &len) != 1) {
        throw Error("SHA-1 computation failed");
    }
    std::ostringstream os;
    for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return os.str();
}

std::string file_blob_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return blob_hash(ss.str());
}

void RunManifest::add_input(const std::filesystem::path& path) {
    if (std::filesystem::is_directory(path)) {
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::recursive_directory_iterator(path))
            if (e.is_regular_file() && e.path().filename() != "manifest.json") files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) inputs_.emplace_back(f.string(), file_blob_hash(f));
    } else {
        inputs_.emplace_back(path.string(), file_blob_hash(path));
    }
}

void RunManifest::add_output(const std::filesystem::path& path) { outputs_.push_back(path); }

nlohmann::json RunManifest::to_json() const {
    nlohmann::json j;
    j["command"] = command_;
    j["config"] = config_;
    j["seed"] = seed_;
    j["inputs"] = nlohmann::json::array();
    for (const auto& [p, h] : inputs_) j["inputs"].push_back({{"path", p}, {"blob", h}});
    j["outputs"] = nlohmann::json::array();
    for (const auto& p : outputs_) {
        nlohmann::json o{{"path", p.string()}};
        if (std::filesystem::is_regular_file(p)) o["blob"] = file_blob_hash(p);
        j["outputs"].push_back(o);
    }
    j["timings_s"] = nlohmann::json::object();
    for (const auto& [phase, s] : timings_) j["timings_s"][phase] = s;
    return j;
}

void RunManifest::write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write manifest " + path.string());
    out << to_json().dump(2) << "\n";
}

}  // namespace epinet::cli
