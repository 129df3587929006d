#pragma once

#include <chrono>
#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

namespace epinet::cli {

/// Git-style content hash: SHA-1 of "blob <size>\0<content>", lowercase hex.
std::string blob_hash(const std::string& content);
std::string file_blob_hash(const std::filesystem::path& path);

/// Reproducibility record written next to every artifact a command produces.
class RunManifest {
public:
    explicit RunManifest(std::string command) : command_(std::move(command)) {}

    void set_config(nlohmann::json cfg) { config_ = std::move(cfg); }
    void set_seed(std::uint64_t seed) { seed_ = seed; }
    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);
    void add_timing(const std::string& phase, double seconds) { timings_.emplace_back(phase, seconds); }

    nlohmann::json to_json() const;
    void write(const std::filesystem::path& path) const;

private:
    std::string command_;
    nlohmann::json config_ = nlohmann::json::object();
    std::uint64_t seed_ = 0;
    std::vector<std::pair<std::string, std::string>> inputs_;
    std::vector<std::filesystem::path> outputs_;
    std::vector<std::pair<std::string, double>> timings_;
};

/// Measures one named phase into a manifest.
class PhaseTimer {
public:
    PhaseTimer(RunManifest& m, std::string phase)
        : m_(m), phase_(std::move(phase)), start_(std::chrono::steady_clock::now()) {}
    ~PhaseTimer() {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
        m_.add_timing(phase_, dt.count());
    }
    PhaseTimer(const PhaseTimer&) = delete;
    PhaseTimer& operator=(const PhaseTimer&) = delete;

private:
    RunManifest& m_;
    std::string phase_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace epinet::cli
