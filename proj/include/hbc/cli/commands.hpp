#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hbc/cli/config.hpp"
#include "hbc/cli/report.hpp"

namespace hbc::cli {

inline constexpr const char* kToolVersion = "hbc 1.0.0";

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
};

struct ManifestItem {
    std::string name;
    bool ok = true;
    std::string message;
};

struct OutputFile {
    std::string file;
    std::string sha256;
};

struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string command;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string config_text;
    std::vector<std::pair<std::string, std::string>> config;    // keys as written
    std::vector<std::pair<std::string, std::string>> resolved;  // every parameter the run used
    double wall_clock_seconds = 0.0;
    std::vector<ManifestItem> items;
    std::vector<OutputFile> outputs;
    std::string content_hash;
    std::vector<std::string> notes;

    bool ok() const;
    std::string to_json() const;
};

// Computes the tables for a parsed config.
std::vector<Table> execute(const RunConfig& cfg, RunManifest& manifest, std::vector<std::string>* jsonl);

// Writes every table as CSV plus optional JSON-lines, hashes them, and records them in the manifest.
void emit_report(RunManifest& manifest, const std::vector<Table>& tables, const std::string& out_dir,
                 const std::vector<std::string>* jsonl = nullptr);

RunManifest run_config(const std::string& path, const RunOptions& opt = {},
                       std::optional<Command> expected = std::nullopt);
RunManifest run_config(RunConfig cfg, const RunOptions& opt = {});

// Rebuilds the run description (config text, seed, threads) recorded in a manifest.
RunConfig config_from_manifest(const std::string& path, std::optional<Command> expected = std::nullopt);

}  // namespace hbc::cli
