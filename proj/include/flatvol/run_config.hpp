#pragma once

// CLI run configuration with a JSON round trip.

#include "flatvol/kernel.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace flatvol {

enum class OutputFormat { json, csv, text };

OutputFormat parse_format(const std::string& name);
std::string format_name(OutputFormat f);

struct ScanConfig {
    int steps = 200;
    std::optional<std::string> t0;
    std::optional<std::string> t1;
    std::vector<std::string> base;
    std::vector<std::string> direction;

    friend bool operator==(const ScanConfig&, const ScanConfig&) = default;
};

struct RunConfig {
    std::string subcommand;
    int g = 0;
    std::optional<int> n;
    std::vector<std::string> alpha;  // "p/q" entries
    int i0 = 1;
    ConventionFlags convention;
    std::optional<OutputFormat> format;  // subcommand default when absent
    std::string output;                  // empty: standard output
    unsigned threads = 0;
    ScanConfig scan;
    int gmax = 3;
    std::vector<long> ks{20, 40, 80};
    std::uint64_t seed = 20241015;

    nlohmann::ordered_json to_json() const;
    /// Throws InputError on malformed or unknown fields.
    static RunConfig from_json(const nlohmann::json& j);

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

}  // namespace flatvol
