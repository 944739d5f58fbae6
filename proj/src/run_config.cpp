#include "flatvol/run_config.hpp"

#include "flatvol/errors.hpp"

#include <set>

namespace flatvol {

OutputFormat parse_format(const std::string& name) {
    if (name == "json") {
        return OutputFormat::json;
    }
    if (name == "csv") {
        return OutputFormat::csv;
    }
    if (name == "text") {
        return OutputFormat::text;
    }
    throw InputError("unknown output format '" + name + "' (json|csv|text)");
}

std::string format_name(OutputFormat f) {
    switch (f) {
        case OutputFormat::json:
            return "json";
        case OutputFormat::csv:
            return "csv";
        case OutputFormat::text:
            return "text";
    }
    return "json";
}

nlohmann::ordered_json RunConfig::to_json() const {
    nlohmann::ordered_json j;
    j["subcommand"] = subcommand;
    j["g"] = g;
    j["n"] = n ? nlohmann::ordered_json(*n) : nlohmann::ordered_json(nullptr);
    j["alpha"] = alpha;
    j["i0"] = i0;
    j["convention"] = {{"s_exponent", convention.s_exponent_name()},
                       {"term_sign", convention.term_sign_name()}};
    j["format"] = format ? nlohmann::ordered_json(format_name(*format))
                         : nlohmann::ordered_json(nullptr);
    j["output"] = output;
    j["threads"] = threads;
    nlohmann::ordered_json s;
    s["steps"] = scan.steps;
    s["t0"] = scan.t0 ? nlohmann::ordered_json(*scan.t0) : nlohmann::ordered_json(nullptr);
    s["t1"] = scan.t1 ? nlohmann::ordered_json(*scan.t1) : nlohmann::ordered_json(nullptr);
    s["base"] = scan.base;
    s["direction"] = scan.direction;
    j["scan"] = s;
    j["gmax"] = gmax;
    j["ks"] = ks;
    j["seed"] = seed;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    static const std::set<std::string> known{"subcommand", "g",      "n",     "alpha", "i0",
                                             "convention", "format", "output", "threads", "scan",
                                             "gmax",       "ks",     "seed"};
    if (!j.is_object()) {
        throw InputError("config must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (!known.contains(key)) {
            throw InputError("unknown config field '" + key + "'");
        }
    }
    RunConfig c;
    try {
        c.subcommand = j.value("subcommand", std::string{});
        c.g = j.value("g", 0);
        if (j.contains("n") && !j.at("n").is_null()) {
            c.n = j.at("n").get<int>();
        }
        c.alpha = j.value("alpha", std::vector<std::string>{});
        c.i0 = j.value("i0", 1);
        if (j.contains("convention")) {
            const auto& conv = j.at("convention");
            c.convention.s_exponent = parse_s_exponent(conv.value("s_exponent", "shifted"));
            c.convention.term_sign = parse_term_sign(conv.value("term_sign", "prefactor"));
        }
        if (j.contains("format") && !j.at("format").is_null()) {
            c.format = parse_format(j.at("format").get<std::string>());
        }
        c.output = j.value("output", std::string{});
        c.threads = j.value("threads", 0U);
        if (j.contains("scan")) {
            const auto& s = j.at("scan");
            c.scan.steps = s.value("steps", 200);
            if (s.contains("t0") && !s.at("t0").is_null()) {
                c.scan.t0 = s.at("t0").get<std::string>();
            }
            if (s.contains("t1") && !s.at("t1").is_null()) {
                c.scan.t1 = s.at("t1").get<std::string>();
            }
            c.scan.base = s.value("base", std::vector<std::string>{});
            c.scan.direction = s.value("direction", std::vector<std::string>{});
        }
        c.gmax = j.value("gmax", 3);
        c.ks = j.value("ks", std::vector<long>{20, 40, 80});
        c.seed = j.value("seed", std::uint64_t{20241015});
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed config: ") + e.what());
    }
    return c;
}

}  // namespace flatvol
