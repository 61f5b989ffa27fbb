#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "hardylab/common.hpp"

namespace hardylab::cli {

// One command invocation: everything a run needs, nothing ambient. Identical
// configs reproduce identical results.
struct RunConfig {
    std::string command;
    std::map<std::string, nlohmann::json> params;
    std::string format = "json";  // json | csv
    std::string out;              // empty = stdout

    double number(const std::string& key, double fallback) const;
    double require_number(const std::string& key) const;
    long integer(const std::string& key, long fallback) const;
    std::string text(const std::string& key, const std::string& fallback) const;
};

struct Report {
    nlohmann::json doc;  // command echo, params, results, provenance, warnings
    bool pass = false;
    std::string csv;     // tabular rendering, 17 significant digits

    std::string serialize(const std::string& format) const;
};

// Validates the config against the command's parameter schema (unknown keys
// are errors) and runs it. Module errors come back as a failed report with
// an "error" field rather than an exception.
Report dispatch(const RunConfig& cfg);

// Runs a JSON array of configs; entry failures are recorded and the batch
// continues. Reports come back in input order regardless of the job count.
std::vector<Report> run_batch(const std::string& batch_json_text, int jobs = 1);

const std::vector<std::string>& command_names();

}  // namespace hardylab::cli
