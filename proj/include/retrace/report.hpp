#pragma once

#include <chrono>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace retrace {

// Per-invocation measurement record: command echo, per-phase timings,
// frontier statistics, and a result summary. Timings are the only fields
// expected to vary between identical runs.
struct RunReport {
    std::vector<std::string> command;
    std::map<std::string, std::int64_t> timing_millis;
    std::size_t frontier_max = 0;
    std::size_t frontier_pruned = 0;
    std::size_t frontier_truncated = 0;
    nlohmann::json result = nlohmann::json::object();

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["command"] = command;
        j["frontier"] = {{"maxSize", frontier_max},
                         {"prunedCount", frontier_pruned},
                         {"truncatedCount", frontier_truncated}};
        j["result"] = result;
        j["timingMillis"] = timing_millis;
        return j;
    }

    std::string to_text() const { return to_json().dump(2) + "\n"; }
};

// Wall-clock phase timer feeding RunReport::timing_millis.
class PhaseTimer {
public:
    explicit PhaseTimer(RunReport& report, std::string phase)
        : report_(report), phase_(std::move(phase)),
          start_(std::chrono::steady_clock::now()) {}
    ~PhaseTimer() {
        auto end = std::chrono::steady_clock::now();
        report_.timing_millis[phase_] +=
            std::chrono::duration_cast<std::chrono::milliseconds>(end - start_).count();
    }

private:
    RunReport& report_;
    std::string phase_;
    std::chrono::steady_clock::time_point start_;
};

}  // namespace retrace
