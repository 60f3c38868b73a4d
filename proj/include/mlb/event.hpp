#pragma once

#include "mlb/types.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace mlb {

enum class EventKind {
    TaskArrival,
    DispatchTick,
    TaskComplete,
    MessageDeliver,
    FeedbackInterval,
    Fault,
    ElectionTimeout,
};

const char* event_kind_name(EventKind kind);

/// One executed event. Records are totally ordered by (time, seq); payload
/// fields depend on the kind and are kept as a JSON object so the trace file
/// and the in-memory form share one schema.
struct TraceRecord {
    double time = 0.0;
    std::uint64_t seq = 0;
    EventKind kind = EventKind::TaskArrival;
    nlohmann::ordered_json payload;

    std::string to_line() const;
    static TraceRecord from_line(const std::string& line);
};

struct EventTrace {
    std::vector<TraceRecord> records;
    bool truncated = false; // work remained when the horizon cut the run

    /// One record per line, then a terminal line flagging truncation.
    std::string to_jsonl() const;
    static EventTrace from_jsonl(const std::string& text);
};

} // namespace mlb
