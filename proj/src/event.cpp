#include "mlb/event.hpp"

#include <sstream>
#include <stdexcept>

namespace mlb {

namespace {

const struct {
    EventKind kind;
    const char* name;
} kKindNames[] = {
    {EventKind::TaskArrival, "task_arrival"},
    {EventKind::DispatchTick, "dispatch_tick"},
    {EventKind::TaskComplete, "task_complete"},
    {EventKind::MessageDeliver, "message_deliver"},
    {EventKind::FeedbackInterval, "feedback_interval"},
    {EventKind::Fault, "fault"},
    {EventKind::ElectionTimeout, "election_timeout"},
};

EventKind kind_from_name(const std::string& name) {
    for (const auto& entry : kKindNames) {
        if (name == entry.name) return entry.kind;
    }
    throw std::invalid_argument("unknown event kind: " + name);
}

} // namespace

const char* event_kind_name(EventKind kind) {
    for (const auto& entry : kKindNames) {
        if (entry.kind == kind) return entry.name;
    }
    return "unknown";
}

std::string TraceRecord::to_line() const {
    nlohmann::ordered_json obj;
    obj["t"] = time;
    obj["seq"] = seq;
    obj["kind"] = event_kind_name(kind);
    for (auto it = payload.begin(); it != payload.end(); ++it) {
        obj[it.key()] = it.value();
    }
    return obj.dump();
}

TraceRecord TraceRecord::from_line(const std::string& line) {
    auto obj = nlohmann::ordered_json::parse(line);
    TraceRecord rec;
    rec.time = obj.at("t").get<double>();
    rec.seq = obj.at("seq").get<std::uint64_t>();
    rec.kind = kind_from_name(obj.at("kind").get<std::string>());
    obj.erase("t");
    obj.erase("seq");
    obj.erase("kind");
    rec.payload = std::move(obj);
    return rec;
}

std::string EventTrace::to_jsonl() const {
    std::string out;
    for (const TraceRecord& rec : records) {
        out += rec.to_line();
        out += '\n';
    }
    nlohmann::ordered_json tail;
    tail["end_of_trace"] = true;
    tail["events"] = records.size();
    tail["truncated"] = truncated;
    out += tail.dump();
    out += '\n';
    return out;
}

EventTrace EventTrace::from_jsonl(const std::string& text) {
    EventTrace trace;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto obj = nlohmann::ordered_json::parse(line);
        if (obj.contains("end_of_trace")) {
            trace.truncated = obj.value("truncated", false);
            continue;
        }
        trace.records.push_back(TraceRecord::from_line(line));
    }
    return trace;
}

} // namespace mlb
