#include "locdb/trace.hpp"

#include <algorithm>
#include <charconv>
#include <ostream>

namespace locdb {

std::string_view to_string(Role r) {
    switch (r) {
        case Role::Db0: return "DB0";
        case Role::Db1: return "DB1";
        case Role::Db2: return "DB2";
        case Role::Hlr: return "HLR";
        case Role::CallingMsc: return "CALLING_MSC";
        case Role::ServingVlr: return "SERVING_VLR";
        case Role::ServingMsc: return "SERVING_MSC";
        case Role::Vlr: return "VLR";
        case Role::Nlr: return "NLR";
        case Role::Biu: return "BIU";
        case Role::Mt: return "MT";
    }
    return "?";
}

std::string_view to_string(AccessKind k) {
    switch (k) {
        case AccessKind::Update: return "update";
        case AccessKind::Query: return "query";
        case AccessKind::Register: return "register";
        case AccessKind::Deregister: return "deregister";
        case AccessKind::CallSetup: return "call_setup";
        case AccessKind::LocationQuery: return "location_query";
        case AccessKind::RouteRequest: return "route_request";
        case AccessKind::TldnAllocate: return "tldn_allocate";
        case AccessKind::TldnRelay: return "tldn_relay";
        case AccessKind::OverlapStore: return "overlap_store";
        case AccessKind::PointerCreate: return "pointer_create";
        case AccessKind::PointerRemove: return "pointer_remove";
        case AccessKind::Detach: return "detach";
        case AccessKind::NlrStore: return "nlr_store";
        case AccessKind::RadioSupport: return "radio_support";
        case AccessKind::Finalize: return "finalize";
        case AccessKind::CacheHit: return "cache_hit";
        case AccessKind::CacheMiss: return "cache_miss";
        case AccessKind::CacheStale: return "cache_stale";
        case AccessKind::Connect: return "connect";
        case AccessKind::Arrive: return "arrive";
        case AccessKind::Start: return "start";
        case AccessKind::Finish: return "finish";
    }
    return "?";
}

std::size_t FlowTrace::count(Role r) const {
    return static_cast<std::size_t>(
        std::count_if(steps.begin(), steps.end(), [r](const TraceStep& s) { return s.role == r; }));
}

std::size_t FlowTrace::count(Role r, AccessKind k) const {
    return static_cast<std::size_t>(std::count_if(
        steps.begin(), steps.end(), [r, k](const TraceStep& s) { return s.role == r && s.kind == k; }));
}

std::size_t FlowTrace::count(AccessKind k) const {
    return static_cast<std::size_t>(
        std::count_if(steps.begin(), steps.end(), [k](const TraceStep& s) { return s.kind == k; }));
}

bool FlowTrace::timestamps_monotone() const {
    double last = -1e300;
    for (const auto& s : steps) {
        if (!(s.enqueue <= s.start && s.start <= s.finish) || s.finish < last) {
            return false;
        }
        last = s.finish;
    }
    return true;
}

void FlowTrace::append(const FlowTrace& other) {
    steps.insert(steps.end(), other.steps.begin(), other.steps.end());
}

std::string format_trace_line(const TraceLine& line) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, line.time);
    std::string out(buf, ptr);
    out += ',';
    out += to_string(line.role);
    out += ',';
    out += std::to_string(line.node_id);
    out += ',';
    out += to_string(line.kind);
    out += ',';
    out += std::to_string(line.queue_len);
    return out;
}

void write_trace(std::ostream& out, const FlowTrace& trace) {
    out << kTraceHeader << '\n';
    for (const auto& s : trace.steps) {
        out << format_trace_line({s.finish, s.role, s.node_id, s.kind, 0}) << '\n';
    }
}

}  // namespace locdb
