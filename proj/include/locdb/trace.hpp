#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace locdb {

/// Who handled one step of a flow.
enum class Role {
    Db0,
    Db1,
    Db2,
    Hlr,
    CallingMsc,
    ServingVlr,
    ServingMsc,
    Vlr,
    Nlr,
    Biu,
    Mt,
};

enum class AccessKind {
    Update,
    Query,
    Register,
    Deregister,
    CallSetup,
    LocationQuery,
    RouteRequest,
    TldnAllocate,
    TldnRelay,
    OverlapStore,
    PointerCreate,
    PointerRemove,
    Detach,
    NlrStore,
    RadioSupport,
    Finalize,
    CacheHit,
    CacheMiss,
    CacheStale,
    Connect,
    Arrive,
    Start,
    Finish,
};

std::string_view to_string(Role r);
std::string_view to_string(AccessKind k);

/// One step of a flow with its queue timestamps (all equal for zero-time
/// protocol steps). `peer` names the other end for pointer steps, else -1.
struct TraceStep {
    Role role = Role::Db2;
    int node_id = 0;
    AccessKind kind = AccessKind::Query;
    double enqueue = 0.0;
    double start = 0.0;
    double finish = 0.0;
    int peer = -1;
};

/// Ordered list of accesses produced by one update, call or handoff.
struct FlowTrace {
    std::vector<TraceStep> steps;

    std::size_t count(Role r) const;
    std::size_t count(Role r, AccessKind k) const;
    std::size_t count(AccessKind k) const;
    /// True when enqueue <= start <= finish per step and finish is
    /// non-decreasing along the trace.
    bool timestamps_monotone() const;
    void append(const FlowTrace& other);
};

/// Line-delimited debug record: `time,level,node_id,event_kind,queue_len`.
struct TraceLine {
    double time = 0.0;
    Role role = Role::Db2;
    int node_id = 0;
    AccessKind kind = AccessKind::Arrive;
    std::size_t queue_len = 0;
};

std::string format_trace_line(const TraceLine& line);
inline constexpr std::string_view kTraceHeader = "time,level,node_id,event_kind,queue_len";

/// One line per step, stamped at the step's finish time.
void write_trace(std::ostream& out, const FlowTrace& trace);

}  // namespace locdb
