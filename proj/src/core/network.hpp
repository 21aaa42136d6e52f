#ifndef AGENTPLAN_NETWORK_HPP
#define AGENTPLAN_NETWORK_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "model.hpp"
#include "petri.hpp"

namespace agentplan {

// One agent per (piece, working step). Agents form a chain per piece; local
// propagation walks the chains handing finish positions forward, with
// RequestAlternative backtracking when a candidate set runs empty. A global
// check verifies the cross-chain constraints and demotes conflicting nodes.

struct NodeId {
    PieceId piece = 0;
    StepId step = 0;
    auto operator<=>(const NodeId &) const = default;
};

std::string to_string(const NodeId &id);

// Candidate start slots, kept as a contiguous range [lo, hi). Conflict pruning
// raises lo; enlargement resets the range toward the horizon.
class Domain {
public:
    Domain() = default;
    Domain(int lo, int hi) : lo_(lo), hi_(hi) {}

    bool empty() const { return lo_ >= hi_; }
    int lo() const { return lo_; }
    int hi() const { return hi_; }
    int size() const { return std::max(0, hi_ - lo_); }
    bool contains(int v) const { return v >= lo_ && v < hi_; }
    void prune_before(int v) { lo_ = std::max(lo_, v); }
    void reset(int lo, int hi) { lo_ = lo; hi_ = hi; }

private:
    int lo_ = 0;
    int hi_ = 0;
};

enum class NodeStatus { Idle, Propagated, Conflicted, Placed };

struct NodeState {
    NodeId id;
    StepSpec spec;
    std::string type_id;
    int piece_priority = 1;
    std::optional<NodeId> predecessor;
    std::optional<NodeId> successor;
    Domain domain;
    std::optional<Placement> placement;
    NodeStatus status = NodeStatus::Idle;
    // last candidate handed out, in (start, machine) order; drives
    // RequestAlternative advances
    std::optional<std::pair<int, MachineId>> cursor;
    int chosen_delay = 0;       // forecast delay of the current placement
    int requests_left = 0;      // RequestAlternative budget for this pass
};

struct Interval {
    int from = 0;
    int to = 0;  // [from, to)
};

class MachineSchedule {
public:
    bool free(int start, int end) const;
    // first start >= lb with [start, start+len) free and start+len <= horizon
    std::optional<int> earliest_free(int lb, int len, int horizon) const;
    void reserve(const NodeId &node, int start, int end);
    void release(const NodeId &node);
    bool has(const NodeId &node) const;
    void add_down(const Interval &iv) { down_.push_back(iv); }

    const std::map<int, std::pair<int, NodeId>> &reservations() const { return busy_; }
    const std::vector<Interval> &downs() const { return down_; }

private:
    std::map<int, std::pair<int, NodeId>> busy_;  // start -> (end, node)
    std::vector<Interval> down_;
};

enum class LogMode { Off, Fire, Msg };
using LogSink = std::function<void(const std::string &)>;

struct ConstraintNetwork {
    std::map<NodeId, NodeState> nodes;
    std::map<MachineId, MachineSchedule> calendar;
    int horizon = 0;
    std::vector<std::vector<NodeId>> chains;  // reference order: priority, then piece id
    int enlargements = 0;                     // g7 attempts this solve
    std::vector<int> horizon_history;         // initial value plus every bump

    LogSink log;
    LogMode log_mode = LogMode::Off;
    void msg(const std::string &line) const {
        if (log && log_mode == LogMode::Msg) log(line);
    }

    NodeState &node(const NodeId &id) { return nodes.at(id); }
    const NodeState &node(const NodeId &id) const { return nodes.at(id); }
};

// A (start, machine, delay) option offered to the decision policy; delay is
// the shift beyond the machine's earliest feasible start.
struct Candidate {
    int start = 0;
    MachineId machine = 0;
    int delay = 0;
};

class DecisionPolicy {
public:
    virtual ~DecisionPolicy() = default;
    virtual int forecast_depth(const NodeState &) const { return 0; }
    // candidates are non-empty and pre-checked feasible
    virtual size_t pick(const NodeState &node, const std::vector<Candidate> &candidates);
};

DecisionPolicy &greedy_policy();

// ---------------------------------------------------------------------------
// Operations (roles g0..g7 are thin wrappers over these)

int default_horizon(const ProblemInstance &instance);

using Orderings = std::map<std::string, std::vector<StepId>>;  // type -> step order

// Roles g0..g2: one node per (piece, step), chained per piece in group order.
ConstraintNetwork build_network(const ProblemInstance &instance,
                                std::optional<int> horizon = std::nullopt,
                                const Orderings &orderings = {});

enum class Stage { First, Middle, Last };

struct PropagateOutcome {
    bool all_propagated = false;
    std::vector<NodeId> empty_at;  // nodes whose candidate sets ran empty
};

// Roles g3..g5: full sequential pass over every chain.
PropagateOutcome local_propagate(ConstraintNetwork &net,
                                 DecisionPolicy &policy = greedy_policy());
// One stage of the pass; empty_at accumulates into `sink`.
void propagate_stage(ConstraintNetwork &net, Stage stage, DecisionPolicy &policy,
                     std::vector<NodeId> &sink);

struct Conflict {
    ViolationCode code = ViolationCode::Priority;
    NodeId winner;
    NodeId demoted;
    int prune_from = 0;
};

struct GlobalOutcome {
    bool consistent = false;
    int unplaced = 0;
    std::vector<Conflict> conflicts;
    Plan plan;  // set when consistent
};

// Role g6. Demotes and prunes the losing node of every conflict found.
GlobalOutcome global_check(ConstraintNetwork &net, const ProblemInstance &instance);

// Role g7. Empty `failed` leaves the network untouched. First attempt widens
// the failed nodes and their chain neighbours; later attempts grow the horizon
// by half and restart. Throws HorizonExhausted after 10 attempts.
int enlarge_domains(ConstraintNetwork &net, const std::vector<NodeId> &failed);

// audit: calendar contents equal the placements of placed nodes
bool ledger_consistent(const ConstraintNetwork &net);

// ---------------------------------------------------------------------------
// Disturbances

struct Disturbance {
    enum class Kind { MachineDown, CapabilityChange, NewPiece } kind = Kind::MachineDown;
    MachineId machine = 0;
    int from = 0, to = 0;      // MachineDown
    std::string type_id;       // CapabilityChange
    StepId step = 0;           // CapabilityChange
    int new_duration = 0;      // CapabilityChange
    Piece piece;               // NewPiece
};

Disturbance disturbance_from_json(const std::string &text);
std::string disturbance_to_json(const Disturbance &event);

// Updates instance parameters and network state; placements overlapping the
// change are invalidated, everything else is preserved verbatim. The caller
// re-runs propagation afterwards.
void apply_disturbance(ConstraintNetwork &net, ProblemInstance &instance,
                       const Disturbance &event);

// ---------------------------------------------------------------------------
// Solver: drives the two protocol nets over one network

class Solver {
public:
    explicit Solver(ProblemInstance instance, std::uint64_t seed = 0,
                    std::optional<int> horizon = std::nullopt,
                    const Orderings &orderings = {});

    const Plan &solve();                          // idempotent
    const Plan &apply(const Disturbance &event);  // absorb + re-propagate

    const ProblemInstance &instance() const { return instance_; }
    const ConstraintNetwork &network() const { return net_; }
    ConstraintNetwork &network() { return net_; }
    const Trace &parameterization_trace() const { return param_trace_; }
    const Trace &propagation_trace() const { return prop_trace_; }
    std::uint64_t seed() const { return seed_; }

    void set_policy(DecisionPolicy *policy) { policy_ = policy; }
    void set_log(LogSink sink, LogMode mode);

private:
    ProblemInstance instance_;
    std::uint64_t seed_ = 0;
    std::optional<int> horizon_override_;
    Orderings orderings_;
    ConstraintNetwork net_;
    DecisionPolicy *policy_ = nullptr;
    Plan plan_;
    bool solved_ = false;
    Trace param_trace_;
    Trace prop_trace_;
    LogSink log_;
    LogMode log_mode_ = LogMode::Off;

    std::vector<NodeId> pass_empty_;
    GlobalOutcome last_global_;
    std::string pending_error_;

    void parameterize();
    void propagate();
    RoleOutcome execute_role(const std::string &role, const Payload &input);
    void emit_trace(const Trace &trace) const;
};

// Greedy earliest-start plan (forecasting depth 0), deterministic for a seed.
Plan solve_csp(const ProblemInstance &instance, std::uint64_t seed = 0,
               std::optional<int> horizon_hint = std::nullopt);

}  // namespace agentplan

#endif
