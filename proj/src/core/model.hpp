#ifndef AGENTPLAN_MODEL_HPP
#define AGENTPLAN_MODEL_HPP

#include <compare>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace agentplan {

using MachineId = int;
using PieceId = int;
using StepId = int;

// ---------------------------------------------------------------------------
// Errors

struct Issue {
    std::string path;
    std::string message;
};

class SyntaxError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SemanticError : public std::runtime_error {
public:
    explicit SemanticError(std::vector<Issue> issues);
    const std::vector<Issue> &issues() const { return issues_; }

private:
    std::vector<Issue> issues_;
};

class MissingSteps : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class HorizonExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class FuelExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NondeterministicMarking : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GroupTooLarge : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LimitExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownMachine : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class UnknownType : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Domain types

// One working step of a workpiece type. A zero duration marks a machine that
// cannot run the step.
struct StepSpec {
    StepId step_id = 0;
    int order_group = 1;
    std::map<MachineId, int> durations;

    bool capable(MachineId m) const { return duration(m) > 0; }
    int duration(MachineId m) const {
        auto it = durations.find(m);
        return it == durations.end() ? 0 : it->second;
    }
};

struct WorkpieceType {
    std::string type_id;
    std::vector<StepSpec> steps;  // order_group non-decreasing, starts at 1, no gaps

    const StepSpec *find_step(StepId id) const;
};

struct Piece {
    PieceId piece_id = 0;
    std::string type_id;
    int priority = 1;  // smaller value is manufactured earlier
};

struct CostModel {
    std::map<MachineId, double> machine_rate;
    double jump_cost = 1.0;
    double storage_cost = 0.1;
};

struct ProblemInstance {
    std::vector<MachineId> machines;
    std::map<std::string, WorkpieceType> types;
    std::vector<Piece> pieces;
    CostModel cost;
    std::optional<int> horizon_hint;
    bool homogeneous = false;  // when set, positive durations of a step must agree

    const WorkpieceType *find_type(const std::string &id) const;
    const Piece *find_piece(PieceId id) const;
};

// start inclusive, finish exclusive; finish == start + durations[machine]
struct Placement {
    PieceId piece_id = 0;
    StepId step_id = 0;
    MachineId machine = 0;
    int start = 0;
    int finish = 0;

    auto operator<=>(const Placement &) const = default;
};

struct Plan {
    std::vector<Placement> placements;
    int makespan = 0;
    int jumps = 0;
    double cost = 0.0;

    // Canonicalizes the placement order and recomputes metrics.
    static Plan from_placements(std::vector<Placement> placements,
                                const ProblemInstance &instance);
};

// ---------------------------------------------------------------------------
// Feasibility

enum class ViolationCode {
    MissingStep,
    DuplicateStep,
    UnknownRef,
    Capability,        // C1
    BadFinish,
    MachineOverlap,    // machine exclusivity
    GroupPrecedence,   // C2..C4
    IntraGroupOverlap, // C5/C6
    Priority,          // C7
};

const char *to_string(ViolationCode code);

struct Violation {
    ViolationCode code;
    std::string detail;
};

// ---------------------------------------------------------------------------
// Operations

ProblemInstance parse_problem(const std::string &text);
std::string serialize_problem(const ProblemInstance &instance);

// Replaces the piece list with `count` pieces per type, priorities 1..count.
// Spec strings look like "A=3" or "A=2,B=1".
ProblemInstance override_pieces(const ProblemInstance &instance, const std::string &spec);

Plan plan_from_json(const std::string &text, const ProblemInstance &instance);
std::string plan_to_json(const Plan &plan);

// Machine changes between consecutive steps of the piece, in start order.
// Throws MissingSteps when the plan does not contain every step of the piece.
int count_jumps(const Plan &plan, PieceId piece, const ProblemInstance &instance);

// Jump total over all pieces present in the placement list (partial plans ok).
int total_jumps(const std::vector<Placement> &placements);

// Minimum machine changes over all group-respecting step orders and capable
// machine choices.
int min_jumps(const WorkpieceType &type);

// Machine sequence attaining min_jumps, aligned with the returned step order.
struct MinJumpRoute {
    std::vector<StepId> order;
    std::vector<MachineId> machines;
    int jumps = 0;
};
MinJumpRoute min_jump_route(const WorkpieceType &type);

double compute_cost(const Plan &plan, const CostModel &cost, const ProblemInstance &baseline);

std::vector<Violation> check_feasibility(const Plan &plan, const ProblemInstance &instance);

}  // namespace agentplan

#endif
