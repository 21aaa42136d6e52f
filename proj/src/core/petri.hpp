#ifndef AGENTPLAN_PETRI_HPP
#define AGENTPLAN_PETRI_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "model.hpp"

namespace agentplan {

// Guarded, payload-carrying, 1-safe net. The two bundled nets drive the
// cooperation protocol: roles g0..g7 are executed by the node agents, the
// transitions route on the role outcomes.

using Payload = std::map<std::string, long long>;

struct RoleOutcome {
    bool ok = true;
    Payload data;
};

struct Token {
    Payload payload;
};

struct Place {
    std::string id;
};

struct Transition {
    std::string id;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::string role;  // g0..g7
    // total predicate over the bound role's outcome and the input payload
    std::function<bool(const RoleOutcome &, const Payload &)> guard;
    bool terminal = false;  // firing completes the run
};

struct FiringRecord {
    std::string transition;
    std::string role;
    bool ok = true;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    Payload consumed;
    Payload produced;
};

struct Trace {
    std::vector<FiringRecord> firings;
    bool completed = false;     // a terminal transition fired
    std::string halted_at;      // marked places at halt, "+"-joined
};

class PetriNet {
public:
    void add_place(const std::string &id);
    void add_transition(Transition t);
    void put_token(const std::string &place, Payload payload = {});
    void clear_marking();

    const std::vector<Place> &places() const { return places_; }
    const std::vector<Transition> &transitions() const { return transitions_; }
    const Transition *find_transition(const std::string &id) const;
    int token_count(const std::string &place) const;
    const std::vector<Token> &tokens(const std::string &place) const;
    std::vector<std::string> marked_places() const;

    // Fires the unique enabled transition, if any. Guards see the outcome of
    // the transition's bound role plus the merged payload of its input
    // tokens. Throws NondeterministicMarking when more than one transition is
    // enabled and std::logic_error when a firing would break 1-safety.
    std::optional<FiringRecord> step(const std::map<std::string, RoleOutcome> &outcomes);

    // Roles whose transitions have every input place marked; these are the
    // roles a driver must execute before calling step().
    std::vector<std::string> pending_roles() const;
    Payload role_input(const std::string &role) const;

private:
    std::vector<Place> places_;
    std::vector<Transition> transitions_;
    std::map<std::string, std::vector<Token>> marking_;

    bool inputs_marked(const Transition &t) const;
    Payload merged_input(const Transition &t) const;
};

using RoleExecutor = std::function<RoleOutcome(const std::string &role, const Payload &input)>;

// Steps the net until halt, terminal firing, or fuel exhaustion. The executor
// is invoked once per pending role per step. Throws FuelExhausted when the
// fuel runs out with transitions still firing.
Trace run(PetriNet &net, const RoleExecutor &executor, int fuel);

// `FIRE <tid> <src>-><dst> role=<rk> outcome=<ok|fail> payload=<k=v,...>`
std::string format_firing(const FiringRecord &record);

struct PrimaryNets {
    PetriNet parameterization;  // p0..p2, t0..t3, roles g0..g2
    PetriNet propagation;       // p3..p7, t4..t9, roles g3..g7
};

PrimaryNets build_primary_nets();

}  // namespace agentplan

#endif
