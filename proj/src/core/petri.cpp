#include "petri.hpp"

#include <algorithm>
#include <sstream>

namespace agentplan {

void PetriNet::add_place(const std::string &id) {
    places_.push_back({id});
    marking_[id];
}

void PetriNet::add_transition(Transition t) { transitions_.push_back(std::move(t)); }

void PetriNet::put_token(const std::string &place, Payload payload) {
    marking_[place].push_back({std::move(payload)});
}

void PetriNet::clear_marking() {
    for (auto &[id, tokens] : marking_) tokens.clear();
}

const Transition *PetriNet::find_transition(const std::string &id) const {
    for (const auto &t : transitions_)
        if (t.id == id) return &t;
    return nullptr;
}

int PetriNet::token_count(const std::string &place) const {
    auto it = marking_.find(place);
    return it == marking_.end() ? 0 : static_cast<int>(it->second.size());
}

const std::vector<Token> &PetriNet::tokens(const std::string &place) const {
    static const std::vector<Token> empty;
    auto it = marking_.find(place);
    return it == marking_.end() ? empty : it->second;
}

std::vector<std::string> PetriNet::marked_places() const {
    std::vector<std::string> out;
    for (const auto &p : places_)
        if (token_count(p.id) > 0) out.push_back(p.id);
    return out;
}

bool PetriNet::inputs_marked(const Transition &t) const {
    return std::all_of(t.inputs.begin(), t.inputs.end(),
                       [&](const std::string &p) { return token_count(p) > 0; });
}

Payload PetriNet::merged_input(const Transition &t) const {
    Payload merged;
    for (const auto &p : t.inputs) {
        const auto &toks = tokens(p);
        if (!toks.empty())
            for (const auto &[k, v] : toks.front().payload) merged[k] = v;
    }
    return merged;
}

std::vector<std::string> PetriNet::pending_roles() const {
    std::vector<std::string> roles;
    for (const auto &t : transitions_)
        if (inputs_marked(t) && std::find(roles.begin(), roles.end(), t.role) == roles.end())
            roles.push_back(t.role);
    return roles;
}

Payload PetriNet::role_input(const std::string &role) const {
    for (const auto &t : transitions_)
        if (t.role == role && inputs_marked(t)) return merged_input(t);
    return {};
}

std::optional<FiringRecord> PetriNet::step(const std::map<std::string, RoleOutcome> &outcomes) {
    const Transition *enabled = nullptr;
    for (const auto &t : transitions_) {
        if (!inputs_marked(t)) continue;
        RoleOutcome outcome;  // unknown role outcome defaults to failure
        outcome.ok = false;
        auto it = outcomes.find(t.role);
        if (it != outcomes.end()) outcome = it->second;
        if (!t.guard(outcome, merged_input(t))) continue;
        if (enabled)
            throw NondeterministicMarking("NondeterministicMarking: " + enabled->id + " and " +
                                          t.id + " are both enabled");
        enabled = &t;
    }
    if (!enabled) return std::nullopt;

    FiringRecord rec;
    rec.transition = enabled->id;
    rec.role = enabled->role;
    rec.inputs = enabled->inputs;
    rec.outputs = enabled->outputs;
    rec.consumed = merged_input(*enabled);
    RoleOutcome outcome;
    outcome.ok = false;
    if (auto it = outcomes.find(enabled->role); it != outcomes.end()) outcome = it->second;
    rec.ok = outcome.ok;
    rec.produced = rec.consumed;
    for (const auto &[k, v] : outcome.data) rec.produced[k] = v;

    for (const auto &p : enabled->inputs) marking_[p].erase(marking_[p].begin());
    for (const auto &p : enabled->outputs) marking_[p].push_back({rec.produced});

    for (const auto &[id, toks] : marking_)
        if (toks.size() > 1)
            throw std::logic_error("net is not 1-safe: place " + id + " holds " +
                                   std::to_string(toks.size()) + " tokens");
    return rec;
}

Trace run(PetriNet &net, const RoleExecutor &executor, int fuel) {
    Trace trace;
    while (true) {
        auto roles = net.pending_roles();
        if (roles.empty()) break;  // nothing marked or no candidate transitions
        if (static_cast<int>(trace.firings.size()) >= fuel)
            throw FuelExhausted("FuelExhausted: net still live after " + std::to_string(fuel) +
                                " firings");
        std::map<std::string, RoleOutcome> outcomes;
        for (const auto &role : roles) outcomes[role] = executor(role, net.role_input(role));
        auto rec = net.step(outcomes);
        if (!rec) break;  // guards all false: halt
        trace.firings.push_back(*rec);
        const Transition *t = net.find_transition(rec->transition);
        if (t && t->terminal) {
            trace.completed = true;
            break;
        }
    }
    std::ostringstream halted;
    auto marked = net.marked_places();
    for (size_t i = 0; i < marked.size(); ++i) halted << (i ? "+" : "") << marked[i];
    trace.halted_at = halted.str();
    return trace;
}

std::string format_firing(const FiringRecord &record) {
    std::ostringstream out;
    out << "FIRE " << record.transition << " ";
    for (size_t i = 0; i < record.inputs.size(); ++i) out << (i ? "+" : "") << record.inputs[i];
    out << "->";
    for (size_t i = 0; i < record.outputs.size(); ++i) out << (i ? "+" : "") << record.outputs[i];
    out << " role=" << record.role << " outcome=" << (record.ok ? "ok" : "fail") << " payload=";
    bool first = true;
    for (const auto &[k, v] : record.produced) {
        out << (first ? "" : ",") << k << "=" << v;
        first = false;
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// The two bundled nets.
//
// Parameterization (p0 g0 -> t0 -> p1 g1 -> t1 -> p2 g2, t2 self-loop while
// nodes remain to connect, t3 terminal when none is left).
//
// Propagation (p3 g3 -> t4 -> p4 g4 -> t5 -> p5 g5 -> t7 -> p6 g6). At p6 a
// consistent check fires the terminal t6; otherwise t9 hands the empty value
// sets to g7 in p7, and t8 restarts the local propagation at p3.

PrimaryNets build_primary_nets() {
    PrimaryNets nets;

    PetriNet &par = nets.parameterization;
    for (const char *p : {"p0", "p1", "p2"}) par.add_place(p);
    par.add_transition({"t0", {"p0"}, {"p1"}, "g0",
                        [](const RoleOutcome &o, const Payload &) { return o.ok; }});
    par.add_transition({"t1", {"p1"}, {"p2"}, "g1",
                        [](const RoleOutcome &o, const Payload &) { return o.ok; }});
    auto connected = [](const RoleOutcome &o, const Payload &in) {
        long long n = in.count("n") ? in.at("n") : 0;
        long long done = o.data.count("connected") ? o.data.at("connected") : 0;
        return std::pair<long long, long long>(done, n);
    };
    par.add_transition({"t2", {"p2"}, {"p2"}, "g2",
                        [connected](const RoleOutcome &o, const Payload &in) {
                            auto [done, n] = connected(o, in);
                            return o.ok && done < n;
                        }});
    par.add_transition({"t3", {"p2"}, {"p2"}, "g2",
                        [connected](const RoleOutcome &o, const Payload &in) {
                            auto [done, n] = connected(o, in);
                            return o.ok && done >= n;  // no next node to connect
                        },
                        true});
    par.put_token("p0");

    PetriNet &prop = nets.propagation;
    for (const char *p : {"p3", "p4", "p5", "p6", "p7"}) prop.add_place(p);
    prop.add_transition({"t4", {"p3"}, {"p4"}, "g3",
                         [](const RoleOutcome &o, const Payload &) { return o.ok; }});
    prop.add_transition({"t5", {"p4"}, {"p5"}, "g4",
                         [](const RoleOutcome &o, const Payload &) { return o.ok; }});
    prop.add_transition({"t7", {"p5"}, {"p6"}, "g5",
                         [](const RoleOutcome &o, const Payload &) { return o.ok; }});
    prop.add_transition({"t6", {"p6"}, {"p6"}, "g6",
                         [](const RoleOutcome &o, const Payload &) { return o.ok; }, true});
    prop.add_transition({"t9", {"p6"}, {"p7"}, "g6",
                         [](const RoleOutcome &o, const Payload &) { return !o.ok; }});
    prop.add_transition({"t8", {"p7"}, {"p3"}, "g7",
                         [](const RoleOutcome &o, const Payload &) { return o.ok; }});
    prop.put_token("p3");

    return nets;
}

}  // namespace agentplan
