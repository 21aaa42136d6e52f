#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace agentplan {

using nlohmann::json;

static std::string join_issues(const std::vector<Issue> &issues) {
    std::ostringstream out;
    out << "SemanticError: " << issues.size() << " issue(s)";
    for (const auto &i : issues) out << "\n  " << i.path << ": " << i.message;
    return out.str();
}

SemanticError::SemanticError(std::vector<Issue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

const StepSpec *WorkpieceType::find_step(StepId id) const {
    for (const auto &s : steps)
        if (s.step_id == id) return &s;
    return nullptr;
}

const WorkpieceType *ProblemInstance::find_type(const std::string &id) const {
    auto it = types.find(id);
    return it == types.end() ? nullptr : &it->second;
}

const Piece *ProblemInstance::find_piece(PieceId id) const {
    for (const auto &p : pieces)
        if (p.piece_id == id) return &p;
    return nullptr;
}

const char *to_string(ViolationCode code) {
    switch (code) {
        case ViolationCode::MissingStep: return "MissingStep";
        case ViolationCode::DuplicateStep: return "DuplicateStep";
        case ViolationCode::UnknownRef: return "UnknownRef";
        case ViolationCode::Capability: return "Capability";
        case ViolationCode::BadFinish: return "BadFinish";
        case ViolationCode::MachineOverlap: return "MachineOverlap";
        case ViolationCode::GroupPrecedence: return "GroupPrecedence";
        case ViolationCode::IntraGroupOverlap: return "IntraGroupOverlap";
        case ViolationCode::Priority: return "Priority";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

class IssueSink {
public:
    void add(std::string path, std::string message) {
        issues_.push_back({std::move(path), std::move(message)});
    }
    bool empty() const { return issues_.empty(); }
    std::vector<Issue> take() { return std::move(issues_); }

private:
    std::vector<Issue> issues_;
};

bool want_int(const json &j, const std::string &path, IssueSink &sink, long long &out) {
    if (!j.is_number_integer()) {
        sink.add(path, "expected an integer");
        return false;
    }
    out = j.get<long long>();
    return true;
}

bool want_number(const json &j, const std::string &path, IssueSink &sink, double &out) {
    if (!j.is_number()) {
        sink.add(path, "expected a number");
        return false;
    }
    out = j.get<double>();
    return true;
}

bool parse_machine_key(const std::string &key, MachineId &out) {
    if (key.empty()) return false;
    for (char c : key)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    out = std::stoi(key);
    return true;
}

void parse_durations(const json &j, const std::string &path, IssueSink &sink, StepSpec &step) {
    if (!j.is_object()) {
        sink.add(path, "expected a machine-id to duration map");
        return;
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
        MachineId m = 0;
        if (!parse_machine_key(it.key(), m)) {
            sink.add(path + "." + it.key(), "machine key is not a positive integer");
            continue;
        }
        long long d = 0;
        if (!want_int(it.value(), path + "." + it.key(), sink, d)) continue;
        if (d < 0) {
            sink.add(path + "." + it.key(), "duration must be >= 0");
            continue;
        }
        step.durations[m] = static_cast<int>(d);
    }
}

void validate_steps(const std::string &type_path, const WorkpieceType &type,
                    const std::vector<MachineId> &machines, bool homogeneous, IssueSink &sink) {
    int prev_group = 0;
    std::vector<StepId> seen;
    for (size_t i = 0; i < type.steps.size(); ++i) {
        const std::string path = type_path + ".steps[" + std::to_string(i) + "]";
        const StepSpec &s = type.steps[i];
        if (s.step_id <= 0) sink.add(path + ".id", "step id must be a positive integer");
        if (std::find(seen.begin(), seen.end(), s.step_id) != seen.end())
            sink.add(path + ".id", "duplicate step id");
        seen.push_back(s.step_id);
        if (s.order_group <= 0)
            sink.add(path + ".group", "order group must be a positive integer");
        if (i == 0 && s.order_group != 1)
            sink.add(path + ".group", "order groups must start at 1");
        if (s.order_group < prev_group)
            sink.add(path + ".group", "order groups must be non-decreasing");
        if (s.order_group > prev_group + 1)
            sink.add(path + ".group", "order groups must have no gaps");
        prev_group = std::max(prev_group, s.order_group);

        bool any = false;
        std::optional<int> common;
        for (MachineId m : machines) {
            if (!s.durations.count(m))
                sink.add(path + ".durations", "missing machine " + std::to_string(m));
            int d = s.duration(m);
            if (d > 0) {
                any = true;
                if (homogeneous) {
                    if (common && *common != d)
                        sink.add(path + ".durations",
                                 "homogeneous instance but step durations differ");
                    common = d;
                }
            }
        }
        for (const auto &[m, d] : s.durations)
            if (std::find(machines.begin(), machines.end(), m) == machines.end())
                sink.add(path + ".durations." + std::to_string(m), "unknown machine");
        if (!any) sink.add(path, "step capable on no machine");
    }
}

}  // namespace

ProblemInstance parse_problem(const std::string &text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw SyntaxError(std::string("SyntaxError: ") + e.what());
    }

    IssueSink sink;
    ProblemInstance inst;
    if (!doc.is_object()) {
        sink.add("", "top level must be an object");
        throw SemanticError(sink.take());
    }

    static const char *known[] = {"machines", "types", "pieces",
                                  "cost",     "horizon", "homogeneous"};
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (std::find_if(std::begin(known), std::end(known),
                         [&](const char *k) { return it.key() == k; }) == std::end(known))
            sink.add(it.key(), "unknown key");
    }

    if (!doc.contains("machines") || !doc["machines"].is_array()) {
        sink.add("machines", "required list of machine ids");
    } else {
        size_t i = 0;
        for (const auto &m : doc["machines"]) {
            const std::string path = "machines[" + std::to_string(i++) + "]";
            long long v = 0;
            if (!want_int(m, path, sink, v)) continue;
            if (v <= 0) {
                sink.add(path, "machine id must be a positive integer");
                continue;
            }
            MachineId id = static_cast<MachineId>(v);
            if (std::find(inst.machines.begin(), inst.machines.end(), id) != inst.machines.end())
                sink.add(path, "duplicate machine id");
            else
                inst.machines.push_back(id);
        }
    }
    if (inst.machines.empty()) sink.add("machines", "at least one machine is required");
    std::sort(inst.machines.begin(), inst.machines.end());

    if (doc.contains("homogeneous")) {
        if (!doc["homogeneous"].is_boolean())
            sink.add("homogeneous", "expected a boolean");
        else
            inst.homogeneous = doc["homogeneous"].get<bool>();
    }

    if (!doc.contains("types") || !doc["types"].is_object()) {
        sink.add("types", "required map of type symbol to step list");
    } else {
        for (auto it = doc["types"].begin(); it != doc["types"].end(); ++it) {
            const std::string tpath = "types." + it.key();
            WorkpieceType type;
            type.type_id = it.key();
            if (it.key().empty()) sink.add(tpath, "type symbol must be non-empty");
            if (!it.value().is_array()) {
                sink.add(tpath, "expected a list of steps");
                continue;
            }
            size_t i = 0;
            for (const auto &sj : it.value()) {
                const std::string spath = tpath + ".steps[" + std::to_string(i++) + "]";
                StepSpec step;
                if (!sj.is_object()) {
                    sink.add(spath, "expected a step object");
                    continue;
                }
                long long v = 0;
                if (sj.contains("id") && want_int(sj["id"], spath + ".id", sink, v))
                    step.step_id = static_cast<StepId>(v);
                else if (!sj.contains("id"))
                    sink.add(spath + ".id", "required");
                if (sj.contains("group") && want_int(sj["group"], spath + ".group", sink, v))
                    step.order_group = static_cast<int>(v);
                else if (!sj.contains("group"))
                    sink.add(spath + ".group", "required");
                if (sj.contains("durations"))
                    parse_durations(sj["durations"], spath + ".durations", sink, step);
                else
                    sink.add(spath + ".durations", "required");
                type.steps.push_back(std::move(step));
            }
            validate_steps(tpath, type, inst.machines, inst.homogeneous, sink);
            inst.types[it.key()] = std::move(type);
        }
    }

    if (!doc.contains("pieces") || !doc["pieces"].is_array()) {
        sink.add("pieces", "required list of pieces");
    } else {
        size_t i = 0;
        for (const auto &pj : doc["pieces"]) {
            const std::string ppath = "pieces[" + std::to_string(i++) + "]";
            Piece p;
            if (!pj.is_object()) {
                sink.add(ppath, "expected a piece object");
                continue;
            }
            long long v = 0;
            if (pj.contains("id") && want_int(pj["id"], ppath + ".id", sink, v)) {
                if (v <= 0) sink.add(ppath + ".id", "piece id must be a positive integer");
                p.piece_id = static_cast<PieceId>(v);
            } else if (!pj.contains("id")) {
                sink.add(ppath + ".id", "required");
            }
            if (pj.contains("type") && pj["type"].is_string()) {
                p.type_id = pj["type"].get<std::string>();
                if (!inst.types.count(p.type_id))
                    sink.add(ppath + ".type", "unknown type '" + p.type_id + "'");
            } else {
                sink.add(ppath + ".type", "required string");
            }
            if (pj.contains("priority") && want_int(pj["priority"], ppath + ".priority", sink, v)) {
                if (v <= 0) sink.add(ppath + ".priority", "priority must be a positive integer");
                p.priority = static_cast<int>(v);
            } else if (!pj.contains("priority")) {
                sink.add(ppath + ".priority", "required");
            }
            for (const auto &other : inst.pieces)
                if (other.piece_id == p.piece_id)
                    sink.add(ppath + ".id", "duplicate piece id");
            inst.pieces.push_back(std::move(p));
        }
    }

    if (!doc.contains("cost") || !doc["cost"].is_object()) {
        sink.add("cost", "required cost model object");
    } else {
        const json &cj = doc["cost"];
        if (cj.contains("machine_rate") && cj["machine_rate"].is_object()) {
            for (auto it = cj["machine_rate"].begin(); it != cj["machine_rate"].end(); ++it) {
                MachineId m = 0;
                const std::string rpath = "cost.machine_rate." + it.key();
                if (!parse_machine_key(it.key(), m)) {
                    sink.add(rpath, "machine key is not a positive integer");
                    continue;
                }
                double r = 0;
                if (!want_number(it.value(), rpath, sink, r)) continue;
                if (!(r >= 0) || !std::isfinite(r)) {
                    sink.add(rpath, "rate must be finite and >= 0");
                    continue;
                }
                inst.cost.machine_rate[m] = r;
            }
            for (MachineId m : inst.machines)
                if (!inst.cost.machine_rate.count(m))
                    sink.add("cost.machine_rate", "missing machine " + std::to_string(m));
        } else {
            sink.add("cost.machine_rate", "required map of machine id to rate");
        }
        double v = 0;
        if (cj.contains("jump_cost") && want_number(cj["jump_cost"], "cost.jump_cost", sink, v)) {
            if (!(v >= 0) || !std::isfinite(v))
                sink.add("cost.jump_cost", "must be finite and >= 0");
            inst.cost.jump_cost = v;
        } else if (!cj.contains("jump_cost")) {
            sink.add("cost.jump_cost", "required");
        }
        if (cj.contains("storage_cost") &&
            want_number(cj["storage_cost"], "cost.storage_cost", sink, v)) {
            if (!(v >= 0) || !std::isfinite(v))
                sink.add("cost.storage_cost", "must be finite and >= 0");
            inst.cost.storage_cost = v;
        } else if (!cj.contains("storage_cost")) {
            sink.add("cost.storage_cost", "required");
        }
    }

    if (doc.contains("horizon")) {
        long long v = 0;
        if (want_int(doc["horizon"], "horizon", sink, v)) {
            if (v <= 0)
                sink.add("horizon", "horizon must be a positive integer");
            else
                inst.horizon_hint = static_cast<int>(v);
        }
    }

    if (!sink.empty()) throw SemanticError(sink.take());
    return inst;
}

std::string serialize_problem(const ProblemInstance &instance) {
    json doc;
    doc["machines"] = instance.machines;
    if (instance.homogeneous) doc["homogeneous"] = true;
    json types = json::object();
    for (const auto &[id, type] : instance.types) {
        json steps = json::array();
        for (const auto &s : type.steps) {
            json dur = json::object();
            for (const auto &[m, d] : s.durations) dur[std::to_string(m)] = d;
            steps.push_back({{"id", s.step_id}, {"group", s.order_group}, {"durations", dur}});
        }
        types[id] = steps;
    }
    doc["types"] = types;
    json pieces = json::array();
    for (const auto &p : instance.pieces)
        pieces.push_back({{"id", p.piece_id}, {"type", p.type_id}, {"priority", p.priority}});
    doc["pieces"] = pieces;
    json rate = json::object();
    for (const auto &[m, r] : instance.cost.machine_rate) rate[std::to_string(m)] = r;
    doc["cost"] = {{"machine_rate", rate},
                   {"jump_cost", instance.cost.jump_cost},
                   {"storage_cost", instance.cost.storage_cost}};
    if (instance.horizon_hint) doc["horizon"] = *instance.horizon_hint;
    return doc.dump(2) + "\n";
}

ProblemInstance override_pieces(const ProblemInstance &instance, const std::string &spec) {
    ProblemInstance out = instance;
    out.pieces.clear();
    PieceId next_id = 1;
    std::stringstream ss(spec);
    std::string entry;
    while (std::getline(ss, entry, ',')) {
        if (entry.empty()) continue;
        auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw SemanticError({{"pieces", "bad piece spec '" + entry + "', expected TYPE=N"}});
        std::string type = entry.substr(0, eq);
        int count = 0;
        try {
            count = std::stoi(entry.substr(eq + 1));
        } catch (...) {
            throw SemanticError({{"pieces", "bad piece count in '" + entry + "'"}});
        }
        if (!instance.types.count(type))
            throw UnknownType("UnknownType: '" + type + "'");
        if (count < 0) throw SemanticError({{"pieces", "piece count must be >= 0"}});
        for (int k = 1; k <= count; ++k)
            out.pieces.push_back({next_id++, type, k});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Plan documents

Plan plan_from_json(const std::string &text, const ProblemInstance &instance) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error &e) {
        throw SyntaxError(std::string("SyntaxError: ") + e.what());
    }
    IssueSink sink;
    std::vector<Placement> placements;
    if (!doc.is_object() || !doc.contains("placements") || !doc["placements"].is_array()) {
        sink.add("placements", "required list");
        throw SemanticError(sink.take());
    }
    size_t i = 0;
    for (const auto &pj : doc["placements"]) {
        const std::string path = "placements[" + std::to_string(i++) + "]";
        Placement pl;
        long long v = 0;
        bool ok = pj.is_object();
        if (!ok) {
            sink.add(path, "expected an object");
            continue;
        }
        for (const char *key : {"piece", "step", "machine", "start", "finish"}) {
            if (!pj.contains(key)) {
                sink.add(path + "." + key, "required");
                ok = false;
            }
        }
        if (!ok) continue;
        if (want_int(pj["piece"], path + ".piece", sink, v)) pl.piece_id = (PieceId)v;
        if (want_int(pj["step"], path + ".step", sink, v)) pl.step_id = (StepId)v;
        if (want_int(pj["machine"], path + ".machine", sink, v)) pl.machine = (MachineId)v;
        if (want_int(pj["start"], path + ".start", sink, v)) pl.start = (int)v;
        if (want_int(pj["finish"], path + ".finish", sink, v)) pl.finish = (int)v;
        placements.push_back(pl);
    }
    if (!sink.empty()) throw SemanticError(sink.take());
    Plan plan = Plan::from_placements(std::move(placements), instance);
    if (doc.contains("metrics") && doc["metrics"].is_object()) {
        const json &m = doc["metrics"];
        if (m.contains("makespan") && m["makespan"].is_number_integer() &&
            m["makespan"].get<int>() != plan.makespan)
            sink.add("metrics.makespan", "does not match recomputed value " +
                                             std::to_string(plan.makespan));
        if (m.contains("jumps") && m["jumps"].is_number_integer() &&
            m["jumps"].get<int>() != plan.jumps)
            sink.add("metrics.jumps",
                     "does not match recomputed value " + std::to_string(plan.jumps));
        if (m.contains("cost") && m["cost"].is_number() &&
            std::abs(m["cost"].get<double>() - plan.cost) > 1e-9)
            sink.add("metrics.cost", "does not match recomputed value");
    }
    if (!sink.empty()) throw SemanticError(sink.take());
    return plan;
}

std::string plan_to_json(const Plan &plan) {
    json doc;
    json placements = json::array();
    for (const auto &p : plan.placements)
        placements.push_back({{"piece", p.piece_id},
                              {"step", p.step_id},
                              {"machine", p.machine},
                              {"start", p.start},
                              {"finish", p.finish}});
    doc["placements"] = placements;
    doc["metrics"] = {{"makespan", plan.makespan}, {"jumps", plan.jumps}, {"cost", plan.cost}};
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Metrics

static std::map<PieceId, std::vector<const Placement *>> by_piece(
    const std::vector<Placement> &placements) {
    std::map<PieceId, std::vector<const Placement *>> out;
    for (const auto &p : placements) out[p.piece_id].push_back(&p);
    for (auto &[id, list] : out)
        std::sort(list.begin(), list.end(), [](const Placement *a, const Placement *b) {
            return std::tie(a->start, a->step_id) < std::tie(b->start, b->step_id);
        });
    return out;
}

int total_jumps(const std::vector<Placement> &placements) {
    int jumps = 0;
    for (const auto &[id, list] : by_piece(placements))
        for (size_t i = 1; i < list.size(); ++i)
            if (list[i]->machine != list[i - 1]->machine) ++jumps;
    return jumps;
}

int count_jumps(const Plan &plan, PieceId piece, const ProblemInstance &instance) {
    const Piece *p = instance.find_piece(piece);
    if (!p) throw MissingSteps("MissingSteps: unknown piece " + std::to_string(piece));
    const WorkpieceType *type = instance.find_type(p->type_id);
    auto groups = by_piece(plan.placements);
    auto it = groups.find(piece);
    size_t have = it == groups.end() ? 0 : it->second.size();
    if (!type || have != type->steps.size())
        throw MissingSteps("MissingSteps: piece " + std::to_string(piece) + " has " +
                           std::to_string(have) + " of " +
                           std::to_string(type ? type->steps.size() : 0) + " steps placed");
    int jumps = 0;
    for (size_t i = 1; i < it->second.size(); ++i)
        if (it->second[i]->machine != it->second[i - 1]->machine) ++jumps;
    return jumps;
}

double compute_cost(const Plan &plan, const CostModel &cost, const ProblemInstance &baseline) {
    (void)baseline;
    double total = 0;
    for (const auto &p : plan.placements) {
        auto it = cost.machine_rate.find(p.machine);
        double rate = it == cost.machine_rate.end() ? 0.0 : it->second;
        total += (p.finish - p.start) * rate;
    }
    total += cost.jump_cost * total_jumps(plan.placements);
    double delay_slots = 0;
    for (const auto &[id, list] : by_piece(plan.placements)) {
        int prev_finish = 0;
        for (const Placement *p : list) {
            delay_slots += std::max(0, p->start - prev_finish);
            prev_finish = p->finish;
        }
    }
    total += cost.storage_cost * delay_slots;
    return total;
}

Plan Plan::from_placements(std::vector<Placement> placements, const ProblemInstance &instance) {
    std::sort(placements.begin(), placements.end(),
              [](const Placement &a, const Placement &b) {
                  return std::tie(a.piece_id, a.start, a.step_id, a.machine) <
                         std::tie(b.piece_id, b.start, b.step_id, b.machine);
              });
    Plan plan;
    plan.placements = std::move(placements);
    for (const auto &p : plan.placements) plan.makespan = std::max(plan.makespan, p.finish);
    plan.jumps = total_jumps(plan.placements);
    plan.cost = compute_cost(plan, instance.cost, instance);
    return plan;
}

// ---------------------------------------------------------------------------
// min_jumps: per group a bitmask relaxation over (done set, machine), groups
// chained through the machine the previous group ended on.

MinJumpRoute min_jump_route(const WorkpieceType &type) {
    MinJumpRoute route;
    if (type.steps.empty()) return route;

    std::vector<MachineId> machines;
    for (const auto &s : type.steps)
        for (const auto &[m, d] : s.durations)
            if (d > 0 && std::find(machines.begin(), machines.end(), m) == machines.end())
                machines.push_back(m);
    std::sort(machines.begin(), machines.end());
    if (machines.empty()) return route;
    const int M = static_cast<int>(machines.size());

    std::vector<std::vector<const StepSpec *>> groups;
    for (const auto &s : type.steps) {
        if (groups.empty() || s.order_group != groups.back().front()->order_group)
            groups.emplace_back();
        groups.back().push_back(&s);
    }
    for (const auto &g : groups)
        if (g.size() > 16)
            throw GroupTooLarge("GroupTooLarge: group of " + std::to_string(g.size()) +
                                " steps exceeds the min-jump search guard");

    const int INF = 1 << 28;
    // h[m]: fewest machine changes over the processed groups, ending on machines[m]
    std::vector<int> h(M, 0);
    struct Cell {
        int cost = 1 << 28;
        int prev_machine = -1;
        int step_index = -1;  // index inside the group placed last
    };
    struct GroupTrace {
        std::vector<std::vector<Cell>> table;  // [mask][machine]
        std::vector<const StepSpec *> steps;
    };
    std::vector<GroupTrace> traces;

    for (const auto &g : groups) {
        const int n = static_cast<int>(g.size());
        const int full = (1 << n) - 1;
        GroupTrace trace;
        trace.steps = g;
        trace.table.assign(full + 1, std::vector<Cell>(M));
        for (int m = 0; m < M; ++m) trace.table[0][m].cost = h[m];
        for (int mask = 0; mask <= full; ++mask) {
            for (int m = 0; m < M; ++m) {
                const Cell &cur = trace.table[mask][m];
                if (cur.cost >= INF) continue;
                for (int t = 0; t < n; ++t) {
                    if (mask & (1 << t)) continue;
                    for (int m2 = 0; m2 < M; ++m2) {
                        if (!g[t]->capable(machines[m2])) continue;
                        // h starts at 0 on every machine, so the first step of
                        // the route fixes its machine at no cost via m == m2
                        int cost = cur.cost + (m2 == m ? 0 : 1);
                        Cell &dst = trace.table[mask | (1 << t)][m2];
                        if (cost < dst.cost) {
                            dst.cost = cost;
                            dst.prev_machine = m;
                            dst.step_index = t;
                        }
                    }
                }
            }
        }
        for (int m = 0; m < M; ++m) h[m] = trace.table[full][m].cost;
        traces.push_back(std::move(trace));
    }

    int best_m = 0;
    for (int m = 1; m < M; ++m)
        if (h[m] < h[best_m]) best_m = m;
    route.jumps = h[best_m];

    // walk the tables backwards to recover one optimal order + machine choice
    int end_m = best_m;
    std::vector<std::pair<StepId, MachineId>> rev;
    for (auto it = traces.rbegin(); it != traces.rend(); ++it) {
        int mask = (1 << static_cast<int>(it->steps.size())) - 1;
        int m = end_m;
        while (mask != 0) {
            const Cell &cell = it->table[mask][m];
            rev.emplace_back(it->steps[cell.step_index]->step_id, machines[m]);
            mask &= ~(1 << cell.step_index);
            m = cell.prev_machine;
        }
        end_m = m;
    }
    for (auto it = rev.rbegin(); it != rev.rend(); ++it) {
        route.order.push_back(it->first);
        route.machines.push_back(it->second);
    }
    return route;
}

int min_jumps(const WorkpieceType &type) { return min_jump_route(type).jumps; }

// ---------------------------------------------------------------------------
// Feasibility

static std::string place_str(const Placement &p) {
    std::ostringstream out;
    out << "piece " << p.piece_id << " step " << p.step_id << " [" << p.start << "," << p.finish
        << ")";
    return out.str();
}

std::vector<Violation> check_feasibility(const Plan &plan, const ProblemInstance &instance) {
    std::vector<Violation> out;
    auto add = [&](ViolationCode code, const std::string &detail) {
        out.push_back({code, detail});
    };

    // reference checks + per-placement invariants
    std::map<std::pair<PieceId, StepId>, int> seen;
    for (const auto &p : plan.placements) {
        const Piece *piece = instance.find_piece(p.piece_id);
        if (!piece) {
            add(ViolationCode::UnknownRef, "unknown piece " + std::to_string(p.piece_id));
            continue;
        }
        const WorkpieceType *type = instance.find_type(piece->type_id);
        const StepSpec *step = type ? type->find_step(p.step_id) : nullptr;
        if (!step) {
            add(ViolationCode::UnknownRef, place_str(p) + ": unknown step for type " +
                                               piece->type_id);
            continue;
        }
        if (++seen[{p.piece_id, p.step_id}] > 1)
            add(ViolationCode::DuplicateStep, place_str(p) + " placed more than once");
        if (std::find(instance.machines.begin(), instance.machines.end(), p.machine) ==
            instance.machines.end()) {
            add(ViolationCode::UnknownRef,
                place_str(p) + ": unknown machine " + std::to_string(p.machine));
            continue;
        }
        if (!step->capable(p.machine))
            add(ViolationCode::Capability, place_str(p) + ": machine " +
                                               std::to_string(p.machine) +
                                               " cannot run this step");
        else if (p.finish != p.start + step->duration(p.machine) || p.start < 0)
            add(ViolationCode::BadFinish,
                place_str(p) + ": finish must equal start + duration on machine " +
                    std::to_string(p.machine));
    }

    // completeness
    for (const auto &piece : instance.pieces) {
        const WorkpieceType *type = instance.find_type(piece.type_id);
        if (!type) continue;
        for (const auto &s : type->steps)
            if (!seen.count({piece.piece_id, s.step_id}))
                add(ViolationCode::MissingStep, "piece " + std::to_string(piece.piece_id) +
                                                    " step " + std::to_string(s.step_id) +
                                                    " not placed");
    }

    // machine exclusivity
    std::map<MachineId, std::vector<const Placement *>> per_machine;
    for (const auto &p : plan.placements) per_machine[p.machine].push_back(&p);
    for (auto &[m, list] : per_machine) {
        std::sort(list.begin(), list.end(), [](const Placement *a, const Placement *b) {
            return std::tie(a->start, a->piece_id, a->step_id) <
                   std::tie(b->start, b->piece_id, b->step_id);
        });
        for (size_t i = 0; i + 1 < list.size(); ++i)
            if (list[i + 1]->start < list[i]->finish)
                add(ViolationCode::MachineOverlap,
                    "machine " + std::to_string(m) + ": " + place_str(*list[i]) +
                        " overlaps " + place_str(*list[i + 1]));
    }

    // per-piece group precedence and intra-group exclusivity
    for (const auto &piece : instance.pieces) {
        const WorkpieceType *type = instance.find_type(piece.type_id);
        if (!type) continue;
        std::map<int, std::vector<const Placement *>> per_group;
        for (const auto &p : plan.placements) {
            if (p.piece_id != piece.piece_id) continue;
            const StepSpec *step = type->find_step(p.step_id);
            if (step) per_group[step->order_group].push_back(&p);
        }
        for (auto it = per_group.begin(); it != per_group.end(); ++it) {
            auto next = std::next(it);
            if (next != per_group.end() && next->first == it->first + 1) {
                for (const Placement *a : it->second)
                    for (const Placement *b : next->second)
                        if (b->start < a->finish)
                            add(ViolationCode::GroupPrecedence,
                                place_str(*b) + " starts before group " +
                                    std::to_string(it->first) + " finishes (" + place_str(*a) +
                                    ")");
            }
            auto &list = it->second;
            std::sort(list.begin(), list.end(), [](const Placement *a, const Placement *b) {
                return std::tie(a->start, a->step_id) < std::tie(b->start, b->step_id);
            });
            for (size_t i = 0; i + 1 < list.size(); ++i)
                if (list[i + 1]->start < list[i]->finish)
                    add(ViolationCode::IntraGroupOverlap,
                        place_str(*list[i]) + " overlaps " + place_str(*list[i + 1]) +
                            " of the same group");
        }
    }

    // C7: same-type pieces with smaller priority start each step strictly earlier
    std::map<std::pair<PieceId, StepId>, const Placement *> placed;
    for (const auto &p : plan.placements) {
        auto key = std::make_pair(p.piece_id, p.step_id);
        if (!placed.count(key)) placed[key] = &p;
    }
    for (const auto &a : instance.pieces) {
        for (const auto &b : instance.pieces) {
            if (a.type_id != b.type_id || a.priority >= b.priority) continue;
            const WorkpieceType *type = instance.find_type(a.type_id);
            if (!type) continue;
            for (const auto &s : type->steps) {
                auto pa = placed.find({a.piece_id, s.step_id});
                auto pb = placed.find({b.piece_id, s.step_id});
                if (pa == placed.end() || pb == placed.end()) continue;
                if (pa->second->start >= pb->second->start)
                    add(ViolationCode::Priority,
                        "step " + std::to_string(s.step_id) + ": piece " +
                            std::to_string(a.piece_id) + " (priority " +
                            std::to_string(a.priority) + ") must start before piece " +
                            std::to_string(b.piece_id) + " (priority " +
                            std::to_string(b.priority) + ")");
            }
        }
    }

    return out;
}

}  // namespace agentplan
