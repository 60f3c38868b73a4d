#include "mlb/scenario.hpp"

#include <algorithm>
#include <fstream>

namespace mlb {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const char* where,
                  std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed) {
            if (it.key() == key) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw ScenarioError(std::string("unknown field '") + it.key() + "' in " + where);
        }
    }
}

double get_num(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) {
        throw ScenarioError(std::string("field '") + key + "' must be a number");
    }
    return obj[key].get<double>();
}

std::uint64_t get_u64(const json& obj, const char* key, std::uint64_t fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_unsigned() && !obj[key].is_number_integer()) {
        throw ScenarioError(std::string("field '") + key + "' must be an integer");
    }
    return obj[key].get<std::uint64_t>();
}

Distribution parse_distribution(const json& obj, const char* where) {
    if (obj.is_number()) {
        return {Distribution::Kind::Constant, obj.get<double>(), 0.0};
    }
    if (!obj.is_object() || obj.size() != 1) {
        throw ScenarioError(std::string("distribution ") + where +
                            " must be a number or a one-key object");
    }
    Distribution d;
    if (obj.contains("constant")) {
        d.kind = Distribution::Kind::Constant;
        d.a = obj["constant"].get<double>();
    } else if (obj.contains("uniform")) {
        const auto& bounds = obj["uniform"];
        if (!bounds.is_array() || bounds.size() != 2) {
            throw ScenarioError(std::string("uniform distribution ") + where +
                                " needs [lo, hi]");
        }
        d.kind = Distribution::Kind::Uniform;
        d.a = bounds[0].get<double>();
        d.b = bounds[1].get<double>();
    } else if (obj.contains("exponential")) {
        d.kind = Distribution::Kind::Exponential;
        d.a = obj["exponential"].get<double>();
    } else {
        throw ScenarioError(std::string("distribution ") + where +
                            " must be constant, uniform, or exponential");
    }
    return d;
}

json distribution_to_json(const Distribution& d) {
    switch (d.kind) {
    case Distribution::Kind::Constant: return json{{"constant", d.a}};
    case Distribution::Kind::Uniform: return json{{"uniform", {d.a, d.b}}};
    case Distribution::Kind::Exponential: return json{{"exponential", d.a}};
    }
    return {};
}

Workload parse_workload(const json& obj) {
    require_keys(obj, "workload",
                 {"kind", "tasks", "rate", "count", "start_time", "batch_size", "batch_count",
                  "batch_offset", "users", "size", "cost", "deadline"});
    Workload w;
    const std::string kind = obj.value("kind", "explicit");
    if (kind == "explicit") {
        w.kind = Workload::Kind::Explicit;
        for (const auto& t : obj.value("tasks", json::array())) {
            require_keys(t, "task",
                         {"id", "user", "fingerprint", "size", "cost", "arrival", "deadline"});
            Task task;
            task.id = get_u64(t, "id", 0);
            task.user_id = get_u64(t, "user", 1);
            task.payload_fingerprint = get_u64(t, "fingerprint", task.id);
            task.size = get_num(t, "size", 0.0);
            task.cost = get_num(t, "cost", 0.0);
            task.arrival_time = get_num(t, "arrival", 0.0);
            task.deadline_hint = get_num(t, "deadline", 0.0);
            w.tasks.push_back(task);
        }
    } else if (kind == "poisson") {
        w.kind = Workload::Kind::Poisson;
        w.rate = get_num(obj, "rate", 0.0);
        w.count = get_u64(obj, "count", 0);
        w.start_time = get_num(obj, "start_time", 0.0);
    } else if (kind == "batches") {
        w.kind = Workload::Kind::Batches;
        w.batch_size = get_u64(obj, "batch_size", 0);
        w.batch_count = get_u64(obj, "batch_count", 0);
        w.batch_offset = get_num(obj, "batch_offset", 0.0);
    } else {
        throw ScenarioError("workload.kind must be explicit, poisson, or batches");
    }
    w.n_users = static_cast<std::uint32_t>(get_u64(obj, "users", 1));
    if (obj.contains("size")) w.size = parse_distribution(obj["size"], "workload.size");
    if (obj.contains("cost")) w.cost = parse_distribution(obj["cost"], "workload.cost");
    if (obj.contains("deadline")) {
        w.deadline = parse_distribution(obj["deadline"], "workload.deadline");
    }
    return w;
}

} // namespace

double Distribution::sample(SplitMix64& rng) const {
    switch (kind) {
    case Kind::Constant: return a;
    case Kind::Uniform: return rng.uniform(a, b);
    case Kind::Exponential: return rng.exponential(a);
    }
    return a;
}

double Distribution::mean() const {
    switch (kind) {
    case Kind::Constant: return a;
    case Kind::Uniform: return (a + b) / 2.0;
    case Kind::Exponential: return a;
    }
    return a;
}

Scenario scenario_from_json(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw ScenarioError("scenario document must be a JSON object");
    }
    require_keys(doc, "scenario",
                 {"processors", "schedulers", "scheduler_capacity_scores", "workload", "sla",
                  "feedback_interval", "message_latency", "election_timeout", "fault_schedule",
                  "seed", "flags", "cost_model", "cluster_capacity", "horizon"});
    Scenario s;
    for (const auto& p : doc.value("processors", json::array())) {
        require_keys(p, "processor", {"id", "speed", "bandwidth", "price", "energy_rate"});
        ProcessorSpec spec;
        spec.id = static_cast<ProcessorId>(get_u64(p, "id", 0));
        spec.speed = get_num(p, "speed", 0.0);
        spec.bandwidth = get_num(p, "bandwidth", 0.0);
        spec.price = get_num(p, "price", 0.0);
        spec.energy_rate = get_num(p, "energy_rate", 0.0);
        s.processors.push_back(spec);
    }
    s.n_schedulers = static_cast<std::uint32_t>(get_u64(doc, "schedulers", 1));
    if (doc.contains("scheduler_capacity_scores")) {
        for (const auto& v : doc["scheduler_capacity_scores"]) {
            s.scheduler_capacity_scores.push_back(v.get<double>());
        }
    }
    if (doc.contains("workload")) s.workload = parse_workload(doc["workload"]);
    if (doc.contains("sla")) {
        require_keys(doc["sla"], "sla", {"cost_margin", "time_margin"});
        s.sla.cost_margin = get_num(doc["sla"], "cost_margin", 0.0);
        s.sla.time_margin = get_num(doc["sla"], "time_margin", 1.0);
    }
    s.feedback_interval = get_num(doc, "feedback_interval", 1.0);
    s.message_latency = get_num(doc, "message_latency", 0.0);
    s.election_timeout = get_num(doc, "election_timeout", 0.0);
    for (const auto& f : doc.value("fault_schedule", json::array())) {
        require_keys(f, "fault", {"time", "target", "id", "action"});
        FaultSpec fault;
        fault.time = get_num(f, "time", 0.0);
        const std::string target = f.value("target", "");
        if (target == "scheduler") {
            fault.target_kind = FaultSpec::TargetKind::Scheduler;
        } else if (target == "processor") {
            fault.target_kind = FaultSpec::TargetKind::Processor;
        } else {
            throw ScenarioError("fault.target must be scheduler or processor");
        }
        fault.target = static_cast<std::uint32_t>(get_u64(f, "id", 0));
        const std::string action = f.value("action", "");
        if (action == "crash") {
            fault.action = FaultSpec::Action::Crash;
        } else if (action == "recover") {
            fault.action = FaultSpec::Action::Recover;
        } else {
            throw ScenarioError("fault.action must be crash or recover");
        }
        s.fault_schedule.push_back(fault);
    }
    s.seed = get_u64(doc, "seed", 0);
    if (doc.contains("flags")) {
        require_keys(doc["flags"], "flags", {"rc_formula", "corrected_semantics"});
        const std::string rc = doc["flags"].value("rc_formula", "printed");
        if (rc == "printed") {
            s.flags.rc_formula = RcFormula::Printed;
        } else if (rc == "normalized") {
            s.flags.rc_formula = RcFormula::Normalized;
        } else {
            throw ScenarioError("flags.rc_formula must be printed or normalized");
        }
        s.flags.corrected_semantics = doc["flags"].value("corrected_semantics", false);
    }
    if (doc.contains("cost_model")) {
        require_keys(doc["cost_model"], "cost_model", {"server_cost_per_second", "sla_penalty"});
        s.cost_model.server_cost_per_second =
            get_num(doc["cost_model"], "server_cost_per_second", 0.0);
        s.cost_model.sla_penalty = get_num(doc["cost_model"], "sla_penalty", 0.0);
    }
    s.cluster_capacity = get_num(doc, "cluster_capacity", 0.0);
    s.horizon = get_num(doc, "horizon", 0.0);
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ScenarioError("cannot open scenario file: " + path);
    }
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ScenarioError(std::string("scenario parse error: ") + e.what());
    }
    return scenario_from_json(doc);
}

nlohmann::ordered_json scenario_to_json(const Scenario& s) {
    nlohmann::ordered_json doc;
    auto& procs = doc["processors"] = nlohmann::ordered_json::array();
    for (const auto& p : s.processors) {
        procs.push_back({{"id", p.id},
                         {"speed", p.speed},
                         {"bandwidth", p.bandwidth},
                         {"price", p.price},
                         {"energy_rate", p.energy_rate}});
    }
    doc["schedulers"] = s.n_schedulers;
    if (!s.scheduler_capacity_scores.empty()) {
        doc["scheduler_capacity_scores"] = s.scheduler_capacity_scores;
    }
    nlohmann::ordered_json w;
    switch (s.workload.kind) {
    case Workload::Kind::Explicit: {
        w["kind"] = "explicit";
        auto& tasks = w["tasks"] = nlohmann::ordered_json::array();
        for (const auto& t : s.workload.tasks) {
            tasks.push_back({{"id", t.id},
                             {"user", t.user_id},
                             {"fingerprint", t.payload_fingerprint},
                             {"size", t.size},
                             {"cost", t.cost},
                             {"arrival", t.arrival_time},
                             {"deadline", t.deadline_hint}});
        }
        break;
    }
    case Workload::Kind::Poisson:
        w["kind"] = "poisson";
        w["rate"] = s.workload.rate;
        w["count"] = s.workload.count;
        w["start_time"] = s.workload.start_time;
        break;
    case Workload::Kind::Batches:
        w["kind"] = "batches";
        w["batch_size"] = s.workload.batch_size;
        w["batch_count"] = s.workload.batch_count;
        w["batch_offset"] = s.workload.batch_offset;
        break;
    }
    if (s.workload.kind != Workload::Kind::Explicit) {
        w["users"] = s.workload.n_users;
        w["size"] = distribution_to_json(s.workload.size);
        w["cost"] = distribution_to_json(s.workload.cost);
        w["deadline"] = distribution_to_json(s.workload.deadline);
    }
    doc["workload"] = w;
    doc["sla"] = {{"cost_margin", s.sla.cost_margin}, {"time_margin", s.sla.time_margin}};
    doc["feedback_interval"] = s.feedback_interval;
    doc["message_latency"] = s.message_latency;
    if (s.election_timeout > 0.0) doc["election_timeout"] = s.election_timeout;
    auto& faults = doc["fault_schedule"] = nlohmann::ordered_json::array();
    for (const auto& f : s.fault_schedule) {
        faults.push_back(
            {{"time", f.time},
             {"target", f.target_kind == FaultSpec::TargetKind::Scheduler ? "scheduler"
                                                                          : "processor"},
             {"id", f.target},
             {"action", f.action == FaultSpec::Action::Crash ? "crash" : "recover"}});
    }
    doc["seed"] = s.seed;
    doc["flags"] = {
        {"rc_formula", s.flags.rc_formula == RcFormula::Printed ? "printed" : "normalized"},
        {"corrected_semantics", s.flags.corrected_semantics}};
    doc["cost_model"] = {{"server_cost_per_second", s.cost_model.server_cost_per_second},
                         {"sla_penalty", s.cost_model.sla_penalty}};
    if (s.cluster_capacity > 0.0) doc["cluster_capacity"] = s.cluster_capacity;
    if (s.horizon > 0.0) doc["horizon"] = s.horizon;
    return doc;
}

std::vector<Task> materialize_tasks(const Scenario& scenario) {
    const Workload& w = scenario.workload;
    std::vector<Task> tasks;
    SplitMix64 rng(scenario.seed);

    auto generated = [&](std::uint64_t index, double arrival) {
        Task t;
        t.id = index + 1;
        t.user_id = 1 + index % std::max<std::uint32_t>(1, w.n_users);
        t.payload_fingerprint = t.id;
        t.arrival_time = arrival;
        t.size = w.size.sample(rng);
        t.cost = w.cost.sample(rng);
        t.deadline_hint = w.deadline.sample(rng);
        return t;
    };

    switch (w.kind) {
    case Workload::Kind::Explicit:
        tasks = w.tasks;
        break;
    case Workload::Kind::Poisson: {
        double t = w.start_time;
        for (std::uint64_t i = 0; i < w.count; ++i) {
            t += rng.exponential(w.rate > 0.0 ? 1.0 / w.rate : 0.0);
            tasks.push_back(generated(i, t));
        }
        break;
    }
    case Workload::Kind::Batches: {
        std::uint64_t index = 0;
        for (std::uint64_t k = 0; k < w.batch_count; ++k) {
            const double arrival =
                static_cast<double>(k) * scenario.feedback_interval + w.batch_offset;
            for (std::uint64_t j = 0; j < w.batch_size; ++j) {
                tasks.push_back(generated(index++, arrival));
            }
        }
        break;
    }
    }
    std::stable_sort(tasks.begin(), tasks.end(),
                     [](const Task& a, const Task& b) { return a.arrival_time < b.arrival_time; });
    return tasks;
}

double initial_cluster_capacity(const Scenario& scenario) {
    if (scenario.cluster_capacity > 0.0) return scenario.cluster_capacity;
    double mean_size = 1.0;
    if (scenario.workload.kind == Workload::Kind::Explicit) {
        if (!scenario.workload.tasks.empty()) {
            double sum = 0.0;
            for (const Task& t : scenario.workload.tasks) sum += t.size;
            mean_size = sum / static_cast<double>(scenario.workload.tasks.size());
        }
    } else {
        mean_size = scenario.workload.size.mean();
    }
    if (mean_size <= 0.0) mean_size = 1.0;
    double cc = 0.0;
    for (const ProcessorSpec& p : scenario.processors) {
        cc += scenario.feedback_interval * p.speed / mean_size;
    }
    return cc;
}

double effective_horizon(const Scenario& scenario, const std::vector<Task>& tasks) {
    if (scenario.horizon > 0.0) return scenario.horizon;
    double last = scenario.feedback_interval;
    for (const Task& t : tasks) last = std::max(last, t.arrival_time);
    for (const FaultSpec& f : scenario.fault_schedule) last = std::max(last, f.time);
    return 10.0 * last;
}

} // namespace mlb
