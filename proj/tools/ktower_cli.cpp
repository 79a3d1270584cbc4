#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <ktower/json_io.hpp>

using namespace ktower;
using io::Json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_input = 1;
constexpr int exit_failed = 2;

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flag values of one subcommand, kept as text so that a JSON config can override them.
struct Params {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::vector<std::string> required;

    void add(const std::string& name, const std::string& help, const std::string& fallback = "") {
        values[name] = fallback;
        app->add_option("--" + name, values[name], help);
    }
    void need(const std::string& name, const std::string& help) {
        add(name, help);
        required.push_back(name);
    }

    const std::string& text(const std::string& name) const { return values.at(name); }
    bool has(const std::string& name) const { return !values.at(name).empty(); }

    std::int64_t integer(const std::string& name) const {
        const auto& s = text(name);
        try {
            std::size_t used = 0;
            const auto v = std::stoll(s, &used);
            if (used == s.size()) return v;
        } catch (const std::exception&) {
        }
        throw usage_error("--" + name + " expects an integer, got '" + s + "'");
    }
    Rational rational(const std::string& name) const { return parse_rational(text(name)); }
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string tok;
    while (std::getline(in, tok, sep)) out.push_back(tok);
    return out;
}

// "1/3,3/4" -> {[0,1/3), [1/3,3/4), [3/4,1)}
Partition partition_from_cuts(const std::string& cuts) {
    std::vector<IntervalSet> cells;
    Rational prev = 0;
    for (const auto& tok : split(cuts, ',')) {
        const Rational c = parse_rational(tok);
        require(c > prev && c < 1, "partition cut points must increase strictly inside (0,1)");
        cells.push_back(IntervalSet::interval(prev, c));
        prev = c;
    }
    cells.push_back(IntervalSet::interval(prev, 1));
    return Partition(std::move(cells));
}

Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot read " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw usage_error(path + " is not valid JSON: " + e.what());
    }
}

void apply_config(Params& p, const std::string& path) {
    const Json cfg = read_json_file(path);
    if (!cfg.is_object()) throw usage_error("config " + path + " must be a JSON object");
    for (const auto& [key, value] : cfg.items()) {
        auto it = p.values.find(key);
        if (it == p.values.end()) throw usage_error("config key '" + key + "' is not a flag of this command");
        if (value.is_string()) it->second = value.get<std::string>();
        else if (value.is_number_integer()) it->second = std::to_string(value.get<std::int64_t>());
        else throw usage_error("config key '" + key + "' must be a string or an integer");
    }
}

// Collects report lines and the failed postconditions of one run.
struct Report {
    std::vector<std::string> lines;
    std::vector<std::string> failures;

    void note(const std::string& key, const std::string& value) { lines.push_back(key + ": " + value); }
    void check(bool ok, const std::string& what) {
        lines.push_back((ok ? "ok: " : "FAILED: ") + what);
        if (!ok) failures.push_back(what);
    }
    void absorb(const std::vector<std::string>& problems) {
        for (const auto& p : problems) check(false, p);
    }
};

std::string join_ints(const std::vector<std::int64_t>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
    return out;
}

// Every column's levels 1..h-1 miss the base and level h lands back in it.
bool first_returns_hold(const OdometerSystem& sys, const Tower& t) {
    const IntervalSet b = tower_base(t);
    for (const auto& c : t.columns) {
        std::vector<int> label(static_cast<std::size_t>(c.height), 0);
        label[0] = -1;
        if (!(orbit_buckets(sys, c.base, label, 1)[0] & b).empty()) return false;
        if (!is_subset(image(sys, c.base, c.height), b)) return false;
    }
    return true;
}

void tower_checks(const OdometerSystem& sys, const Tower& t, Report& r) {
    r.note("heights", join_ints(heights(t)));
    r.note("gcd", std::to_string(gcd_heights(t)));
    const Rational kac = kac_sum(t);
    r.note("kac_sum", to_string(kac));
    r.check(tower_is_valid(sys, t), "levels are pairwise disjoint");
    r.check(first_returns_hold(sys, t), "column heights are first-return times");
    r.check(kac == 1, "Kac identity sum h*mu(B_h) = 1");
}

// ---------------------------------------------------------------------------------------

Json run_system(const Params& p, Report& r) {
    const OdometerSystem sys(p.integer("p"));
    Json doc{{"command", "system"}, {"system", io::system_json(sys)}};
    if (p.has("cylinder")) {
        const Word digits = parse_word(p.text("cylinder"));
        const IntervalSet c = cylinder_set(sys, digits);
        doc["cylinder"] = Json{{"digits", p.text("cylinder")}, {"set", io::to_json(c)}};
        r.note("cylinder", c.str());
        r.check(cylinder_period_check(sys, digits), "T^(p^|C|) C = C");
    }
    return doc;
}

Json tower_doc(const std::string& method, const Json& params, const OdometerSystem& sys) {
    return Json{{"command", "tower"}, {"method", method}, {"params", params}, {"system", io::system_json(sys)}};
}

// Recomputes a tower document from its params; shared by `tower` and `verify`.
Json compute_tower(const std::string& method, const Json& params, const OdometerSystem& sys, Report& r) {
    Json doc = tower_doc(method, params, sys);
    if (method == "kakutani") {
        const Tower t = kakutani_tower(sys, io::interval_set_from(params.at("base")), params.at("max_h").get<std::int64_t>());
        tower_checks(sys, t, r);
        doc["tower"] = io::to_json(t);
    } else if (method == "n1n2") {
        const auto n1 = params.at("n1").get<std::int64_t>(), n2 = params.at("n2").get<std::int64_t>();
        const Tower t = tower_n1n2(sys, n1, n2);
        tower_checks(sys, t, r);
        const auto hs = distinct_heights(t);
        r.check(hs == std::vector<std::int64_t>{std::min(n1, n2), std::max(n1, n2)}, "both heights attained and no others");
        doc["tower"] = io::to_json(t);
    } else if (method == "kr-prime") {
        const auto n1 = params.at("n1").get<std::int64_t>(), n2 = params.at("n2").get<std::int64_t>();
        const auto n = params.at("n").get<std::int64_t>();
        const Tower input = tower_n1n2(sys, n1, n2);
        const auto [t, tr] = kr_prime(sys, input, n);
        tower_checks(sys, t, r);
        const std::int64_t N = std::max(n1, n2);
        bool in_range = true;
        for (auto h : heights(t)) in_range = in_range && h >= n && h <= n + 6 * N;
        r.check(in_range, "heights inside [" + std::to_string(n) + "," + std::to_string(n + 6 * N) + "]");
        r.check(gcd_heights(t) == 1, "gcd of heights is 1");
        r.check(is_subset(tower_base(t), tower_base(input)), "D is inside C");
        bool doubling = true;
        for (std::size_t i = 0; i + 1 < tr.f_sets.size(); ++i)
            doubling = doubling && 2 * tr.f_sets[i].measure() <= tr.f_sets[i + 1].measure();
        r.check(doubling, "2 mu(F_i) <= mu(F_{i+1})");
        doc["tower"] = io::to_json(t);
        doc["trace"] = io::to_json(tr);
    } else if (method == "infinite") {
        const auto it = params.at("iterations").get<std::int64_t>();
        const auto res = infinite_heights_iterate(sys, io::interval_set_from(params.at("base")), it, params.at("max_h").get<std::int64_t>());
        tower_checks(sys, res.tower, r);
        r.note("distinct_heights", std::to_string(distinct_heights(res.tower).size()));
        bool shrink = true;
        for (std::int64_t k = 1; k <= it; ++k) {
            const Rational keep = 1 - Rational(Integer(1), Integer(1) << k);
            shrink = shrink && res.bases[static_cast<std::size_t>(k)].measure() > keep * res.bases[static_cast<std::size_t>(k - 1)].measure();
        }
        r.check(shrink, "mu(C_{k+1}) > (1 - 2^-k) mu(C_k) at every step");
        doc["tower"] = io::to_json(res.tower);
        doc["bases"] = io::sets_json(res.bases);
        doc["removed"] = io::sets_json(res.removed);
    } else {
        throw usage_error("unknown tower method '" + method + "'");
    }
    return doc;
}

Json run_tower(const std::string& method, const Params& p, Report& r) {
    const OdometerSystem sys(p.integer("p"));
    Json params = Json::object();
    if (method == "kakutani" || method == "infinite") {
        params["base"] = io::to_json(parse_interval_set(p.text("base")));
        params["max_h"] = p.integer("max-h");
    }
    if (method == "n1n2" || method == "kr-prime") {
        params["n1"] = p.integer("n1");
        params["n2"] = p.integer("n2");
    }
    if (method == "kr-prime") params["n"] = p.integer("n");
    if (method == "infinite") params["iterations"] = p.integer("iterations");
    return compute_tower(method, params, sys, r);
}

// ---------------------------------------------------------------------------------------

void report_prop42(const OdometerSystem& sys, const Prop42Trace& tr, Report& r) {
    r.note("depth", std::to_string(tr.depth));
    const Rational d = partition_metric(tr.a_hat, tr.alphas.back());
    r.note("distance", to_string(d));
    r.note("witnesses", std::to_string(tr.witnesses.size()));
    r.absorb(verify_prop42(sys, tr));
    r.check(d < tr.eps, "d(a_hat, alpha_M) < eps");
}

void report_prop51(const OdometerSystem& sys, const Prop51Trace& tr, Report& r) {
    r.note("N0", std::to_string(tr.schedule.n0));
    r.note("l0", std::to_string(tr.schedule.l0));
    r.note("eps0", to_string(tr.schedule.eps0));
    r.note("drift", to_string(tr.drift));
    const auto ch = verify_prop51(sys, tr);
    r.note("min_witness", to_string(ch.min_witness));
    r.note("e0_squared", to_string(ch.threshold));
    r.absorb(ch.problems);
    r.check(ch.strict, "(1)_0 witnesses exceed e_0^2");
}

void report_model(const OdometerSystem& sys, const ModelSequence& ms, Report& r) {
    const auto ch = verify_model_sequence_prop44(sys, ms);
    for (const auto& [nk, d] : ch.cauchy)
        r.note("d(gamma_" + std::to_string(nk.second) + "^" + std::to_string(nk.first) + ", previous)", to_string(d));
    for (const auto& [k, d] : ch.to_beta) r.note("d(gamma_" + std::to_string(k) + "^M, beta_" + std::to_string(k) + ")", to_string(d));
    r.absorb(ch.problems);
    r.check(ch.problems.empty(), "model array certificates");
}

Json construct_doc(const std::string& method, const OdometerSystem& sys) {
    return Json{{"command", "construct"}, {"method", method}, {"system", io::system_json(sys)}};
}

Json compute_construct(const std::string& method, const Json& inputs, const OdometerSystem& sys, Report& r) {
    Json doc = construct_doc(method, sys);
    doc["inputs"] = inputs;
    if (method == "wm-dense-min") {
        const auto tr = prop42_adjust(sys, io::partition_from(inputs.at("partition")), io::rational_from(inputs.at("eps")),
                                      inputs.at("depth").get<std::int64_t>());
        report_prop42(sys, tr, r);
        doc["trace"] = io::to_json(tr);
    } else if (method == "wm-proximal-prep") {
        const auto tr = prop51_adjust(sys, io::partition_from(inputs.at("partition")), io::rational_from(inputs.at("eps")),
                                      inputs.at("depth").get<std::int64_t>());
        report_prop51(sys, tr, r);
        doc["trace"] = io::to_json(tr);
    } else if (method == "model-sequence") {
        const auto betas = io::partitions_from(inputs.at("betas"));
        const auto eps = io::rationals_from(inputs.at("eps"));
        const auto depth = inputs.at("depth").get<std::int64_t>();
        const auto variant = io::variant_from(inputs.at("variant").get<std::string>());
        if (variant == ModelVariant::prop44) {
            const auto ms = build_model_sequence(sys, betas, eps, depth, variant);
            report_model(sys, ms, r);
            doc["trace"] = io::to_json(ms);
        } else {
            require(!betas.empty() && !eps.empty(), "model-sequence: need beta_0 and eps_0");
            const auto step0 = prop51_adjust(sys, betas[0], eps[0], depth);
            report_prop51(sys, step0, r);
            doc["trace"] = io::to_json(build_model_sequence(sys, betas, eps, depth, variant));
            doc["step0"] = io::to_json(step0);
        }
    } else {
        throw usage_error("unknown construction '" + method + "'");
    }
    return doc;
}

Json run_construct(const std::string& method, const Params& p, Report& r) {
    const OdometerSystem sys(p.integer("p"));
    Json inputs{{"depth", p.integer("depth")}};
    if (method == "model-sequence") {
        Json betas = Json::array();
        for (const auto& cuts : split(p.text("betas"), ';')) betas.push_back(io::to_json(partition_from_cuts(cuts)));
        Json eps = Json::array();
        for (const auto& e : split(p.text("eps"), ',')) eps.push_back(io::to_json(parse_rational(e)));
        inputs["betas"] = betas;
        inputs["eps"] = eps;
        inputs["variant"] = p.text("variant");
    } else {
        inputs["partition"] = io::to_json(partition_from_cuts(p.text("partition")));
        inputs["eps"] = io::to_json(p.rational("eps"));
    }
    return compute_construct(method, inputs, sys, r);
}

// ---------------------------------------------------------------------------------------

Json run_symbolic(const Params& p, Report& r) {
    const OdometerSystem sys(p.integer("p"));
    const Partition a = partition_from_cuts(p.text("partition"));
    const auto approx = symbolic_measure(sys, a, p.integer("L"));
    std::map<std::size_t, Rational> mass;
    for (const auto& [w, m] : approx.rho) mass[w.size()] += m;
    bool unit = true;
    for (const auto& [len, m] : mass) unit = unit && m == 1;
    r.note("support_words", std::to_string(approx.rho.size()));
    r.check(unit && static_cast<std::int64_t>(mass.size()) == approx.window, "mass 1 at every length");
    return Json{{"command", "symbolic"}, {"system", io::system_json(sys)}, {"partition", io::to_json(a)}, {"approx", io::to_json(approx)}};
}

Json run_detect(const Params& p, Report& r) {
    WindowSet s;
    if (p.has("set")) s = io::window_set_from(read_json_file(p.text("set")));
    else {
        std::vector<std::int64_t> members;
        if (p.has("members"))
            for (const auto& tok : split(p.text("members"), ',')) members.push_back(std::stoll(tok));
        s = WindowSet::make(p.integer("L"), members);
    }
    const auto g = p.integer("g"), len = p.integer("r");
    Json doc{{"command", "detect"}, {"set", io::to_json(s)}, {"g", g}, {"r", len}};
    if (s.members.empty()) doc["max_gap"] = nullptr;
    else doc["max_gap"] = max_gap(s);
    doc["syndetic"] = !s.members.empty() && max_gap(s) <= g;
    doc["longest_run"] = longest_run(s);
    doc["thick"] = longest_run(s) >= len;
    const auto pw = piecewise_syndetic_witness(s, g, len);
    doc["piecewise_syndetic"] = pw ? Json{{"first", pw->first}, {"last", pw->last}} : Json(nullptr);
    const auto ts = thickly_syndetic_witness(s, len, g);
    doc["thickly_syndetic"] = ts ? Json{{"starts", io::to_json(ts->starts)}, {"gap", ts->gap}} : Json(nullptr);
    r.note("syndetic", doc["syndetic"].dump());
    r.note("thick", doc["thick"].dump());
    r.note("piecewise_syndetic", pw ? "yes" : "no");
    r.note("thickly_syndetic", ts ? "yes" : "no");
    return doc;
}

Json run_quotient(const Params& p, Report& r) {
    const Json in = read_json_file(p.text("input"));
    const SymbolicApprox approx = io::symbolic_from(in.contains("approx") ? in.at("approx") : in);
    std::set<Word> words;
    if (p.has("words")) {
        for (const auto& w : split(p.text("words"), ';')) words.insert(parse_word(w));
    } else {
        words = window_minimal_words(approx, p.has("r") ? p.integer("r") : approx.window);
    }
    const auto q = quotient_min_closure(approx, words);
    std::map<std::size_t, Rational> before, after;
    for (const auto& [w, m] : approx.rho) before[w.size()] += m;
    for (const auto& [w, m] : q.rho) after[w.size()] += m;
    r.note("min_words", std::to_string(words.size()));
    r.check(before == after, "mass per length is conserved");
    Json mw = Json::array();
    for (const auto& w : words) mw.push_back(io::to_json(w));
    return Json{{"command", "quotient"}, {"min_words", mw}, {"approx", io::to_json(q)}};
}

// Rebuilds the document from its recorded inputs and compares it, then reruns the checks.
Json run_verify(const Params& p, Report& r) {
    const Json doc = read_json_file(p.text("trace"));
    if (!doc.is_object() || !doc.contains("command")) throw usage_error("not a trace file: no \"command\" field");
    const std::string command = doc.at("command").get<std::string>();
    const OdometerSystem sys = io::system_from(doc.at("system"));
    Json fresh;
    if (command == "tower") {
        fresh = compute_tower(doc.at("method").get<std::string>(), doc.at("params"), sys, r);
        const Tower stored = io::tower_from(doc.at("tower"));
        r.check(tower_is_valid(sys, stored), "stored tower levels are pairwise disjoint");
        r.check(kac_sum(stored) == 1, "stored tower satisfies the Kac identity");
    } else if (command == "construct") {
        const std::string method = doc.at("method").get<std::string>();
        fresh = compute_construct(method, doc.at("inputs"), sys, r);
        // the stored trace must pass the checks on its own, not only match
        if (method == "wm-dense-min") r.absorb(verify_prop42(sys, io::prop42_trace_from(doc.at("trace"))));
        else if (method == "wm-proximal-prep") r.absorb(verify_prop51(sys, io::prop51_trace_from(doc.at("trace"))).problems);
        else if (doc.contains("step0")) r.absorb(verify_prop51(sys, io::prop51_trace_from(doc.at("step0"))).problems);
        else r.absorb(verify_model_sequence_prop44(sys, io::model_sequence_from(doc.at("trace"))).problems);
    } else if (command == "symbolic") {
        fresh = Json{{"command", "symbolic"},
                     {"system", doc.at("system")},
                     {"partition", doc.at("partition")},
                     {"approx", io::to_json(symbolic_measure(sys, io::partition_from(doc.at("partition")),
                                                             doc.at("approx").at("L").get<std::int64_t>()))}};
    } else {
        throw usage_error("verify does not handle '" + command + "' documents");
    }
    for (const auto& [key, value] : doc.items()) {
        if (!fresh.contains(key)) r.check(false, "unexpected field '" + key + "'");
        else r.check(fresh.at(key) == value, "field '" + key + "' agrees with the recomputation");
    }
    for (const auto& [key, value] : fresh.items())
        if (!doc.contains(key)) r.check(false, "missing field '" + key + "'");
    return Json();
}

void write_output(const Json& doc, const std::string& out) {
    if (doc.is_null()) return;
    const std::string text = doc.dump() + "\n";
    if (out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out, std::ios::binary);
    if (!f) throw usage_error("cannot write " + out);
    f << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact odometer towers, symbolic names and constructions"};
    app.require_subcommand(1);

    std::string config, out;
    std::vector<std::pair<CLI::App*, Params>> commands;
    std::map<CLI::App*, std::function<Json(const Params&, Report&)>> handlers;
    auto command = [&](CLI::App* parent, const std::string& name, const std::string& help) {
        CLI::App* sub = parent->add_subcommand(name, help);
        sub->add_option("--config", config, "JSON object whose keys override the flags");
        sub->add_option("--out", out, "write the JSON document here instead of stdout");
        commands.push_back({sub, Params{sub, {}, {}}});
        return &commands.back();
    };
    commands.reserve(16);

    auto* sys_cmd = command(&app, "system", "describe an odometer and optionally check a cylinder's period");
    sys_cmd->second.need("p", "odometer base");
    sys_cmd->second.add("cylinder", "cylinder digits, e.g. 0110");
    handlers[sys_cmd->first] = run_system;

    CLI::App* tower = app.add_subcommand("tower", "build a tower and report heights, gcd and the Kac identity");
    tower->require_subcommand(1);
    for (const std::string method : {"kakutani", "n1n2", "kr-prime", "infinite"}) {
        auto* c = command(tower, method, method + " tower");
        c->second.need("p", "odometer base");
        if (method == "kakutani" || method == "infinite") {
            c->second.need("base", "base set, e.g. \"[0,3/4)\"");
            c->second.add("max-h", "height budget", "65536");
        }
        if (method == "n1n2" || method == "kr-prime") {
            c->second.need("n1", "first height");
            c->second.need("n2", "second height");
        }
        if (method == "kr-prime") c->second.need("n", "lower bound on the new heights");
        if (method == "infinite") c->second.add("iterations", "number of removal steps", "4");
        handlers[c->first] = [method](const Params& p, Report& r) { return run_tower(method, p, r); };
    }

    CLI::App* construct = app.add_subcommand("construct", "run a construction and re-verify its certificates");
    construct->require_subcommand(1);
    for (const std::string method : {"wm-dense-min", "wm-proximal-prep", "model-sequence"}) {
        auto* c = command(construct, method, method + " construction");
        c->second.add("p", "odometer base", "2");
        if (method == "model-sequence") {
            c->second.add("betas", "partitions as cut points, separated by ';'", "1/2;1/4");
            c->second.add("eps", "comma-separated eps_n", "1/16,1/32");
            c->second.add("depth", "depth", "2");
            c->second.add("variant", "weak-mixing or proximal", "weak-mixing");
        } else {
            c->second.add("partition", "cut points of the starting partition", "1/2");
            c->second.add("eps", "distance budget", method == "wm-dense-min" ? "1/8" : "1");
            c->second.add("depth", "depth", method == "wm-dense-min" ? "2" : "0");
        }
        handlers[c->first] = [method](const Params& p, Report& r) { return run_construct(method, p, r); };
    }

    CLI::App* symbolic = app.add_subcommand("symbolic", "symbolic approximations");
    symbolic->require_subcommand(1);
    auto* emit = command(symbolic, "emit", "cylinder measures of every word up to length L");
    emit->second.add("p", "odometer base", "2");
    emit->second.add("partition", "cut points", "1/2");
    emit->second.need("L", "window length");
    handlers[emit->first] = run_symbolic;

    auto* detect = command(&app, "detect", "run the four detectors on a window set");
    detect->second.add("set", "WindowSet JSON file");
    detect->second.add("L", "window length", "0");
    detect->second.add("members", "comma-separated members");
    detect->second.add("g", "gap bound", "1");
    detect->second.add("r", "run length", "1");
    handlers[detect->first] = run_detect;

    auto* quotient = command(&app, "quotient", "collapse a subword-closed set of words in a symbolic approximation");
    quotient->second.need("input", "SymbolicApprox JSON file (or a symbolic emit document)");
    quotient->second.add("words", "words to collapse, separated by ';' (default: window-minimal words)");
    quotient->second.add("r", "window for the minimal-word heuristic");
    handlers[quotient->first] = run_quotient;

    auto* verify = command(&app, "verify", "recompute a stored document and re-check its certificates");
    verify->second.need("trace", "document written by tower, construct or symbolic emit");
    handlers[verify->first] = run_verify;

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_input;
    }

    for (auto& [sub, params] : commands) {
        if (!sub->parsed()) continue;
        Report report;
        Json doc;
        try {
            if (!config.empty()) apply_config(params, config);
            for (const auto& name : params.required)
                if (params.values.at(name).empty()) throw usage_error("missing --" + name + "\n" + sub->help());
            doc = handlers.at(sub)(params, report);
            write_output(doc, out);
        } catch (const usage_error& e) {
            std::cerr << "error: " << e.what() << "\n";
            return exit_input;
        } catch (const Json::exception& e) {
            std::cerr << "error: malformed document: " << e.what() << "\n";
            return exit_input;
        } catch (const precondition_error& e) {
            // a stored document whose content breaks a domain rule is a failed verification
            if (sub == verify->first) {
                std::cout << "FAILED: stored document is not valid: " << e.what() << "\nstatus: verification failed\n";
                return exit_failed;
            }
            std::cerr << "error: " << e.what() << "\n";
            return exit_input;
        } catch (const infeasible_schedule& e) {
            std::cerr << "infeasible: " << e.what() << "\n";
            return exit_input;
        } catch (const budget_error& e) {
            std::cerr << "budget: " << e.what() << "\n";
            return exit_input;
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << "\n";
            return exit_input;
        }
        // the report shares stdout only when the document went to a file
        std::ostream& rep = (doc.is_null() || !out.empty()) ? std::cout : std::cerr;
        for (const auto& line : report.lines) rep << line << "\n";
        rep << "status: " << (report.failures.empty() ? "ok" : "verification failed") << "\n";
        return report.failures.empty() ? exit_ok : exit_failed;
    }
    return exit_input;
}
