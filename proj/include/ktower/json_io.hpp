#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "constructions.hpp"
#include "detectors.hpp"
#include "kr_prime.hpp"
#include "partition.hpp"
#include "symbolic.hpp"
#include "tower.hpp"

namespace ktower::io {

using Json = nlohmann::json;

// Rationals travel as "p/q" strings, never as numbers.
inline Json to_json(const Rational& r) { return to_string(r); }

inline Rational rational_from(const Json& j) {
    require(j.is_string(), "expected a \"p/q\" string");
    return parse_rational(j.get<std::string>());
}

inline Json to_json(const IntervalSet& s) {
    Json out = Json::array();
    for (std::size_t i = 0; i < s.size(); ++i) out.push_back(Json::array({to_string(s.lo(i)), to_string(s.hi(i))}));
    return out;
}

inline IntervalSet interval_set_from(const Json& j) {
    require(j.is_array(), "interval set must be an array of pairs");
    std::vector<Rational> pts;
    for (const auto& pair : j) {
        require(pair.is_array() && pair.size() == 2, "interval must be a [lo, hi] pair");
        pts.push_back(rational_from(pair[0]));
        pts.push_back(rational_from(pair[1]));
    }
    return IntervalSet::from_canonical_points(std::move(pts));
}

inline Json to_json(const Partition& a) {
    Json cells = Json::array();
    for (const auto& c : a.cells()) cells.push_back(to_json(c));
    return Json{{"cells", cells}};
}

inline Partition partition_from(const Json& j) {
    std::vector<IntervalSet> cells;
    for (const auto& c : j.at("cells")) cells.push_back(interval_set_from(c));
    return Partition(std::move(cells));
}

inline Json to_json(const Word& w) { return word_to_string(w); }
inline Word word_from(const Json& j) { return parse_word(j.get<std::string>()); }

inline Json to_json(const Column& c) { return Json{{"base", to_json(c.base)}, {"height", c.height}}; }
inline Column column_from(const Json& j) { return Column{interval_set_from(j.at("base")), j.at("height").get<std::int64_t>()}; }

inline Json to_json(const Tower& t) {
    Json cols = Json::array();
    for (const auto& c : t.columns) cols.push_back(to_json(c));
    return Json{{"columns", cols}};
}

inline Tower tower_from(const Json& j) {
    Tower t;
    for (const auto& c : j.at("columns")) t.columns.push_back(column_from(c));
    return t;
}

inline Json system_json(const OdometerSystem& sys) { return Json{{"odometer", sys.base()}}; }
inline OdometerSystem system_from(const Json& j) { return OdometerSystem(j.at("odometer").get<std::int64_t>()); }

inline Json to_json(const SymbolicApprox& a) {
    Json rho = Json::object();
    for (const auto& [w, r] : a.rho) rho[word_to_string(w)] = to_string(r);
    return Json{{"k", a.k}, {"L", a.window}, {"rho", rho}};
}

inline SymbolicApprox symbolic_from(const Json& j) {
    SymbolicApprox a;
    a.k = j.at("k").get<std::size_t>();
    a.window = j.at("L").get<std::int64_t>();
    for (const auto& [w, r] : j.at("rho").items()) a.rho[parse_word(w)] = rational_from(r);
    return a;
}

inline Json to_json(const WindowSet& s) { return Json{{"L", s.window}, {"members", s.members}}; }
inline WindowSet window_set_from(const Json& j) {
    return WindowSet::make(j.at("L").get<std::int64_t>(), j.at("members").get<std::vector<std::int64_t>>());
}

template <class T, class F>
Json array_of(const std::vector<T>& v, F f) {
    Json out = Json::array();
    for (const auto& x : v) out.push_back(f(x));
    return out;
}

template <class T, class F>
std::vector<T> vector_from(const Json& j, F f) {
    std::vector<T> out;
    for (const auto& x : j) out.push_back(f(x));
    return out;
}

inline Json sets_json(const std::vector<IntervalSet>& v) {
    return array_of(v, [](const IntervalSet& s) { return to_json(s); });
}
inline std::vector<IntervalSet> sets_from(const Json& j) { return vector_from<IntervalSet>(j, interval_set_from); }
inline Json partitions_json(const std::vector<Partition>& v) {
    return array_of(v, [](const Partition& a) { return to_json(a); });
}
inline std::vector<Partition> partitions_from(const Json& j) { return vector_from<Partition>(j, partition_from); }
inline Json rationals_json(const std::vector<Rational>& v) {
    return array_of(v, [](const Rational& r) { return to_json(r); });
}
inline std::vector<Rational> rationals_from(const Json& j) { return vector_from<Rational>(j, rational_from); }
inline Json words_json(const std::vector<Word>& v) {
    return array_of(v, [](const Word& w) { return to_json(w); });
}
inline std::vector<Word> words_from(const Json& j) { return vector_from<Word>(j, word_from); }

// ---------------------------------------------------------------------------------------

inline Json to_json(const KrPrimeTrace& t) {
    return Json{{"input_tower", to_json(t.input_tower)},
                {"n", t.n},
                {"N", t.N},
                {"attempts", t.attempts},
                {"master_exponent", t.master_exponent},
                {"master_height", t.master_height},
                {"master_base", to_json(t.master_base)},
                {"b_sets", sets_json(t.b_sets)},
                {"n_positions", t.n_positions},
                {"d_indices", t.d_indices},
                {"b_hat_min_return", t.b_hat_min_return},
                {"b_hat_heights", t.b_hat_heights},
                {"d_hat", to_json(t.d_hat)},
                {"d_hat_heights", t.d_hat_heights},
                {"e_sets", sets_json(t.e_sets)},
                {"h_hats", t.h_hats},
                {"eps0", to_json(t.eps0)},
                {"f_sets", sets_json(t.f_sets)},
                {"output_base", to_json(t.output_base)}};
}

inline KrPrimeTrace kr_prime_trace_from(const Json& j) {
    KrPrimeTrace t;
    t.input_tower = tower_from(j.at("input_tower"));
    t.n = j.at("n").get<std::int64_t>();
    t.N = j.at("N").get<std::int64_t>();
    t.attempts = j.at("attempts").get<int>();
    t.master_exponent = j.at("master_exponent").get<int>();
    t.master_height = j.at("master_height").get<std::int64_t>();
    t.master_base = interval_set_from(j.at("master_base"));
    t.b_sets = sets_from(j.at("b_sets"));
    t.n_positions = j.at("n_positions").get<std::vector<std::int64_t>>();
    t.d_indices = j.at("d_indices").get<std::vector<std::size_t>>();
    t.b_hat_min_return = j.at("b_hat_min_return").get<std::int64_t>();
    t.b_hat_heights = j.at("b_hat_heights").get<std::vector<std::int64_t>>();
    t.d_hat = interval_set_from(j.at("d_hat"));
    t.d_hat_heights = j.at("d_hat_heights").get<std::vector<std::int64_t>>();
    t.e_sets = sets_from(j.at("e_sets"));
    t.h_hats = j.at("h_hats").get<std::vector<std::int64_t>>();
    t.eps0 = rational_from(j.at("eps0"));
    t.f_sets = sets_from(j.at("f_sets"));
    t.output_base = interval_set_from(j.at("output_base"));
    return t;
}

inline Json to_json(const PaintedColumn& p) {
    return Json{{"step", p.step},     {"family", p.family},         {"slot", p.slot},
                {"alphabet", p.alphabet}, {"column", to_json(p.column)}, {"name", to_json(p.name)}};
}

inline PaintedColumn painted_from(const Json& j) {
    return PaintedColumn{j.at("step").get<std::int64_t>(),   j.at("family").get<std::int64_t>(),
                         j.at("slot").get<std::int64_t>(),   j.at("alphabet").get<std::size_t>(),
                         column_from(j.at("column")),        word_from(j.at("name"))};
}

inline Json to_json(const Prop42Trace& t) {
    Json witnesses = Json::array();
    for (const auto& w : t.witnesses)
        witnesses.push_back(Json{{"m", w.m},
                                 {"e1", to_json(w.e1)},
                                 {"f1", to_json(w.f1)},
                                 {"e2", to_json(w.e2)},
                                 {"f2", to_json(w.f2)},
                                 {"e_level", w.e_level},
                                 {"f_level", w.f_level},
                                 {"witness", to_json(w.witness)}});
    Json visits = Json::array();
    for (const auto& v : t.visits)
        visits.push_back(Json{{"m", v.m}, {"j", v.j}, {"r", v.r}, {"column", v.column}, {"positions", v.positions}});
    return Json{{"a_hat", to_json(t.a_hat)},
                {"eps", to_json(t.eps)},
                {"depth", t.depth},
                {"base_exponent", t.base_exponent},
                {"iterations", t.iterations},
                {"tower", to_json(t.tower)},
                {"alphas", partitions_json(t.alphas)},
                {"painted", array_of(t.painted, [](const PaintedColumn& p) { return to_json(p); })},
                {"drifts", rationals_json(t.drifts)},
                {"witnesses", witnesses},
                {"visits", visits}};
}

inline Prop42Trace prop42_trace_from(const Json& j) {
    Prop42Trace t;
    t.a_hat = partition_from(j.at("a_hat"));
    t.eps = rational_from(j.at("eps"));
    t.depth = j.at("depth").get<std::int64_t>();
    t.base_exponent = j.at("base_exponent").get<int>();
    t.iterations = j.at("iterations").get<std::int64_t>();
    t.tower = tower_from(j.at("tower"));
    t.alphas = partitions_from(j.at("alphas"));
    t.painted = vector_from<PaintedColumn>(j.at("painted"), painted_from);
    t.drifts = rationals_from(j.at("drifts"));
    for (const auto& w : j.at("witnesses"))
        t.witnesses.push_back({w.at("m").get<std::int64_t>(), word_from(w.at("e1")), word_from(w.at("f1")), word_from(w.at("e2")),
                               word_from(w.at("f2")), w.at("e_level").get<std::int64_t>(), w.at("f_level").get<std::int64_t>(),
                               rational_from(w.at("witness"))});
    for (const auto& v : j.at("visits"))
        t.visits.push_back({v.at("m").get<std::int64_t>(), v.at("j").get<std::int64_t>(), v.at("r").get<std::int64_t>(),
                            v.at("column").get<std::size_t>(), v.at("positions").get<std::vector<std::int64_t>>()});
    return t;
}

inline Json to_json(const Prop51Trace& t) {
    const auto& s = t.schedule;
    Json stamps = Json::array();
    for (const auto& st : t.stamps) {
        Json cert = nullptr;
        if (st.certificate) cert = Json{{"starts", to_json(st.certificate->starts)}, {"gap", st.certificate->gap}};
        stamps.push_back(Json{{"column", st.column}, {"j", st.j}, {"l", st.l}, {"positions", st.positions}, {"certificate", cert}});
    }
    return Json{{"a_hat", to_json(t.a_hat)},
                {"eps", to_json(t.eps)},
                {"depth", t.depth},
                {"schedule", Json{{"eps", to_json(s.eps)},
                                  {"m0", to_json(s.m0)},
                                  {"eps0", to_json(s.eps0)},
                                  {"e0", to_json(s.e0)},
                                  {"l0", s.l0},
                                  {"n0", s.n0}}},
                {"tower", to_json(t.tower)},
                {"pair_words", words_json(t.pair_words)},
                {"omega0", to_json(t.omega0)},
                {"alphas", partitions_json(t.alphas)},
                {"drift", to_json(t.drift)},
                {"witness_measures", rationals_json(t.witness_measures)},
                {"stamps", stamps}};
}

inline Prop51Trace prop51_trace_from(const Json& j) {
    Prop51Trace t;
    t.a_hat = partition_from(j.at("a_hat"));
    t.eps = rational_from(j.at("eps"));
    t.depth = j.at("depth").get<std::int64_t>();
    const auto& s = j.at("schedule");
    t.schedule = Prop51Schedule{rational_from(s.at("eps")), rational_from(s.at("m0")), rational_from(s.at("eps0")),
                                rational_from(s.at("e0")), s.at("l0").get<std::int64_t>(), s.at("n0").get<std::int64_t>()};
    t.tower = tower_from(j.at("tower"));
    t.pair_words = words_from(j.at("pair_words"));
    t.omega0 = word_from(j.at("omega0"));
    t.alphas = partitions_from(j.at("alphas"));
    t.drift = rational_from(j.at("drift"));
    t.witness_measures = rationals_from(j.at("witness_measures"));
    for (const auto& st : j.at("stamps")) {
        StampRecord r{st.at("column").get<std::size_t>(), st.at("j").get<std::int64_t>(), st.at("l").get<std::int64_t>(),
                      st.at("positions").get<std::vector<std::int64_t>>(), std::nullopt};
        const auto& c = st.at("certificate");
        if (!c.is_null()) r.certificate = ThickSyndeticCertificate{window_set_from(c.at("starts")), c.at("gap").get<std::int64_t>()};
        t.stamps.push_back(std::move(r));
    }
    return t;
}

inline std::string variant_name(ModelVariant v) { return v == ModelVariant::prop44 ? "weak-mixing" : "proximal"; }

inline ModelVariant variant_from(const std::string& s) {
    if (s == "weak-mixing") return ModelVariant::prop44;
    if (s == "proximal") return ModelVariant::prop52;
    throw precondition_error("unknown model variant '" + s + "' (expected weak-mixing or proximal)");
}

inline Json to_json(const ModelSequence& s) {
    Json gamma = Json::array();
    for (const auto& row : s.gamma) gamma.push_back(partitions_json(row));
    return Json{{"variant", variant_name(s.variant)},
                {"depth", s.depth},
                {"betas_in", partitions_json(s.betas_in)},
                {"eps_seq", rationals_json(s.eps_seq)},
                {"betas", partitions_json(s.betas)},
                {"gamma", gamma},
                {"base_exponent", s.base_exponent},
                {"iterations", s.iterations},
                {"tower", to_json(s.tower)},
                {"painted", array_of(s.painted, [](const PaintedColumn& p) { return to_json(p); })}};
}

inline ModelSequence model_sequence_from(const Json& j) {
    ModelSequence s;
    s.variant = variant_from(j.at("variant").get<std::string>());
    s.depth = j.at("depth").get<std::int64_t>();
    s.betas_in = partitions_from(j.at("betas_in"));
    s.eps_seq = rationals_from(j.at("eps_seq"));
    s.betas = partitions_from(j.at("betas"));
    for (const auto& row : j.at("gamma")) s.gamma.push_back(partitions_from(row));
    s.base_exponent = j.at("base_exponent").get<int>();
    s.iterations = j.at("iterations").get<std::int64_t>();
    s.tower = tower_from(j.at("tower"));
    s.painted = vector_from<PaintedColumn>(j.at("painted"), painted_from);
    return s;
}

} // namespace ktower::io
