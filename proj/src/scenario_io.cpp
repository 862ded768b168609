#include "pevnet/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pevnet/mechanism.hpp"

namespace pevnet {

using json = nlohmann::ordered_json;

ParseError::ParseError(std::string field, std::size_t line, const std::string& message)
    : std::runtime_error((line ? "line " + std::to_string(line) + ": " : std::string()) +
                         (field.empty() ? "" : field + ": ") + message),
      field_(std::move(field)),
      line_(line) {}

namespace {

// Input iterator that publishes how far the parser has read.
struct TrackingIterator {
    using iterator_category = std::input_iterator_tag;
    using value_type = char;
    using difference_type = std::ptrdiff_t;
    using pointer = const char*;
    using reference = const char&;

    const char* at = nullptr;
    const char** cursor = nullptr;

    reference operator*() const { return *at; }
    TrackingIterator& operator++() {
        ++at;
        *cursor = at;
        return *this;
    }
    TrackingIterator operator++(int) {
        auto copy = *this;
        ++*this;
        return copy;
    }
    bool operator==(const TrackingIterator& other) const { return at == other.at; }
    bool operator!=(const TrackingIterator& other) const { return at != other.at; }
};

// Builds the DOM through nlohmann's own SAX builder and records the source
// line of every value by JSON pointer.
class LineSax {
public:
    LineSax(json& root, std::string_view text, const char** cursor) : dom_(root), text_(text), cursor_(cursor) {}

    std::map<std::string, std::size_t> lines;

    bool null() { return scalar([&] { return dom_.null(); }); }
    bool boolean(bool v) { return scalar([&] { return dom_.boolean(v); }); }
    bool number_integer(json::number_integer_t v) { return scalar([&] { return dom_.number_integer(v); }); }
    bool number_unsigned(json::number_unsigned_t v) { return scalar([&] { return dom_.number_unsigned(v); }); }
    bool number_float(json::number_float_t v, const std::string& s) {
        return scalar([&] { return dom_.number_float(v, s); });
    }
    bool string(std::string& v) { return scalar([&] { return dom_.string(v); }); }
    bool binary(json::binary_t& v) { return scalar([&] { return dom_.binary(v); }); }

    bool start_object(std::size_t n) {
        record();
        frames_.push_back({false, 0, {}});
        return dom_.start_object(n);
    }
    bool key(std::string& k) {
        frames_.back().key = k;
        record();
        return dom_.key(k);
    }
    bool end_object() {
        frames_.pop_back();
        advance();
        return dom_.end_object();
    }
    bool start_array(std::size_t n) {
        record();
        frames_.push_back({true, 0, {}});
        return dom_.start_array(n);
    }
    bool end_array() {
        frames_.pop_back();
        advance();
        return dom_.end_array();
    }
    bool parse_error(std::size_t position, const std::string& token, const nlohmann::detail::exception& ex) {
        return dom_.parse_error(position, token, ex);
    }

private:
    struct Frame {
        bool array;
        std::size_t index;
        std::string key;
    };

    template <class F>
    bool scalar(F&& f) {
        record();
        advance();
        return f();
    }

    void advance() {
        if (!frames_.empty() && frames_.back().array) ++frames_.back().index;
    }

    std::string path() const {
        std::string p;
        for (const auto& f : frames_) p += "/" + (f.array ? std::to_string(f.index) : f.key);
        return p;
    }

    std::size_t current_line() const {
        std::size_t end = static_cast<std::size_t>(*cursor_ - text_.data());
        // the lexer may have read one character past the token
        while (end > 0 && std::string_view(" \t\r\n,:]}").find(text_[end - 1]) != std::string_view::npos) --end;
        return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + end, '\n'));
    }

    void record() { lines.emplace(path(), current_line()); }

    nlohmann::detail::json_sax_dom_parser<json> dom_;
    std::string_view text_;
    const char** cursor_;
    std::vector<Frame> frames_;
};

class Reader {
public:
    explicit Reader(const std::map<std::string, std::size_t>& lines) : lines_(lines) {}

    [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
        throw ParseError(field_name(pointer), line_of(pointer), message);
    }

    std::size_t line_of(std::string pointer) const {
        while (true) {
            auto it = lines_.find(pointer);
            if (it != lines_.end()) return it->second;
            if (pointer.empty()) return 0;
            pointer.erase(pointer.rfind('/'));
        }
    }

    static std::string field_name(const std::string& pointer) {
        std::string out;
        std::size_t pos = 1;
        while (pos <= pointer.size() && !pointer.empty()) {
            std::size_t next = pointer.find('/', pos);
            std::string part = pointer.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
            if (!part.empty() && std::all_of(part.begin(), part.end(), ::isdigit) && !out.empty() &&
                out.back() != '.') {
                out += "[" + part + "]";
            } else {
                out += (out.empty() ? "" : ".") + part;
            }
            if (next == std::string::npos) break;
            pos = next + 1;
        }
        return out;
    }

    Rational rational(const json& v, const std::string& pointer) const {
        if (v.is_number_integer()) return Rational(v.get<std::int64_t>());
        if (v.is_number_float()) fail(pointer, "write rationals as strings such as \"0.3\" or \"3/10\"");
        if (!v.is_string()) fail(pointer, "expected a rational string");
        try {
            return Rational::parse(v.get<std::string>());
        } catch (const std::exception& e) {
            fail(pointer, "malformed rational '" + v.get<std::string>() + "': " + e.what());
        }
    }

    AgentId id(const json& v, const std::string& pointer) const {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0 || v.get<std::int64_t>() >= 0xFFFFFFFFll) {
            fail(pointer, "expected a non-negative integer agent id");
        }
        return AgentId{static_cast<std::uint32_t>(v.get<std::int64_t>())};
    }

    std::vector<AgentId> ids(const json& v, const std::string& pointer) const {
        if (!v.is_array()) fail(pointer, "expected a list of agent ids");
        std::vector<AgentId> out;
        for (std::size_t k = 0; k < v.size(); ++k) out.push_back(id(v[k], pointer + "/" + std::to_string(k)));
        return out;
    }

    Pmf pmf(const json& v, const std::string& pointer, const std::string& owner) const {
        if (!v.is_array()) fail(pointer, "expected a list of [quality, probability] pairs");
        std::vector<QualityPoint> points;
        for (std::size_t k = 0; k < v.size(); ++k) {
            const std::string p = pointer + "/" + std::to_string(k);
            if (!v[k].is_array() || v[k].size() != 2) fail(p, "expected a [quality, probability] pair");
            points.push_back({rational(v[k][0], p + "/0"), rational(v[k][1], p + "/1")});
        }
        if (auto err = Pmf::validate(points)) fail(pointer, owner + ": " + *err);
        return Pmf(std::move(points));
    }

    void only_keys(const json& obj, const std::string& pointer, std::initializer_list<std::string_view> allowed) const {
        for (const auto& [key, value] : obj.items()) {
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                fail(pointer + "/" + key, "unknown field '" + key + "'");
            }
        }
    }

    std::string text(const json& obj, const std::string& key) const {
        if (!obj.contains(key)) return {};
        if (!obj.at(key).is_string()) fail("/" + key, "expected a string");
        return obj.at(key).get<std::string>();
    }

    const json& require(const json& obj, const std::string& pointer, const std::string& key) const {
        if (!obj.contains(key)) fail(pointer, "missing field '" + key + "'");
        return obj.at(key);
    }

private:
    const std::map<std::string, std::size_t>& lines_;
};

json rational_json(const Rational& r) { return json(r.to_string()); }

json ids_json(std::span<const AgentId> ids) {
    json out = json::array();
    for (AgentId id : ids) out.push_back(id.value);
    return out;
}

json pmf_json(const Pmf& pmf) {
    json out = json::array();
    for (const auto& p : pmf.support()) out.push_back(json::array({rational_json(p.quality), rational_json(p.probability)}));
    return out;
}

}  // namespace

ScenarioFile parse_scenario_text(std::string_view text) {
    json root;
    const char* cursor = text.data();
    LineSax sax(root, text, &cursor);
    TrackingIterator first{text.data(), &cursor};
    TrackingIterator last{text.data() + text.size(), &cursor};
    try {
        json::sax_parse(first, last, &sax);
    } catch (const json::exception& e) {
        const std::size_t offset = std::min<std::size_t>(static_cast<std::size_t>(cursor - text.data()), text.size());
        const std::size_t line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
        throw ParseError("", line, std::string("invalid JSON: ") + e.what());
    }
    const Reader in(sax.lines);
    if (!root.is_object()) in.fail("", "top level must be an object");
    in.only_keys(root, "", {"name", "description", "notes", "quality_levels", "requester_neighbors", "agents", "reports"});

    std::string name = in.text(root, "name");
    std::string description = in.text(root, "description");

    const json& levels_json = in.require(root, "", "quality_levels");
    if (!levels_json.is_array() || levels_json.empty()) in.fail("/quality_levels", "expected a non-empty list");
    std::vector<Rational> levels;
    for (std::size_t k = 0; k < levels_json.size(); ++k) {
        levels.push_back(in.rational(levels_json[k], "/quality_levels/" + std::to_string(k)));
    }
    auto requester = in.ids(in.require(root, "", "requester_neighbors"), "/requester_neighbors");

    const json& agents_json = in.require(root, "", "agents");
    if (!agents_json.is_array()) in.fail("/agents", "expected a list of agents");
    std::vector<Agent> agents;
    std::map<AgentId, std::string> pointer_of;
    for (std::size_t k = 0; k < agents_json.size(); ++k) {
        const std::string p = "/agents/" + std::to_string(k);
        const json& a = agents_json[k];
        if (!a.is_object()) in.fail(p, "expected an object");
        in.only_keys(a, p, {"id", "cost", "pmf", "neighbors", "note"});
        const AgentId id = in.id(in.require(a, p, "id"), p + "/id");
        if (pointer_of.count(id)) in.fail(p + "/id", "duplicate agent id " + to_string(id));
        pointer_of[id] = p;
        AgentType type{in.pmf(in.require(a, p, "pmf"), p + "/pmf", "agent " + to_string(id)),
                       in.rational(in.require(a, p, "cost"), p + "/cost"),
                       a.contains("neighbors") ? in.ids(a.at("neighbors"), p + "/neighbors") : std::vector<AgentId>{}};
        if (type.cost.sign() < 0) in.fail(p + "/cost", "agent " + to_string(id) + " has negative cost");
        std::sort(type.neighbors.begin(), type.neighbors.end());
        type.neighbors.erase(std::unique(type.neighbors.begin(), type.neighbors.end()), type.neighbors.end());
        agents.push_back({id, std::move(type)});
    }
    for (std::size_t k = 0; k < requester.size(); ++k) {
        if (!pointer_of.count(requester[k])) {
            in.fail("/requester_neighbors/" + std::to_string(k), "unknown agent id " + to_string(requester[k]));
        }
    }
    for (const auto& agent : agents) {
        const auto& p = pointer_of[agent.id];
        for (AgentId n : agent.type.neighbors) {
            if (!pointer_of.count(n)) in.fail(p + "/neighbors", "agent " + to_string(agent.id) + " lists unknown agent " + to_string(n));
        }
        for (const auto& point : agent.type.pmf.support()) {
            if (std::find(levels.begin(), levels.end(), point.quality) == levels.end()) {
                in.fail(p + "/pmf", "agent " + to_string(agent.id) + " has quality " + point.quality.to_string() +
                                        " outside quality_levels");
            }
        }
    }

    std::optional<Scenario> scenario;
    try {
        scenario.emplace(levels, requester, agents);
    } catch (const StructuralError& e) {
        in.fail("", e.what());
    }

    ReportProfile reports = truthful_profile(*scenario);
    bool has_reports = false;
    if (root.contains("reports")) {
        has_reports = true;
        const json& block = root.at("reports");
        if (!block.is_object()) in.fail("/reports", "expected an object keyed by agent id");
        for (const auto& [key, value] : block.items()) {
            const std::string p = "/reports/" + key;
            std::size_t used = 0;
            long long raw = -1;
            try {
                raw = std::stoll(key, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != key.size() || raw < 0) in.fail(p, "report keys must be agent ids");
            const AgentId id{static_cast<std::uint32_t>(raw)};
            auto idx = scenario->index_of(id);
            if (!idx) in.fail(p, "unknown agent id " + key);
            const auto& truth = scenario->at(*idx).type;
            if (value.is_string()) {
                if (value.get<std::string>() != "nil") in.fail(p, "expected \"nil\" or a report object");
                reports[*idx] = Report::nil();
                continue;
            }
            if (!value.is_object()) in.fail(p, "expected \"nil\" or a report object");
            in.only_keys(value, p, {"pmf", "cost", "invited"});
            Pmf pmf = value.contains("pmf") ? in.pmf(value.at("pmf"), p + "/pmf", "report of agent " + key) : truth.pmf;
            Rational cost = value.contains("cost") ? in.rational(value.at("cost"), p + "/cost") : truth.cost;
            auto invited = value.contains("invited") ? in.ids(value.at("invited"), p + "/invited") : truth.neighbors;
            if (cost.sign() < 0) in.fail(p + "/cost", "reported cost must be >= 0");
            for (AgentId n : invited) {
                if (!std::binary_search(truth.neighbors.begin(), truth.neighbors.end(), n)) {
                    in.fail(p + "/invited", "agent " + key + " invites " + to_string(n) + ", who is not a neighbour");
                }
            }
            reports[*idx] = Report::bid(std::move(pmf), cost, std::move(invited));
        }
        if (auto err = validate_profile(*scenario, reports)) in.fail("/reports", *err);
    }
    return ScenarioFile{std::move(name), std::move(description), std::move(*scenario), std::move(reports), has_reports};
}

ScenarioFile parse_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("", 0, "cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    auto file = parse_scenario_text(buffer.str());
    if (file.name.empty()) file.name = path.stem().string();
    return file;
}

ScenarioFile load_scenario(std::string_view path_or_name) {
    std::filesystem::path path{std::string(path_or_name)};
    std::error_code ec;
    if (std::filesystem::is_regular_file(path, ec)) return parse_scenario(path);
    std::string name = path.filename().string();
    if (name.size() > 5 && name.ends_with(".json")) name.resize(name.size() - 5);
    for (const auto& bundled : bundled_scenarios()) {
        if (bundled.name != name) continue;
        auto file = parse_scenario_text(bundled.text);
        if (file.name.empty()) file.name = name;
        if (auto err = check_reconstruction(file)) {
            throw ParseError("", 0, "bundled scenario " + name + " violates a reconstruction constraint: " + *err);
        }
        return file;
    }
    std::string known;
    for (const auto& b : bundled_scenarios()) known += (known.empty() ? "" : ", ") + b.name;
    throw ParseError("", 0, "no such file or bundled scenario '" + std::string(path_or_name) + "' (bundled: " + known + ")");
}

std::string serialize_scenario(const ScenarioFile& file) {
    const Scenario& sc = file.scenario;
    json root;
    if (!file.name.empty()) root["name"] = file.name;
    if (!file.description.empty()) root["description"] = file.description;
    json levels = json::array();
    for (const auto& q : sc.quality_levels()) levels.push_back(rational_json(q));
    root["quality_levels"] = levels;
    root["requester_neighbors"] = ids_json(sc.requester_neighbors());
    json agents = json::array();
    for (const auto& a : sc.agents()) {
        json entry;
        entry["id"] = a.id.value;
        entry["cost"] = rational_json(a.type.cost);
        entry["pmf"] = pmf_json(a.type.pmf);
        entry["neighbors"] = ids_json(a.type.neighbors);
        agents.push_back(entry);
    }
    root["agents"] = agents;
    if (file.has_reports) {
        json block = json::object();
        for (std::size_t i = 0; i < sc.size(); ++i) {
            const Report& r = file.reports[i];
            const std::string key = std::to_string(sc.at(i).id.value);
            if (r.is_nil()) {
                block[key] = "nil";
            } else if (!(r == Report::truthful(sc.at(i).type))) {
                json entry;
                entry["pmf"] = pmf_json(r.pmf());
                entry["cost"] = rational_json(r.cost());
                entry["invited"] = ids_json(r.invited());
                block[key] = entry;
            }
        }
        root["reports"] = block;
    }
    std::string out;
    // one agent per line keeps files diffable and error lines meaningful
    out += "{\n";
    std::size_t n = 0;
    for (const auto& [key, value] : root.items()) {
        out += "  \"" + key + "\": ";
        if (key == "agents" || key == "reports") {
            const bool is_array = value.is_array();
            out += is_array ? "[\n" : "{\n";
            std::size_t m = 0;
            for (const auto& [k, v] : value.items()) {
                out += "    " + (is_array ? std::string() : "\"" + k + "\": ") + v.dump();
                out += ++m < value.size() ? ",\n" : "\n";
            }
            out += is_array ? "  ]" : "  }";
        } else {
            out += value.dump();
        }
        out += ++n < root.size() ? ",\n" : "\n";
    }
    out += "}\n";
    return out;
}

namespace {

std::optional<std::string> check_example2(const ScenarioFile& file) {
    struct Row {
        std::vector<std::pair<const char*, const char*>> pmf;
        const char* cost;
    };
    const std::vector<Row> table{
        {{{"2", ".5"}, {"3", ".5"}}, "0.5"},
        {{{"1", "1"}}, "0.2"},
        {{{"5", "1"}}, "1"},
        {{{"3", "1"}}, "1"},
        {{{"4", ".4"}, {"6", ".6"}}, "1.6"},
        {{{"3", ".3"}, {"4", ".6"}, {"7", ".1"}}, "0.9"},
        {{{"6", ".5"}, {"8", ".5"}}, "4.2"},
        {{{"1", ".2"}, {"3", ".8"}}, "0"},
        {{{"8", ".8"}, {"10", ".2"}}, "1"},
        {{{"4", ".5"}, {"5", ".3"}, {"6", ".2"}}, "0.2"},
    };
    const Scenario& sc = file.scenario;
    if (sc.quality_levels().size() != 10) return "quality levels must be 1..10";
    for (std::size_t k = 0; k < 10; ++k) {
        if (sc.quality_levels()[k] != Rational(static_cast<std::int64_t>(k + 1))) return "quality levels must be 1..10";
    }
    if (sc.size() != table.size()) return "expected agents 1..10";
    for (std::size_t k = 0; k < table.size(); ++k) {
        const AgentId id{static_cast<std::uint32_t>(k + 1)};
        if (!sc.index_of(id)) return "missing agent " + to_string(id);
        std::vector<QualityPoint> points;
        for (const auto& [q, p] : table[k].pmf) points.push_back({Rational::parse(q), Rational::parse(p)});
        const auto& type = sc.agent(id).type;
        if (!(type.pmf == Pmf(points)) || type.cost != Rational::parse(table[k].cost)) {
            return "agent " + to_string(id) + " differs from the published type table";
        }
    }
    const auto reports = truthful_profile(sc);
    const auto graph = build_graph(sc, reports);
    const auto outcome = pev_allocate(sc, reports);
    if (outcome.champion != AgentId{9}) return "agent 9 must maximize expected welfare";
    if (to_string(critical_sequence(graph, AgentId{9})) != "(s, 2, 6, 9)") return "critical sequence of 9 must be (s, 2, 6, 9)";
    if (outcome.w != std::vector<Rational>{Rational(4), Rational(4), Rational(9, 2)}) return "w must be 4, 4, 4.5";
    auto best_without = [&](AgentId removed) {
        return efficient_allocation(sc, without_agent(sc, reports, removed)).selected;
    };
    if (best_without(AgentId{2}) != AgentId{3} || best_without(AgentId{6}) != AgentId{3}) return "w_2 and w_6 must come from agent 3";
    if (best_without(AgentId{9}) != AgentId{10}) return "w_9 must come from agent 10";
    return std::nullopt;
}

std::optional<std::string> check_figure1(const ScenarioFile& file) {
    const Scenario& sc = file.scenario;
    const auto reports = truthful_profile(sc);
    if (uniform_quality(sc, reports) != Rational(1)) return "every agent must perform at q = 1";
    if (std::vector<AgentId>(sc.requester_neighbors().begin(), sc.requester_neighbors().end()) !=
        std::vector<AgentId>{AgentId{1}, AgentId{2}, AgentId{3}}) {
        return "requester neighbours must be {1, 2, 3}";
    }
    if (sc.agent(AgentId{2}).type.cost != Rational(3, 5) || sc.agent(AgentId{4}).type.cost != Rational(1, 10)) {
        return "c_2 must be 3/5 and c_4 must be 1/10";
    }
    const auto graph = build_graph(sc, reports);
    if (to_string(critical_sequence(graph, AgentId{4})) != "(s, 1, 4)") return "agent 4 must be reachable only through agent 1";
    const auto outcome = vcg_run(sc, reports);
    if (outcome.champion != AgentId{4} || outcome.champion_welfare != Rational(9, 10)) return "w must be 9/10 via agent 4";
    if (outcome.w != std::vector<Rational>{Rational(2, 5), Rational(2, 5)}) return "w_1 and w_4 must be 2/5";
    return std::nullopt;
}

std::optional<std::string> check_figure5(const ScenarioFile& file) {
    const Scenario& sc = file.scenario;
    const auto reports = truthful_profile(sc);
    if (sc.size() != 2 || !sc.index_of(AgentId{1}) || !sc.index_of(AgentId{2})) return "expected agents 1 and 2";
    if (std::vector<AgentId>(sc.requester_neighbors().begin(), sc.requester_neighbors().end()) != std::vector<AgentId>{AgentId{1}}) {
        return "the requester must know only agent 1";
    }
    if (sc.agent(AgentId{1}).type.neighbors != std::vector<AgentId>{AgentId{2}}) return "agent 1 must know only agent 2";
    if (!uniform_quality(sc, reports)) return "both agents must perform at the same point-mass quality";
    const Rational w1 = sc.agent(AgentId{1}).type.pmf.expectation() - sc.agent(AgentId{1}).type.cost;
    const Rational w2 = sc.agent(AgentId{2}).type.pmf.expectation() - sc.agent(AgentId{2}).type.cost;
    if (!(w2 > w1 && w1.sign() > 0)) return "need E[Q_2] - c_2 > E[Q_1] - c_1 > 0";
    return std::nullopt;
}

}  // namespace

std::optional<std::string> check_reconstruction(const ScenarioFile& file) {
    try {
        if (file.name == "example2") return check_example2(file);
        if (file.name == "figure1") return check_figure1(file);
        if (file.name == "figure5") return check_figure5(file);
    } catch (const std::exception& e) {
        return std::string(e.what());
    }
    return std::nullopt;
}

}  // namespace pevnet
