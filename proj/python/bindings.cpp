#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pevnet/audit.hpp"
#include "pevnet/cli.hpp"
#include "pevnet/generate.hpp"
#include "pevnet/report.hpp"
#include "pevnet/scenario_io.hpp"
#include "pevnet/sim.hpp"

namespace py = pybind11;
using namespace pevnet;

namespace {

py::object fraction(const Rational& r) {
    static py::object cls = py::module_::import("fractions").attr("Fraction");
    return cls(r.num(), r.den());
}

Rational to_rational(const py::handle& value) {
    if (py::isinstance<py::str>(value)) return Rational::parse(value.cast<std::string>());
    if (py::isinstance<py::int_>(value)) return Rational(value.cast<std::int64_t>());
    if (py::hasattr(value, "numerator") && py::hasattr(value, "denominator")) {
        return Rational(value.attr("numerator").cast<std::int64_t>(), value.attr("denominator").cast<std::int64_t>());
    }
    throw py::type_error("expected an int, a fractions.Fraction or a rational string");
}

py::object agent_key(AgentId id) {
    if (id == kRequester) return py::str("s");
    return py::int_(id.value);
}

py::object optional_agent(const std::optional<AgentId>& id) {
    return id ? agent_key(*id) : py::none();
}

py::dict pairs(const std::vector<std::pair<AgentId, Rational>>& entries) {
    py::dict out;
    for (const auto& [id, value] : entries) out[agent_key(id)] = fraction(value);
    return out;
}

py::dict run_dict(const RunReport& r) {
    py::dict d;
    d["scenario"] = r.scenario;
    d["mechanism"] = r.mechanism;
    d["mode"] = r.mode;
    d["realized_quality"] = r.realized_quality ? fraction(*r.realized_quality) : py::none();
    d["champion"] = optional_agent(r.champion);
    d["champion_welfare"] = fraction(r.champion_welfare);
    py::list sequence, w;
    for (AgentId id : r.sequence) sequence.append(agent_key(id));
    for (const auto& v : r.w) w.append(fraction(v));
    d["sequence"] = sequence;
    d["w"] = w;
    d["selected"] = optional_agent(r.selected);
    d["payoffs"] = pairs(r.payoffs);
    d["utilities"] = pairs(r.utilities);
    d["requester_utility"] = fraction(r.requester_utility);
    if (r.simulation) {
        py::dict sim;
        sim["trials"] = r.simulation->trials;
        sim["seed"] = r.simulation->seed;
        sim["pass"] = r.simulation->pass;
        py::list rows;
        for (const auto& row : r.simulation->rows) {
            py::dict item;
            item["agent"] = agent_key(row.agent);
            item["empirical"] = fraction(row.empirical);
            item["analytic"] = fraction(row.analytic);
            item["variance"] = fraction(row.variance);
            item["z"] = row.z;
            item["pass"] = row.pass;
            rows.append(item);
        }
        sim["rows"] = rows;
        d["simulation"] = sim;
    }
    return d;
}

py::dict audit_dict(const AuditReport& r) {
    py::dict d;
    d["property"] = to_string(r.property);
    d["verdict"] = to_string(r.verdict);
    d["holds"] = r.holds();
    d["cases_checked"] = r.cases_checked;
    d["detail"] = r.detail;
    py::dict cert;
    for (const auto& [name, value] : r.certificate) cert[py::str(name)] = fraction(value);
    d["certificate"] = cert;
    if (r.witness) {
        py::dict w;
        w["agent"] = agent_key(r.witness->agent);
        w["baseline_utility"] = fraction(r.witness->baseline_utility);
        w["deviated_utility"] = fraction(r.witness->deviated_utility);
        w["delta"] = fraction(r.witness->delta());
        w["description"] = r.witness->description;
        d["witness"] = w;
    } else {
        d["witness"] = py::none();
    }
    return d;
}

ScenarioFile load(const py::object& source) {
    if (py::isinstance<ScenarioFile>(source)) return source.cast<ScenarioFile>();
    return load_scenario(py::str(source).cast<std::string>());
}

}  // namespace

PYBIND11_MODULE(_pevnet, m) {
    m.doc() = "Exact diffusion mechanisms for task allocation under execution uncertainty";

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
    py::register_exception<StructuralError>(m, "StructuralError", PyExc_ValueError);

    py::class_<ScenarioFile>(m, "Scenario")
        .def_readonly("name", &ScenarioFile::name)
        .def_readonly("description", &ScenarioFile::description)
        .def_property_readonly("agents",
                               [](const ScenarioFile& f) {
                                   py::list ids;
                                   for (const auto& a : f.scenario.agents()) ids.append(a.id.value);
                                   return ids;
                               })
        .def_property_readonly("quality_levels",
                               [](const ScenarioFile& f) {
                                   py::list out;
                                   for (const auto& q : f.scenario.quality_levels()) out.append(fraction(q));
                                   return out;
                               })
        .def("to_json", [](const ScenarioFile& f) { return serialize_scenario(f); })
        .def("__repr__", [](const ScenarioFile& f) {
            return "<Scenario " + f.name + " with " + std::to_string(f.scenario.size()) + " agents>";
        });

    m.def("bundled_scenarios", [] {
        std::vector<std::string> names;
        for (const auto& b : bundled_scenarios()) names.push_back(b.name);
        return names;
    });
    m.def("load_scenario", [](const std::string& source) { return load_scenario(source); }, py::arg("path_or_name"));
    m.def("parse_scenario", [](const std::string& text) { return parse_scenario_text(text); }, py::arg("text"));
    m.def(
        "generate",
        [](std::size_t agents, std::size_t levels, double density, std::uint64_t seed, bool degenerate) {
            return generate_scenario({agents, levels, density, seed, degenerate});
        },
        py::arg("agents") = 8, py::arg("levels") = 3, py::arg("density") = 0.2, py::arg("seed") = 0,
        py::arg("degenerate_quality") = false);

    m.def(
        "run",
        [](const py::object& source, const std::string& mechanism, const py::object& quality) {
            const ScenarioFile f = load(source);
            const MechanismKind kind = parse_mechanism(mechanism);
            if (quality.is_none()) {
                return run_dict(make_expected_report(f.name, f.scenario, run_mechanism(kind, f.scenario, f.reports)));
            }
            const Rational q = to_rational(quality);
            MechanismOutcome outcome = kind == MechanismKind::Idm   ? idm_run(f.scenario, f.reports, q)
                                       : kind == MechanismKind::Vcg ? vcg_run(f.scenario, f.reports, q)
                                                                    : run_mechanism(kind, f.scenario, f.reports);
            return run_dict(make_run_report(f.name, f.scenario, outcome, q));
        },
        py::arg("scenario"), py::arg("mechanism") = "pev", py::arg("quality") = py::none(),
        "Runs a mechanism; payoffs are expectations unless a realized quality is given.");

    m.def(
        "critical_sequence",
        [](const py::object& source, std::uint32_t target) {
            const ScenarioFile f = load(source);
            std::vector<std::uint32_t> out;
            for (AgentId id : critical_sequence(build_graph(f.scenario, f.reports), AgentId{target}).order) {
                out.push_back(id.value);
            }
            return out;
        },
        py::arg("scenario"), py::arg("target"));

    m.def(
        "audit",
        [](const py::object& source, const std::string& mechanism, const std::vector<std::string>& properties,
           const py::object& grid_step, bool full_type_space) {
            const ScenarioFile f = load(source);
            const MechanismKind kind = parse_mechanism(mechanism);
            const Rational step = to_rational(grid_step);
            py::list out;
            for (const auto& p : properties) {
                if (p == "ir") {
                    out.append(audit_dict(check_ir(f.scenario, kind)));
                } else if (p == "ic") {
                    auto grid = full_type_space ? DeviationGrid::full_type_space(f.scenario, step)
                                                : DeviationGrid::standard(f.scenario, step);
                    if (!full_type_space) grid.mass_step = step;
                    out.append(audit_dict(check_ic(f.scenario, kind, grid)));
                } else if (p == "wbb") {
                    out.append(audit_dict(check_wbb(f.scenario, kind)));
                } else if (p == "efficiency") {
                    out.append(audit_dict(check_efficiency_gap(f.scenario, kind)));
                } else if (p == "lemmas") {
                    for (const auto& r : check_lemmas(f.scenario)) out.append(audit_dict(r));
                } else {
                    throw py::value_error("unknown property '" + p + "'");
                }
            }
            return out;
        },
        py::arg("scenario"), py::arg("mechanism") = "pev",
        py::arg("properties") = std::vector<std::string>{"ir", "ic", "wbb"}, py::arg("grid_step") = "1/5",
        py::arg("full_type_space") = false);

    m.def(
        "simulate",
        [](const py::object& source, const std::string& mechanism, std::size_t trials, std::uint64_t seed) {
            const ScenarioFile f = load(source);
            const MechanismKind kind = parse_mechanism(mechanism);
            TrialStats stats;
            Comparison cmp;
            {
                py::gil_scoped_release release;
                stats = run_trials(f.scenario, f.reports, kind, trials, seed);
                const auto outcome = run_mechanism(kind, f.scenario, f.reports);
                cmp = compare(stats, expected_utilities(f.scenario, f.reports, outcome));
            }
            RunReport report = make_expected_report(f.name, f.scenario, run_mechanism(kind, f.scenario, f.reports));
            report.seed = seed;
            report.simulation = summarize(stats, cmp);
            return run_dict(report);
        },
        py::arg("scenario"), py::arg("mechanism") = "pev", py::arg("trials") = 10000, py::arg("seed") = 0);

    m.def(
        "cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run_cli(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Runs the command-line tool in-process; returns (exit code, stdout, stderr).");
}
