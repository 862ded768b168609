#include "pevnet/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include <CLI11.hpp>

#include "pevnet/audit.hpp"
#include "pevnet/generate.hpp"
#include "pevnet/report.hpp"
#include "pevnet/scenario_io.hpp"
#include "pevnet/sim.hpp"

namespace pevnet {
namespace {

struct Usage : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Rational rational_arg(const std::string& text, const char* flag) {
    try {
        return Rational::parse(text);
    } catch (const std::exception& e) {
        throw Usage(std::string(flag) + ": " + e.what());
    }
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Usage("cannot write " + path);
    f << text;
}

struct RunOptions {
    std::string scenario;
    std::string mechanism = "pev";
    std::optional<std::string> quality;
    bool expected = false;
    std::optional<std::uint64_t> seed;
    std::size_t trials = 0;
    std::string json_out;
};

int cmd_run(const RunOptions& o, std::ostream& out) {
    const auto file = load_scenario(o.scenario);
    const MechanismKind kind = parse_mechanism(o.mechanism);
    if (o.quality && o.expected) throw Usage("--quality and --expected are mutually exclusive");
    MechanismOutcome outcome;
    std::optional<Rational> q;
    if (o.quality) q = rational_arg(*o.quality, "--quality");
    if (q && kind == MechanismKind::Idm) {
        outcome = idm_run(file.scenario, file.reports, *q);
    } else if (q && kind == MechanismKind::Vcg) {
        outcome = vcg_run(file.scenario, file.reports, *q);
    } else {
        outcome = run_mechanism(kind, file.scenario, file.reports);
    }

    RunReport report;
    const bool sampled = !q && !o.expected && o.seed && o.trials == 0;
    if (sampled) {
        const auto dist = realized_quality_distribution(file.scenario, outcome);
        std::mt19937_64 rng(trial_seed(*o.seed, 0));
        report = make_run_report(file.name, file.scenario, outcome, dist ? sample(*dist, rng) : Rational(0));
        report.mode = "sample";
        report.seed = o.seed;
        if (!dist) report.realized_quality.reset();
    } else if (q) {
        report = make_run_report(file.name, file.scenario, outcome, *q);
    } else {
        report = make_expected_report(file.name, file.scenario, outcome);
    }
    if (o.trials > 0) {
        const std::uint64_t seed = o.seed.value_or(0);
        const auto stats = run_trials(file.scenario, file.reports, kind, o.trials, seed);
        const auto analytic = expected_utilities(file.scenario, file.reports, outcome);
        report.simulation = summarize(stats, compare(stats, analytic));
    }
    out << render_text(report);
    if (!o.json_out.empty()) write_file(o.json_out, to_json(report));
    return report.simulation && !report.simulation->pass ? kExitViolation : kExitOk;
}

struct AuditOptions {
    std::string scenario;
    std::string mechanism = "pev";
    bool ir = false, ic = false, wbb = false, lemmas = false, efficiency = false, all = false;
    std::string grid_step = "1/5";
    std::uint64_t seed = 0;
    std::size_t contexts = 0;
    bool full_type_space = false;
    std::string json_out;
};

int cmd_audit(AuditOptions o, std::ostream& out) {
    const auto file = load_scenario(o.scenario);
    const MechanismKind kind = parse_mechanism(o.mechanism);
    const Rational step = rational_arg(o.grid_step, "--grid-step");
    if (step.sign() <= 0) throw Usage("--grid-step must be positive");
    if (!(o.ir || o.ic || o.wbb || o.lemmas || o.efficiency)) o.all = true;
    if (o.all) o.ir = o.ic = o.wbb = true, o.lemmas = o.lemmas || kind == MechanismKind::Pev;
    if (o.lemmas && kind != MechanismKind::Pev) throw Usage("--lemmas applies to pev only");
    // surface idm/vcg preconditions as a usage error before any audit runs
    run_mechanism(kind, file.scenario, truthful_profile(file.scenario));

    std::vector<AuditReport> reports;
    if (o.ir) reports.push_back(check_ir(file.scenario, kind));
    if (o.ic) {
        DeviationGrid grid = o.full_type_space ? DeviationGrid::full_type_space(file.scenario, step)
                                               : DeviationGrid::standard(file.scenario, step);
        if (!o.full_type_space) grid.mass_step = step;
        grid.seed = o.seed;
        grid.random_contexts = o.contexts;
        reports.push_back(check_ic(file.scenario, kind, grid));
    }
    if (o.wbb) reports.push_back(check_wbb(file.scenario, kind));
    if (o.lemmas) {
        for (auto& r : check_lemmas(file.scenario, step)) reports.push_back(std::move(r));
    }
    if (o.efficiency) reports.push_back(check_efficiency_gap(file.scenario, kind));

    out << "scenario: " << file.name << "\nmechanism: " << to_string(kind) << "\n";
    bool all_hold = true;
    for (const auto& r : reports) {
        out << render_text(r);
        all_hold = all_hold && r.holds();
    }
    if (!o.json_out.empty()) write_file(o.json_out, to_json(reports, file.name, to_string(kind)));
    return all_hold ? kExitOk : kExitViolation;
}

class Expectations {
public:
    explicit Expectations(std::ostream& out) : out_(out) {}

    void equal(const std::string& what, const Rational& got, const Rational& want) {
        check(what, got == want, got.to_string(), want.to_string());
    }
    void equal(const std::string& what, std::optional<AgentId> got, AgentId want) {
        check(what, got == want, got ? to_string(*got) : "none", to_string(want));
    }
    void check(const std::string& what, bool ok, const std::string& got, const std::string& want) {
        out_ << "  [" << (ok ? "ok" : "MISMATCH") << "] " << what << " = " << got;
        if (!ok) out_ << " (expected " << want << ")";
        out_ << "\n";
        failures_ += ok ? 0 : 1;
    }
    int exit_code() const { return failures_ == 0 ? kExitOk : kExitInternal; }

private:
    std::ostream& out_;
    int failures_ = 0;
};

int demo_example2(std::ostream& out) {
    const auto file = load_scenario("example2");
    const auto outcome = pev_allocate(file.scenario, file.reports);
    const auto report = make_run_report(file.name, file.scenario, outcome, Rational(8));
    out << render_text(report) << "checks:\n";
    Expectations e(out);
    e.equal("w_2", report.w_of(AgentId{2}), Rational(4));
    e.equal("w_6", report.w_of(AgentId{6}), Rational(4));
    e.equal("w_9", report.w_of(AgentId{9}), Rational(9, 2));
    e.equal("selected", report.selected, AgentId{9});
    e.equal("p_2", report.payoff(AgentId{2}), Rational(0));
    e.equal("p_6", report.payoff(AgentId{6}), Rational(1, 2));
    e.equal("p_9", report.payoff(AgentId{9}), Rational(7, 2));
    e.equal("u_2", report.utility(AgentId{2}), Rational(0));
    e.equal("u_6", report.utility(AgentId{6}), Rational(1, 2));
    e.equal("u_9", report.utility(AgentId{9}), Rational(5, 2));
    e.equal("u_s", report.requester_utility, Rational(4));
    return e.exit_code();
}

int demo_example1(std::ostream& out) {
    const auto file = load_scenario("figure1");
    const auto vcg = vcg_run(file.scenario, file.reports);
    const auto report = make_run_report(file.name, file.scenario, vcg, Rational(1));
    out << render_text(report) << "checks:\n";
    Expectations e(out);
    e.equal("selected", report.selected, AgentId{4});
    e.equal("w_1", report.w_of(AgentId{1}), Rational(2, 5));
    e.equal("w_4", report.w_of(AgentId{4}), Rational(2, 5));
    e.equal("w", report.champion_welfare, Rational(9, 10));
    e.equal("p_1", report.payoff(AgentId{1}), Rational(1, 2));
    e.equal("p_4", report.payoff(AgentId{4}), Rational(3, 5));
    e.equal("u_s", report.requester_utility, Rational(-1, 10));
    const auto idm = make_run_report(file.name, file.scenario, idm_run(file.scenario, file.reports), Rational(1));
    out << "\nsame network under idm:\n" << render_text(idm);
    e.check("idm requester utility >= 0", idm.requester_utility.sign() >= 0, idm.requester_utility.to_string(), ">= 0");
    return e.exit_code();
}

int demo_prop1(std::ostream& out) {
    const auto file = load_scenario("figure5");
    const auto outcome = pev_allocate(file.scenario, file.reports);
    const auto report = make_expected_report(file.name, file.scenario, outcome);
    const auto gap = check_efficiency_gap(file.scenario, MechanismKind::Pev);
    out << render_text(report) << render_text(gap) << "checks:\n";
    Expectations e(out);
    e.equal("selected", report.selected, AgentId{1});
    e.equal("efficient agent", efficient_allocation(file.scenario, file.reports).selected, AgentId{2});
    e.equal("efficiency gap", gap.certificate.back().second, Rational(3, 10));
    e.equal("requester utility", report.requester_utility, Rational(0));
    return e.exit_code();
}

bool same_outcome(const Scenario& scenario, const MechanismOutcome& a, const MechanismOutcome& b, const Rational& q) {
    if (a.selected() != b.selected() || a.sequence != b.sequence || a.w != b.w) return false;
    const auto pa = payoffs(a, q);
    const auto pb = payoffs(b, q);
    if (pa.entries != pb.entries || pa.requester_utility != pb.requester_utility) return false;
    for (const auto& agent : scenario.agents()) {
        if (agent_utility(scenario, a, pa, agent.id) != agent_utility(scenario, b, pb, agent.id)) return false;
    }
    return true;
}

int demo_idm_vs_pev(std::ostream& out) {
    Expectations e(out);
    auto compare_on = [&](const ScenarioFile& file) {
        const auto q = *uniform_quality(file.scenario, file.reports);
        const auto pev = pev_allocate(file.scenario, file.reports);
        const auto idm = idm_run(file.scenario, file.reports);
        out << "--- " << file.name << " under pev\n" << render_text(make_run_report(file.name, file.scenario, pev, q));
        const bool same = same_outcome(file.scenario, pev, idm, q);
        e.check(file.name + ": pev vs idm", same, same ? "identical" : "different", "identical");
    };
    compare_on(load_scenario("figure1"));
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        compare_on(generate_scenario({7, 3, 0.3, seed, true}));
    }
    return e.exit_code();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Diffusion task allocation with execution uncertainty", "pevnet"};
    app.require_subcommand(1);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "run a mechanism on a scenario");
    run_cmd->add_option("scenario", run.scenario, "scenario file or bundled name")->required();
    run_cmd->add_option("mechanism", run.mechanism, "pev, idm, qaidm or vcg");
    run_cmd->add_option("--quality", run.quality, "evaluate payoffs at this realized quality");
    run_cmd->add_flag("--expected", run.expected, "expected payoffs over the selected agent's true pmf (default)");
    run_cmd->add_option("--seed", run.seed, "draw the realized quality, or seed the trials");
    run_cmd->add_option("--trials", run.trials, "Monte Carlo trials compared against the analytic expectation");
    run_cmd->add_option("--json-out", run.json_out, "write the machine-readable report here");

    AuditOptions audit;
    auto* audit_cmd = app.add_subcommand("audit", "check mechanism properties on a scenario");
    audit_cmd->add_option("scenario", audit.scenario, "scenario file or bundled name")->required();
    audit_cmd->add_option("mechanism", audit.mechanism, "pev, idm, qaidm or vcg");
    audit_cmd->add_flag("--ir", audit.ir, "individual rationality");
    audit_cmd->add_flag("--ic", audit.ic, "incentive compatibility over the deviation grid");
    audit_cmd->add_flag("--wbb", audit.wbb, "weak budget balance");
    audit_cmd->add_flag("--lemmas", audit.lemmas, "w monotonicity and own-report independence (pev)");
    audit_cmd->add_flag("--efficiency", audit.efficiency, "welfare gap to the efficient allocation");
    audit_cmd->add_flag("--all", audit.all, "ir, ic, wbb and, for pev, lemmas (default)");
    audit_cmd->add_option("--grid-step", audit.grid_step, "cost and probability-mass step of the deviation grid");
    audit_cmd->add_option("--seed", audit.seed, "seed for sampled invitation subsets and contexts");
    audit_cmd->add_option("--contexts", audit.contexts, "extra random non-truthful contexts for the other agents");
    audit_cmd->add_flag("--full-type-space", audit.full_type_space, "enumerate every pmf on the grid");
    audit_cmd->add_option("--json-out", audit.json_out, "write the machine-readable report here");

    std::string demo_name;
    auto* demo_cmd = app.add_subcommand("demo", "reproduce a worked example and check its numbers");
    demo_cmd->add_option("name", demo_name, "example1, example2, prop1 or idm-vs-pev")
        ->required()
        ->check(CLI::IsMember({"example1", "example2", "prop1", "idm-vs-pev"}));

    GenOptions gen;
    std::string gen_out;
    auto* gen_cmd = app.add_subcommand("gen", "generate a random scenario");
    gen_cmd->add_option("agents", gen.agents, "number of agents")->required()->check(CLI::PositiveNumber);
    gen_cmd->add_option("--levels", gen.levels, "number of quality levels")->check(CLI::PositiveNumber);
    gen_cmd->add_option("--density", gen.density, "extra edge probability")->check(CLI::Range(0.0, 1.0));
    gen_cmd->add_option("--seed", gen.seed, "generator seed");
    gen_cmd->add_flag("--degenerate-quality", gen.degenerate_quality, "every agent a point mass at one level");
    gen_cmd->add_option("-o,--out", gen_out, "output path (stdout when omitted)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run_cmd) return cmd_run(run, out);
        if (*audit_cmd) return cmd_audit(audit, out);
        if (*demo_cmd) {
            if (demo_name == "example1") return demo_example1(out);
            if (demo_name == "example2") return demo_example2(out);
            if (demo_name == "prop1") return demo_prop1(out);
            return demo_idm_vs_pev(out);
        }
        if (*gen_cmd) {
            const std::string text = serialize_scenario(generate_scenario(gen));
            if (gen_out.empty()) {
                out << text;
            } else {
                write_file(gen_out, text);
            }
            return kExitOk;
        }
    } catch (const Usage& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const PreconditionError& e) {
        err << "precondition: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}

}  // namespace pevnet
