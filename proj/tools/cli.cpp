#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include "prophet/analysis.hpp"
#include "prophet/config.hpp"
#include "prophet/error.hpp"
#include "prophet/hints.hpp"
#include "prophet/learning.hpp"
#include "prophet/profiler.hpp"
#include "prophet/report.hpp"
#include "prophet/simulation.hpp"
#include "prophet/storage.hpp"
#include "prophet/trace.hpp"

namespace prophet::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::string config_path;
    std::string out;
    std::vector<std::string> sets;
};

// Writes through a temporary string so that a failing command leaves no
// half-written output behind.
void emit(const std::string& path, std::ostream& stdout_stream,
          const std::function<void(std::ostream&)>& body) {
    std::ostringstream buf;
    body(buf);
    if (path.empty() || path == "-") {
        stdout_stream << buf.str();
        return;
    }
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
    f << buf.str();
    if (!f) throw Error(ErrorKind::Io, "write failed for " + path);
}

std::string first_line(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    return line;
}

void require_out(const GlobalOptions& g, const char* command) {
    if (g.out.empty()) throw Error(ErrorKind::Usage, std::string(command) + ": --out is required");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Profile-guided temporal prefetching simulator"};
    app.name("prophet");
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--seed", g.seed, "Seed for every random choice");
    app.add_option("--config", g.config_path, "key=value configuration file");
    app.add_option("--out", g.out, "Output path");
    app.add_option("--set", g.sets, "Configuration override key=value (repeatable)");

    // gen-trace
    auto* gen = app.add_subcommand("gen-trace", "Generate a synthetic trace");
    std::string gen_format = "binary";
    std::optional<std::string> gen_pattern, gen_fanout;
    std::optional<std::uint64_t> gen_unique, gen_reps;
    std::optional<double> gen_noise;
    gen->add_option("--format", gen_format, "binary or text")->check(CLI::IsMember({"binary", "text"}));
    gen->add_option("--pattern", gen_pattern);
    gen->add_option("--unique-addrs", gen_unique);
    gen->add_option("--repetitions", gen_reps);
    gen->add_option("--noise-ratio", gen_noise);
    gen->add_option("--fanout", gen_fanout, "e.g. 1:0.5,2:0.5");

    // profile
    auto* prof = app.add_subcommand("profile", "Profile a trace into a counter file");
    std::string prof_trace;
    std::optional<std::uint64_t> prof_period;
    prof->add_option("trace", prof_trace)->required();
    prof->add_option("--sample-period", prof_period);

    // analyze
    auto* ana = app.add_subcommand("analyze", "Turn counters or a store into a hint manifest");
    std::string ana_input;
    std::optional<double> ana_el_acc;
    std::optional<unsigned> ana_n;
    std::optional<std::uint64_t> ana_sets;
    ana->add_option("input", ana_input, "counter file or store")->required();
    ana->add_option("--el-acc", ana_el_acc);
    ana->add_option("--n", ana_n);
    ana->add_option("--llc-sets", ana_sets);

    // learn
    auto* lrn = app.add_subcommand("learn", "Merge a counter file into the store");
    std::string lrn_counters, lrn_store;
    lrn->add_option("counters", lrn_counters)->required();
    lrn->add_option("--store", lrn_store, "existing store; a fresh one is used when absent");

    // simulate
    auto* sim = app.add_subcommand("simulate", "Simulate one policy on a trace");
    std::string sim_trace, sim_manifest, sim_per_pc;
    std::optional<std::string> sim_policy, sim_run_id;
    sim->add_option("trace", sim_trace)->required();
    sim->add_option("--manifest", sim_manifest);
    sim->add_option("--policy", sim_policy, "nopf, nofilter, patternconf or prophet");
    sim->add_option("--run-id", sim_run_id);
    sim->add_option("--per-pc", sim_per_pc, "per-PC CSV output path");

    // report
    auto* rep = app.add_subcommand("report", "Aggregate report CSVs and print the storage table");
    std::vector<std::string> rep_inputs;
    std::string rep_storage;
    rep->add_option("reports", rep_inputs)->required();
    rep->add_option("--storage-out", rep_storage, "storage table path (stdout when omitted)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = g.config_path.empty() ? RunConfig{} : load_run_config(g.config_path);
        for (const auto& kv : g.sets) {
            auto eq = kv.find('=');
            if (eq == std::string::npos) throw Error(ErrorKind::Usage, "--set expects key=value, got " + kv);
            cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (g.seed) cfg.set_seed(*g.seed);

        if (*gen) {
            require_out(g, "gen-trace");
            if (gen_pattern) cfg.set("trace.pattern", *gen_pattern);
            if (gen_unique) cfg.trace.unique_addrs = *gen_unique;
            if (gen_reps) cfg.trace.repetitions = *gen_reps;
            if (gen_noise) cfg.trace.noise_ratio = *gen_noise;
            if (gen_fanout) cfg.set("trace.fanout", *gen_fanout);
            auto trace = generate_trace(cfg.trace);
            write_trace(g.out, trace, gen_format == "text" ? TraceFormat::Text : TraceFormat::Binary);
        } else if (*prof) {
            require_out(g, "profile");
            if (prof_period) cfg.profile.sample_period = *prof_period;
            auto trace = load_trace(prof_trace, detect_trace_format(prof_trace));
            auto counters = profile(trace, cfg.effective_profile());
            save_counters(g.out, counters);
        } else if (*ana) {
            require_out(g, "analyze");
            if (ana_el_acc) cfg.analysis.el_acc = *ana_el_acc;
            if (ana_n) cfg.analysis.n = *ana_n;
            if (ana_sets) cfg.set("analysis.llc_sets", std::to_string(*ana_sets));
            auto params = cfg.effective_analysis();
            AnalysisInput input;
            if (first_line(ana_input).rfind("PRFSTO", 0) == 0)
                input = analysis_input(load_store(ana_input));
            else
                input = analysis_input(load_counters(ana_input));
            save_manifest(g.out, analyze(input, params));
        } else if (*lrn) {
            require_out(g, "learn");
            CounterStore store;
            store.cap_L = cfg.cap_L;
            if (!lrn_store.empty() && fs::exists(lrn_store)) store = load_store(lrn_store);
            auto counters = load_counters(lrn_counters);
            save_store(g.out, learn(std::move(store), counters));
        } else if (*sim) {
            if (sim_policy) cfg.sim.policy = parse_policy(*sim_policy);
            if (sim_run_id) cfg.sim.run_id = *sim_run_id;
            std::optional<HintManifest> manifest;
            if (!sim_manifest.empty()) manifest = load_manifest(sim_manifest);
            if (cfg.sim.policy == Policy::Prophet && !manifest)
                throw Error(ErrorKind::Usage, "simulate: policy prophet requires --manifest");
            auto trace = load_trace(sim_trace, detect_trace_format(sim_trace));
            auto report = simulate(trace, cfg.sim, manifest ? &*manifest : nullptr);
            emit(g.out, out, [&](std::ostream& o) { write_report_csv(o, report); });
            if (!sim_per_pc.empty())
                emit(sim_per_pc, out, [&](std::ostream& o) { write_pc_report_csv(o, report); });
        } else if (*rep) {
            std::vector<ReportRow> rows;
            for (const auto& path : rep_inputs) {
                auto part = load_report_csv(path);
                rows.insert(rows.end(), part.begin(), part.end());
            }
            emit(g.out, out, [&](std::ostream& o) { write_aggregate_csv(o, rows); });
            emit(rep_storage, out, [&](std::ostream& o) { write_storage_table(o, default_storage_table()); });
        }
    } catch (const Error& e) {
        err << "prophet: " << to_string(e.kind()) << ": " << e.what() << '\n';
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "prophet: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace prophet::cli
