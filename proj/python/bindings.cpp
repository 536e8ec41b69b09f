#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>
#include <pybind11/stl_bind.h>

#include <sstream>

#include "cli.hpp"
#include "prophet/analysis.hpp"
#include "prophet/config.hpp"
#include "prophet/error.hpp"
#include "prophet/hints.hpp"
#include "prophet/learning.hpp"
#include "prophet/profiler.hpp"
#include "prophet/simulation.hpp"
#include "prophet/storage.hpp"
#include "prophet/trace.hpp"

namespace py = pybind11;
using namespace prophet;

PYBIND11_MAKE_OPAQUE(prophet::Trace)

namespace {

template <class T, class Write>
std::string dump(const T& value, Write write) {
    std::ostringstream out;
    write(out, value);
    return out.str();
}

template <class Read>
auto parse(const std::string& text, Read read) {
    std::istringstream in(text);
    return read(in);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Profile-guided temporal prefetching simulator.";

    PYBIND11_CONSTINIT static py::gil_safe_call_once_and_store<py::object> error_type;
    error_type.call_once_and_store_result([&]() {
        return py::object(py::exception<Error>(m, "ProphetError", PyExc_RuntimeError));
    });
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object type = error_type.get_stored();
            py::object err = type(e.what());
            err.attr("kind") = to_string(e.kind());
            err.attr("exit_code") = exit_code(e.kind());
            PyErr_SetObject(type.ptr(), err.ptr());
        }
    });

    // traces
    py::enum_<AccessKind>(m, "AccessKind")
        .value("DEMAND", AccessKind::Demand)
        .value("L1_PREFETCH_FILL", AccessKind::L1PrefetchFill);

    py::class_<MemoryAccess>(m, "MemoryAccess")
        .def(py::init<std::uint64_t, std::uint64_t, AccessKind>(), py::arg("pc"), py::arg("line_addr"),
             py::arg("kind") = AccessKind::Demand)
        .def_readwrite("pc", &MemoryAccess::pc)
        .def_readwrite("line_addr", &MemoryAccess::line_addr)
        .def_readwrite("kind", &MemoryAccess::kind)
        .def(py::self == py::self)
        .def("__repr__", [](const MemoryAccess& a) {
            std::ostringstream s;
            s << "MemoryAccess(pc=0x" << std::hex << a.pc << ", line_addr=0x" << a.line_addr
              << (a.kind == AccessKind::Demand ? ", D)" : ", P)");
            return s.str();
        });

    py::bind_vector<Trace>(m, "Trace");

    py::class_<TraceSpec>(m, "TraceSpec")
        .def(py::init<>())
        .def_readwrite("unique_addrs", &TraceSpec::unique_addrs)
        .def_readwrite("repetitions", &TraceSpec::repetitions)
        .def_readwrite("noise_ratio", &TraceSpec::noise_ratio)
        .def_readwrite("seed", &TraceSpec::seed)
        .def_readwrite("stride_lines", &TraceSpec::stride_lines)
        .def_readwrite("l1_stride_prefetch", &TraceSpec::l1_stride_prefetch)
        .def_property(
            "pattern", [](const TraceSpec& s) { return to_string(s.pattern); },
            [](TraceSpec& s, const std::string& name) { s.pattern = parse_trace_pattern(name); })
        .def_property(
            "fanout",
            [](const TraceSpec& s) { return format_fanout_distribution(s.target_fanout_dist); },
            [](TraceSpec& s, const std::string& text) { s.target_fanout_dist = parse_fanout_distribution(text); });

    m.def("generate_trace", &generate_trace, py::arg("spec"));
    m.def(
        "load_trace",
        [](const std::filesystem::path& path) { return load_trace(path, detect_trace_format(path)); },
        py::arg("path"));
    m.def(
        "save_trace",
        [](const std::filesystem::path& path, const Trace& trace, const std::string& format) {
            if (format != "binary" && format != "text")
                throw Error(ErrorKind::Usage, "format must be binary or text");
            write_trace(path, trace, format == "text" ? TraceFormat::Text : TraceFormat::Binary);
        },
        py::arg("path"), py::arg("trace"), py::arg("format") = "binary");

    // configuration
    py::class_<CacheConfig>(m, "CacheConfig")
        .def(py::init<>())
        .def_readwrite("total_size", &CacheConfig::total_size)
        .def_readwrite("ways", &CacheConfig::ways)
        .def_readwrite("metadata_ways", &CacheConfig::metadata_ways)
        .def_property_readonly("sets", &CacheConfig::sets);

    py::class_<AnalysisParams>(m, "AnalysisParams")
        .def(py::init<>())
        .def_readwrite("el_acc", &AnalysisParams::el_acc)
        .def_readwrite("n", &AnalysisParams::n)
        .def_readwrite("llc_sets", &AnalysisParams::llc_sets)
        .def_readwrite("top_k", &AnalysisParams::top_k);

    py::class_<ProfileOptions>(m, "ProfileOptions")
        .def(py::init<>())
        .def_readwrite("sample_period", &ProfileOptions::sample_period)
        .def_readwrite("seed", &ProfileOptions::seed)
        .def_readwrite("cache", &ProfileOptions::cache)
        .def_property(
            "sampling",
            [](const ProfileOptions& o) { return o.sampling == SamplingMode::Random ? "random" : "every_kth"; },
            [](ProfileOptions& o, const std::string& v) {
                if (v == "random")
                    o.sampling = SamplingMode::Random;
                else if (v == "every_kth")
                    o.sampling = SamplingMode::EveryKth;
                else
                    throw Error(ErrorKind::Usage, "sampling must be every_kth or random");
            });

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("cache", &SimConfig::cache)
        .def_readwrite("run_id", &SimConfig::run_id)
        .def_readwrite("seed", &SimConfig::seed)
        .def_property(
            "policy", [](const SimConfig& c) { return to_string(c.policy); },
            [](SimConfig& c, const std::string& name) { c.policy = parse_policy(name); })
        .def_property(
            "degree", [](const SimConfig& c) { return c.prefetcher.degree; },
            [](SimConfig& c, std::uint32_t d) { c.prefetcher.degree = d; })
        .def_property(
            "victim_buffer", [](const SimConfig& c) { return c.prefetcher.victim_buffer_enabled; },
            [](SimConfig& c, bool on) { c.prefetcher.victim_buffer_enabled = on; });

    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("trace", &RunConfig::trace)
        .def_readwrite("sim", &RunConfig::sim)
        .def_readwrite("analysis", &RunConfig::analysis)
        .def_readwrite("profile", &RunConfig::profile)
        .def_readwrite("cap_L", &RunConfig::cap_L)
        .def("set", &RunConfig::set, py::arg("key"), py::arg("value"))
        .def("set_seed", &RunConfig::set_seed, py::arg("seed"))
        .def("effective_analysis", &RunConfig::effective_analysis)
        .def("effective_profile", &RunConfig::effective_profile);
    m.def("load_run_config", &load_run_config, py::arg("path"));

    // profiling
    py::class_<PcCounters>(m, "PcCounters")
        .def(py::init<>())
        .def_readwrite("pc", &PcCounters::pc)
        .def_readwrite("issued", &PcCounters::issued)
        .def_readwrite("useful", &PcCounters::useful)
        .def_readwrite("demand_misses", &PcCounters::demand_misses)
        .def_property_readonly("accuracy", &PcCounters::accuracy);

    py::class_<AppCounters>(m, "AppCounters")
        .def(py::init<>())
        .def_readwrite("insertions", &AppCounters::insertions)
        .def_readwrite("replacements", &AppCounters::replacements)
        .def_readwrite("allocated_entries_end", &AppCounters::allocated_entries_end);

    py::class_<CounterFile>(m, "CounterFile")
        .def(py::init<>())
        .def_readwrite("pcs", &CounterFile::pcs)
        .def_readwrite("app", &CounterFile::app)
        .def(py::self == py::self)
        .def("dumps", [](const CounterFile& c) { return dump(c, write_counters); })
        .def_static("loads", [](const std::string& t) { return parse(t, read_counters); });

    m.def(
        "profile", [](const Trace& t, const ProfileOptions& o) { return profile(t, o); }, py::arg("trace"),
        py::arg("options") = ProfileOptions{});
    m.def("load_counters", &load_counters, py::arg("path"));
    m.def("save_counters", &save_counters, py::arg("path"), py::arg("counters"));

    // learning
    py::class_<StoreRecord>(m, "StoreRecord")
        .def_readonly("accuracy", &StoreRecord::accuracy)
        .def_readonly("misses", &StoreRecord::misses);

    py::class_<CounterStore>(m, "CounterStore")
        .def(py::init<>())
        .def_readonly("per_pc", &CounterStore::per_pc)
        .def_readonly("allocated", &CounterStore::allocated)
        .def_readonly("loop_l", &CounterStore::loop_l)
        .def_readwrite("cap_L", &CounterStore::cap_L)
        .def(py::self == py::self)
        .def("dumps", [](const CounterStore& s) { return dump(s, write_store); })
        .def_static("loads", [](const std::string& t) { return parse(t, read_store); });

    m.def("learn", &learn, py::arg("store"), py::arg("counters"));
    m.def("merge_pc", &merge_pc, py::arg("old"), py::arg("new"), py::arg("l"), py::arg("cap_L") = kDefaultCapL);
    m.def("merge_app", &merge_app, py::arg("old"), py::arg("new"));
    m.def("load_store", &load_store, py::arg("path"));
    m.def("save_store", &save_store, py::arg("path"), py::arg("store"));

    // analysis
    py::class_<Hint>(m, "Hint")
        .def(py::init<bool, std::uint8_t>(), py::arg("insert") = true, py::arg("priority") = 3)
        .def_readwrite("insert", &Hint::insert)
        .def_readwrite("priority", &Hint::priority)
        .def(py::self == py::self);

    py::class_<HintEntry>(m, "HintEntry")
        .def(py::init<std::uint64_t, Hint>(), py::arg("pc"), py::arg("hint"))
        .def_readwrite("pc", &HintEntry::pc)
        .def_readwrite("hint", &HintEntry::hint);

    py::class_<CsrState>(m, "CsrState")
        .def(py::init<>())
        .def_readwrite("prophet_enabled", &CsrState::prophet_enabled)
        .def_readwrite("metadata_ways", &CsrState::metadata_ways)
        .def_readwrite("insertion_policy_enabled", &CsrState::insertion_policy_enabled)
        .def_readwrite("resizing_from_profile", &CsrState::resizing_from_profile);

    py::class_<HintManifest>(m, "HintManifest")
        .def(py::init<>())
        .def_readwrite("csr", &HintManifest::csr)
        .def_readwrite("hints", &HintManifest::hints)
        .def(py::self == py::self)
        .def("dumps", [](const HintManifest& h) { return dump(h, write_manifest); })
        .def_static("loads", [](const std::string& t) { return parse(t, read_manifest); });

    py::class_<ResizeDecision>(m, "ResizeDecision")
        .def_readonly("metadata_ways", &ResizeDecision::metadata_ways)
        .def_readonly("prefetcher_enabled", &ResizeDecision::prefetcher_enabled)
        .def_readonly("target_entries", &ResizeDecision::target_entries)
        .def_readonly("target_lines", &ResizeDecision::target_lines)
        .def_readonly("raw_ways", &ResizeDecision::raw_ways);

    m.def("insert_decision", &insert_decision, py::arg("accuracy"), py::arg("params") = AnalysisParams{});
    m.def("priority_level", &priority_level, py::arg("accuracy"), py::arg("params") = AnalysisParams{});
    m.def("nearest_power_of_two", &nearest_power_of_two, py::arg("value"));
    m.def("resize_decision", &resize_decision, py::arg("allocated_entries"), py::arg("params") = AnalysisParams{});
    m.def(
        "analyze", [](const CounterFile& c, const AnalysisParams& p) { return analyze(analysis_input(c), p); },
        py::arg("counters"), py::arg("params") = AnalysisParams{});
    m.def(
        "analyze", [](const CounterStore& s, const AnalysisParams& p) { return analyze(analysis_input(s), p); },
        py::arg("store"), py::arg("params") = AnalysisParams{});
    m.def("load_manifest", &load_manifest, py::arg("path"));
    m.def("save_manifest", &save_manifest, py::arg("path"), py::arg("manifest"));

    // simulation
    py::class_<PcStats>(m, "PcStats")
        .def_readonly("issued", &PcStats::issued)
        .def_readonly("useful", &PcStats::useful)
        .def_readonly("demand_misses", &PcStats::demand_misses)
        .def_property_readonly("accuracy", &PcStats::accuracy);

    py::class_<PcReportRow>(m, "PcReportRow")
        .def_readonly("pc", &PcReportRow::pc)
        .def_readonly("stats", &PcReportRow::stats);

    py::class_<SimReport>(m, "SimReport")
        .def_readonly("run_id", &SimReport::run_id)
        .def_readonly("policy", &SimReport::policy)
        .def_readonly("demand_accesses", &SimReport::demand_accesses)
        .def_readonly("demand_misses", &SimReport::demand_misses)
        .def_readonly("issued", &SimReport::issued)
        .def_readonly("useful", &SimReport::useful)
        .def_readonly("coverage", &SimReport::coverage)
        .def_readonly("accuracy", &SimReport::accuracy)
        .def_readonly("traffic_proxy", &SimReport::traffic_proxy)
        .def_readonly("baseline_misses", &SimReport::baseline_misses)
        .def_readonly("metadata_ways", &SimReport::metadata_ways)
        .def_readonly("per_pc", &SimReport::per_pc)
        .def("csv", [](const SimReport& r) { return dump(r, write_report_csv); });

    m.def(
        "simulate",
        [](const Trace& t, const SimConfig& c, const std::optional<HintManifest>& manifest) {
            return simulate(t, c, manifest ? &*manifest : nullptr);
        },
        py::arg("trace"), py::arg("config") = SimConfig{}, py::arg("manifest") = py::none());

    // storage
    py::class_<StorageRow>(m, "StorageRow")
        .def_readonly("structure", &StorageRow::structure)
        .def_readonly("entries", &StorageRow::entries)
        .def_readonly("bits_per_entry", &StorageRow::bits_per_entry)
        .def_readonly("bits", &StorageRow::bits)
        .def_property_readonly("kib", [](const StorageRow& r) { return kib(r.bits); });

    m.def("storage_table", &default_storage_table);
    m.def("storage_table_csv", [] { return dump(default_storage_table(), write_storage_table); });

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            int code = cli::run(args, out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));

    m.attr("GENERATOR_PCS") = py::dict(
        py::arg("temporal") = generator_pc::kTemporal, py::arg("noise") = generator_pc::kNoise,
        py::arg("multi_target") = generator_pc::kMultiTarget,
        py::arg("pointer_chase") = generator_pc::kPointerChase, py::arg("strided") = generator_pc::kStrided);
}
