#include <chrono>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sptk/run.hpp"

using namespace sptk;

namespace {

struct CliState {
    RunConfig cfg;
    std::string config_file;
    std::string output;
};

void add_common(CLI::App* cmd, CliState& st) {
    cmd->add_option("--config", st.config_file, "JSON config file; explicit flags override its fields");
    cmd->add_option("--seed", st.cfg.seed, "random seed for sampled checks");
    cmd->add_option("--emit", st.cfg.emit, "output format: json or text")
        ->check(CLI::IsMember({"json", "text"}));
    cmd->add_option("--out", st.output, "write the report to a file instead of stdout");
}

int execute(CliState& st, const std::vector<std::pair<std::string, bool>>& set_flags) {
    // Merge: config file first, then every flag the user actually passed.
    if (!st.config_file.empty()) {
        Json j = detail_reg::load_json_file(st.config_file);
        RunConfig from_file = RunConfig::from_json(j);
        from_file.command = st.cfg.command;
        RunConfig merged = from_file;
        for (const auto& [name, was_set] : set_flags) {
            if (!was_set) continue;
            if (name == "mps") merged.mps = st.cfg.mps;
            else if (name == "group") merged.group = st.cfg.group;
            else if (name == "rep") merged.rep = st.cfg.rep;
            else if (name == "path") merged.path = st.cfg.path;
            else if (name == "degree") merged.degree = st.cfg.degree;
            else if (name == "modulus") merged.modulus = st.cfg.modulus;
            else if (name == "m") merged.window_m = st.cfg.window_m;
            else if (name == "n-lo") merged.n_lo = st.cfg.n_lo;
            else if (name == "n-hi") merged.n_hi = st.cfg.n_hi;
            else if (name == "L") merged.dw_l = st.cfg.dw_l;
            else if (name == "identities") merged.identities = st.cfg.identities;
            else if (name == "samples") merged.samples = st.cfg.samples;
            else if (name == "steps") merged.steps = st.cfg.steps;
            else if (name == "class") merged.class_id = st.cfg.class_id;
            else if (name == "informational") merged.informational = st.cfg.informational;
            else if (name == "seed") merged.seed = st.cfg.seed;
            else if (name == "emit") merged.emit = st.cfg.emit;
            else if (name == "cap") merged.tuple_cap = st.cfg.tuple_cap;
            else if (name == "ed-cap") merged.ed_cap = st.cfg.ed_cap;
        }
        st.cfg = merged;
    }

    auto t0 = std::chrono::steady_clock::now();
    RunOutcome outcome = run(st.cfg);
    auto t1 = std::chrono::steady_clock::now();
    std::cerr << "[sptk] " << st.cfg.command << " finished in "
              << std::chrono::duration<double>(t1 - t0).count() << " s\n";

    std::string text = (st.cfg.emit == "text") ? render_text(outcome.report)
                                               : outcome.report.dump(2) + "\n";
    if (st.output.empty()) {
        std::cout << text;
    } else {
        std::ofstream out(st.output);
        if (!out) {
            std::cerr << "cannot write " << st.output << "\n";
            return 2;
        }
        out << text;
    }
    return outcome.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sptk: matrix product states, cohomology-valued SPT indices, parent Hamiltonians,\n"
                 "spectral flow and the 2D Dijkgraaf-Witten lattice model"};
    app.require_subcommand(1);

    CliState st;
    std::vector<std::pair<std::string, bool>> flags;
    auto track = [&flags](CLI::Option* opt, const std::string& name) {
        flags.emplace_back(name, false);
        std::size_t idx = flags.size() - 1;
        auto* flag_vec = &flags;
        opt->each([flag_vec, idx](const std::string&) { (*flag_vec)[idx].second = true; });
    };

    auto* cohomology = app.add_subcommand("cohomology", "compute H^n(G, U(1)) with exact arithmetic");
    track(cohomology->add_option("--group", st.cfg.group, "group name (Zn, ZnxZm) or JSON file"), "group");
    track(cohomology->add_option("--degree", st.cfg.degree, "cohomology degree n >= 1"), "degree");
    track(cohomology->add_option("--modulus", st.cfg.modulus, "coefficient modulus (0 = policy default)"),
          "modulus");
    track(cohomology->add_option("--cap", st.cfg.tuple_cap, "memory guard on |G|^(n+1)"), "cap");
    add_common(cohomology, st);

    auto* mps_check = app.add_subcommand("mps-check", "transfer spectrum and primitivity report");
    track(mps_check->add_option("--mps", st.cfg.mps, "tensor name or JSON file"), "mps");
    add_common(mps_check, st);

    auto* parent = app.add_subcommand("parent-ham", "FNW parent Hamiltonian kernel/gap scan");
    track(parent->add_option("--mps", st.cfg.mps, "tensor name or JSON file"), "mps");
    track(parent->add_option("--m", st.cfg.window_m, "window length m"), "m");
    std::string n_range;
    auto* range_opt = parent->add_option("--n-range", n_range, "chain lengths, e.g. 3..8");
    track(parent->add_option("--n-lo", st.cfg.n_lo, "smallest chain length"), "n-lo");
    track(parent->add_option("--n-hi", st.cfg.n_hi, "largest chain length"), "n-hi");
    track(parent->add_option("--ed-cap", st.cfg.ed_cap, "exact-diagonalization guard on d^N"), "ed-cap");
    add_common(parent, st);

    auto* onsite = app.add_subcommand("index-onsite", "H^2(G,U(1)) index of an invariant MPS");
    track(onsite->add_option("--mps", st.cfg.mps, "tensor name or JSON file"), "mps");
    track(onsite->add_option("--group", st.cfg.group, "symmetry group"), "group");
    track(onsite->add_option("--rep", st.cfg.rep, "on-site representation"), "rep");
    add_common(onsite, st);

    auto* reflect = app.add_subcommand("index-reflection", "Z2-valued reflection index of an MPS");
    track(reflect->add_option("--mps", st.cfg.mps, "tensor name or JSON file"), "mps");
    add_common(reflect, st);

    auto* lsm = app.add_subcommand("lsm", "Lieb-Schultz-Mattis obstruction of a projective representation");
    track(lsm->add_option("--group", st.cfg.group, "symmetry group"), "group");
    track(lsm->add_option("--rep", st.cfg.rep, "representation (e.g. pauli:2)"), "rep");
    add_common(lsm, st);

    auto* flow = app.add_subcommand("spectral-flow", "Hastings projector transport along a gapped path");
    track(flow->add_option("--path", st.cfg.path, "path name or JSON checkpoint file"), "path");
    track(flow->add_option("--steps", st.cfg.steps, "integration steps (>= 16)"), "steps");
    add_common(flow, st);

    auto* dwv = app.add_subcommand("dw-verify", "verify the Dijkgraaf-Witten lemma identities");
    track(dwv->add_option("--group", st.cfg.group, "gauge group"), "group");
    track(dwv->add_option("--class", st.cfg.class_id, "H^3 class index"), "class");
    track(dwv->add_option("--L", st.cfg.dw_l, "lattice half-size (conformance needs L >= 5)"), "L");
    track(dwv->add_option("--identities", st.cfg.identities, "all or one of the lemma_* names"),
          "identities");
    track(dwv->add_option("--samples", st.cfg.samples, "random configuration pairs per 2D identity"),
          "samples");
    track(dwv->add_flag("--informational", st.cfg.informational, "allow L < 5, reported as informational"),
          "informational");
    add_common(dwv, st);

    auto* dwe = app.add_subcommand("dw-extract", "recover the H^3 class from the pair unitaries");
    track(dwe->add_option("--group", st.cfg.group, "gauge group"), "group");
    track(dwe->add_option("--class", st.cfg.class_id, "H^3 class index"), "class");
    add_common(dwe, st);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    for (auto* cmd : {cohomology, mps_check, parent, onsite, reflect, lsm, flow, dwv, dwe})
        if (cmd->parsed()) st.cfg.command = cmd->get_name();

    try {
        if (range_opt->count() > 0) {
            auto dots = n_range.find("..");
            try {
                if (dots == std::string::npos) throw std::invalid_argument("");
                st.cfg.n_lo = std::stoi(n_range.substr(0, dots));
                st.cfg.n_hi = std::stoi(n_range.substr(dots + 2));
            } catch (const std::exception&) {
                throw usage_error("--n-range wants the form <lo>..<hi>");
            }
            flags.emplace_back("n-lo", true);
            flags.emplace_back("n-hi", true);
        }
        return execute(st, flags);
    } catch (const Error& e) {
        std::cerr << "error [" << e.code() << "] " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
