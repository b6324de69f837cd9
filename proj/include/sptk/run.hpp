#pragma once

#include <optional>
#include <string>

#include "sptk/dw2d.hpp"
#include "sptk/parent_ham.hpp"
#include "sptk/registry.hpp"
#include "sptk/run_version.hpp"
#include "sptk/spt_indices.hpp"

namespace sptk {

/// Resolved invocation of one CLI command. Populated from flags and/or a
/// JSON config file (strict: unknown fields are usage errors; flags win).
struct RunConfig {
    std::string command;
    std::string mps = "aklt";
    std::string group = "Z2xZ2";
    std::string rep = "pauli";
    std::string path = "zx-interp";
    int degree = 2;
    i64 modulus = 0; // 0 = policy default (exponent of the group; lcm with user value)
    int window_m = 2;
    int n_lo = 3, n_hi = 8;
    int dw_l = 5;
    std::string identities = "all";
    int samples = 200;
    int steps = 512;
    int class_id = 0;
    bool informational = false;
    std::uint64_t seed = 12345;
    std::string emit = "json";
    std::size_t tuple_cap = 10'000'000; // memory guard on |G|^(n+1)
    std::size_t ed_cap = 59049;         // exact-diagonalization guard on d^N

    static RunConfig from_json(const Json& j) {
        RunConfig c;
        detail_reg::reject_unknown_fields(
            j,
            {"command", "mps", "group", "rep", "path", "degree", "modulus", "m", "n-lo", "n-hi", "L",
             "identities", "samples", "steps", "class", "informational", "seed", "emit", "cap", "ed-cap"},
            "config");
        c.command = j.value("command", c.command);
        c.mps = j.value("mps", c.mps);
        c.group = j.value("group", c.group);
        c.rep = j.value("rep", c.rep);
        c.path = j.value("path", c.path);
        c.degree = j.value("degree", c.degree);
        c.modulus = j.value("modulus", c.modulus);
        c.window_m = j.value("m", c.window_m);
        c.n_lo = j.value("n-lo", c.n_lo);
        c.n_hi = j.value("n-hi", c.n_hi);
        c.dw_l = j.value("L", c.dw_l);
        c.identities = j.value("identities", c.identities);
        c.samples = j.value("samples", c.samples);
        c.steps = j.value("steps", c.steps);
        c.class_id = j.value("class", c.class_id);
        c.informational = j.value("informational", c.informational);
        c.seed = j.value("seed", c.seed);
        c.emit = j.value("emit", c.emit);
        c.tuple_cap = j.value("cap", c.tuple_cap);
        c.ed_cap = j.value("ed-cap", c.ed_cap);
        if (c.tuple_cap == 0 || c.ed_cap == 0 || c.samples <= 0 || c.steps <= 0)
            throw usage_error("caps, samples and steps must be positive");
        return c;
    }

    Json echo() const {
        Json j;
        j["command"] = command;
        j["mps"] = mps;
        j["group"] = group;
        j["rep"] = rep;
        j["path"] = path;
        j["degree"] = degree;
        j["modulus"] = modulus;
        j["m"] = window_m;
        j["n-lo"] = n_lo;
        j["n-hi"] = n_hi;
        j["L"] = dw_l;
        j["identities"] = identities;
        j["samples"] = samples;
        j["steps"] = steps;
        j["class"] = class_id;
        j["informational"] = informational;
        j["seed"] = seed;
        j["cap"] = tuple_cap;
        j["ed-cap"] = ed_cap;
        return j;
    }
};

struct RunOutcome {
    Json report;
    int exit_code = 0;
};

namespace detail_run {

inline i64 policy_modulus(const FiniteGroup& g, i64 user) {
    i64 base = g.exponent();
    if (user <= 0) return base;
    return std::lcm(base, user);
}

inline Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

inline Json cochain_json(const Cochain& c) {
    Json rows = Json::array();
    for_each_tuple(c.group(), c.degree(), [&](const std::vector<int>& tup, std::size_t idx) {
        Json row = Json::array();
        for (int v : tup) row.push_back(v);
        row.push_back(c.at_index(idx));
        rows.push_back(row);
    });
    Json j;
    j["group"] = c.group().label();
    j["degree"] = c.degree();
    j["modulus"] = c.modulus();
    j["values"] = rows;
    return j;
}

inline Json run_cohomology(const RunConfig& cfg) {
    FiniteGroup g = lookup_group(cfg.group);
    i64 m = policy_modulus(g, cfg.modulus);
    CohomologyGroup h = cohomology_group(g, cfg.degree, m, cfg.tuple_cap);
    Json out;
    out["group"] = g.label();
    out["group-order"] = g.order();
    out["degree"] = cfg.degree;
    out["modulus"] = m;
    out["modulus-warning"] = h.modulus_warning();
    out["order"] = h.order();
    out["cyclic-orders"] = h.cyclic_orders();
    Json classes = Json::array();
    for (const auto& cls : h.classes()) {
        Json c;
        c["class"] = cls.class_id;
        c["representative"] = cochain_json(cls.representative);
        classes.push_back(c);
    }
    out["classes"] = classes;
    out["addition"] = h.addition_table();
    return out;
}

inline Json run_mps_check(const RunConfig& cfg) {
    MPSTensor v = normalize(lookup_mps(cfg.mps));
    PrimitivityReport rep = is_primitive(v);
    Json out;
    out["mps"] = v.label;
    out["d"] = v.d;
    out["k"] = v.k;
    out["primitive"] = rep.primitive;
    out["criteria-agree"] = rep.criteria_agree;
    out["spectral-radius"] = rep.spectral_radius;
    Json peripheral = Json::array();
    for (auto z : rep.peripheral_eigenvalues) peripheral.push_back(complex_json(z));
    out["peripheral-eigenvalues"] = peripheral;
    out["fixed-point-min-eigenvalue"] = rep.fixed_point_min_eigenvalue;
    if (rep.span_length)
        out["span-length"] = *rep.span_length;
    else
        out["span-length"] = nullptr;
    out["span-cap-hit"] = rep.span_cap_hit;
    Json eigs = Json::array();
    for (auto z : TransferOp(v).eigenvalues()) eigs.push_back(complex_json(z));
    out["transfer-eigenvalues"] = eigs;
    if (rep.primitive) {
        CanonicalMPS c = canonical_form(v);
        out["correlation-length"] = correlation_length(c);
        std::vector<double> rho(c.rho.data(), c.rho.data() + c.rho.size());
        out["rho"] = rho;
    }
    return out;
}

inline Json run_parent_ham(const RunConfig& cfg) {
    MPSTensor v = normalize(lookup_mps(cfg.mps));
    auto rows = gap_scan(v, cfg.window_m, cfg.n_lo, cfg.n_hi, cfg.ed_cap);
    Json out;
    out["mps"] = v.label;
    out["m"] = cfg.window_m;
    Json table = Json::array();
    for (const auto& r : rows) {
        Json jr;
        jr["N"] = r.n_sites;
        jr["kernel-dim"] = r.kernel_dim;
        jr["gap"] = r.gap;
        table.push_back(jr);
    }
    out["table"] = table;
    auto len = injectivity_length(v);
    if (len)
        out["injectivity-length"] = *len;
    else
        out["injectivity-length"] = nullptr;
    return out;
}

inline Json run_index_onsite(const RunConfig& cfg, int& exit_code) {
    MPSTensor v = normalize(lookup_mps(cfg.mps));
    UnitaryRep rep = lookup_rep_for(cfg.rep, v);
    CanonicalMPS c = canonical_form(v);
    auto inv = check_onsite_invariance_detail(c, rep);
    Json out;
    out["mps"] = v.label;
    out["rep"] = rep.label();
    out["invariant"] = inv.invariant;
    out["min-peripheral-modulus"] = inv.min_peripheral_modulus;
    out["max-marginal-distance"] = inv.max_marginal_distance;
    if (!inv.invariant) {
        exit_code = 1;
        out["error"] = "state is not invariant under the representation";
        return out;
    }
    OnsiteIndexResult res = onsite_h2_index(c, rep);
    out["class"] = res.h2_class.class_id;
    out["nontrivial"] = !res.h2_class.trivial();
    out["modulus"] = res.modulus;
    out["sigma"] = cochain_json(res.sigma);
    Json residuals;
    for (const auto& [g, sol] : res.per_g) residuals[std::to_string(g)] = sol.residual;
    out["residuals"] = residuals;
    return out;
}

inline Json run_index_reflection(const RunConfig& cfg) {
    MPSTensor v = normalize(lookup_mps(cfg.mps));
    CanonicalMPS c = canonical_form(v);
    ReflectionIndexResult res = reflection_z2_index(c);
    Json out;
    out["mps"] = v.label;
    out["sign"] = res.sign;
    out["residual"] = res.residual;
    out["jjbar-residual"] = res.jjbar_residual;
    return out;
}

inline Json run_lsm(const RunConfig& cfg) {
    FiniteGroup g = lookup_group(cfg.group);
    UnitaryRep rep = lookup_rep(cfg.rep, 0);
    if (!rep.group().same_table(g))
        throw usage_error("representation group does not match --group");
    LsmResult res = lsm_obstruction(rep);
    CohomologyGroup h2 = cohomology_group(g, 2, res.modulus);
    Json out;
    out["group"] = g.label();
    out["rep"] = rep.label();
    out["class"] = res.h2_class.class_id;
    out["obstructed"] = res.obstructed;
    out["modulus"] = res.modulus;
    out["reflection-double"] = reflection_lsm_check(h2, res.h2_class.class_id);
    out["multiplier"] = cochain_json(res.multiplier);
    return out;
}

inline Json run_spectral_flow(const RunConfig& cfg) {
    GappedPath path = lookup_path(cfg.path);
    FlowResult res = transport(path, cfg.steps);
    Json out;
    out["path"] = cfg.path;
    out["steps"] = cfg.steps;
    out["gap"] = path.gap();
    out["derivative-numeric"] = path.derivative_is_numeric();
    out["ground-rank"] = res.ground_rank;
    out["max-deviation"] = res.max_deviation;
    Json table = Json::array();
    // Thin the per-s table to at most 65 rows to keep reports compact.
    std::size_t stride = std::max<std::size_t>(1, res.s_values.size() / 64);
    for (std::size_t i = 0; i < res.s_values.size(); i += stride) {
        Json row;
        row["s"] = res.s_values[i];
        row["deviation"] = res.deviations[i];
        table.push_back(row);
    }
    out["per-s"] = table;
    Json dres = Json::array();
    for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        Json row;
        row["s"] = s;
        row["residual"] = derivative_identity_check(path, s, 1e-4);
        dres.push_back(row);
    }
    out["derivative-identity"] = dres;
    return out;
}

struct DwSetup {
    std::shared_ptr<const CocycleData3> data;
    CohomologyGroup h3;
};

inline DwSetup dw_data_for(const RunConfig& cfg) {
    FiniteGroup g = lookup_group(cfg.group);
    i64 m = policy_modulus(g, cfg.modulus);
    CohomologyGroup h3 = cohomology_group(g, 3, m);
    if (cfg.class_id < 0 || cfg.class_id >= h3.order())
        throw usage_error("class index out of range; H^3 has order " + std::to_string(h3.order()));
    Cochain nu = h3.normalized_representative(cfg.class_id);
    return DwSetup{std::make_shared<const CocycleData3>(CocycleData3::from_inhomogeneous(nu)), std::move(h3)};
}

inline Json run_dw_verify(const RunConfig& cfg, int& exit_code) {
    DwSetup setup = dw_data_for(cfg);
    const auto& data = setup.data;
    const auto& h3 = setup.h3;
    std::vector<DwIdentity> ids;
    if (cfg.identities == "all")
        ids = {DwIdentity::lemma_i, DwIdentity::lemma_ii_first, DwIdentity::lemma_ii_second,
               DwIdentity::lemma_iii, DwIdentity::lemma_iv};
    else {
        bool found = false;
        for (DwIdentity id : {DwIdentity::lemma_i, DwIdentity::lemma_ii_first, DwIdentity::lemma_ii_second,
                              DwIdentity::lemma_iii, DwIdentity::lemma_iv})
            if (identity_name(id) == cfg.identities) {
                ids = {id};
                found = true;
            }
        if (!found) throw usage_error("unknown identity '" + cfg.identities + "'");
    }
    DwSampling sampling;
    sampling.n_random = cfg.samples;
    Json out;
    out["group"] = cfg.group;
    out["class"] = cfg.class_id;
    out["L"] = cfg.dw_l;
    out["h3-order"] = h3.order();
    Json reports = Json::array();
    bool all_passed = true;
    for (DwIdentity id : ids) {
        DwVerification rep = verify_identity(data, id, cfg.dw_l, sampling, cfg.seed, cfg.informational);
        Json jr;
        jr["identity"] = rep.identity;
        jr["passed"] = rep.passed;
        jr["informational"] = rep.informational;
        jr["exhaustive"] = rep.exhaustive;
        jr["samples"] = rep.samples;
        jr["seed"] = rep.seed;
        if (!rep.passed) jr["witness"] = rep.failure;
        reports.push_back(jr);
        all_passed = all_passed && rep.passed;
    }
    out["identities"] = reports;
    out["passed"] = all_passed;
    if (!all_passed) exit_code = 1;
    return out;
}

inline Json run_dw_extract(const RunConfig& cfg) {
    DwSetup setup = dw_data_for(cfg);
    H3Extraction ext = extract_h3(setup.data);
    Json out;
    out["group"] = cfg.group;
    out["class-input"] = cfg.class_id;
    out["class-extracted"] = ext.class_id;
    out["h3-order"] = ext.h3_order;
    out["round-trip"] = ext.matches_psi && ext.class_id == cfg.class_id;
    out["cocycle"] = cochain_json(ext.cocycle);
    return out;
}

} // namespace detail_run

/// Dispatch a command. Exit codes: 0 pass, 1 verification failure, 2 usage
/// error. Reports are deterministic given fixed seed and inputs (timing goes
/// to stderr, never into the report).
inline RunOutcome run(const RunConfig& cfg) {
    RunOutcome out;
    Json report;
    report["version"] = kVersion;
    report["inputs"] = cfg.echo();
    int exit_code = 0;
    try {
        Json results;
        if (cfg.command == "cohomology")
            results = detail_run::run_cohomology(cfg);
        else if (cfg.command == "mps-check")
            results = detail_run::run_mps_check(cfg);
        else if (cfg.command == "parent-ham")
            results = detail_run::run_parent_ham(cfg);
        else if (cfg.command == "index-onsite")
            results = detail_run::run_index_onsite(cfg, exit_code);
        else if (cfg.command == "index-reflection")
            results = detail_run::run_index_reflection(cfg);
        else if (cfg.command == "lsm")
            results = detail_run::run_lsm(cfg);
        else if (cfg.command == "spectral-flow")
            results = detail_run::run_spectral_flow(cfg);
        else if (cfg.command == "dw-verify")
            results = detail_run::run_dw_verify(cfg, exit_code);
        else if (cfg.command == "dw-extract")
            results = detail_run::run_dw_extract(cfg);
        else
            throw usage_error("unknown command '" + cfg.command + "'");
        report["results"] = results;
    } catch (const Error& e) {
        Json err;
        err["code"] = e.code();
        err["message"] = e.what();
        report["error"] = err;
        exit_code = e.exit_code();
    } catch (const std::exception& e) {
        Json err;
        err["code"] = "internal";
        err["message"] = e.what();
        report["error"] = err;
        exit_code = 1;
    }
    out.report = report;
    out.exit_code = exit_code;
    return out;
}

/// Human-readable one-line-per-item rendering for --emit text.
inline std::string render_text(const Json& report) {
    std::string out;
    out += "sptk " + report["version"].get<std::string>() + " :: " +
           report["inputs"]["command"].get<std::string>() + "\n";
    if (report.contains("error")) {
        out += "error [" + report["error"]["code"].get<std::string>() + "] " +
               report["error"]["message"].get<std::string>() + "\n";
        return out;
    }
    out += report["results"].dump(2) + "\n";
    return out;
}

} // namespace sptk
