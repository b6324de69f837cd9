#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "sptk/models.hpp"
#include "sptk/representation.hpp"
#include "sptk/spectral_flow.hpp"

namespace sptk {

using Json = nlohmann::json;

namespace detail_reg {

inline bool parse_int(const std::string& s, int& out) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    out = std::stoi(s);
    return true;
}

inline Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw usage_error("cannot open file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw usage_error("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

inline void reject_unknown_fields(const Json& j, std::initializer_list<const char*> allowed,
                                  const std::string& what) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed)
            if (it.key() == a) ok = true;
        if (!ok) throw usage_error("unknown field '" + it.key() + "' in " + what);
    }
}

} // namespace detail_reg

/// Group registry: "Zn", "ZnxZm", or a JSON file {"order", "table", "label"}.
inline FiniteGroup lookup_group(const std::string& name) {
    if (name.size() > 5 && name.substr(name.size() - 5) == ".json") {
        Json j = detail_reg::load_json_file(name);
        detail_reg::reject_unknown_fields(j, {"order", "table", "label"}, "group file");
        if (!j.contains("table")) throw usage_error("group file needs a \"table\"");
        std::vector<std::vector<int>> table = j["table"].get<std::vector<std::vector<int>>>();
        if (j.contains("order") && j["order"].get<std::size_t>() != table.size())
            throw usage_error("group file order disagrees with the table size");
        return validate_table(std::move(table), j.value("label", name));
    }
    auto cross = name.find('x');
    if (cross != std::string::npos) {
        return direct_product(lookup_group(name.substr(0, cross)), lookup_group(name.substr(cross + 1)));
    }
    int n = 0;
    if (name.size() >= 2 && name[0] == 'Z' && detail_reg::parse_int(name.substr(1), n))
        return make_cyclic(n);
    throw usage_error("unknown group '" + name + "' (use Zn, ZnxZm, or a JSON file)");
}

/// MPS registry: built-in names or a JSON file
/// {"d", "k", "matrices": [ [ [re, im], ... ], ... ]} with matrices[mu][i][j].
inline MPSTensor lookup_mps(const std::string& name) {
    if (name == "aklt") return aklt_tensor();
    if (name == "aklt-pauli") return aklt_pauli_tensor();
    if (name == "aklt2") return aklt_stacked_tensor();
    if (name == "ghz") return ghz_tensor();
    if (name.rfind("product:", 0) == 0) {
        int d = 0;
        if (!detail_reg::parse_int(name.substr(8), d)) throw usage_error("bad product dimension in " + name);
        return product_tensor(d);
    }
    if (name.rfind("polarized:", 0) == 0) {
        int d = 0;
        if (!detail_reg::parse_int(name.substr(10), d) || d < 1 || d % 2 == 0)
            throw usage_error("polarized product states need an odd physical dimension");
        std::vector<MatrixXc> mats(static_cast<std::size_t>(d), MatrixXc::Zero(1, 1));
        mats[static_cast<std::size_t>(d / 2)](0, 0) = 1; // the m = 0 component
        return MPSTensor(std::move(mats), name);
    }
    if (name.size() > 5 && name.substr(name.size() - 5) == ".json") {
        Json j = detail_reg::load_json_file(name);
        detail_reg::reject_unknown_fields(j, {"d", "k", "matrices", "label"}, "mps file");
        int d = j.at("d").get<int>();
        int k = j.at("k").get<int>();
        std::vector<MatrixXc> mats;
        for (const auto& jm : j.at("matrices")) {
            MatrixXc m(k, k);
            for (int i = 0; i < k; ++i)
                for (int col = 0; col < k; ++col) {
                    const auto& e = jm.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(col));
                    m(i, col) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
                }
            mats.push_back(m);
        }
        if (static_cast<int>(mats.size()) != d) throw usage_error("mps file: need d matrices");
        return MPSTensor(std::move(mats), j.value("label", name));
    }
    throw usage_error("unknown mps '" + name +
                      "' (builtins: aklt, aklt-pauli, aklt2, ghz, product:<d>, polarized:<d>)");
}

/// Representation registry. "pauli" is the Z2xZ2 spin rotation family; its
/// dimension is inferred from the tensor's physical dimension ("pauli:<d>"
/// pins it; "pauli2:<d>" is the stacked tensor square).
inline UnitaryRep lookup_rep(const std::string& name, int physical_dim) {
    auto make_pauli = [](int d) { return pauli_z2z2_rep(d); };
    if (name == "pauli") {
        if (physical_dim < 2) throw usage_error("bare 'pauli' needs a tensor context; use pauli:<d>");
        return make_pauli(physical_dim);
    }
    if (name.rfind("pauli2:", 0) == 0) {
        int d = 0;
        if (!detail_reg::parse_int(name.substr(7), d)) throw usage_error("bad dimension in " + name);
        auto base = make_pauli(d);
        return tensor_rep(base, base, name);
    }
    if (name.rfind("pauli:", 0) == 0) {
        int d = 0;
        if (!detail_reg::parse_int(name.substr(6), d)) throw usage_error("bad dimension in " + name);
        return make_pauli(d);
    }
    if (name.rfind("trivial:", 0) == 0) {
        int d = 0;
        if (!detail_reg::parse_int(name.substr(8), d)) throw usage_error("bad dimension in " + name);
        FiniteGroup g = direct_product(make_cyclic(2), make_cyclic(2));
        std::vector<MatrixXc> mats(4, MatrixXc::Identity(d, d));
        return UnitaryRep(std::move(g), std::move(mats), name);
    }
    throw usage_error("unknown representation '" + name +
                      "' (builtins: pauli, pauli:<d>, pauli2:<d>, trivial:<d>)");
}

/// Resolve a representation for a given tensor; bare "pauli" adapts to the
/// tensor (plain family for aklt-like tensors, tensor square for stacked).
inline UnitaryRep lookup_rep_for(const std::string& name, const MPSTensor& v) {
    if (name == "pauli") {
        int root = 1;
        while (root * root < v.d) ++root;
        if (v.label.rfind("aklt2", 0) == 0 && root * root == v.d) {
            auto base = pauli_z2z2_rep(root);
            return tensor_rep(base, base, "pauli2:" + std::to_string(root));
        }
        return pauli_z2z2_rep(v.d);
    }
    return lookup_rep(name, v.d);
}

/// Path registry: built-ins, or a JSON file with Hermitian checkpoints and a
/// declared gap, interpolated piecewise-linearly in matrix entries.
inline GappedPath lookup_path(const std::string& name) {
    if (name == "zx-interp") {
        MatrixXc s1(2, 2), s3(2, 2);
        s1 << 0, 1, 1, 0;
        s3 << 1, 0, 0, -1;
        auto h = [s1, s3](double s) { return MatrixXc((1.0 - s) * s3 + s * s1); };
        auto dh = [s1, s3](double) { return MatrixXc(s1 - s3); };
        return GappedPath(2, h, dh, std::sqrt(2.0));
    }
    if (name == "rotation") {
        auto h = [](double s) {
            MatrixXc r(2, 2);
            r << std::cos(s), std::sin(s), -std::sin(s), std::cos(s);
            MatrixXc h0 = MatrixXc::Zero(2, 2);
            h0(1, 1) = 2;
            return MatrixXc(r * h0 * r.adjoint());
        };
        MatrixXc a(2, 2);
        a << 0, 1, -1, 0;
        auto dh = [a, h](double s) { return MatrixXc(a * h(s) - h(s) * a); };
        return GappedPath(2, h, dh, 2.0);
    }
    if (name.size() > 5 && name.substr(name.size() - 5) == ".json") {
        Json j = detail_reg::load_json_file(name);
        detail_reg::reject_unknown_fields(j, {"checkpoints", "gap", "label"}, "path file");
        double gap = j.at("gap").get<double>();
        std::vector<MatrixXc> pts;
        int dim = 0;
        for (const auto& jm : j.at("checkpoints")) {
            int n = static_cast<int>(jm.size());
            MatrixXc m(n, n);
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    m(r, c) = Complex(jm.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).at(0).get<double>(),
                                      jm.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).at(1).get<double>());
            dim = n;
            pts.push_back(m);
        }
        if (pts.size() < 2) throw usage_error("path file needs at least two checkpoints");
        auto h = [pts](double s) {
            double t = s * double(pts.size() - 1);
            auto seg = std::min<std::size_t>(static_cast<std::size_t>(t), pts.size() - 2);
            double frac = t - double(seg);
            return MatrixXc((1.0 - frac) * pts[seg] + frac * pts[seg + 1]);
        };
        return GappedPath(dim, h, gap); // numeric derivative, flagged
    }
    throw usage_error("unknown path '" + name + "' (builtins: zx-interp, rotation)");
}

} // namespace sptk
