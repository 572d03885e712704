#pragma once

// JSON (de)serialization of algebra elements, function and kernel specs,
// and validation reports, plus the CSV Gram dump. Schemas reject unknown
// fields so configs fail loudly.

#include <fstream>
#include <set>

#include "json.hpp"

#include "akx/algebra.hpp"
#include "akx/kernel.hpp"
#include "akx/psd.hpp"
#include "akx/series.hpp"

namespace akx {

using ojson = nlohmann::ordered_json;

inline void require_keys(const nlohmann::json& j, const std::string& where,
                         const std::set<std::string>& required,
                         const std::set<std::string>& optional = {}) {
    if (!j.is_object()) throw std::invalid_argument(where + ": expected an object");
    for (const auto& k : required)
        if (!j.contains(k)) throw std::invalid_argument(where + ": missing field '" + k + "'");
    for (const auto& [k, v] : j.items())
        if (!required.count(k) && !optional.count(k))
            throw std::invalid_argument(where + ": unknown field '" + k + "'");
}

inline ojson cplx_to_json(cplx v) { return ojson::array({v.real(), v.imag()}); }

inline cplx cplx_from_json(const nlohmann::json& j, const std::string& where) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw std::invalid_argument(where + ": expected a number or [re, im]");
}

inline std::vector<cplx> coords_from_json(const nlohmann::json& j, const std::string& where) {
    if (!j.is_array()) throw std::invalid_argument(where + ": expected an array of [re, im]");
    std::vector<cplx> out;
    out.reserve(j.size());
    for (const auto& e : j) out.push_back(cplx_from_json(e, where));
    return out;
}

inline ojson coords_to_json(const std::vector<cplx>& c) {
    ojson a = ojson::array();
    for (const auto& v : c) a.push_back(cplx_to_json(v));
    return a;
}

inline ScalarField field_from_json(const nlohmann::json& j) {
    const auto s = j.get<std::string>();
    if (s == "real") return ScalarField::real;
    if (s == "complex") return ScalarField::complex_;
    throw std::invalid_argument("field must be \"real\" or \"complex\"");
}

inline AlgebraDescriptor descriptor_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw std::invalid_argument("algebra: expected an object with a 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "matrix") {
        require_keys(j, "algebra", {"kind", "n"}, {"field"});
        return AlgebraDescriptor::matrix(
            j.at("n").get<int>(),
            j.contains("field") ? field_from_json(j.at("field")) : ScalarField::complex_);
    }
    if (kind == "quaternion") {
        require_keys(j, "algebra", {"kind"}, {"field"});
        if (j.contains("field") && field_from_json(j.at("field")) != ScalarField::real)
            throw std::invalid_argument("quaternion algebra forces the real field");
        return AlgebraDescriptor::quaternion();
    }
    if (kind == "grassmann") {
        require_keys(j, "algebra", {"kind", "N"}, {"field"});
        return AlgebraDescriptor::grassmann(
            j.at("N").get<int>(),
            j.contains("field") ? field_from_json(j.at("field")) : ScalarField::complex_);
    }
    if (kind == "weighted_seq") {
        require_keys(j, "algebra", {"kind", "L", "beta"}, {"field"});
        return AlgebraDescriptor::weighted_seq(
            j.at("L").get<int>(), j.at("beta").get<double>(),
            j.contains("field") ? field_from_json(j.at("field")) : ScalarField::complex_);
    }
    throw std::invalid_argument("unknown algebra kind: " + kind);
}

inline ojson descriptor_to_json(const AlgebraDescriptor& d) {
    ojson j;
    j["kind"] = to_string(d.kind);
    switch (d.kind) {
        case AlgebraKind::matrix: j["n"] = d.n; break;
        case AlgebraKind::quaternion: break;
        case AlgebraKind::grassmann: j["N"] = d.n; break;
        case AlgebraKind::weighted_seq:
            j["L"] = d.n;
            j["beta"] = d.beta;
            break;
    }
    j["field"] = to_string(d.field);
    return j;
}

inline ojson element_to_json(const AlgebraElement& el) {
    ojson j = descriptor_to_json(el.descriptor);
    j["coords"] = coords_to_json(el.coords);
    return j;
}

inline AlgebraElement element_from_json(const nlohmann::json& j) {
    nlohmann::json desc = j;
    desc.erase("coords");
    if (!j.contains("coords")) throw std::invalid_argument("element: missing 'coords'");
    return {descriptor_from_json(desc), coords_from_json(j.at("coords"), "coords")};
}

inline DualFunctional functional_from_json(const nlohmann::json& j) {
    const auto el = element_from_json(j);
    return {el.descriptor, el.coords};
}

/// Function specs: a preset name ("exp", "sin", "cos", "geom") or
/// {"coeffs": [[re,im],...], "radius": number|"inf"}.
inline EntireFunctionRep function_from_json(const nlohmann::json& j) {
    if (j.is_string()) return function_preset(j.get<std::string>());
    require_keys(j, "function", {"coeffs"}, {"radius"});
    double radius = kInf;
    if (j.contains("radius")) {
        if (j.at("radius").is_string()) {
            if (j.at("radius").get<std::string>() != "inf")
                throw std::invalid_argument("function radius: expected a number or \"inf\"");
        } else {
            radius = j.at("radius").get<double>();
        }
    }
    return EntireFunctionRep::scalar(coords_from_json(j.at("coeffs"), "coeffs"), radius);
}

/// Kernel specs: a preset name ("fock", "geom", "poly2") or
/// {"p": 1, "c": [[[re,im],...],...], "radius": number|"inf"}.
inline KernelCoefficients kernel_from_json(const nlohmann::json& j) {
    if (j.is_string()) return kernel_preset(j.get<std::string>());
    require_keys(j, "kernel", {"c"}, {"p", "radius"});
    if (j.contains("p") && j.at("p").get<int>() != 1)
        throw std::invalid_argument("custom kernels support p == 1");
    const auto& rows = j.at("c");
    if (!rows.is_array() || rows.empty()) throw std::invalid_argument("kernel 'c': expected a 2-D array");
    const int deg = static_cast<int>(rows.size()) - 1;
    double radius = kInf;
    if (j.contains("radius") && !j.at("radius").is_string()) radius = j.at("radius").get<double>();
    auto k = KernelCoefficients::scalar_grid(deg, radius);
    for (int r = 0; r <= deg; ++r) {
        const auto& row = rows[static_cast<size_t>(r)];
        if (!row.is_array() || static_cast<int>(row.size()) != deg + 1)
            throw std::invalid_argument("kernel 'c': ragged coefficient grid");
        for (int s = 0; s <= deg; ++s)
            k.at(r, s) = cplx_from_json(row[static_cast<size_t>(s)], "kernel 'c'");
    }
    k.validate_hermitian();
    return k;
}

inline ojson psd_report_to_json(const PsdReport& rep) {
    ojson j;
    j["size"] = rep.size;
    j["min_eigenvalue"] = rep.min_eigenvalue;
    j["hermitian_defect"] = rep.hermitian_defect;
    j["tolerance"] = rep.tolerance;
    j["verdict"] = rep.pass ? "pass" : "fail";
    return j;
}

inline ojson mat_to_json(const Mat& m) {
    ojson rows = ojson::array();
    for (int i = 0; i < m.rows; ++i) {
        ojson row = ojson::array();
        for (int j = 0; j < m.cols; ++j) row.push_back(cplx_to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

/// Row-major CSV with paired re/im columns.
inline void mat_to_csv(const Mat& m, std::ostream& os) {
    os << "row";
    for (int j = 0; j < m.cols; ++j) os << ",re" << j << ",im" << j;
    os << "\n";
    os.precision(17);
    for (int i = 0; i < m.rows; ++i) {
        os << i;
        for (int j = 0; j < m.cols; ++j) os << "," << m(i, j).real() << "," << m(i, j).imag();
        os << "\n";
    }
}

}  // namespace akx
