#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "qlab/bell.hpp"
#include "qlab/error.hpp"
#include "qlab/evolution.hpp"
#include "qlab/geometry.hpp"
#include "qlab/measurement.hpp"

namespace qlab {

using json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "v1";

struct ScenarioOptions {
    double state_tol = kStateTol;
    double iso_tol = kIsometryTol;
    double bell_tol = kBellTol;
    double norm_cap = 2.0;
    DensityConstraint constraints = DensityConstraint::None;
    std::size_t steps = 1000;
    std::size_t window = kCesaroWindow;
    double cesaro_tol = kCesaroTol;

    friend bool operator==(const ScenarioOptions&, const ScenarioOptions&) = default;
};

inline std::string constraint_name(DensityConstraint c) {
    switch (c) {
        case DensityConstraint::None: return "none";
        case DensityConstraint::MarginalsNonneg: return "marginals_nonneg";
        case DensityConstraint::PairwiseNonneg: return "pairwise_nonneg";
        case DensityConstraint::TripleNonneg: return "triple_nonneg";
    }
    return "none";
}

inline DensityConstraint constraint_from_name(const std::string& name) {
    if (name == "none") return DensityConstraint::None;
    if (name == "marginals_nonneg") return DensityConstraint::MarginalsNonneg;
    if (name == "pairwise_nonneg") return DensityConstraint::PairwiseNonneg;
    if (name == "triple_nonneg") return DensityConstraint::TripleNonneg;
    throw ParseError(ParseError::Code::Value, "unknown constraint set '" + name + "'");
}

/// A fully validated measurement scenario: signature, state, eigenvalue
/// matrix, optional isometry (identity when absent) and the option block.
struct Scenario {
    std::string name = "scenario";
    std::vector<int> signature;
    std::vector<cplx> state;
    std::vector<std::vector<double>> eigenvalue_matrix;  // n rows, k columns
    std::optional<std::vector<std::vector<cplx>>> isometry;
    ScenarioOptions options;
    std::vector<std::string> notes;

    std::size_t dim() const { return signature.size(); }
    std::size_t arity() const {
        return eigenvalue_matrix.empty() ? 0 : eigenvalue_matrix.front().size();
    }

    GeometricSpace space() const { return GeometricSpace(signature); }

    StateVector state_vector() const { return StateVector(state, space()); }

    EigenvalueMatrix w() const {
        EigenvalueMatrix w(dim(), arity());
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = 0; j < arity(); ++j) w(i, j) = eigenvalue_matrix[i][j];
        w.validate();
        return w;
    }

    Matrix isometry_matrix() const {
        if (!isometry) return Matrix::identity(dim());
        Matrix t(dim(), dim());
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = 0; j < dim(); ++j) t(i, j) = (*isometry)[i][j];
        return t;
    }

    Isometry isometry_or_identity() const {
        return Isometry(isometry_matrix(), space(), options.iso_tol);
    }

    Instrument instrument() const { return Instrument(w(), isometry_or_identity()); }

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

namespace detail {

inline cplx complex_from_json(const json& v, const std::string& field) {
    if (v.is_number()) return cplx(v.get<double>(), 0.0);
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return cplx(v[0].get<double>(), v[1].get<double>());
    throw ParseError(ParseError::Code::Value, field + ": expected a number or [re, im]");
}

inline json complex_to_json(const cplx& c) { return json::array({c.real(), c.imag()}); }

inline const json& require_field(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end())
        throw ParseError(ParseError::Code::Value, std::string("missing field '") + key + "'");
    return *it;
}

}  // namespace detail

inline json scenario_to_json(const Scenario& s) {
    json j;
    j["schema"] = kSchemaVersion;
    j["name"] = s.name;
    j["signature"] = s.signature;
    json state = json::array();
    for (const auto& c : s.state) state.push_back(detail::complex_to_json(c));
    j["state"] = std::move(state);
    j["eigenvalue_matrix"] = s.eigenvalue_matrix;
    if (s.isometry) {
        json t = json::array();
        for (const auto& row : *s.isometry) {
            json r = json::array();
            for (const auto& c : row) r.push_back(detail::complex_to_json(c));
            t.push_back(std::move(r));
        }
        j["isometry"] = std::move(t);
    }
    j["options"] = {{"state_tol", s.options.state_tol},
                    {"iso_tol", s.options.iso_tol},
                    {"bell_tol", s.options.bell_tol},
                    {"norm_cap", s.options.norm_cap},
                    {"constraints", constraint_name(s.options.constraints)},
                    {"steps", s.options.steps},
                    {"window", s.options.window},
                    {"cesaro_tol", s.options.cesaro_tol}};
    if (!s.notes.empty()) j["notes"] = s.notes;
    return j;
}

inline std::string serialize_scenario(const Scenario& s) { return scenario_to_json(s).dump(2); }

/// Build and fully validate a Scenario from its JSON form. Throws ParseError
/// with a code identifying the failure class.
inline Scenario scenario_from_json(const json& j) {
    if (!j.is_object()) throw ParseError(ParseError::Code::Value, "scenario must be an object");
    const json& schema = detail::require_field(j, "schema");
    if (!schema.is_string() || schema.get<std::string>() != kSchemaVersion)
        throw ParseError(ParseError::Code::Value, "unsupported schema version (want \"v1\")");

    Scenario s;
    if (j.contains("name")) s.name = j["name"].get<std::string>();

    const auto require_array = [](const json& v, const char* key) -> const json& {
        if (!v.is_array())
            throw ParseError(ParseError::Code::Value, std::string("field '") + key + "' must be an array");
        return v;
    };

    for (const auto& v : require_array(detail::require_field(j, "signature"), "signature")) {
        if (!v.is_number_integer())
            throw ParseError(ParseError::Code::Value, "signature entries must be integers");
        const int gi = v.get<int>();
        if (gi != 1 && gi != -1)
            throw ParseError(ParseError::Code::Value, "signature entries must be +1 or -1");
        s.signature.push_back(gi);
    }

    std::size_t idx = 0;
    for (const auto& v : require_array(detail::require_field(j, "state"), "state"))
        s.state.push_back(detail::complex_from_json(v, "state[" + std::to_string(idx++) + "]"));

    for (const auto& row :
         require_array(detail::require_field(j, "eigenvalue_matrix"), "eigenvalue_matrix")) {
        std::vector<double> r;
        for (const auto& v : require_array(row, "eigenvalue_matrix")) {
            if (!v.is_number())
                throw ParseError(ParseError::Code::Value, "eigenvalue_matrix entries must be numbers");
            r.push_back(v.get<double>());
        }
        s.eigenvalue_matrix.push_back(std::move(r));
    }

    if (j.contains("isometry") && !j["isometry"].is_null()) {
        std::vector<std::vector<cplx>> t;
        for (const auto& row : j["isometry"]) {
            std::vector<cplx> r;
            for (const auto& v : row) r.push_back(detail::complex_from_json(v, "isometry"));
            t.push_back(std::move(r));
        }
        s.isometry = std::move(t);
    }

    if (j.contains("options")) {
        const json& o = j["options"];
        if (o.contains("state_tol")) s.options.state_tol = o["state_tol"].get<double>();
        if (o.contains("iso_tol")) s.options.iso_tol = o["iso_tol"].get<double>();
        if (o.contains("bell_tol")) s.options.bell_tol = o["bell_tol"].get<double>();
        if (o.contains("norm_cap")) s.options.norm_cap = o["norm_cap"].get<double>();
        if (o.contains("constraints"))
            s.options.constraints = constraint_from_name(o["constraints"].get<std::string>());
        if (o.contains("steps")) s.options.steps = o["steps"].get<std::size_t>();
        if (o.contains("window")) s.options.window = o["window"].get<std::size_t>();
        if (o.contains("cesaro_tol")) s.options.cesaro_tol = o["cesaro_tol"].get<double>();
    }

    if (j.contains("notes"))
        for (const auto& v : j["notes"]) s.notes.push_back(v.get<std::string>());

    // Shape checks.
    const std::size_t n = s.signature.size();
    if (n == 0) throw ParseError(ParseError::Code::Shape, "signature is empty");
    if (s.state.size() != n)
        throw ParseError(ParseError::Code::Shape, "state length differs from signature length");
    if (s.eigenvalue_matrix.size() != n)
        throw ParseError(ParseError::Code::Shape,
                         "eigenvalue_matrix row count differs from signature length");
    const std::size_t k = s.arity();
    for (const auto& row : s.eigenvalue_matrix)
        if (row.size() != k)
            throw ParseError(ParseError::Code::Shape, "eigenvalue_matrix rows differ in length");
    if (s.isometry) {
        if (s.isometry->size() != n)
            throw ParseError(ParseError::Code::Shape, "isometry is not n x n");
        for (const auto& row : *s.isometry)
            if (row.size() != n)
                throw ParseError(ParseError::Code::Shape, "isometry is not n x n");
    }

    // Geometry, isometry and state validation.
    GeometricSpace space = [&] {
        try {
            return s.space();
        } catch (const GeometryError& e) {
            throw ParseError(ParseError::Code::Shape, e.what());
        }
    }();
    if (s.isometry && !is_isometry(s.isometry_matrix(), space, s.options.iso_tol))
        throw ParseError(ParseError::Code::NotIsometry,
                         "isometry does not preserve the metric within iso_tol");
    if (!is_state(s.state_vector(), s.options.state_tol))
        throw ParseError(ParseError::Code::NotState,
                         "state does not have quadric norm 1 within state_tol");
    return s;
}

/// Parse scenario text (JSON, schema "v1"). Syntax errors carry the byte
/// position reported by the JSON parser.
inline Scenario parse_scenario(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(ParseError::Code::Syntax, e.what());
    }
    return scenario_from_json(j);
}

// ---------------------------------------------------------------------------
// Built-in fixtures. Irrational constants are computed in double precision
// here rather than parsed from text.
// ---------------------------------------------------------------------------

/// Two ±1 observables on four ground states in 4-d Minkowski space, with the
/// eigenvalue rows taken from the observation table (row i = (X_i, Y_i)).
inline Scenario fixture_feynman() {
    Scenario s;
    s.name = "feynman";
    s.signature = {1, 1, 1, -1};
    s.state = {std::sqrt(5.0 / 8.0), std::sqrt(1.0 / 8.0), std::sqrt(3.0 / 8.0),
               std::sqrt(1.0 / 8.0)};
    s.eigenvalue_matrix = {{-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
    s.notes = {"table-faithful eigenvalue matrix: rows pair the X and Y returns per ground state"};
    return s;
}

/// Variant with the misprinted third eigenvalue row (-1,-1) that appears in
/// the displayed matrix; kept for side-by-side comparison with `feynman`.
inline Scenario fixture_feynman_displayed() {
    Scenario s = fixture_feynman();
    s.name = "feynman-displayed";
    s.eigenvalue_matrix = {{-1, -1}, {-1, 1}, {-1, -1}, {1, 1}};
    s.notes = {"displayed eigenvalue matrix with the misprinted third row (-1,-1); "
               "the table-faithful fixture is `feynman`"};
    return s;
}

/// Three commuting ±1 observables in 5-d Minkowski space at the uniform
/// state; the pair expectations all come out -1/3 (the printed +1/-1 values
/// do not reproduce).
inline Scenario fixture_m5_bell() {
    Scenario s;
    s.name = "m5-bell";
    const double c = std::sqrt(3.0) / 3.0;
    s.signature = {1, 1, 1, 1, -1};
    s.state = {c, c, c, c, c};
    s.eigenvalue_matrix = {
        {-1, -1, -1}, {1, 1, -1}, {1, -1, -1}, {1, -1, 1}, {1, 1, 1}};
    s.notes = {"derived pair expectations are E(XY)=E(YZ)=E(XZ)=-1/3; the printed "
               "E(YZ)=-1 and E(XZ)=+1 do not reproduce from the printed matrices"};
    return s;
}

/// Hand-checkable Bell violation in 3-d Minkowski space: lhs = 3 > 1.
inline Scenario fixture_m3_witness() {
    Scenario s;
    s.name = "m3-witness";
    s.signature = {1, 1, -1};
    s.state = {1.0, std::sqrt(0.5), std::sqrt(0.5)};
    s.eigenvalue_matrix = {{1, 1, 1}, {1, 1, 1}, {1, 1, -1}};
    s.notes = {"violation witness: E(XY)=1, E(YZ)=E(XZ)=2, lhs=3 above the bound 1"};
    return s;
}

/// Lorentz boost in 2-d Minkowski space; the iterate's Hilbert norm grows
/// without bound, so the Cesàro averages cannot settle.
inline Scenario fixture_m2_boost() {
    Scenario s;
    s.name = "m2-boost";
    s.signature = {1, -1};
    s.state = {1.0, 0.0};
    s.eigenvalue_matrix = {{1}, {-1}};
    const double ch = std::cosh(0.5), sh = std::sinh(0.5);
    std::vector<std::vector<cplx>> boost = {{cplx(ch, 0.0), cplx(sh, 0.0)},
                                            {cplx(sh, 0.0), cplx(ch, 0.0)}};
    s.isometry = std::move(boost);
    s.notes = {"boost with rapidity 0.5; evolution diverges, converged=false"};
    return s;
}

inline std::vector<std::string> fixture_names() {
    return {"feynman", "feynman-displayed", "m5-bell", "m3-witness", "m2-boost"};
}

inline Scenario fixture(const std::string& name) {
    if (name == "feynman") return fixture_feynman();
    if (name == "feynman-displayed") return fixture_feynman_displayed();
    if (name == "m5-bell") return fixture_m5_bell();
    if (name == "m3-witness") return fixture_m3_witness();
    if (name == "m2-boost") return fixture_m2_boost();
    std::string known;
    for (const auto& n : fixture_names()) known += (known.empty() ? "" : ", ") + n;
    throw ParseError(ParseError::Code::Value, "unknown fixture '" + name + "' (known: " + known + ")");
}

}  // namespace qlab
