#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "qlab/scenario.hpp"

namespace qlab {

enum class Command { Measure, Bell, Search, Evolve, Spectral, VerifyPaper };

inline std::string command_name(Command c) {
    switch (c) {
        case Command::Measure: return "measure";
        case Command::Bell: return "bell";
        case Command::Search: return "search";
        case Command::Evolve: return "evolve";
        case Command::Spectral: return "spectral";
        case Command::VerifyPaper: return "verify-paper";
    }
    return "?";
}

inline Command command_from_name(const std::string& name) {
    for (Command c : {Command::Measure, Command::Bell, Command::Search, Command::Evolve,
                      Command::Spectral, Command::VerifyPaper})
        if (command_name(c) == name) return c;
    throw ParseError(ParseError::Code::Value, "unknown command '" + name + "'");
}

struct Report {
    std::string command;
    json scenario_echo;  // empty object for verify-paper
    json payload;

    json to_json() const {
        json j;
        j["schema"] = kSchemaVersion;
        j["command"] = command;
        j["scenario"] = scenario_echo;
        for (auto it = payload.begin(); it != payload.end(); ++it) j[it.key()] = it.value();
        return j;
    }

    std::string to_text() const;
};

namespace detail {

inline json density_to_json(const SignedDensity& d) {
    return {{"support", d.support}, {"weights", d.weights}, {"total", d.total()}};
}

inline json bell_report_to_json(const BellReport& r) {
    return {{"exy", r.exy},
            {"eyz", r.eyz},
            {"exz", r.exz},
            {"lhs", r.lhs},
            {"bound", r.bound},
            {"triple_density_nonneg", r.triple_density_nonneg},
            {"pairwise_nonneg", std::vector<bool>(r.pairwise_nonneg.begin(), r.pairwise_nonneg.end())},
            {"satisfied", r.satisfied}};
}

inline json eigenvalue_matrix_to_json(const EigenvalueMatrix& w) {
    json rows = json::array();
    for (std::size_t i = 0; i < w.rows(); ++i) rows.push_back(w.row(i));
    return rows;
}

inline json measurement_payload(const Scenario& s) {
    const Instrument inst = s.instrument();
    const StateVector x = s.state_vector();
    const StateVector y = inst.t().apply(x);
    const double tol = s.options.bell_tol;

    json out;
    const SignedDensity joint = density(y, inst.w());
    out["density"] = density_to_json(joint);
    out["measured"] = measure(inst, x);

    json marg_psd = json::array();
    json marginals = json::array();
    for (std::size_t j = 0; j < inst.arity(); ++j) {
        const SignedDensity m = marginal(joint, j);
        marginals.push_back(density_to_json(m));
        marg_psd.push_back(m.min_weight() >= -tol);
    }
    out["marginals"] = std::move(marginals);
    out["psd"] = {{"joint", joint.min_weight() >= -tol}, {"marginals", std::move(marg_psd)}};

    const Reinterpretation re = reinterpret(inst.w(), x);
    const Instrument plain(inst.w(), Isometry::identity(x.space));
    const std::vector<double> measured_id = measure(plain, x);
    double residual = 0.0;
    for (std::size_t j = 0; j < inst.arity(); ++j) {
        double e = 0.0;
        for (std::size_t i = 0; i < re.p.size(); ++i) e += re.w_x(i, j) * re.p[i];
        residual = std::max(residual, std::abs(e - measured_id[j]));
    }
    out["reinterpretation"] = {{"w_x", eigenvalue_matrix_to_json(re.w_x)},
                               {"p", re.p},
                               {"identity_residual", residual}};

    if (inst.arity() == 3) {
        out["bell"] = bell_report_to_json(
            bell_check(inst.w(), x, inst.t(), tol, s.options.state_tol));
        out["bell_rescaled"] = bell_report_to_json(hilbert_rescaled_check(inst.w(), x, tol));
    }

    out["diagnostics"] = {{"state_tol", s.options.state_tol},
                          {"iso_tol", s.options.iso_tol},
                          {"bell_tol", tol}};
    return out;
}

inline json spectral_payload(const Scenario& s) {
    const Instrument inst = s.instrument();
    json blocks = json::array();
    for (std::size_t j = 0; j < inst.arity(); ++j) {
        const Matrix a = observable_matrix(inst, j);
        const SpectralDecomposition dec = spectral_decompose(a);
        const double recon = max_abs_diff(a, dec.reconstruct());
        const double unit = max_abs_diff(dec.eigenvectors.adjoint() * dec.eigenvectors,
                                         Matrix::identity(a.rows()));
        blocks.push_back({{"column", j},
                          {"eigenvalues", dec.eigenvalues},
                          {"reconstruction_residual", recon},
                          {"unitarity_residual", unit}});
    }
    return {{"spectral", std::move(blocks)}};
}

inline json evolve_payload(const Scenario& s) {
    if (s.arity() == 0)
        throw ParseError(ParseError::Code::Shape, "evolve needs at least one observable column");
    const GeometricSpace space = s.space();
    const std::size_t n = space.dim();
    // Interaction pattern: first observable in the ground basis, metric folded.
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        a(i, i) = static_cast<double>(space.sign(i)) * s.eigenvalue_matrix[i][0];

    const EvolutionTrace trace = evolve(a, s.isometry_or_identity(), s.state_vector(),
                                        s.options.steps, s.options.window, s.options.cesaro_tol);

    const std::size_t tail = std::min<std::size_t>(trace.values.size(), 8);
    std::vector<double> values_tail(trace.values.end() - static_cast<std::ptrdiff_t>(tail),
                                    trace.values.end());
    std::vector<double> cesaro_tail(trace.cesaro.end() - static_cast<std::ptrdiff_t>(tail),
                                    trace.cesaro.end());
    return {{"evolve",
             {{"steps", s.options.steps},
              {"window", s.options.window},
              {"cesaro_tol", s.options.cesaro_tol},
              {"length", trace.values.size()},
              {"converged", trace.converged},
              {"diverged", trace.diverged},
              {"limit_estimate", trace.limit_estimate},
              {"values_tail", std::move(values_tail)},
              {"cesaro_tail", std::move(cesaro_tail)}}}};
}

inline json search_payload(const Scenario& s) {
    const std::vector<Witness> witnesses =
        violation_search(s.space(), s.options.norm_cap, s.options.constraints, s.options.bell_tol);
    json list = json::array();
    for (const auto& w : witnesses) {
        json cols = json::array();
        for (std::size_t j = 0; j < 3; ++j) cols.push_back(w.columns.column(j));
        list.push_back({{"pattern", w.pattern},
                        {"columns", std::move(cols)},
                        {"weights", w.weights},
                        {"norm_cap", w.norm_cap},
                        {"report", bell_report_to_json(w.report)}});
    }
    return {{"witnesses", std::move(list)},
            {"count", witnesses.size()},
            {"norm_cap", s.options.norm_cap},
            {"constraints", constraint_name(s.options.constraints)}};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// verify-paper: re-run the bundled reference scenarios and compare against
// the stored expected values. PAPER-MATCH marks values reproduced as printed
// in the source example, DERIVED-MATCH marks values where the printed number
// is a documented misprint and the independently derived value is reproduced,
// PROPERTY-PASS marks structural guarantees checked from scratch.
// ---------------------------------------------------------------------------

namespace detail {

struct VerifyRow {
    std::string id;
    std::string status;  // PAPER-MATCH | DERIVED-MATCH | PROPERTY-PASS
    bool pass = false;
    std::string detail;
};

inline double marginal_weight(const SignedDensity& m, double outcome) {
    for (std::size_t v = 0; v < m.size(); ++v)
        if (m.support[v][0] == outcome) return m.weights[v];
    return 0.0;
}

inline double joint_weight(const SignedDensity& d, const std::vector<double>& outcome) {
    for (std::size_t v = 0; v < d.size(); ++v)
        if (outcome_equal(d.support[v], outcome, 0.0)) return d.weights[v];
    return 0.0;
}

inline std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::vector<VerifyRow> verify_paper_rows() {
    constexpr double tol = 1e-12;
    std::vector<VerifyRow> rows;
    const auto near = [&](double a, double b) { return std::abs(a - b) <= tol; };

    {  // 1. Feynman expectations and marginal probabilities
        const Scenario s = fixture_feynman();
        const Instrument inst = s.instrument();
        const StateVector x = s.state_vector();
        const std::vector<double> h = measure(inst, x);
        const SignedDensity joint = density(x, inst.w());
        const SignedDensity mx = marginal(joint, 0), my = marginal(joint, 1);
        const bool pass = near(h[0], -0.5) && near(h[1], -1.0) &&
                          near(marginal_weight(mx, -1.0), 0.75) &&
                          near(marginal_weight(mx, 1.0), 0.25) &&
                          near(marginal_weight(my, -1.0), 1.0) &&
                          near(marginal_weight(my, 1.0), 0.0);
        rows.push_back({"feynman expectations + marginals", "PAPER-MATCH", pass,
                        "E(X)=" + fmt(h[0]) + " E(Y)=" + fmt(h[1]) + " Pr{X=+1}=" +
                            fmt(marginal_weight(mx, 1.0)) + " Pr{Y=+1}=" +
                            fmt(marginal_weight(my, 1.0))});
    }

    {  // 2. Feynman signed joint density
        const Scenario s = fixture_feynman();
        const Instrument inst = s.instrument();
        const StateVector x = s.state_vector();
        const SignedDensity joint = density(x, inst.w());
        const double w_pp = joint_weight(joint, {1.0, 1.0});
        const bool joint_psd = joint.min_weight() >= -kBellTol;
        const bool mx_psd = marginal(joint, 0).min_weight() >= -kBellTol;
        const bool my_psd = marginal(joint, 1).min_weight() >= -kBellTol;
        const bool pass = near(w_pp, -0.125) && !joint_psd && mx_psd && my_psd;
        rows.push_back({"feynman joint weight(+1,+1) = -1/8, joint not psd, marginals psd",
                        "DERIVED-MATCH", pass,
                        "weight=" + fmt(w_pp) + " (the printed psd claim holds only marginally)"});
    }

    {  // 3. Five-dimensional Bell example
        const Scenario s = fixture_m5_bell();
        const BellReport r = bell_check(s.w(), s.state_vector(), s.isometry_or_identity());
        rows.push_back({"m5-bell E(XY) = -1/3", "PAPER-MATCH", near(r.exy, -1.0 / 3.0),
                        "E(XY)=" + fmt(r.exy)});
        rows.push_back({"m5-bell E(YZ) = E(XZ) = -1/3 (printed -1/+1 do not reproduce)",
                        "DERIVED-MATCH", near(r.eyz, -1.0 / 3.0) && near(r.exz, -1.0 / 3.0),
                        "E(YZ)=" + fmt(r.eyz) + " E(XZ)=" + fmt(r.exz)});
        rows.push_back({"m5-bell bound = 1, inequality satisfied by derived values",
                        "PAPER-MATCH", r.bound == 1.0 && r.satisfied,
                        "lhs=" + fmt(r.lhs) + " bound=" + fmt(r.bound)});
    }

    {  // 4. Hilbert rescaling of the m5 example
        const Scenario s = fixture_m5_bell();
        const StateVector x = s.state_vector();
        const double h2 = x.hilbert_norm_sq();
        const Reinterpretation re = reinterpret(s.w(), x);
        const std::vector<double> col = re.w_x.column(0);
        const std::vector<double> expect_col = {-5.0 / 3.0, 5.0 / 3.0, 5.0 / 3.0, 5.0 / 3.0,
                                                -5.0 / 3.0};
        bool col_ok = near(h2, 5.0 / 3.0);
        for (std::size_t i = 0; i < col.size(); ++i) col_ok = col_ok && near(col[i], expect_col[i]);
        rows.push_back({"m5-bell ||s||_2^2 = 5/3 and rescaled first column ±5/3", "PAPER-MATCH",
                        col_ok, "h2=" + fmt(h2)});

        const BellReport r = hilbert_rescaled_check(s.w(), x);
        const bool exps = near(r.exy, 5.0 / 9.0) && near(r.eyz, 5.0 / 9.0) && near(r.exz, 5.0 / 9.0);
        rows.push_back({"m5-bell rescaled expectations = 5/9 (printed 25/9 does not reproduce)",
                        "DERIVED-MATCH", exps,
                        "E(X''Y'')=" + fmt(r.exy) + " E(Y''Z'')=" + fmt(r.eyz) + " E(X''Z'')=" +
                            fmt(r.exz)});
        rows.push_back({"m5-bell rescaled inequality satisfied against bound 25/9", "PAPER-MATCH",
                        near(r.bound, 25.0 / 9.0) && r.satisfied,
                        "lhs=" + fmt(r.lhs) + " bound=" + fmt(r.bound)});
    }

    {  // 2b. Hilbert feasibility of the Feynman marginals alone
        const Scenario s = fixture_feynman();
        const EigenvalueMatrix table = s.w();
        const FeasibilityResult res = hilbert_feasibility(
            table, {{0, {1.0}, 0.25}, {1, {1.0}, 0.0}});
        bool pass = res.feasible;
        std::string det = "infeasible";
        if (pass) {
            double total = 0.0, px = 0.0, py = 0.0;
            for (std::size_t i = 0; i < 4; ++i) {
                pass = pass && res.p[i] >= -kLpTol;
                total += res.p[i];
                if (table(i, 0) == 1.0) px += res.p[i];
                if (table(i, 1) == 1.0) py += res.p[i];
            }
            pass = pass && std::abs(total - 1.0) <= 1e-9 && std::abs(px - 0.25) <= 1e-9 &&
                   std::abs(py) <= 1e-9;
            det = "certificate p = (" + fmt(res.p[0]) + ", " + fmt(res.p[1]) + ", " +
                  fmt(res.p[2]) + ", " + fmt(res.p[3]) + ")";
        }
        rows.push_back({"feynman marginals alone are feasible for a Hilbert probability vector",
                        "PROPERTY-PASS", pass, det});
    }

    {  // 5. Minkowski violation witness from the search
        const Scenario s = fixture_m3_witness();
        const std::vector<Witness> found =
            violation_search(s.space(), 2.0, DensityConstraint::None);
        bool pass = !found.empty();
        std::string det = "no witness found";
        if (pass) {
            const Witness& top = found.front();
            const BellReport redo =
                bell_check(top.columns, top.state(), Isometry::identity(top.signature));
            pass = std::abs(top.report.lhs - 3.0) <= kBellTol &&
                   std::abs(redo.lhs - top.report.lhs) <= kBellTol && !redo.satisfied;
            det = "top lhs=" + fmt(top.report.lhs) + " bound=" + fmt(top.report.bound) +
                  " recomputed lhs=" + fmt(redo.lhs);
        }
        rows.push_back({"m3 violation witness lhs = 3 > 1, re-verified by density summation",
                        "PROPERTY-PASS", pass, det});
    }

    return rows;
}

}  // namespace detail

inline Report run(const Scenario& s, Command cmd) {
    Report rep;
    rep.command = command_name(cmd);
    rep.scenario_echo = scenario_to_json(s);
    switch (cmd) {
        case Command::Measure:
            rep.payload = detail::measurement_payload(s);
            break;
        case Command::Bell:
            if (s.arity() != 3)
                throw ParseError(ParseError::Code::Shape,
                                 "bell requires exactly 3 observable columns");
            rep.payload = detail::measurement_payload(s);
            break;
        case Command::Search:
            rep.payload = detail::search_payload(s);
            break;
        case Command::Evolve:
            rep.payload = detail::evolve_payload(s);
            break;
        case Command::Spectral:
            rep.payload = detail::spectral_payload(s);
            break;
        case Command::VerifyPaper:
            throw ParseError(ParseError::Code::Value, "verify-paper takes no scenario");
    }
    if (!s.notes.empty()) rep.payload["notes"] = s.notes;
    return rep;
}

inline Report run_verify_paper() {
    Report rep;
    rep.command = command_name(Command::VerifyPaper);
    rep.scenario_echo = json::object();
    json checks = json::array();
    bool all = true;
    for (const auto& row : detail::verify_paper_rows()) {
        all = all && row.pass;
        checks.push_back(
            {{"id", row.id}, {"status", row.status}, {"pass", row.pass}, {"detail", row.detail}});
    }
    rep.payload = {{"checks", std::move(checks)}, {"all_pass", all}};
    return rep;
}

inline std::string Report::to_text() const {
    std::string out = "qlab " + command + "\n";
    if (payload.contains("notes"))
        for (const auto& n : payload["notes"]) out += "note: " + n.get<std::string>() + "\n";

    if (payload.contains("checks")) {
        for (const auto& c : payload["checks"]) {
            out += std::string(c["pass"].get<bool>() ? "[PASS] " : "[FAIL] ") +
                   c["status"].get<std::string>() + "  " + c["id"].get<std::string>() + "  (" +
                   c["detail"].get<std::string>() + ")\n";
        }
        out += payload["all_pass"].get<bool>() ? "all checks passed\n" : "CHECKS FAILED\n";
        return out;
    }

    if (payload.contains("measured")) {
        out += "measured:";
        for (const auto& v : payload["measured"]) out += " " + detail::fmt(v.get<double>());
        out += "\n";
        const auto& d = payload["density"];
        out += "density (outcome -> weight):\n";
        for (std::size_t v = 0; v < d["support"].size(); ++v) {
            out += "  (";
            const auto& tuple = d["support"][v];
            for (std::size_t c = 0; c < tuple.size(); ++c)
                out += (c ? ", " : "") + detail::fmt(tuple[c].get<double>());
            out += ") -> " + detail::fmt(d["weights"][v].get<double>()) + "\n";
        }
        out += "weight total: " + detail::fmt(d["total"].get<double>()) + "\n";
        out += std::string("psd: joint=") + (payload["psd"]["joint"].get<bool>() ? "yes" : "no") +
               " marginals=";
        for (const auto& b : payload["psd"]["marginals"]) out += b.get<bool>() ? "y" : "n";
        out += "\n";
        if (payload.contains("bell")) {
            const auto& b = payload["bell"];
            out += "bell: E(XY)=" + detail::fmt(b["exy"].get<double>()) +
                   " E(YZ)=" + detail::fmt(b["eyz"].get<double>()) +
                   " E(XZ)=" + detail::fmt(b["exz"].get<double>()) +
                   " lhs=" + detail::fmt(b["lhs"].get<double>()) +
                   " bound=" + detail::fmt(b["bound"].get<double>()) +
                   (b["satisfied"].get<bool>() ? " satisfied" : " VIOLATED") + "\n";
            const auto& r = payload["bell_rescaled"];
            out += "bell (hilbert rescaled): lhs=" + detail::fmt(r["lhs"].get<double>()) +
                   " bound=" + detail::fmt(r["bound"].get<double>()) +
                   (r["satisfied"].get<bool>() ? " satisfied" : " VIOLATED") + "\n";
        }
        return out;
    }

    if (payload.contains("witnesses")) {
        out += "witnesses: " + std::to_string(payload["count"].get<std::size_t>()) +
               " (norm_cap=" + detail::fmt(payload["norm_cap"].get<double>()) + ", constraints=" +
               payload["constraints"].get<std::string>() + ")\n";
        for (const auto& w : payload["witnesses"]) {
            out += "  pattern " + std::to_string(w["pattern"].get<std::uint64_t>()) + ": lhs=" +
                   detail::fmt(w["report"]["lhs"].get<double>()) + " > bound=" +
                   detail::fmt(w["report"]["bound"].get<double>()) + ", weights=";
            for (const auto& p : w["weights"]) out += " " + detail::fmt(p.get<double>());
            out += "\n";
        }
        return out;
    }

    if (payload.contains("evolve")) {
        const auto& e = payload["evolve"];
        out += "evolve: length=" + std::to_string(e["length"].get<std::size_t>()) +
               std::string(e["diverged"].get<bool>() ? " diverged" : "") +
               (e["converged"].get<bool>() ? " converged" : " not-converged") +
               " limit=" + detail::fmt(e["limit_estimate"].get<double>()) + "\n";
        return out;
    }

    if (payload.contains("spectral")) {
        for (const auto& b : payload["spectral"]) {
            out += "column " + std::to_string(b["column"].get<std::size_t>()) + ": eigenvalues";
            for (const auto& v : b["eigenvalues"]) out += " " + detail::fmt(v.get<double>());
            out += "  (recon " + detail::fmt(b["reconstruction_residual"].get<double>()) +
                   ", unitary " + detail::fmt(b["unitarity_residual"].get<double>()) + ")\n";
        }
        return out;
    }

    return out + payload.dump(2) + "\n";
}

}  // namespace qlab
