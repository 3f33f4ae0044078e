#pragma once

// Command-line front end. Every command builds a Report (an ordered JSON
// tree) and renders it either as "key: value" lines or as JSON.

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "suprep/farkas.hpp"
#include "suprep/pricing.hpp"

namespace suprep::cli {

inline constexpr const char* version = "suprep 1.0.0";

enum ExitCode : int {
    exit_ok = 0,
    exit_verify_failed = 1,
    exit_input_error = 2,
    exit_empty_family = 3,
    exit_price_undefined = 4,
    exit_internal = 5,
};

using Json = nlohmann::ordered_json;

struct Options
{
    bool approx = false;
};

struct Report
{
    Json doc;
    int exit_code = exit_ok;
};

inline const char* const desk_scale_note =
    "strict gap sup_{Q in M_1} E_Q[Y] < pi(Y; K^adm) for unbounded Y: not reproducible at desk scale; on a finite "
    "probability space every claim is bounded and every finitely generated wedge is closed, so the sup equals the price";

// ---------------------------------------------------------------------------
// Inputs
// ---------------------------------------------------------------------------

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view data)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hash_string(std::string_view data)
{
    std::ostringstream out;
    out << "fnv1a64:" << std::hex << std::setw(16) << std::setfill('0') << fnv1a(data);
    return out.str();
}

inline std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot read file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// "1,0,-1/2" or "1 0 -1/2".
inline Vector parse_claim(std::string text)
{
    for (auto& c : text)
        if (c == ',')
            c = ' ';
    const Vector v = parse_vector(text);
    if (v.empty())
        throw ParseError("empty claim");
    return v;
}

/// "none", "log", "exp:<gamma>", "power:<p>", optionally wrapped in hat(...).
inline std::optional<ConjugateFunction> parse_utility(const std::string& text)
{
    if (text == "none")
        return std::nullopt;
    if (text.rfind("hat(", 0) == 0 && text.back() == ')') {
        auto inner = parse_utility(text.substr(4, text.size() - 5));
        if (!inner)
            throw ParseError("hat(none) is not a utility");
        return inner->hat();
    }
    if (text == "log")
        return ConjugateFunction::logarithmic();
    const auto colon = text.find(':');
    const std::string head = text.substr(0, colon);
    if (colon != std::string::npos && head == "exp")
        return ConjugateFunction::exponential(parse_rational(text.substr(colon + 1)));
    if (colon != std::string::npos && head == "power")
        return ConjugateFunction::power(parse_rational(text.substr(colon + 1)));
    throw ParseError("unknown utility '" + text + "' (expected none, log, exp:<gamma> or power:<p>)");
}

inline std::string utility_name(const std::optional<ConjugateFunction>& f)
{
    return f ? f->name() : "none";
}

inline FamilyKind parse_family(const std::string& text)
{
    if (text == "m1")
        return FamilyKind::m1;
    if (text == "mphi")
        return FamilyKind::mphi;
    if (text == "mhatphi")
        return FamilyKind::mhatphi;
    throw ParseError("unknown family '" + text + "' (expected m1, mphi or mhatphi)");
}

/// One row per line, entries separated by blanks; '#' starts a comment.
inline Matrix parse_matrix(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::vector<Vector> rows;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos)
            line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        Vector v;
        try {
            v = parse_vector(line);
        } catch (const ParseError& e) {
            throw ParseError(e.what(), lineno);
        }
        if (!rows.empty() && v.size() != rows[0].size())
            throw ParseError("expected " + std::to_string(rows[0].size()) + " entries", lineno);
        rows.push_back(std::move(v));
    }
    if (rows.empty())
        throw ParseError("empty matrix");
    return Matrix::from_rows(rows, rows[0].size());
}

// ---------------------------------------------------------------------------
// Report helpers
// ---------------------------------------------------------------------------

inline std::string approx_string(const Rational& r)
{
    return to_decimal(r).str(15, std::ios_base::fmtflags(0));
}

inline void put(Json& j, const std::string& key, const Rational& r, const Options& opt)
{
    j[key] = to_string(r);
    if (opt.approx && boost::multiprecision::denominator(r) != 1)
        j[key + "_approx"] = approx_string(r);
}

inline void put(Json& j, const std::string& key, const Vector& v, const Options& opt)
{
    j[key] = to_string(v);
    if (opt.approx) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i)
            s += (i ? " " : "") + approx_string(v[i]);
        j[key + "_approx"] = s;
    }
}

inline Json vector_list(const std::vector<Vector>& vs)
{
    Json a = Json::array();
    for (const auto& v : vs)
        a.push_back(to_string(v));
    return a;
}

inline Json cone_json(const Cone& c)
{
    const Cone d = dd_convert(c);
    Json j;
    j["dim"] = d.dim();
    j["V"] = vector_list(d.generators());
    j["H"] = vector_list(d.halfspaces());
    return j;
}

inline Report start(const std::string& command)
{
    Report r;
    r.doc["command"] = command;
    r.doc["input"] = Json::object();
    r.doc["result"] = Json::object();
    r.doc["provenance"] = Json::object();
    r.doc["provenance"]["version"] = version;
    return r;
}

inline std::string load_input(Report& r, const std::string& key, const std::string& path)
{
    std::string text = read_file(path);
    r.doc["input"][key] = path;
    r.doc["provenance"]["hash." + key] = hash_string(text);
    return text;
}

inline void flatten(const Json& j, const std::string& prefix, std::ostream& out)
{
    if (j.is_object()) {
        for (const auto& [k, v] : j.items())
            flatten(v, prefix.empty() ? k : prefix + "." + k, out);
    } else if (j.is_array()) {
        if (j.empty())
            out << prefix << ": (none)\n";
        for (std::size_t i = 0; i < j.size(); ++i)
            flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
    } else if (j.is_string()) {
        out << prefix << ": " << j.get<std::string>() << '\n';
    } else {
        out << prefix << ": " << j.dump() << '\n';
    }
}

inline std::string render(const Report& r, bool json)
{
    if (json)
        return r.doc.dump(2) + "\n";
    std::ostringstream out;
    flatten(r.doc, "", out);
    return out.str();
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline Report cmd_price(const std::string& market_path, const std::string& claim, const std::string& family,
                        const std::string& utility, const Options& opt = {})
{
    Report r = start("price");
    const MarketModel m = load_market(load_input(r, "market", market_path));
    PricingProblem p;
    p.space = m.space;
    p.wedge = gains_wedge(m, Admissible{});
    p.family = parse_family(family);
    p.conjugate = parse_utility(utility);
    p.claim = parse_claim(claim);
    r.doc["input"]["claim"] = to_string(p.claim);
    r.doc["input"]["family"] = family;
    r.doc["input"]["utility"] = utility_name(p.conjugate);

    const PriceResult pr = price_with_duality(p);
    Json& res = r.doc["result"];
    put(res, "price", pr.price, opt);
    res["family"] = pr.family_label;
    Json primal;
    put(primal, "x", pr.primal_x, opt);
    Json support = Json::array();
    for (auto i : m.space.support)
        support.push_back(m.space.atoms[i]);
    primal["support"] = support;
    put(primal, "dominating", pr.dominating, opt);
    res["primal"] = primal;
    Json dual;
    put(dual, "value", pr.dual.value, opt);
    put(dual, "witness", pr.dual.witness, opt);
    put(dual, "attaining", pr.dual.attaining, opt);
    dual["attained"] = pr.dual.attained;
    dual["attained_in"] = to_string(pr.dual.attained_in);
    res["dual"] = dual;
    Json cert;
    put(cert, "lp_multipliers", pr.lp_multipliers, opt);
    cert["closure_vertices"] = vector_list(pr.closure_vertices);
    cert["primal_equals_dual"] = pr.price == pr.dual.value;
    res["certificate"] = cert;
    return r;
}

inline Report cmd_polar(const std::string& cone_path, const std::string& pairing, const Options& = {})
{
    Report r = start("polar");
    const Cone c = parse_cone(load_input(r, "cone", cone_path));
    Pairing pr = Pairing::plain(c.dim());
    if (pairing != "plain") {
        pr = Pairing::weighted(parse_claim(pairing));
        if (pr.dim() != c.dim())
            throw ParseError("pairing weights: expected " + std::to_string(c.dim()) + " entries");
    }
    r.doc["input"]["pairing"] = pairing == "plain" ? pairing : to_string(pr.weights);
    const Cone p = polar(c, pr);
    r.doc["result"]["input_cone"] = cone_json(c);
    r.doc["result"]["polar"] = cone_json(p);
    r.doc["result"]["bipolar_equals_input"] = equal(polar(p, pr), c);
    return r;
}

inline Report cmd_measures(const std::string& market_path, const std::string& utility, const Options& opt = {})
{
    Report r = start("measures");
    const MarketModel m = load_market(load_input(r, "market", market_path));
    const auto phi = parse_utility(utility);
    r.doc["input"]["utility"] = utility_name(phi);
    const MeasureSet m1 = separating_polytope(m, gains_wedge(m, Admissible{}));
    Json& res = r.doc["result"];
    Json atoms = Json::array();
    for (const auto& a : m.space.atoms)
        atoms.push_back(a);
    res["atoms"] = atoms;
    res["m1"]["empty"] = m1.empty();
    res["m1"]["vertices"] = vector_list(m1.vertices);
    if (opt.approx) {
        Json a = Json::array();
        for (const auto& v : m1.vertices) {
            Json tmp;
            put(tmp, "v", v, opt);
            a.push_back(tmp["v_approx"]);
        }
        res["m1"]["vertices_approx"] = a;
    }
    if (phi && !m1.empty()) {
        const auto mphi = family_mphi(m1, *phi);
        const auto mhat = family_mhatphi(m1, *phi);
        res["mphi"]["empty"] = mphi.empty();
        res["mphi"]["members"] = vector_list(mphi.members);
        res["mphi"]["limit_points"] = vector_list(mphi.limit_points);
        res["mhatphi"]["vertices"] = vector_list(mhat.closure_vertices);
        res["mhatphi"]["face_of_m1"] = mhat.face_of_m1;
        if (phi->phi_at_zero_finite())
            res["mphi"]["note"] = "Phi(0) < ∞, so M_Φ = M̂_Φ";
        if (phi->asymptotically_linear())
            res["mhatphi"]["note"] = "Phi is asymptotically linear, so M̂_Φ = M₁";
    }
    return r;
}

inline Report cmd_farkas(const std::string& matrix_path, const std::string& b_text, const Options& = {})
{
    Report r = start("farkas");
    const Matrix a = parse_matrix(load_input(r, "matrix", matrix_path));
    const Vector b = parse_claim(b_text);
    if (b.size() != a.rows())
        throw ParseError("b: expected " + std::to_string(a.rows()) + " entries");
    r.doc["input"]["b"] = to_string(b);
    const FarkasAlternative alt = farkas_alternative(a, b);
    Json& res = r.doc["result"];
    res["branch"] = alt.branch == FarkasBranch::primal ? "primal" : "dual";
    if (alt.x)
        res["x"] = to_string(*alt.x);
    if (alt.y) {
        res["y"] = to_string(*alt.y);
        res["y_dot_b"] = to_string(dot(*alt.y, b));
    }
    res["verified"] = verify(a, b, alt);
    return r;
}

inline Report cmd_risk(const std::string& market_path, const std::string& cone_path, const std::string& claim,
                       const Options& opt = {})
{
    Report r = start("risk");
    const MarketModel m = load_market(load_input(r, "market", market_path));
    const Cone c = parse_cone(load_input(r, "cone", cone_path));
    const Vector x = parse_claim(claim);
    r.doc["input"]["claim"] = to_string(x);
    if (c.dim() != m.atom_count())
        throw ParseError("cone dimension " + std::to_string(c.dim()) + " differs from atom count " +
                         std::to_string(m.atom_count()));
    if (x.size() != m.atom_count())
        throw ParseError("claim: expected " + std::to_string(m.atom_count()) + " entries");
    const Rational rho = coherent_risk(x, c);
    put(r.doc["result"], "rho", rho, opt);
    r.doc["result"]["acceptable"] = rho <= 0;
    return r;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

inline const std::vector<std::string>& verify_checks()
{
    static const std::vector<std::string> names{
        "weakclose",        "face_span",     "mhat_is_face",         "symmetric_duality",
        "dual_umbrella",    "redundant",     "wedge_chain",          "admissible_truncation",
        "intersection_law", "truncation_bound", "closed_image",      "strong_duality",
    };
    return names;
}

inline Report cmd_verify(const std::string& market_path, const std::string& utility, const std::string& suite,
                         const Options& = {})
{
    Report r = start("verify");
    const MarketModel m = load_market(load_input(r, "market", market_path));
    const auto phi_opt = parse_utility(utility);
    if (!phi_opt)
        throw ParseError("verify needs a utility");
    const ConjugateFunction phi = *phi_opt;
    r.doc["input"]["utility"] = utility_name(phi_opt);
    r.doc["input"]["suite"] = suite;

    std::vector<std::string> selected;
    if (suite == "all")
        selected = verify_checks();
    else {
        std::string s = suite;
        for (auto& ch : s)
            if (ch == ',')
                ch = ' ';
        std::istringstream in(s);
        for (std::string name; in >> name;) {
            if (std::find(verify_checks().begin(), verify_checks().end(), name) == verify_checks().end())
                throw ParseError("unknown check '" + name + "'");
            selected.push_back(name);
        }
    }

    const Cone k = gains_wedge(m, Admissible{});
    const MeasureSet m1 = separating_polytope(m, k);
    const MeasureFamily mphi = family_mphi(m1, phi);
    if (mphi.empty())
        throw EmptyFamily(empty_family_message);
    const MeasureFamily mhat = family_mhatphi(m1, phi);
    const SupportMap sm(m.space);

    Json& res = r.doc["result"];
    Json checks = Json::object(), details = Json::object(), notes = Json::array();
    bool all_pass = true;
    auto record = [&](const std::string& name, bool ok, const std::string& detail = {}) {
        checks[name] = ok ? "PASS" : "FAIL";
        if (!detail.empty())
            details[name] = detail;
        all_pass = all_pass && ok;
    };

    for (const auto& name : selected) {
        if (name == "weakclose") {
            const auto rep = verify_weakclose(m1, phi);
            record(name, rep.holds(),
                   "cone(R(M̂_Φ)) has " + std::to_string(dd_convert(rep.hat_cone).generators().size()) +
                       " canonical generators");
            for (const auto& n : rep.notes)
                notes.push_back(n);
        } else if (name == "face_span") {
            const auto rep = verify_face_span_identity(mphi);
            std::string d = std::to_string(rep.intersection.size()) + " vertices in [M_Φ] ∩ M₁";
            for (const auto& x : rep.discrepancies)
                d += "; " + x;
            record(name, rep.holds, d);
        } else if (name == "mhat_is_face") {
            record(name, is_face(FaceCandidate{mhat.contains, mhat.closure_vertices}, m1, 64));
        } else if (name == "symmetric_duality") {
            const auto rep = verify_symmetric_duality(k, mphi);
            record(name, rep.i && rep.ii && rep.iii,
                   std::string("(i) ") + (rep.i ? "true" : "false") + ", (ii) " + (rep.ii ? "true" : "false") +
                       ", (iii) " + (rep.iii ? "true" : "false"));
        } else if (name == "dual_umbrella") {
            record(name, verify_dual_umbrella(mphi).holds);
        } else if (name == "redundant") {
            const Cone c = build_C_Phi(k, m1, phi);
            bool ok = equal(c, build_C_Phi(k, m1, phi.hat()));
            std::string d = "C_Φ̂ = C_Φ";
            if (phi.asymptotically_linear()) {
                ok = ok && equal(c, build_c_E_K(k, family_m1(m1)));
                d += "; C_Φ = C_id";
            }
            record(name, ok, d);
        } else if (name == "wedge_chain") {
            record(name, check_wedge_chain(k, m1, phi), "K ⊆ K_Φ ⊆ C_Φ");
        } else if (name == "admissible_truncation") {
            const auto gains = one_step_gains(m);
            Vector x = zeros(m.atom_count());
            for (std::size_t g = 0; g < gains.size(); ++g)
                x = x + Rational(static_cast<long>(g % 3) + 1) * gains[g];
            const auto rep = admissible_truncation_check(x, m, phi);
            record(name, rep.holds(),
                   "X = " + to_string(x) + ", " + std::to_string(rep.sequence.size()) + " truncations, c = " +
                       to_string(rep.c));
        } else if (name == "intersection_law") {
            const Pairing pairing = family_pairing(mphi);
            record(name, check_cone_intersection_law(densities(m1.vertices, m.space),
                                                     linear_span_cone(*pairing.subspace_basis, sm.size())),
                   "cone(R(M₁) ∩ F_Φ) = cone(R(M₁)) ∩ F_Φ");
        } else if (name == "truncation_bound") {
            const ConjugateFunction h = phi.hat();
            auto f = [&](const Rational& y) { return conjugate_value(h, y); };
            const Vector y = density(*mphi.anchor, m.space);
            Vector y1 = y;
            for (const auto& q : mphi.closure_vertices) {
                const Vector d = density(q, m.space);
                for (std::size_t i = 0; i < y1.size(); ++i)
                    y1[i] = std::max(y1[i], d[i]);
            }
            const bool ok = truncation_bound_check(f, zeros(y.size()), y, y1, std::nullopt, sm.weights) &&
                            truncation_bound_check(f, zeros(y.size()), y, y1, Rational(1), sm.weights);
            record(name, ok, "Y0 = 0, Y = density of the barycenter of M₁");
        } else if (name == "closed_image") {
            auto gains = sm.restrict(one_step_gains(m));
            Matrix a = Matrix::identity(sm.size());
            if (!gains.empty()) {
                a = Matrix(sm.size(), gains.size());
                for (std::size_t j = 0; j < gains.size(); ++j)
                    for (std::size_t i = 0; i < sm.size(); ++i)
                        a(i, j) = gains[j][i];
            }
            const auto rep = verify_closed_image_equivalence(a, 50, 1);
            record(name, rep.passed(),
                   std::to_string(rep.primal_count) + " primal, " + std::to_string(rep.dual_count) + " dual branches");
        } else if (name == "strong_duality") {
            std::size_t priced = 0;
            for (std::size_t i = 0; i < m.atom_count(); ++i)
                for (const Rational& s : {Rational(1), Rational(-1)}) {
                    PricingProblem p{m.space, k, FamilyKind::mphi, phi, {}, unit(m.atom_count(), i, s)};
                    price_with_duality(p); // throws on a primal/dual mismatch
                    ++priced;
                }
            record(name, true, std::to_string(priced) + " digital claims priced with primal = dual");
        }
    }
    notes.push_back(desk_scale_note);
    res["verdict"] = all_pass ? "PASS" : "FAIL";
    res["check"] = checks;
    res["detail"] = details;
    res["note"] = notes;
    if (!all_pass)
        r.exit_code = exit_verify_failed;
    return r;
}

// ---------------------------------------------------------------------------
// Entry point
// ---------------------------------------------------------------------------

/// Parses argv, runs one command and writes the report to `out`; diagnostics
/// go to `err`. Returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Exact super-replication prices and polar wedges on finite probability spaces", "suprep"};
    app.set_version_flag("--version", version);
    app.require_subcommand(1);
    app.fallthrough();
    bool json = false;
    Options opt;
    app.add_flag("--json", json, "emit the report as JSON");
    app.add_flag("--approx", opt.approx, "add decimal approximations next to rationals");

    std::string market, cone, matrix, claim, family = "m1", utility = "none", pairing = "plain", b, suite = "all";
    std::string verify_utility = "log";

    auto* price = app.add_subcommand("price", "super-replication price with primal and dual witnesses");
    price->add_option("market", market, "market file")->required();
    price->add_option("--claim", claim, "claim values per atom, comma separated")->required();
    price->add_option("--family", family, "m1, mphi or mhatphi")->capture_default_str();
    price->add_option("--utility", utility, "none, log, exp:<gamma> or power:<p>")->capture_default_str();

    auto* pol = app.add_subcommand("polar", "polar wedge of a cone file");
    pol->add_option("cone", cone, "cone file")->required();
    pol->add_option("--pairing", pairing, "plain, or positive weights, comma separated")->capture_default_str();

    auto* meas = app.add_subcommand("measures", "separating measures M_1 and the entropy families");
    meas->add_option("market", market, "market file")->required();
    meas->add_option("--utility", utility, "none, log, exp:<gamma> or power:<p>")->capture_default_str();

    auto* fk = app.add_subcommand("farkas", "Farkas alternative for Ax = b, x >= 0");
    fk->add_option("matrix", matrix, "matrix file")->required();
    fk->add_option("--b", b, "right-hand side, comma separated")->required()->allow_extra_args(false);

    auto* risk = app.add_subcommand("risk", "coherent risk measure of a claim for an umbrella wedge");
    risk->add_option("market", market, "market file")->required();
    risk->add_option("cone", cone, "cone file")->required();
    risk->add_option("--claim", claim, "claim values per atom, comma separated")->required();

    auto* ver = app.add_subcommand("verify", "check the duality statements on a market");
    ver->add_option("market", market, "market file")->required();
    ver->add_option("--utility", verify_utility, "log, exp:<gamma> or power:<p>")->capture_default_str();
    ver->add_option("--suite", suite, "all, or check names, comma separated")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForVersion&) {
        out << version << '\n';
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    }

    try {
        Report r;
        if (*price)
            r = cmd_price(market, claim, family, utility, opt);
        else if (*pol)
            r = cmd_polar(cone, pairing, opt);
        else if (*meas)
            r = cmd_measures(market, utility, opt);
        else if (*fk)
            r = cmd_farkas(matrix, b, opt);
        else if (*risk)
            r = cmd_risk(market, cone, claim, opt);
        else
            r = cmd_verify(market, verify_utility, suite, opt);
        out << render(r, json);
        return r.exit_code;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const EmptyFamily& e) {
        err << "error: " << e.what() << '\n';
        return exit_empty_family;
    } catch (const PricingError& e) {
        err << "error: " << e.what() << '\n';
        return exit_price_undefined;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return exit_input_error;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return exit_internal;
    }
}

} // namespace suprep::cli
