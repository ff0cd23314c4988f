#pragma once

// Command-line front end. dispatch() returns the process exit code:
// 0 success, 1 usage, 2 precondition or genericity rejection, 3 numerical failure.

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "json_io.hpp"

namespace poisson_bv::cli {

using io::json;

struct RunConfig {
    std::string model;
    CVector lambda;
    std::string f;
    std::vector<std::size_t> grid;
    std::string point;
    double tol = 1e-4;
    std::string output = "json";
    std::uint64_t seed = 0;
    WallGrid extraction;
    double condition_threshold = 1e8;
    bool via_bv = false;
    std::string op;
    std::string rhs;
    std::string layer;
    int order = 12;
    std::string method = "formal";
    double radius = 0.5;

    bool operator==(const RunConfig&) const = default;
};

inline bool operator==(const WallGrid& a, const WallGrid& b) {
    return a.t0 == b.t0 && a.ratio == b.ratio && a.n_points == b.n_points &&
           a.correction_orders == b.correction_orders;
}

inline json to_json(const RunConfig& c) {
    return json{{"model", c.model},
                {"lambda", io::to_json(c.lambda)},
                {"f", c.f},
                {"grid", c.grid},
                {"point", c.point},
                {"tol", c.tol},
                {"output", c.output},
                {"seed", c.seed},
                {"t0", c.extraction.t0},
                {"ratio", c.extraction.ratio},
                {"n_points", c.extraction.n_points},
                {"correction_orders", c.extraction.correction_orders},
                {"condition_threshold", c.condition_threshold},
                {"via_bv", c.via_bv},
                {"op", c.op},
                {"rhs", c.rhs},
                {"layer", c.layer},
                {"order", c.order},
                {"method", c.method},
                {"radius", c.radius}};
}

/// Missing keys keep the values already in `base`; unknown keys are rejected.
inline RunConfig config_from_json(const json& j, RunConfig base = {}) {
    if (!j.is_object()) fail(ErrorKind::usage, "config must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "model") base.model = v.get<std::string>();
            else if (key == "lambda") base.lambda = v.is_string() ? io::parse_complex_list(v.get<std::string>())
                                                                  : io::cvector_from_json(v);
            else if (key == "f") base.f = v.get<std::string>();
            else if (key == "grid") base.grid = v.is_array() ? v.get<std::vector<std::size_t>>()
                                                             : std::vector<std::size_t>{v.get<std::size_t>()};
            else if (key == "point") base.point = v.get<std::string>();
            else if (key == "tol") base.tol = v.get<double>();
            else if (key == "output") base.output = v.get<std::string>();
            else if (key == "seed") base.seed = v.get<std::uint64_t>();
            else if (key == "t0") base.extraction.t0 = v.get<double>();
            else if (key == "ratio") base.extraction.ratio = v.get<double>();
            else if (key == "n_points") base.extraction.n_points = v.get<int>();
            else if (key == "correction_orders") base.extraction.correction_orders = v.get<int>();
            else if (key == "condition_threshold") base.condition_threshold = v.get<double>();
            else if (key == "via_bv") base.via_bv = v.get<bool>();
            else if (key == "op") base.op = v.get<std::string>();
            else if (key == "rhs") base.rhs = v.get<std::string>();
            else if (key == "layer") base.layer = v.get<std::string>();
            else if (key == "order") base.order = v.get<int>();
            else if (key == "method") base.method = v.get<std::string>();
            else if (key == "radius") base.radius = v.get<double>();
            else fail(ErrorKind::usage, "unknown config key '" + key + "'");
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::usage, std::string("bad config value: ") + e.what());
    }
    return base;
}

namespace detail {

inline int exit_code(ErrorKind k) {
    switch (k) {
        case ErrorKind::usage: return 1;
        case ErrorKind::precondition: return 2;
        case ErrorKind::numerical: return 3;
    }
    return 1;
}

inline const char* kind_name(ErrorKind k) {
    switch (k) {
        case ErrorKind::usage: return "usage";
        case ErrorKind::precondition: return "precondition";
        case ErrorKind::numerical: return "numerical";
    }
    return "usage";
}

inline std::string join_lambda(const CVector& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + io::format_complex(v[i]);
    return s;
}

inline std::string csv_num(double x) { return json(x).dump(); }

struct Context {
    RunConfig cfg;
    std::ostream& out;

    ModelId model() const {
        if (cfg.model.empty()) fail(ErrorKind::usage, "--model is required");
        return parse_model(cfg.model);
    }
    SpectralParameter lambda() const {
        if (cfg.lambda.empty()) fail(ErrorKind::usage, "--lambda is required");
        return {cfg.lambda};
    }
    bool csv() const { return cfg.output == "csv"; }
    ExtractionConfig extraction() const {
        ExtractionConfig e;
        e.grid = cfg.extraction;
        e.condition_threshold = cfg.condition_threshold;
        return e;
    }
    void emit(const json& j) const { out << j.dump(2) << "\n"; }
};

inline void csv_complex_header(std::ostream& o, const std::string& name) { o << "re_" << name << ",im_" << name; }
inline void csv_complex(std::ostream& o, cplx z) { o << csv_num(z.real()) << "," << csv_num(z.imag()); }

inline void csv_boundary(std::ostream& o, const BoundaryPoint& b) {
    for (std::size_t i = 0; i < b.angles.size(); ++i) o << (i ? "," : "") << csv_num(b.angles[i]);
}

inline std::string csv_boundary_header(std::size_t n) { return n == 1 ? "b" : "b1,b2"; }

// --- subcommands ------------------------------------------------------------

inline int run_exponents(const Context& c) {
    const RootDatum rd = build_root_datum(c.model());
    const auto ex = characteristic_exponents(rd, c.lambda());
    if (c.csv()) {
        c.out << "w";
        for (int j = 1; j <= rd.rank; ++j) c.out << ",re_" << j << ",im_" << j;
        c.out << "\n";
        for (std::size_t w = 0; w < ex.size(); ++w) {
            c.out << rd.weyl_labels[w];
            for (const auto& z : ex[w]) c.out << "," << csv_num(z.real()) << "," << csv_num(z.imag());
            c.out << "\n";
        }
        return 0;
    }
    json a = json::array();
    for (const auto& v : ex) a.push_back(io::to_json(v));
    c.out << a.dump() << "\n";
    return 0;
}

inline int run_generic(const Context& c, std::ostream& err) {
    const RootDatum rd = build_root_datum(c.model());
    const auto rep = genericity_check(rd, c.lambda());
    json v = json::array();
    for (const auto& x : rep.violations)
        v.push_back({{"j", x.wall}, {"w", x.weyl_label}, {"condition", x.condition}, {"value", io::to_json(x.value)}});
    if (c.csv()) {
        c.out << "cond_i,cond_ii,p_nonzero,re_p,im_p\n"
              << rep.cond_i << "," << rep.cond_ii << "," << rep.p_nonzero << ",";
        csv_complex(c.out, rep.p_value);
        c.out << "\n";
    } else {
        c.emit({{"cond_i", rep.cond_i},
                {"cond_ii", rep.cond_ii},
                {"p_nonzero", rep.p_nonzero},
                {"p_value", io::to_json(rep.p_value)},
                {"violations", v},
                {"warnings", rep.warnings}});
    }
    if (rep.ok()) return 0;
    json e{{"error", "precondition"}, {"message", "spectral parameter is not generic"}, {"violations", v}};
    if (!rep.violations.empty()) {
        e["j"] = rep.violations.front().wall;
        e["w"] = rep.violations.front().weyl_label;
    }
    err << e.dump() << "\n";
    return 2;
}

inline int run_point_value(const Context& c, bool spherical) {
    const ModelId id = c.model();
    const SpaceModel m = make_model(id);
    if (c.cfg.point.empty()) fail(ErrorKind::usage, "--point is required");
    const SpacePoint x = io::parse_point(id, c.cfg.point);
    cplx v;
    if (spherical) {
        v = spherical_function(m, c.lambda(), x);
    } else {
        if (c.cfg.f.empty()) fail(ErrorKind::usage, "--f is required");
        v = poisson_transform(m, c.lambda(), io::parse_boundary_function(id, c.cfg.f), x);
    }
    if (c.csv()) {
        csv_complex_header(c.out, "value");
        c.out << "\n";
        csv_complex(c.out, v);
        c.out << "\n";
    } else {
        c.emit({{"point", io::to_json(x)}, {"value", io::to_json(v)}});
    }
    return 0;
}

inline int run_cfun(const Context& c) {
    const SpaceModel m = make_model(c.model());
    const auto lam = c.lambda();
    const cplx ci = c_function_integral(m, lam);
    std::optional<LeadingCoefficient> bv;
    if (c.cfg.via_bv) bv = c_function_via_bv(m, lam, c.extraction());
    if (c.csv()) {
        csv_complex_header(c.out, "c_integral");
        if (bv) c.out << ",", csv_complex_header(c.out, "c_bv");
        c.out << "\n";
        csv_complex(c.out, ci);
        if (bv) c.out << ",", csv_complex(c.out, bv->value);
        c.out << "\n";
        return 0;
    }
    json j{{"c_integral", io::to_json(ci)}};
    if (bv) {
        j["c_bv"] = io::to_json(bv->value);
        j["condition"] = bv->condition;
        j["error_estimate"] = bv->error_estimate;
    }
    c.emit(j);
    return 0;
}

inline std::vector<std::size_t> grid_for(const Context& c, ModelId id) {
    if (!c.cfg.grid.empty()) return c.cfg.grid;
    return default_inversion_grid(id);
}

inline int run_bv(const Context& c) {
    const ModelId id = c.model();
    const SpaceModel m = make_model(id);
    if (c.cfg.f.empty()) fail(ErrorKind::usage, "--f is required");
    const auto lam = c.lambda();
    const PoissonEvaluator P(m, lam, io::parse_boundary_function(id, c.cfg.f));
    const auto res = boundary_value(m, lam, eigenfunction(P), grid_for(c, id), c.extraction());
    if (c.csv()) {
        c.out << csv_boundary_header(res.points.front().angles.size()) << ",re_bv,im_bv\n";
        for (std::size_t i = 0; i < res.points.size(); ++i) {
            csv_boundary(c.out, res.points[i]);
            c.out << ",";
            csv_complex(c.out, res.fits[i].value);
            c.out << "\n";
        }
        return 0;
    }
    json pts = json::array();
    for (std::size_t i = 0; i < res.points.size(); ++i)
        pts.push_back({{"b", io::to_json(res.points[i])},
                       {"bv", io::to_json(res.fits[i].value)},
                       {"condition", res.fits[i].condition},
                       {"error_estimate", res.fits[i].error_estimate}});
    json j{{"points", pts}};
    j["fourier"] = io::to_json(res.function)["fourier"];
    c.emit(j);
    return 0;
}

inline int run_verify(const Context& c, std::ostream& err) {
    const ModelId id = c.model();
    const SpaceModel m = make_model(id);
    if (c.cfg.f.empty()) fail(ErrorKind::usage, "--f is required");
    const auto rep = verify_inversion(m, c.lambda(), io::parse_boundary_function(id, c.cfg.f), c.extraction(),
                                      grid_for(c, id));
    if (c.csv()) {
        c.out << csv_boundary_header(rep.points.front().b.angles.size()) << ",re_bv,im_bv,re_target,im_target\n";
        for (const auto& p : rep.points) {
            csv_boundary(c.out, p.b);
            c.out << ",";
            csv_complex(c.out, p.bv);
            c.out << ",";
            csv_complex(c.out, p.target);
            c.out << "\n";
        }
    } else {
        json pts = json::array();
        for (const auto& p : rep.points)
            pts.push_back({{"b", io::to_json(p.b)}, {"bv", io::to_json(p.bv)}, {"target", io::to_json(p.target)}});
        json j{{"residual_sup", rep.residual_sup}, {"c_used", io::to_json(rep.c_used)}, {"points", pts}};
        if (rep.c_integral) j["c_integral"] = io::to_json(*rep.c_integral);
        if (rep.c_bv) j["c_bv"] = io::to_json(*rep.c_bv);
        j["warnings"] = rep.warnings;
        c.emit(j);
    }
    if (rep.residual_sup > c.cfg.tol) {
        err << json{{"error", "numerical"},
                    {"message", "inversion residual exceeds the tolerance"},
                    {"residual_sup", rep.residual_sup},
                    {"tol", c.cfg.tol}}
                   .dump()
            << "\n";
        return 3;
    }
    return 0;
}

inline void emit_series(const Context& c, const CVector& coeffs, json extra) {
    if (c.csv()) {
        c.out << "k,re,im\n";
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            c.out << k << ",";
            csv_complex(c.out, coeffs[k]);
            c.out << "\n";
        }
        return;
    }
    extra["coefficients"] = io::to_json(coeffs);
    c.emit(extra);
}

inline int run_fuchs_solve(const Context& c) {
    if (c.cfg.op.empty()) fail(ErrorKind::usage, "--op is required");
    const ThetaOperator P = io::parse_operator(c.cfg.op);
    if (c.cfg.order < 0) fail(ErrorKind::usage, "--order must be non-negative");
    const std::size_t N = static_cast<std::size_t>(c.cfg.order);
    FormalSeries f = FormalSeries::zero(N);
    if (!c.cfg.rhs.empty()) {
        const CVector r = io::parse_complex_list(c.cfg.rhs);
        for (std::size_t k = 0; k < r.size() && k <= N; ++k) f.coeffs[k] = r[k];
    }
    if (c.cfg.method == "formal") {
        emit_series(c, solve_formal(P, f, N).coeffs, json{{"method", "formal"}});
        return 0;
    }
    if (c.cfg.method == "fixed-point") {
        const auto r = solve_fixed_point(P, f, c.cfg.radius, c.cfg.tol);
        emit_series(c, r.solution.coeffs,
                    json{{"method", "fixed-point"},
                         {"certified_radius", r.certified_radius},
                         {"iterations", r.iterations},
                         {"shift", r.shift}});
        return 0;
    }
    fail(ErrorKind::usage, "--method must be 'formal' or 'fixed-point'");
}

inline int run_fuchs_delta(const Context& c) {
    if (c.cfg.op.empty()) fail(ErrorKind::usage, "--op is required");
    if (c.cfg.layer.empty()) fail(ErrorKind::usage, "--layer is required");
    const ThetaOperator P = io::parse_operator(c.cfg.op);
    const DeltaLayer v = solve_delta_layer(P, DeltaLayer{io::parse_complex_list(c.cfg.layer)});
    emit_series(c, v.coeffs, json::object());
    return 0;
}

}  // namespace detail

/// Runs one command line. args[0] is the program name.
inline int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    try {
        // config file first, so that flags override it
        for (std::size_t i = 1; i < args.size(); ++i) {
            std::string path;
            if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
            else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
            if (!path.empty()) cfg = config_from_json(io::load_json_file(path), cfg);
        }
    } catch (const Error& e) {
        err << json{{"error", detail::kind_name(e.kind())}, {"message", e.what()}}.dump() << "\n";
        return detail::exit_code(e.kind());
    }

    CLI::App app{"Poisson transform and boundary values on hyperbolic corner models", "poisson_bv"};
    app.require_subcommand(1);
    std::string config_path, lambda_text = detail::join_lambda(cfg.lambda), grid_text;
    bool dump_config = false;

    auto common = [&](CLI::App* s, bool with_model) {
        s->add_option("--config", config_path, "JSON config file; flags override its values");
        s->add_option("--output", cfg.output, "Output format")->check(CLI::IsMember({"json", "csv"}));
        s->add_option("--tol", cfg.tol, "Tolerance");
        s->add_option("--seed", cfg.seed, "Seed recorded in the config");
        s->add_flag("--dump-config", dump_config, "Print the effective config as JSON and exit");
        if (with_model) {
            s->add_option("--model", cfg.model, "Model id: h2, h3 or h2xh2");
            s->add_option("--lambda", lambda_text, "Spectral parameter, comma-separated a+bi values");
        }
    };
    auto extraction = [&](CLI::App* s) {
        s->add_option("--t0", cfg.extraction.t0, "Largest t of the radial grid");
        s->add_option("--ratio", cfg.extraction.ratio, "Geometric ratio of the radial grid");
        s->add_option("--n-points", cfg.extraction.n_points, "Radial grid size");
        s->add_option("--correction-orders", cfg.extraction.correction_orders, "Integer corrections per exponent");
        s->add_option("--condition-threshold", cfg.condition_threshold, "Largest accepted fit condition number");
    };

    auto* exponents = app.add_subcommand("exponents", "Characteristic exponents rho - w.lambda");
    common(exponents, true);
    auto* generic = app.add_subcommand("generic", "Genericity conditions and p(lambda)");
    common(generic, true);
    auto* peval = app.add_subcommand("poisson-eval", "Poisson transform of f at a point");
    common(peval, true);
    peval->add_option("--f", cfg.f, "fourier:c_-K,...,c_K | fourier2:row;row | samples:v,... | file:path");
    peval->add_option("--point", cfg.point, "h2: a+bi; h2xh2: a+bi;c+di; h3: x,y,z");
    auto* spher = app.add_subcommand("spherical", "Spherical function at a point");
    common(spher, true);
    spher->add_option("--point", cfg.point, "h2: a+bi; h2xh2: a+bi;c+di; h3: x,y,z");
    auto* cfun = app.add_subcommand("cfun", "c-function by the nilpotent integral");
    common(cfun, true);
    cfun->add_flag("--via-bv", cfg.via_bv, "Also extract c as the boundary value of the spherical function");
    extraction(cfun);
    auto* bv = app.add_subcommand("bv", "Boundary values of P_lambda f on a boundary grid");
    common(bv, true);
    bv->add_option("--f", cfg.f, "Boundary data, as for poisson-eval");
    bv->add_option("--grid", grid_text, "Boundary grid size, N or N1,N2");
    extraction(bv);
    auto* verify = app.add_subcommand("verify-inversion", "Check bv(P_lambda f) = c(lambda) f");
    common(verify, true);
    verify->add_option("--f", cfg.f, "Boundary data, as for poisson-eval");
    verify->add_option("--grid", grid_text, "Boundary grid size, N or N1,N2");
    extraction(verify);
    auto* fsolve = app.add_subcommand("fuchs-solve", "Series solution of P u = f");
    common(fsolve, false);
    fsolve->add_option("--op", cfg.op, "Operator slices 'i:c0,c1,...;...' (t^i c_i(theta))");
    fsolve->add_option("--rhs", cfg.rhs, "Right-hand side coefficients f_0,f_1,...");
    fsolve->add_option("--order", cfg.order, "Truncation order N");
    fsolve->add_option("--method", cfg.method, "formal or fixed-point");
    fsolve->add_option("--radius", cfg.radius, "Working radius for fixed-point");
    auto* fdelta = app.add_subcommand("fuchs-delta", "Delta-layer solution of P v = f");
    common(fdelta, false);
    fdelta->add_option("--op", cfg.op, "Operator slices 'i:c0,c1,...;...'");
    fdelta->add_option("--layer", cfg.layer, "Layer coefficients f_0,...,f_m of sum f_k delta^(k)");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    if (!rev.empty()) rev.pop_back();
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        const CLI::App* target = &app;
        for (const auto* s : app.get_subcommands()) target = s;
        out << target->help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << json{{"error", "usage"}, {"message", e.what()}}.dump() << "\n";
        return 1;
    }

    try {
        if (!lambda_text.empty()) cfg.lambda = io::parse_complex_list(lambda_text);
        if (!grid_text.empty()) {
            cfg.grid.clear();
            for (const auto& g : io::split(grid_text, ',')) {
                const double v = io::parse_real(g);
                if (v < 1 || v != std::floor(v)) fail(ErrorKind::usage, "grid sizes must be positive integers");
                cfg.grid.push_back(static_cast<std::size_t>(v));
            }
        }
        if (dump_config) {
            out << to_json(cfg).dump(2) << "\n";
            return 0;
        }
        const detail::Context c{cfg, out};
        const std::string name = app.get_subcommands().front()->get_name();
        if (name == "exponents") return detail::run_exponents(c);
        if (name == "generic") return detail::run_generic(c, err);
        if (name == "poisson-eval") return detail::run_point_value(c, false);
        if (name == "spherical") return detail::run_point_value(c, true);
        if (name == "cfun") return detail::run_cfun(c);
        if (name == "bv") return detail::run_bv(c);
        if (name == "verify-inversion") return detail::run_verify(c, err);
        if (name == "fuchs-solve") return detail::run_fuchs_solve(c);
        if (name == "fuchs-delta") return detail::run_fuchs_delta(c);
        fail(ErrorKind::usage, "unknown subcommand");
    } catch (const GenericityError& e) {
        err << json{{"error", "precondition"}, {"message", e.what()}, {"j", e.wall()}, {"w", e.weyl_label()}}.dump()
            << "\n";
        return 2;
    } catch (const ResonanceError& e) {
        err << json{{"error", "precondition"}, {"message", e.what()}, {"index", e.index()}}.dump() << "\n";
        return 2;
    } catch (const Error& e) {
        err << json{{"error", detail::kind_name(e.kind())}, {"message", e.what()}}.dump() << "\n";
        return detail::exit_code(e.kind());
    } catch (const std::exception& e) {
        err << json{{"error", "numerical"}, {"message", e.what()}}.dump() << "\n";
        return 3;
    }
}

}  // namespace poisson_bv::cli
