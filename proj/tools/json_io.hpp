#pragma once

// JSON and text encodings: complex numbers as [re, im] in JSON and as a+bi on
// the command line.

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "poisson_bv/poisson_bv.hpp"

namespace poisson_bv::io {

using nlohmann::json;

inline json to_json(cplx z) { return json::array({z.real() + 0.0, z.imag() + 0.0}); }

inline json to_json(const CVector& v) {
    json a = json::array();
    for (const auto& z : v) a.push_back(to_json(z));
    return a;
}

inline cplx complex_from_json(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    fail(ErrorKind::usage, "expected a number or an [re, im] pair, got " + j.dump());
}

inline CVector cvector_from_json(const json& j) {
    if (!j.is_array()) fail(ErrorKind::usage, "expected an array of complex numbers");
    CVector v;
    for (const auto& e : j) v.push_back(complex_from_json(e));
    return v;
}

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\n");
    if (a == std::string::npos) return "";
    return s.substr(a, s.find_last_not_of(" \t\n") - a + 1);
}

inline double parse_real(const std::string& s) {
    const std::string t = trim(s);
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        fail(ErrorKind::usage, "cannot parse number '" + s + "'");
    }
    if (used != t.size()) fail(ErrorKind::usage, "cannot parse number '" + s + "'");
    return v;
}

/// "a", "bi", "a+bi", "a-bi", "i", "-i"; exponents such as 1e-3 are allowed.
inline cplx parse_complex(const std::string& text) {
    std::string s = trim(text);
    if (s.empty()) fail(ErrorKind::usage, "empty complex number");
    if (s.back() != 'i' && s.back() != 'j') return {parse_real(s), 0.0};
    s.pop_back();
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;)
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    auto imag_of = [&](const std::string& part) {
        const std::string p = trim(part);
        if (p.empty() || p == "+") return 1.0;
        if (p == "-") return -1.0;
        return parse_real(p);
    };
    if (split == std::string::npos) return {0.0, imag_of(s)};
    return {parse_real(s.substr(0, split)), imag_of(s.substr(split))};
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.push_back("");
    return out;
}

inline CVector parse_complex_list(const std::string& s) {
    CVector v;
    for (const auto& part : split(s, ',')) v.push_back(parse_complex(part));
    return v;
}

/// Shortest round-trip text of a complex number.
inline std::string format_complex(cplx z) {
    auto num = [](double x) { return json(x).dump(); };
    if (z.imag() == 0.0) return num(z.real());
    std::string im = num(z.imag());
    if (im[0] != '-') im = "+" + im;
    return num(z.real()) + im + "i";
}

// ---------------------------------------------------------------------------

inline json to_json(const BoundaryPoint& b) {
    if (b.angles.size() == 1) return b.angles[0];
    return json(b.angles);
}

inline json to_json(const SpacePoint& x) {
    if (x.model == ModelId::h3) return json::array({x.ball.x(), x.ball.y(), x.ball.z()});
    if (x.disk.size() == 1) return to_json(x.disk[0]);
    json a = json::array();
    for (const auto& z : x.disk) a.push_back(to_json(z));
    return a;
}

/// h2: "a+bi"; h2xh2: "a+bi;c+di"; h3: "x,y,z".
inline SpacePoint parse_point(ModelId id, const std::string& s) {
    switch (id) {
        case ModelId::h2: return SpacePoint::h2(parse_complex(s));
        case ModelId::h2xh2: {
            const auto parts = split(s, ';');
            if (parts.size() != 2) fail(ErrorKind::usage, "h2xh2 point must look like 'a+bi;c+di'");
            return SpacePoint::h2xh2(parse_complex(parts[0]), parse_complex(parts[1]));
        }
        case ModelId::h3: {
            const auto parts = split(s, ',');
            if (parts.size() != 3) fail(ErrorKind::usage, "h3 point must look like 'x,y,z'");
            return SpacePoint::h3({parse_real(parts[0]), parse_real(parts[1]), parse_real(parts[2])});
        }
    }
    fail(ErrorKind::usage, "unknown model");
}

inline json to_json(const BoundaryFunction& f) {
    json j;
    if (f.band_limits().size() == 1) {
        j["fourier"] = to_json(f.coefficients());
        return j;
    }
    const int w = 2 * f.band_limit(1) + 1;
    json rows = json::array();
    const CVector& c = f.coefficients();
    for (std::size_t r = 0; r * w < c.size(); ++r)
        rows.push_back(to_json(CVector(c.begin() + r * w, c.begin() + (r + 1) * w)));
    j["fourier"] = rows;
    return j;
}

/// {"fourier": [...]} (centered), {"fourier": [[...], ...]} (torus rows), or
/// {"samples": [...], "grid": N | [N1, N2]}.
inline BoundaryFunction boundary_function_from_json(const json& j) {
    if (j.contains("fourier")) {
        const json& c = j["fourier"];
        if (!c.is_array() || c.empty()) fail(ErrorKind::usage, "fourier must be a non-empty array");
        const bool torus = c[0].is_array() && !c[0].empty() && c[0][0].is_array();
        if (!torus) return BoundaryFunction::fourier(cvector_from_json(c));
        std::vector<CVector> rows;
        for (const auto& r : c) rows.push_back(cvector_from_json(r));
        return BoundaryFunction::fourier2(rows);
    }
    if (j.contains("samples")) {
        const CVector v = cvector_from_json(j["samples"]);
        if (j.contains("grid") && j["grid"].is_array()) {
            const auto g = j["grid"].get<std::vector<std::size_t>>();
            if (g.size() != 2) fail(ErrorKind::usage, "grid must be N or [N1, N2]");
            return BoundaryFunction::samples2(g[0], g[1], v);
        }
        if (j.contains("grid") && j["grid"].get<std::size_t>() != v.size())
            fail(ErrorKind::usage, "grid does not match the number of samples");
        return BoundaryFunction::samples(v);
    }
    fail(ErrorKind::usage, "boundary function JSON needs a 'fourier' or 'samples' field");
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::usage, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorKind::usage, "invalid JSON in '" + path + "': " + e.what());
    }
}

/// fourier:c_{-K},...,c_K | fourier2:row;row;... | samples:v_0,...,v_{N-1} | file:path.json
inline BoundaryFunction parse_boundary_function(ModelId id, const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) fail(ErrorKind::usage, "boundary function spec needs a 'kind:' prefix");
    const std::string kind = spec.substr(0, colon), body = spec.substr(colon + 1);
    BoundaryFunction f;
    if (kind == "fourier") {
        const CVector c = parse_complex_list(body);
        if (id == ModelId::h2xh2) {
            if (c.size() != 1) fail(ErrorKind::usage, "use fourier2: for h2xh2 data");
            f = BoundaryFunction::constant(id, c[0]);
        } else {
            f = BoundaryFunction::fourier(c);
        }
    } else if (kind == "fourier2") {
        std::vector<CVector> rows;
        for (const auto& r : split(body, ';')) rows.push_back(parse_complex_list(r));
        f = BoundaryFunction::fourier2(rows);
    } else if (kind == "samples") {
        f = BoundaryFunction::samples(parse_complex_list(body));
    } else if (kind == "file") {
        f = boundary_function_from_json(load_json_file(body));
    } else {
        fail(ErrorKind::usage, "unknown boundary function kind '" + kind + "'");
    }
    if (id == ModelId::h3) {
        if (f.band_limits().size() != 1 || f.band_limit() != 0)
            fail(ErrorKind::usage, "only constant boundary functions are supported on h3");
        return BoundaryFunction::constant(id, f.coefficient(0));
    }
    if (f.model() != id) fail(ErrorKind::usage, "boundary function does not match the model");
    return f;
}

/// "i:c0,c1,...;j:..." with slice index i the power of t and c_k the θ^k coefficients.
inline ThetaOperator parse_operator(const std::string& s) {
    std::map<int, CVector> slices;
    for (const auto& part : split(s, ';')) {
        const auto colon = part.find(':');
        if (colon == std::string::npos) fail(ErrorKind::usage, "operator slice must look like 'i:c0,c1,...'");
        const double i = parse_real(part.substr(0, colon));
        if (i != std::floor(i) || i < 0) fail(ErrorKind::usage, "slice index must be a non-negative integer");
        slices[static_cast<int>(i)] = parse_complex_list(part.substr(colon + 1));
    }
    return ThetaOperator::fuchsian(std::move(slices));
}

}  // namespace poisson_bv::io
