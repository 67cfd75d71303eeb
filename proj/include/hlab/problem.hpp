#ifndef HLAB_PROBLEM_HPP
#define HLAB_PROBLEM_HPP

// Flat INI-style problem files: [section] headers with key = value lines.
// Expressions are parsed eagerly with the dimension from [sode] so malformed
// input fails at load time.

#include <fstream>
#include <map>
#include <sstream>

#include "hlab/conditions.hpp"

namespace hlab {

struct MissingSection : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProblemFile {
    std::map<std::string, std::map<std::string, std::string>> sections;
    std::string source_text;

    bool has(const std::string& sec) const { return sections.count(sec) > 0; }

    const std::map<std::string, std::string>& section(const std::string& sec,
                                                      const std::string& needed_by) const {
        auto it = sections.find(sec);
        if (it == sections.end())
            throw MissingSection(needed_by + " requires [" + sec + "]");
        return it->second;
    }

    std::string get(const std::string& sec, const std::string& key,
                    const std::string& needed_by) const {
        const auto& s = section(sec, needed_by);
        auto it = s.find(key);
        if (it == s.end())
            throw MissingSection(needed_by + " requires key '" + key + "' in [" + sec + "]");
        return it->second;
    }

    std::string get_or(const std::string& sec, const std::string& key,
                       const std::string& dflt) const {
        auto it = sections.find(sec);
        if (it == sections.end()) return dflt;
        auto kt = it->second.find(key);
        return kt == it->second.end() ? dflt : kt->second;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_numbers(const std::string& s) {
    std::vector<double> out;
    std::istringstream iss(s);
    double v;
    while (iss >> v) out.push_back(v);
    return out;
}

inline std::vector<std::string> parse_words(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream iss(s);
    std::string w;
    while (iss >> w) out.push_back(w);
    return out;
}

}  // namespace detail

inline ProblemFile parse_problem_text(const std::string& text) {
    ProblemFile pf;
    pf.source_text = text;
    std::istringstream in(text);
    std::string line, cur;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw SyntaxError("malformed section header '" + t + "'", lineno);
            cur = detail::trim(t.substr(1, t.size() - 2));
            pf.sections[cur];
            continue;
        }
        std::size_t eq = t.find('=');
        if (eq == std::string::npos || cur.empty())
            throw SyntaxError("expected 'key = value' line, got '" + t + "'", lineno);
        pf.sections[cur][detail::trim(t.substr(0, eq))] = detail::trim(t.substr(eq + 1));
    }
    return pf;
}

inline ProblemFile load_problem_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open problem file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_problem_text(ss.str());
}

// ---------------------------------------------------------------------------
// typed accessors

inline SodeSystem problem_sode(const ProblemFile& pf) {
    SodeSystem s;
    s.dim = std::stoi(pf.get("sode", "dim", "every command"));
    if (s.dim < 1) throw DimensionError("dim must be >= 1");
    for (int i = 1; i <= s.dim; ++i)
        s.G.push_back(parse_scalar_field(pf.get("sode", "g" + std::to_string(i),
                                                "every command"), s.dim));
    std::string h = pf.get_or("sode", "homog2", "false");
    s.homog2 = (h == "true" || h == "1" || h == "yes");
    return s;
}

inline SemiBasicOneForm problem_oneform(const ProblemFile& pf, const std::string& sec,
                                        char prefix, int dim, const std::string& needed_by) {
    SemiBasicOneForm f;
    f.dim = dim;
    for (int i = 1; i <= dim; ++i)
        f.comp.push_back(parse_scalar_field(
            pf.get(sec, std::string(1, prefix) + std::to_string(i), needed_by), dim));
    return f;
}

inline ScalarField problem_scalar(const ProblemFile& pf, const std::string& sec,
                                  const std::string& key, int dim,
                                  const std::string& needed_by) {
    return parse_scalar_field(pf.get(sec, key, needed_by), dim);
}

inline BasicTwoForm problem_omega(const ProblemFile& pf, int dim,
                                  const std::string& needed_by) {
    pf.section("omega", needed_by);
    BasicTwoForm w = BasicTwoForm::zero(dim);
    for (int i = 1; i <= dim; ++i)
        for (int j = i + 1; j <= dim; ++j) {
            std::string key = "w" + std::to_string(i) + std::to_string(j);
            std::string v = pf.get_or("omega", key, "");
            if (!v.empty()) w.set(i - 1, j - 1, parse_scalar_field(v, dim));
        }
    return w;
}

inline SampleDomain problem_domain(const ProblemFile& pf, int dim) {
    SampleDomain d;
    d.n = dim;
    auto xb = detail::parse_numbers(pf.get_or("domain", "xbounds", ""));
    for (std::size_t i = 0; i + 1 < xb.size(); i += 2) d.xbox.push_back({xb[i], xb[i + 1]});
    d.rmin = std::stod(pf.get_or("domain", "rmin", "0.5"));
    d.rmax = std::stod(pf.get_or("domain", "rmax", "2.0"));
    d.count = std::stoi(pf.get_or("domain", "count", "200"));
    d.seed = std::stoull(pf.get_or("domain", "seed", "42"));
    if (d.count < 1) throw std::invalid_argument("sample count must be >= 1");
    if (d.rmin <= 0.0) throw std::invalid_argument("rmin must be positive");
    return d;
}

struct TrajectorySpec {
    Point init;
    double h = 1e-3;
    int steps = 100;
};

inline TrajectorySpec problem_trajectory(const ProblemFile& pf, int dim,
                                         const std::string& needed_by) {
    TrajectorySpec t;
    t.init.x = detail::parse_numbers(pf.get("trajectory", "x0", needed_by));
    t.init.y = detail::parse_numbers(pf.get("trajectory", "y0", needed_by));
    if (static_cast<int>(t.init.x.size()) != dim || static_cast<int>(t.init.y.size()) != dim)
        throw DimensionError("trajectory x0/y0 must have " + std::to_string(dim) + " entries");
    t.h = std::stod(pf.get_or("trajectory", "h", "1e-3"));
    t.steps = std::stoi(pf.get_or("trajectory", "steps", "100"));
    return t;
}

struct GyroSpec {
    Mat g;
    std::vector<std::vector<ScalarField>> N;
    std::vector<ScalarField> V;
};

inline GyroSpec problem_gyro(const ProblemFile& pf, int dim, const std::string& needed_by) {
    GyroSpec gs;
    auto gv = detail::parse_numbers(pf.get("gyro", "g", needed_by));
    if (static_cast<int>(gv.size()) != dim * dim)
        throw DimensionError("[gyro] g must list the full matrix row-major");
    gs.g = Mat(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) gs.g(i, j) = gv[i * dim + j];
    gs.N.assign(dim, std::vector<ScalarField>(dim));
    for (int i = 1; i <= dim; ++i)
        for (int j = 1; j <= dim; ++j)
            gs.N[i - 1][j - 1] = parse_scalar_field(
                pf.get("gyro", "n" + std::to_string(i) + std::to_string(j), needed_by), dim);
    for (int i = 1; i <= dim; ++i)
        gs.V.push_back(parse_scalar_field(
            pf.get("gyro", "v" + std::to_string(i), needed_by), dim));
    return gs;
}

}  // namespace hlab

#endif  // HLAB_PROBLEM_HPP
