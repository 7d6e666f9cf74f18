#include "aronsson/config.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace aronsson {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (trim(v.substr(pos)).empty()) return x;
    } catch (const std::exception&) {
    }
    throw ConfigError("config key '" + key + "': '" + v + "' is not a number");
}

}  // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (cfg.values_.count(full))
            throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" + full + "'");
        cfg.values_[full] = value;
        cfg.lines_[full] = lineno;
    }
    return cfg;
}

Config Config::load_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    // A manifest can be fed back directly: pull its resolved config out.
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        const auto j = nlohmann::json::parse(text);
        if (!j.contains("resolved_config"))
            throw ConfigError("JSON config '" + path + "' is not a run manifest");
        text = j["resolved_config"].get<std::string>();
    }
    return parse(text);
}

std::string Config::get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
    return it->second;
}

std::string Config::get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const { return to_double(key, get(key)); }

double Config::get_double(const std::string& key, double fallback) const {
    return has(key) ? get_double(key) : fallback;
}

int Config::get_int(const std::string& key, int fallback) const {
    if (!has(key)) return fallback;
    const double v = get_double(key);
    const int i = static_cast<int>(std::lround(v));
    if (std::abs(v - i) > 1e-12) throw ConfigError("config key '" + key + "' must be an integer");
    return i;
}

std::vector<double> Config::get_list(const std::string& key) const {
    const std::string v = get(key);
    std::vector<double> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(to_double(key, trim(tok)));
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::vector<Vec2> Config::get_points(const std::string& key) const {
    const std::string v = get(key);
    std::vector<Vec2> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ';')) {
        std::stringstream ps(trim(tok));
        std::string a, b;
        if (!std::getline(ps, a, ',') || !std::getline(ps, b))
            throw ConfigError("config key '" + key + "': expected 'x,y' pairs separated by ';'");
        out.push_back(Vec2{to_double(key, trim(a)), to_double(key, trim(b))});
    }
    if (out.empty()) throw ConfigError("config key '" + key + "': empty point list");
    return out;
}

void Config::set(const std::string& key, const std::string& value) { values_[key] = value; }

void Config::require_known(const std::vector<std::string>& allowed) const {
    for (const auto& [key, value] : values_) {
        bool ok = false;
        for (const auto& a : allowed)
            if (key == a) {
                ok = true;
                break;
            }
        if (!ok) {
            std::string msg = "unknown config key '" + key + "'";
            const auto it = lines_.find(key);
            if (it != lines_.end()) msg += " (line " + std::to_string(it->second) + ")";
            throw ConfigError(msg);
        }
    }
}

std::string Config::canonical_text() const {
    // Global keys first, then sections; map order keeps the output
    // canonical and reparseable.
    std::string out;
    for (const auto& [key, value] : values_)
        if (key.find('.') == std::string::npos) out += key + " = " + value + "\n";
    std::string current;
    for (const auto& [key, value] : values_) {
        const auto dot = key.find('.');
        if (dot == std::string::npos) continue;
        const std::string section = key.substr(0, dot);
        if (section != current) {
            out += "[" + section + "]\n";
            current = section;
        }
        out += key.substr(dot + 1) + " = " + value + "\n";
    }
    return out;
}

namespace {

std::vector<double> spec_params(const std::string& body) {
    std::vector<double> out;
    if (body.empty()) return out;
    std::stringstream ss(body);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(to_double("field", trim(tok)));
    return out;
}

}  // namespace

Field make_field(const std::string& spec, const DomainDesc& domain, const Hamiltonian& H) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);

    if (name == "grid") {
        auto g = std::make_shared<Grid2>(load_grid_json(body));
        return Field::from_grid(g, domain);
    }

    const std::vector<double> p = spec_params(body);
    auto need = [&](std::size_t lo, std::size_t hi) {
        if (p.size() < lo || p.size() > hi)
            throw ConfigError("field spec '" + spec + "': wrong number of parameters");
    };

    if (name == "const") {
        need(1, 1);
        const double c = p[0];
        return Field::from_callable(domain, [c](const Vec2&) { return c; });
    }
    if (name == "plane") {
        need(2, 3);
        const Vec2 pl{p[0], p[1]};
        const double b = p.size() > 2 ? p[2] : 0.0;
        return Field::from_callable(domain, [pl, b](const Vec2& x) { return b + pl.dot(x); },
                                    [pl](const Vec2&) { return pl; });
    }
    if (name == "cone" || name == "cone_neg") {
        need(1, 2);
        const double k = p[0];
        const double b = p.size() > 1 ? p[1] : 0.0;
        const bool neg = name == "cone_neg";
        auto h = std::make_shared<Hamiltonian>(neg ? reflect(H) : H);
        return Field::from_callable(domain, [h, k, b, neg](const Vec2& x) {
            if (x.norm() == 0.0) return b;
            const double c = eval_cone(*h, k, to_vec(x)).value;
            return neg ? b - c : b + c;
        });
    }
    if (name == "paraboloid") {
        need(1, 1);
        const double s = p[0];
        return Field::from_callable(domain, [s](const Vec2& x) { return s * x.squaredNorm(); });
    }
    if (name == "perturbed_cone" || name == "perturbed_cone15") {
        need(3, 4);
        const double k = p[0], amp = p[1], freq = p[2];
        const double b = p.size() > 3 ? p[3] : 0.0;
        const double pow_r = name == "perturbed_cone15" ? 1.5 : 1.0;
        auto h = std::make_shared<Hamiltonian>(H);
        return Field::from_callable(domain, [h, k, amp, freq, b, pow_r](const Vec2& x) {
            const double r = x.norm();
            if (r == 0.0) return b;
            const double th = std::atan2(x[1], x[0]);
            return b + eval_cone(*h, k, to_vec(x)).value +
                   amp * std::pow(r, pow_r) * std::sin(freq * th);
        });
    }
    if (name == "aronsson43") {
        need(0, 0);
        return Field::from_callable(domain, [](const Vec2& x) {
            return std::pow(std::abs(x[0]), 4.0 / 3.0) - std::pow(std::abs(x[1]), 4.0 / 3.0);
        });
    }
    if (name == "aronsson43t") {
        // the 4/3 profile composed with A^{-1/2}, where A is the (constant)
        // Hessian; exact for quadratic Hamiltonians
        need(0, 0);
        const Mat A = H.hess(Vec::Zero(2));
        Eigen::SelfAdjointEigenSolver<Mat> es(A);
        const Mat B = es.operatorInverseSqrt();
        return Field::from_callable(domain, [B](const Vec2& x) {
            Vec w = B * to_vec(x);
            return std::pow(std::abs(w[0]), 4.0 / 3.0) - std::pow(std::abs(w[1]), 4.0 / 3.0);
        });
    }
    throw ConfigError("unknown field spec '" + spec + "'");
}

DomainDesc parse_domain(const std::string& spec) {
    const auto colon = spec.find(':');
    const std::string name = spec.substr(0, colon);
    const std::vector<double> p = spec_params(colon == std::string::npos ? "" : spec.substr(colon + 1));
    if (name == "disk") {
        if (p.size() != 3) throw ConfigError("domain spec 'disk' needs cx,cy,R");
        if (!(p[2] > 0)) throw ConfigError("domain spec: radius must be positive");
        return disk({p[0], p[1]}, p[2]);
    }
    if (name == "annulus") {
        if (p.size() != 4) throw ConfigError("domain spec 'annulus' needs cx,cy,rin,rout");
        if (!(0 < p[2] && p[2] < p[3])) throw ConfigError("domain spec: need 0 < rin < rout");
        return annulus({p[0], p[1]}, p[2], p[3]);
    }
    throw ConfigError("unknown domain spec '" + spec + "'");
}

void save_grid_json(const Grid2& g, const std::string& path) {
    nlohmann::json j;
    j["origin"] = {g.origin[0], g.origin[1]};
    j["h"] = g.h;
    j["nx"] = g.nx;
    j["ny"] = g.ny;
    j["values"] = g.u;
    std::vector<int> cls(g.cls.size());
    for (std::size_t i = 0; i < g.cls.size(); ++i) cls[i] = static_cast<int>(g.cls[i]);
    j["classes"] = cls;
    if (g.pinned) {
        j["pinned"] = *g.pinned;
        j["pinned_value"] = g.pinned_value;
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write grid file '" + path + "'");
    out << j.dump(1) << "\n";
}

Grid2 load_grid_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open grid file '" + path + "'");
    nlohmann::json j;
    in >> j;
    Grid2 g;
    g.origin = Vec2{j["origin"][0].get<double>(), j["origin"][1].get<double>()};
    g.h = j["h"].get<double>();
    g.nx = j["nx"].get<int>();
    g.ny = j["ny"].get<int>();
    g.u = j["values"].get<std::vector<double>>();
    const auto cls = j["classes"].get<std::vector<int>>();
    g.cls.resize(cls.size());
    for (std::size_t i = 0; i < cls.size(); ++i) g.cls[i] = static_cast<NodeClass>(cls[i]);
    if (g.u.size() != static_cast<std::size_t>(g.nx) * g.ny || g.cls.size() != g.u.size())
        throw ConfigError("grid file '" + path + "': inconsistent sizes");
    if (j.contains("pinned")) {
        g.pinned = j["pinned"].get<int>();
        g.pinned_value = j["pinned_value"].get<double>();
    }
    return g;
}

}  // namespace aronsson
