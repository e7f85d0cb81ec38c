#include "lab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace lab {

namespace {

const char* kDefaultConfig = R"(
[spacetime]
family = rn
mass = 1.0
charge = 0.8
spin = 0.0
lambda = 0.02

[extension]
kappa0 = 1.0
quintic_blend = false
r0 = auto
delta = auto
rqm = auto
rqp = auto
rmp = auto

[grid]
n = 1601
cfl = 0.5
ko = 0.01

[evolve]
T = 300.0
ell = 0
probe_dt = 0.5
snap_dt = 0.0
data_type = ingoing
data_center = auto
data_width = 0.5
data_amplitude = 1.0
probes = 3.0,6.0
delta_probe = 0.14

[norms]
n = 3201
T = 300.0
eps = 0.1
fit_lo = 50.0

[resonances]
n = 601
n_check = 1201
re_lo = -1.0
re_hi = 1.0
im_lo = -0.3
im_hi = 0.1
deflation = 0.9
contour_radius = 0.05
contour_nodes = 64
gamma = auto

[flow]
charges = 0.8,0.5

[carter]
spin = 0.1
witnesses = 20
points = 50

[run]
tasks =
seeds = 1,2,3
budget_minutes = 30
)";

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

}  // namespace

LabConfig LabConfig::defaults() { return parse(kDefaultConfig); }

LabConfig LabConfig::parse(const std::string& text) {
    LabConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            require(line.back() == ']', "config: bad section header at line " +
                                            std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        auto eq = line.find('=');
        require(eq != std::string::npos,
                "config: expected key = value at line " + std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        require(!key.empty(), "config: empty key at line " + std::to_string(lineno));
        std::string full = section.empty() ? key : section + "." + key;
        cfg.kv_[full] = val;
    }
    return cfg;
}

LabConfig LabConfig::load(const std::string& path) {
    std::ifstream in(path);
    require(in.good(), "config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    auto base = defaults();
    auto user = parse(ss.str());
    for (auto& [k, v] : user.kv_) {
        require(base.kv_.count(k) > 0, "config: unknown key '" + k + "'");
        base.kv_[k] = v;
    }
    return base;
}

bool LabConfig::has(const std::string& key) const { return kv_.count(key) > 0; }

void LabConfig::set(const std::string& key, const std::string& value) {
    kv_[key] = value;
}

std::string LabConfig::get_str(const std::string& key) const {
    auto it = kv_.find(key);
    require(it != kv_.end(), "config: missing key '" + key + "'");
    return it->second;
}

double LabConfig::get(const std::string& key) const {
    auto s = get_str(key);
    try {
        return std::stod(s);
    } catch (...) {
        throw std::runtime_error("config: key '" + key + "' is not a number: " + s);
    }
}

int LabConfig::get_int(const std::string& key) const {
    return static_cast<int>(std::lround(get(key)));
}

bool LabConfig::get_bool(const std::string& key) const {
    auto s = get_str(key);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
    throw std::runtime_error("config: key '" + key + "' is not a boolean: " + s);
}

std::vector<double> LabConfig::get_list(const std::string& key) const {
    std::vector<double> out;
    std::istringstream in(get_str(key));
    std::string tok;
    while (std::getline(in, tok, ',')) {
        tok = trim(tok);
        if (!tok.empty()) out.push_back(std::stod(tok));
    }
    return out;
}

std::vector<int> LabConfig::get_int_list(const std::string& key) const {
    std::vector<int> out;
    for (double v : get_list(key)) out.push_back(static_cast<int>(std::lround(v)));
    return out;
}

std::string LabConfig::echo() const {
    std::ostringstream out;
    for (const auto& [k, v] : kv_) out << k << " = " << v << "\n";
    return out.str();
}

BlackHoleParams LabConfig::black_hole() const {
    BlackHoleParams p;
    p.mass = get("spacetime.mass");
    p.charge = get("spacetime.charge");
    p.spin = get("spacetime.spin");
    p.lambda = get("spacetime.lambda");
    auto fam = get_str("spacetime.family");
    require(fam == "rn" || fam == "kerr", "config: family must be rn or kerr");
    p.family = fam == "rn" ? Family::RN : Family::Kerr;
    p.validate();
    return p;
}

ExtensionParams LabConfig::extension() const {
    auto p = black_hole();
    BlackHoleParams vac = p;
    vac.lambda = 0.0;
    auto h = find_horizons(vac);
    require(h.count() >= 2, "config: extension needs two vacuum horizons");
    auto ext = ExtensionParams::defaults_for(h.radii[0], h.radii[1]);
    auto maybe = [&](const char* key, double* field) {
        if (get_str(key) != "auto") *field = get(key);
    };
    maybe("extension.r0", &ext.r0);
    maybe("extension.delta", &ext.delta);
    maybe("extension.rqm", &ext.rQm);
    maybe("extension.rqp", &ext.rQp);
    maybe("extension.rmp", &ext.rmp);
    ext.kappa0 = get("extension.kappa0");
    ext.quintic_blend = get_bool("extension.quintic_blend");
    ext.validate(h.radii[0]);
    return ext;
}

}  // namespace lab
