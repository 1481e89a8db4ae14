#include "tyrefield/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <system_error>

#include "tyrefield/errors.hpp"

namespace tyrefield {

ConfigError::ConfigError(int line, const std::string& msg)
    : ValidationError(line > 0 ? "config line " + std::to_string(line) + ": " + msg : "config: " + msg), line_(line)
{
}

std::uint64_t fnv1a64(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

const std::set<std::string> kAxleKeys = {"L",   "F_z",  "sigma_0", "sigma_1", "sigma_2", "w",       "relaxation_length",
                                         "pressure", "a", "mu_d",    "mu_s",    "v_S",     "sigma_3", "eps",
                                         "constant_mu"};

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> s = {
        {"vehicle", {"m", "I_z", "l1", "l2", "v_x", "chi_1", "chi_2", "chi_3", "variant"}},
        {"axle.front", kAxleKeys},
        {"axle.rear", kAxleKeys},
        {"friction",
         {"sigma_0", "sigma_1", "sigma_2", "V", "L", "F_z", "chi_1", "chi_2", "pressure", "a", "mu_d", "mu_s", "v_S",
          "sigma_3", "eps", "constant_mu"}},
        {"scenario",
         {"kind", "delta1_deg", "delta2_deg", "delta1_amp", "delta2_amp", "omega", "T", "vy0", "r0", "d_xi", "dt",
          "substeps"}},
        {"analysis",
         {"chi_min", "chi_max", "chi_points", "vx_min", "vx_max", "vx_points", "sigma_max", "omega_max", "threads",
          "bode_omega_min", "bode_omega_max", "bode_points", "bode_omegas", "bode_vx", "delta1_star_deg",
          "delta2_star_deg", "force_v_min", "force_v_max", "force_points", "trials", "seed"}},
        {"output", {"directory", "csv", "svg"}},
    };
    return s;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    std::string value;
    int line = 0;
};

using Section = std::map<std::string, Entry>;

class Reader {
public:
    explicit Reader(std::map<std::string, Section> s) : sections_(std::move(s)) {}

    const Entry* find(const std::string& sec, const std::string& key) const
    {
        auto it = sections_.find(sec);
        if (it == sections_.end()) return nullptr;
        auto jt = it->second.find(key);
        return jt == it->second.end() ? nullptr : &jt->second;
    }

    bool has(const std::string& sec, const std::string& key) const { return find(sec, key) != nullptr; }

    static double to_double(const Entry& e, const std::string& key)
    {
        double x = 0.0;
        const char* b = e.value.data();
        const char* end = b + e.value.size();
        if (!e.value.empty() && *b == '+') ++b;
        auto [p, ec] = std::from_chars(b, end, x);
        if (ec != std::errc() || p != end || b == end)
            throw ConfigError(e.line, "key '" + key + "': '" + e.value + "' is not a number");
        return x;
    }

    bool number(const std::string& sec, const std::string& key, double& out) const
    {
        const Entry* e = find(sec, key);
        if (!e) return false;
        out = to_double(*e, key);
        return true;
    }

    std::optional<double> number(const std::string& sec, const std::string& key) const
    {
        double x;
        if (!number(sec, key, x)) return std::nullopt;
        return x;
    }

    template <class Int>
    bool integer(const std::string& sec, const std::string& key, Int& out) const
    {
        const Entry* e = find(sec, key);
        if (!e) return false;
        Int x{};
        const char* b = e->value.data();
        const char* end = b + e->value.size();
        auto [p, ec] = std::from_chars(b, end, x);
        if (ec != std::errc() || p != end || b == end)
            throw ConfigError(e->line, "key '" + key + "': '" + e->value + "' is not an integer");
        out = x;
        return true;
    }

    bool flag(const std::string& sec, const std::string& key, bool& out) const
    {
        const Entry* e = find(sec, key);
        if (!e) return false;
        if (e->value == "true" || e->value == "1")
            out = true;
        else if (e->value == "false" || e->value == "0")
            out = false;
        else
            throw ConfigError(e->line, "key '" + key + "': expected true or false");
        return true;
    }

    bool text(const std::string& sec, const std::string& key, std::string& out) const
    {
        const Entry* e = find(sec, key);
        if (!e) return false;
        out = e->value;
        return true;
    }

    bool list(const std::string& sec, const std::string& key, std::vector<double>& out) const
    {
        const Entry* e = find(sec, key);
        if (!e) return false;
        out.clear();
        std::stringstream ss(e->value);
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(to_double({trim(item), e->line}, key));
        if (out.empty()) throw ConfigError(e->line, "key '" + key + "': empty list");
        return true;
    }

    int line(const std::string& sec, const std::string& key) const
    {
        const Entry* e = find(sec, key);
        return e ? e->line : 0;
    }

private:
    std::map<std::string, Section> sections_;
};

double deg(double x) { return x * std::numbers::pi / 180.0; }

PressureKind pressure_kind(const Reader& r, const std::string& sec, PressureKind fallback)
{
    std::string s;
    if (!r.text(sec, "pressure", s)) return fallback;
    if (s == "constant") return PressureKind::Constant;
    if (s == "exponential") return PressureKind::Exponential;
    if (s == "parabolic") return PressureKind::Parabolic;
    throw ConfigError(r.line(sec, "pressure"), "key 'pressure': expected constant, exponential or parabolic");
}

// Friction law keys shared by axle sections and [friction].  Setting any Stribeck
// parameter without constant_mu switches the law from constant to Stribeck form.
void read_law(const Reader& r, const std::string& sec, FrictionLaw& law)
{
    bool stribeck = false;
    stribeck |= r.number(sec, "mu_d", law.mu_d);
    stribeck |= r.number(sec, "mu_s", law.mu_s);
    stribeck |= r.number(sec, "v_S", law.v_S);
    stribeck |= r.number(sec, "sigma_3", law.sigma_3);
    r.number(sec, "eps", law.eps);
    std::string cm;
    if (r.text(sec, "constant_mu", cm)) {
        if (cm == "none")
            law.constant_mu.reset();
        else
            law.constant_mu = Reader::to_double({cm, r.line(sec, "constant_mu")}, "constant_mu");
    } else if (stribeck) {
        law.constant_mu.reset();
    }
}

void read_axle(const Reader& r, const std::string& sec, AxleConfig& a, bool& has_relaxation, double& relaxation)
{
    r.number(sec, "L", a.L);
    r.number(sec, "F_z", a.F_z);
    r.number(sec, "sigma_0", a.sigma_0);
    r.number(sec, "sigma_1", a.sigma_1);
    r.number(sec, "sigma_2", a.sigma_2);
    r.number(sec, "w", a.w);
    has_relaxation = r.number(sec, "relaxation_length", relaxation);
    if (has_relaxation && r.has(sec, "w"))
        throw ConfigError(r.line(sec, "relaxation_length"), "set either w or relaxation_length, not both");
    a.pressure.kind = pressure_kind(r, sec, a.pressure.kind);
    r.number(sec, "a", a.pressure.a);
    read_law(r, sec, a.friction);
}

}  // namespace

void RunConfig::validate() const
{
    vehicle.validate();
    friction.law.validate();
    friction.env.validate();
    friction.pressure.validate();
    build_scenario(scenario.kind, scenario.params);
    scenario.grid.validate();
    analysis.chart.validate();
    if (!(analysis.bode_omega_min > 0.0 && analysis.bode_omega_max > analysis.bode_omega_min))
        throw ValidationError("analysis: bode_omega_min must be > 0 and < bode_omega_max");
    if (analysis.bode_points < 2) throw ValidationError("analysis: bode_points must be >= 2");
    for (double w : analysis.bode_omegas)
        if (!(std::isfinite(w) && w > 0.0)) throw ValidationError("analysis: bode_omegas entries must be > 0");
    for (double v : analysis.bode_vx)
        if (!(std::isfinite(v) && v > 0.0)) throw ValidationError("analysis: bode_vx entries must be > 0");
    if (!analysis.delta_star.allFinite()) throw ValidationError("analysis: steering angles must be finite");
    if (!(analysis.force_v_max >= analysis.force_v_min) || analysis.force_points < 1)
        throw ValidationError("analysis: force_v_min must be <= force_v_max and force_points >= 1");
    if (analysis.force_points > 1 && analysis.force_v_max == analysis.force_v_min)
        throw ValidationError("analysis: degenerate force range with more than one point");
    if (analysis.trials < 1) throw ValidationError("analysis: trials must be >= 1");
    if (output.directory.empty()) throw ValidationError("output: directory must not be empty");
}

RunConfig parse_config(const std::string& text)
{
    std::map<std::string, Section> sections;
    std::string current;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
            current = trim(line.substr(1, line.size() - 2));
            if (!schema().count(current)) throw ConfigError(line_no, "unknown section [" + current + "]");
            if (sections.count(current)) throw ConfigError(line_no, "duplicate section [" + current + "]");
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(line_no, "expected key = value");
        if (current.empty()) throw ConfigError(line_no, "key outside of any section");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(line_no, "missing key");
        if (value.empty()) throw ConfigError(line_no, "key '" + key + "' has no value");
        if (!schema().at(current).count(key))
            throw ConfigError(line_no, "unknown key '" + key + "' in [" + current + "]");
        auto [it, inserted] = sections[current].emplace(key, Entry{value, line_no});
        if (!inserted) throw ConfigError(line_no, "duplicate key '" + key + "' in [" + current + "]");
    }

    const Reader r(std::move(sections));
    RunConfig cfg;

    // vehicle
    Variant variant = Variant::RigidCarcass;
    std::string vs;
    if (r.text("vehicle", "variant", vs)) {
        if (vs == "rigid")
            variant = Variant::RigidCarcass;
        else if (vs == "flexible")
            variant = Variant::FlexibleCarcass;
        else
            throw ConfigError(r.line("vehicle", "variant"), "key 'variant': expected rigid or flexible");
    }
    VehicleConfig& v = cfg.vehicle;
    v = VehicleConfig::table2(variant);
    r.number("vehicle", "m", v.m);
    r.number("vehicle", "I_z", v.I_z);
    r.number("vehicle", "l1", v.l1);
    r.number("vehicle", "l2", v.l2);
    r.number("vehicle", "v_x", v.v_x);
    r.integer("vehicle", "chi_1", v.chi_1);
    r.integer("vehicle", "chi_2", v.chi_2);
    r.integer("vehicle", "chi_3", v.chi_3);

    const char* axle_sec[2] = {"axle.front", "axle.rear"};
    bool has_relax[2] = {false, false};
    double relax[2] = {0.0, 0.0};
    for (int i = 0; i < 2; ++i) read_axle(r, axle_sec[i], v.axles[i], has_relax[i], relax[i]);
    v.validate();
    for (int i = 0; i < 2; ++i) {
        if (!has_relax[i]) continue;
        try {
            v.axles[i].w = carcass_stiffness_for(v.axles[i], relax[i]);
        } catch (const ValidationError& e) {
            throw ValidationError(std::string(axle_sec[i]) + ": relaxation_length: " + e.what());
        }
    }

    // friction (scalar steady-force command)
    FrictionSpec& f = cfg.friction;
    f.pressure = PressureProfile::constant();
    f.pressure.a = 0.1;
    r.number("friction", "sigma_0", f.env.sigma_0);
    r.number("friction", "sigma_1", f.env.sigma_1);
    r.number("friction", "sigma_2", f.env.sigma_2);
    r.number("friction", "V", f.env.V);
    r.number("friction", "L", f.env.L);
    r.number("friction", "F_z", f.env.F_z);
    r.integer("friction", "chi_1", f.env.chi_1);
    r.integer("friction", "chi_2", f.env.chi_2);
    f.pressure.kind = pressure_kind(r, "friction", f.pressure.kind);
    r.number("friction", "a", f.pressure.a);
    read_law(r, "friction", f.law);

    // scenario
    ScenarioSpec& s = cfg.scenario;
    std::string kind;
    if (r.text("scenario", "kind", kind)) {
        if (kind == "constant_steer")
            s.kind = ScenarioKind::ConstantSteer;
        else if (kind == "sine_sweep")
            s.kind = ScenarioKind::SineSweep;
        else if (kind == "free_response")
            s.kind = ScenarioKind::FreeResponse;
        else
            throw ConfigError(r.line("scenario", "kind"),
                              "key 'kind': expected constant_steer, sine_sweep or free_response");
    }
    for (int i = 1; i <= 2; ++i) {
        const std::string d = "delta" + std::to_string(i);
        double& amp = i == 1 ? s.params.delta1_amp : s.params.delta2_amp;
        if (r.has("scenario", d + "_deg") && r.has("scenario", d + "_amp"))
            throw ConfigError(r.line("scenario", d + "_amp"), "set either " + d + "_deg or " + d + "_amp, not both");
        double x;
        if (r.number("scenario", d + "_deg", x)) amp = deg(x);
        r.number("scenario", d + "_amp", amp);
    }
    s.params.omega = r.number("scenario", "omega");
    r.number("scenario", "T", s.params.T);
    const auto vy0 = r.number("scenario", "vy0");
    const auto r0 = r.number("scenario", "r0");
    if (vy0 || r0) s.params.x0 = Vec2(vy0.value_or(0.0), r0.value_or(0.0));
    r.number("scenario", "d_xi", s.grid.d_xi);
    r.number("scenario", "dt", s.grid.dt);
    r.integer("scenario", "substeps", s.grid.substeps);

    // analysis
    AnalysisSpec& a = cfg.analysis;
    r.number("analysis", "chi_min", a.chart.chi_min);
    r.number("analysis", "chi_max", a.chart.chi_max);
    r.integer("analysis", "chi_points", a.chart.n_chi);
    r.number("analysis", "vx_min", a.chart.vx_min);
    r.number("analysis", "vx_max", a.chart.vx_max);
    r.integer("analysis", "vx_points", a.chart.n_vx);
    r.number("analysis", "sigma_max", a.chart.sigma_max);
    r.number("analysis", "omega_max", a.chart.omega_max);
    r.integer("analysis", "threads", a.chart.threads);
    r.number("analysis", "bode_omega_min", a.bode_omega_min);
    r.number("analysis", "bode_omega_max", a.bode_omega_max);
    r.integer("analysis", "bode_points", a.bode_points);
    r.list("analysis", "bode_omegas", a.bode_omegas);
    r.list("analysis", "bode_vx", a.bode_vx);
    double d;
    if (r.number("analysis", "delta1_star_deg", d)) a.delta_star(0) = deg(d);
    if (r.number("analysis", "delta2_star_deg", d)) a.delta_star(1) = deg(d);
    r.number("analysis", "force_v_min", a.force_v_min);
    r.number("analysis", "force_v_max", a.force_v_max);
    r.integer("analysis", "force_points", a.force_points);
    r.integer("analysis", "trials", a.trials);
    r.integer("analysis", "seed", a.seed);

    // output
    std::string dir;
    if (r.text("output", "directory", dir)) cfg.output.directory = dir;
    r.flag("output", "csv", cfg.output.csv);
    r.flag("output", "svg", cfg.output.svg);

    cfg.config_hash = fnv1a64(text);
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace tyrefield
