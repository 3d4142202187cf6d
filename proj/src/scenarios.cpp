#include "consensus/scenarios.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "consensus/game.hpp"

namespace consensus {

// --- initial density ---------------------------------------------------------

namespace {

double smoothstep01(double u) {
    u = std::clamp(u, 0.0, 1.0);
    return u * u * (3.0 - 2.0 * u);
}

double smoothstep01_d(double u) {
    if (u <= 0.0 || u >= 1.0) return 0.0;
    return 6.0 * u * (1.0 - u);
}

double edge_profile(double u, double a, double b, double r) {
    if (r <= 0.0) return (u >= a && u <= b) ? 1.0 : 0.0;
    return smoothstep01((u - a) / r) * smoothstep01((b - u) / r);
}

double edge_profile_d(double u, double a, double b, double r) {
    if (r <= 0.0) return 0.0;
    return smoothstep01_d((u - a) / r) / r * smoothstep01((b - u) / r) -
           smoothstep01((u - a) / r) * smoothstep01_d((b - u) / r) / r;
}

} // namespace

double InitialDensity::operator()(Vec2 p) const {
    return amplitude * edge_profile(p.x, box.xmin, box.xmax, ramp_x) *
           edge_profile(p.y, box.ymin, box.ymax, ramp_y);
}

Vec2 InitialDensity::gradient(Vec2 p) const {
    const double px = edge_profile(p.x, box.xmin, box.xmax, ramp_x);
    const double py = edge_profile(p.y, box.ymin, box.ymax, ramp_y);
    return {amplitude * edge_profile_d(p.x, box.xmin, box.xmax, ramp_x) * py,
            amplitude * px * edge_profile_d(p.y, box.ymin, box.ymax, ramp_y)};
}

double InitialDensity::l1_norm() const {
    const double ix = box.width() - ramp_x;
    const double iy = box.height() - ramp_y;
    return amplitude * ix * iy;
}

double InitialDensity::grad_linf() const {
    const double r = std::min(ramp_x > 0 ? ramp_x : 1e300, ramp_y > 0 ? ramp_y : 1e300);
    if (r >= 1e300) return std::numeric_limits<double>::infinity();
    return amplitude * 1.5 / r;
}

// --- scenario ----------------------------------------------------------------

int Scenario::epoch_count() const {
    if (T == 0.0) return 0;
    const long n = std::lround(T / dt_strategy);
    return static_cast<int>(std::max(1L, n));
}

InitialDensity Scenario::initial_density() const {
    const Grid2D g = grid();
    InitialDensity d;
    d.box = density.box;
    d.amplitude = density.amplitude;
    d.ramp_x = std::min(density.mollify_cells * g.dx, 0.5 * density.box.width());
    d.ramp_y = std::min(density.mollify_cells * g.dy, 0.5 * density.box.height());
    return d;
}

VelocityModel Scenario::velocity_model() const {
    VelocityModel m;
    m.kernels.reserve(agents.size());
    for (const auto& a : agents) m.kernels.push_back(a.kernel);
    return m;
}

std::vector<Vec2> Scenario::initial_positions() const {
    std::vector<Vec2> p;
    p.reserve(agents.size());
    for (const auto& a : agents) p.push_back(a.position);
    return p;
}

void Scenario::validate() const {
    if (!(x1 > x0) || !(y1 > y0)) throw ConfigError("domain: empty box");
    if (nx < 2 || ny < 2) throw ConfigError("grid: nx and ny must be >= 2");
    if (!(cfl > 0.0) || cfl > 1.0) throw ConfigError("grid.cfl: must be in (0, 1]");
    if (!(T >= 0.0)) throw ConfigError("time.T: must be >= 0");
    if (!(dt_strategy > 0.0)) throw ConfigError("time.dt_strategy: must be > 0");
    if (agents.empty()) throw ConfigError("agents: at least one agent required");
    const BBox& b = density.box;
    if (!(b.xmax > b.xmin) || !(b.ymax > b.ymin)) throw ConfigError("density.box: empty");
    if (!(density.amplitude > 0.0)) throw ConfigError("density.amplitude: must be > 0");
    if (density.mollify_cells < 0.0) throw ConfigError("density.mollify_cells: must be >= 0");
    if (b.xmin <= x0 || b.xmax >= x1 || b.ymin <= y0 || b.ymax >= y1)
        throw ConfigError("initial support not interior");
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const auto tag = "agents[" + std::to_string(i) + "]";
        const AgentSpec& a = agents[i];
        try {
            a.kernel.validate();
        } catch (const ConfigError& e) {
            throw ConfigError(tag + "." + e.what());
        }
        const double U = a.strategy.speed_cap;
        if (!(U >= 0.0)) throw ConfigError(tag + ".speed_cap: must be >= 0");
        if (const auto* c = std::get_if<ConstantSpec>(&a.strategy.variant)) {
            if (c->u.norm() > U * (1.0 + 1e-12))
                throw ConfigError(tag + ".strategy.u: exceeds speed cap");
        }
        if (const auto* s = std::get_if<ScriptedSpec>(&a.strategy.variant)) {
            double prev = -std::numeric_limits<double>::infinity();
            for (const auto& [t, w] : s->table) {
                if (t < prev) throw ConfigError(tag + ".strategy.table: times must increase");
                prev = t;
                if (w.norm() > U * (1.0 + 1e-12))
                    throw ConfigError(tag + ".strategy.table: control exceeds speed cap");
            }
        }
        if (const auto* bf = std::get_if<BruteForceSpec>(&a.strategy.variant)) {
            if (bf->n_directions < 4)
                throw ConfigError(tag + ".strategy.n_directions: must be >= 4");
        }
        if (a.psi_sign != 1.0 && a.psi_sign != -1.0)
            throw ConfigError(tag + ".psi_sign: must be +1 or -1");
    }
    for (double t : snapshot_times)
        if (t < 0.0 || t > T * (1.0 + 1e-12))
            throw ConfigError("output.snapshot_times: outside [0, T]");
}

// --- toml subset -------------------------------------------------------------

namespace {

struct TomlValue {
    enum class Kind { Number, String, Array, Table } kind = Kind::Number;
    double num = 0.0;
    std::string str;
    std::vector<TomlValue> arr;
    std::map<std::string, TomlValue> tbl;
};

struct TomlParser {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1;

    explicit TomlParser(const std::string& t) : text(t) {}

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("line " + std::to_string(line) + ": " + msg);
    }
    bool eof() const { return pos >= text.size(); }
    char peek() const { return text[pos]; }
    char get() {
        const char c = text[pos++];
        if (c == '\n') ++line;
        return c;
    }
    void skip_ws(bool newlines) {
        while (!eof()) {
            const char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') ++pos;
            } else if (c == ' ' || c == '\t' || c == '\r' || (newlines && c == '\n')) {
                get();
            } else {
                break;
            }
        }
    }
    std::string parse_key() {
        skip_ws(false);
        std::string k;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                          peek() == '-'))
            k += get();
        if (k.empty()) fail("expected key");
        return k;
    }
    TomlValue parse_value() {
        skip_ws(false);
        if (eof()) fail("expected value");
        const char c = peek();
        if (c == '"') {
            get();
            TomlValue v;
            v.kind = TomlValue::Kind::String;
            while (!eof() && peek() != '"') v.str += get();
            if (eof()) fail("unterminated string");
            get();
            return v;
        }
        if (c == '[') {
            get();
            TomlValue v;
            v.kind = TomlValue::Kind::Array;
            skip_ws(true);
            if (!eof() && peek() == ']') {
                get();
                return v;
            }
            while (true) {
                v.arr.push_back(parse_value());
                skip_ws(true);
                if (eof()) fail("unterminated array");
                const char d = get();
                if (d == ']') break;
                if (d != ',') fail("expected ',' or ']' in array");
                skip_ws(true);
                if (!eof() && peek() == ']') { // trailing comma
                    get();
                    break;
                }
            }
            return v;
        }
        if (c == '{') {
            get();
            TomlValue v;
            v.kind = TomlValue::Kind::Table;
            skip_ws(false);
            if (!eof() && peek() == '}') {
                get();
                return v;
            }
            while (true) {
                const std::string key = parse_key();
                skip_ws(false);
                if (eof() || get() != '=') fail("expected '=' in inline table");
                v.tbl[key] = parse_value();
                skip_ws(false);
                if (eof()) fail("unterminated inline table");
                const char d = get();
                if (d == '}') break;
                if (d != ',') fail("expected ',' or '}' in inline table");
            }
            return v;
        }
        // number
        std::size_t start = pos;
        while (!eof() && (std::isdigit(static_cast<unsigned char>(peek())) || peek() == '+' ||
                          peek() == '-' || peek() == '.' || peek() == 'e' || peek() == 'E'))
            ++pos;
        if (pos == start) fail("malformed value");
        TomlValue v;
        const char* first = text.data() + start;
        const char* last = text.data() + pos;
        auto [p, ec] = std::from_chars(first, last, v.num);
        if (ec != std::errc() || p != last) fail("malformed number");
        return v;
    }
};

// document structure: named top-level tables and arrays-of-tables
struct TomlDoc {
    std::map<std::string, TomlValue> tables;
    std::map<std::string, std::vector<TomlValue>> table_arrays;
};

TomlDoc parse_toml(const std::string& text) {
    TomlDoc doc;
    TomlParser p(text);
    TomlValue* current = nullptr;
    std::string current_name;
    while (true) {
        p.skip_ws(true);
        if (p.eof()) break;
        if (p.peek() == '[') {
            p.get();
            const bool is_array = !p.eof() && p.peek() == '[';
            if (is_array) p.get();
            const std::string name = p.parse_key();
            p.skip_ws(false);
            if (p.eof() || p.get() != ']') p.fail("expected ']' after table name");
            if (is_array) {
                if (p.eof() || p.get() != ']') p.fail("expected ']]' after table array name");
                doc.table_arrays[name].push_back(TomlValue{TomlValue::Kind::Table});
                current = &doc.table_arrays[name].back();
            } else {
                if (doc.tables.count(name)) p.fail("duplicate table [" + name + "]");
                current = &doc.tables[name];
                current->kind = TomlValue::Kind::Table;
            }
            current_name = name;
            continue;
        }
        const std::string key = p.parse_key();
        p.skip_ws(false);
        if (p.eof() || p.get() != '=') p.fail("expected '=' after key '" + key + "'");
        TomlValue v = p.parse_value();
        if (!current) p.fail("key '" + key + "' outside any [section]");
        if (current->tbl.count(key))
            p.fail("duplicate key '" + current_name + "." + key + "'");
        current->tbl[key] = std::move(v);
    }
    return doc;
}

// schema helpers: every consumed key is erased; leftovers are unknown keys
double take_number(std::map<std::string, TomlValue>& t, const std::string& path,
                   const std::string& key) {
    auto it = t.find(key);
    if (it == t.end()) throw ConfigError(path + "." + key + ": missing required key");
    if (it->second.kind != TomlValue::Kind::Number)
        throw ConfigError(path + "." + key + ": expected a number");
    const double v = it->second.num;
    t.erase(it);
    return v;
}

double take_number_or(std::map<std::string, TomlValue>& t, const std::string& path,
                      const std::string& key, double fallback) {
    auto it = t.find(key);
    if (it == t.end()) return fallback;
    if (it->second.kind != TomlValue::Kind::Number)
        throw ConfigError(path + "." + key + ": expected a number");
    const double v = it->second.num;
    t.erase(it);
    return v;
}

std::string take_string(std::map<std::string, TomlValue>& t, const std::string& path,
                        const std::string& key) {
    auto it = t.find(key);
    if (it == t.end()) throw ConfigError(path + "." + key + ": missing required key");
    if (it->second.kind != TomlValue::Kind::String)
        throw ConfigError(path + "." + key + ": expected a string");
    std::string v = it->second.str;
    t.erase(it);
    return v;
}

std::vector<double> number_array(const TomlValue& v, const std::string& path) {
    if (v.kind != TomlValue::Kind::Array)
        throw ConfigError(path + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.arr.size());
    for (const auto& e : v.arr) {
        if (e.kind != TomlValue::Kind::Number)
            throw ConfigError(path + ": expected an array of numbers");
        out.push_back(e.num);
    }
    return out;
}

Vec2 take_vec2(std::map<std::string, TomlValue>& t, const std::string& path,
               const std::string& key) {
    auto it = t.find(key);
    if (it == t.end()) throw ConfigError(path + "." + key + ": missing required key");
    const auto nums = number_array(it->second, path + "." + key);
    if (nums.size() != 2) throw ConfigError(path + "." + key + ": expected [x, y]");
    t.erase(it);
    return {nums[0], nums[1]};
}

void reject_unknown(const std::map<std::string, TomlValue>& t, const std::string& path) {
    if (!t.empty()) throw ConfigError(path + "." + t.begin()->first + ": unknown key");
}

RadialKernel parse_kernel(TomlValue v, const std::string& path) {
    if (v.kind != TomlValue::Kind::Table)
        throw ConfigError(path + ": expected an inline table");
    RadialKernel k;
    k.sign = take_number(v.tbl, path, "sign");
    k.decay_length = take_number(v.tbl, path, "decay_length");
    const std::string form = take_string(v.tbl, path, "form");
    if (form == "unit")
        k.form = KernelForm::UnitDirection;
    else if (form == "linear")
        k.form = KernelForm::Linear;
    else
        throw ConfigError(path + ".form: expected \"unit\" or \"linear\"");
    const double eps_default = k.form == KernelForm::UnitDirection ? 1e-3 * k.decay_length : 0.0;
    k.epsilon = take_number_or(v.tbl, path, "epsilon", eps_default);
    reject_unknown(v.tbl, path);
    k.validate();
    return k;
}

StrategySpec parse_strategy(TomlValue v, const std::string& path, double speed_cap) {
    if (v.kind != TomlValue::Kind::Table)
        throw ConfigError(path + ": expected an inline table");
    StrategySpec s;
    s.speed_cap = speed_cap;
    const std::string variant = take_string(v.tbl, path, "variant");
    if (variant == "greedy") {
        GreedySpec g;
        g.dt_horizon = take_number_or(v.tbl, path, "dt", 0.0);
        g.denom_tol = take_number_or(v.tbl, path, "denom_tol", -1.0);
        s.variant = g;
    } else if (variant == "constant") {
        ConstantSpec c;
        c.u = take_vec2(v.tbl, path, "u");
        s.variant = c;
    } else if (variant == "scripted") {
        auto it = v.tbl.find("table");
        if (it == v.tbl.end()) throw ConfigError(path + ".table: missing required key");
        ScriptedSpec sc;
        if (it->second.kind != TomlValue::Kind::Array)
            throw ConfigError(path + ".table: expected [[t, wx, wy], ...]");
        for (const auto& row : it->second.arr) {
            const auto nums = number_array(row, path + ".table");
            if (nums.size() != 3) throw ConfigError(path + ".table: expected [t, wx, wy] rows");
            sc.table.emplace_back(nums[0], Vec2{nums[1], nums[2]});
        }
        v.tbl.erase(it);
        s.variant = sc;
    } else if (variant == "brute-force") {
        BruteForceSpec b;
        b.n_directions = static_cast<int>(take_number_or(v.tbl, path, "n_directions", 64));
        b.dt_horizon = take_number_or(v.tbl, path, "dt", 0.0);
        s.variant = b;
    } else {
        throw ConfigError(path + ".variant: unknown strategy variant \"" + variant + "\"");
    }
    reject_unknown(v.tbl, path);
    return s;
}

} // namespace

Scenario load_scenario_text(const std::string& text) {
    TomlDoc doc = parse_toml(text);
    Scenario s;

    auto take_table = [&](const std::string& name, bool required) {
        auto it = doc.tables.find(name);
        if (it == doc.tables.end()) {
            if (required) throw ConfigError("[" + name + "]: missing required section");
            return std::map<std::string, TomlValue>{};
        }
        auto t = std::move(it->second.tbl);
        doc.tables.erase(it);
        return t;
    };

    auto domain = take_table("domain", true);
    s.x0 = take_number(domain, "domain", "x0");
    s.x1 = take_number(domain, "domain", "x1");
    s.y0 = take_number(domain, "domain", "y0");
    s.y1 = take_number(domain, "domain", "y1");
    reject_unknown(domain, "domain");

    auto grid = take_table("grid", false);
    s.nx = static_cast<int>(take_number_or(grid, "grid", "nx", 400));
    s.ny = static_cast<int>(take_number_or(grid, "grid", "ny", 400));
    s.cfl = take_number_or(grid, "grid", "cfl", 0.45);
    reject_unknown(grid, "grid");

    auto time = take_table("time", true);
    s.T = take_number(time, "time", "T");
    s.dt_strategy = take_number(time, "time", "dt_strategy");
    reject_unknown(time, "time");

    auto density = take_table("density", true);
    {
        auto it = density.find("box");
        if (it == density.end()) throw ConfigError("density.box: missing required key");
        const auto nums = number_array(it->second, "density.box");
        if (nums.size() != 4) throw ConfigError("density.box: expected [ax, bx, ay, by]");
        s.density.box = BBox{nums[0], nums[1], nums[2], nums[3]};
        density.erase(it);
    }
    s.density.amplitude = take_number_or(density, "density", "amplitude", 1.0);
    s.density.mollify_cells = take_number_or(density, "density", "mollify_cells", 0.0);
    reject_unknown(density, "density");

    auto agents_it = doc.table_arrays.find("agents");
    if (agents_it == doc.table_arrays.end() || agents_it->second.empty())
        throw ConfigError("[[agents]]: at least one agent required");
    for (std::size_t i = 0; i < agents_it->second.size(); ++i) {
        const std::string path = "agents[" + std::to_string(i) + "]";
        auto t = std::move(agents_it->second[i].tbl);
        AgentSpec a;
        a.position = take_vec2(t, path, "position");
        {
            auto it = t.find("kernel");
            if (it == t.end()) throw ConfigError(path + ".kernel: missing required key");
            a.kernel = parse_kernel(std::move(it->second), path + ".kernel");
            t.erase(it);
        }
        const double cap = take_number(t, path, "speed_cap");
        {
            auto it = t.find("strategy");
            if (it == t.end()) throw ConfigError(path + ".strategy: missing required key");
            a.strategy = parse_strategy(std::move(it->second), path + ".strategy", cap);
            t.erase(it);
        }
        if (t.count("target")) a.target = take_vec2(t, path, "target");
        a.psi_sign = take_number_or(t, path, "psi_sign", 1.0);
        reject_unknown(t, path);
        s.agents.push_back(std::move(a));
    }
    doc.table_arrays.erase(agents_it);

    auto output = take_table("output", false);
    if (auto it = output.find("snapshot_times"); it != output.end()) {
        s.snapshot_times = number_array(it->second, "output.snapshot_times");
        output.erase(it);
    }
    reject_unknown(output, "output");

    if (!doc.tables.empty())
        throw ConfigError("[" + doc.tables.begin()->first + "]: unknown section");
    if (!doc.table_arrays.empty())
        throw ConfigError("[[" + doc.table_arrays.begin()->first + "]]: unknown section");

    s.validate();
    return s;
}

Scenario load_scenario_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open scenario file: " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return load_scenario_text(ss.str());
}

// --- serialization -----------------------------------------------------------

namespace {

std::string fmt(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, p);
}

} // namespace

std::string scenario_to_toml(const Scenario& s) {
    std::string o;
    o += "[domain]\nx0 = " + fmt(s.x0) + "\nx1 = " + fmt(s.x1) + "\ny0 = " + fmt(s.y0) +
         "\ny1 = " + fmt(s.y1) + "\n\n";
    o += "[grid]\nnx = " + fmt(s.nx) + "\nny = " + fmt(s.ny) + "\ncfl = " + fmt(s.cfl) + "\n\n";
    o += "[time]\nT = " + fmt(s.T) + "\ndt_strategy = " + fmt(s.dt_strategy) + "\n\n";
    o += "[density]\nbox = [" + fmt(s.density.box.xmin) + ", " + fmt(s.density.box.xmax) +
         ", " + fmt(s.density.box.ymin) + ", " + fmt(s.density.box.ymax) + "]\n";
    o += "amplitude = " + fmt(s.density.amplitude) + "\n";
    o += "mollify_cells = " + fmt(s.density.mollify_cells) + "\n";
    for (const auto& a : s.agents) {
        o += "\n[[agents]]\n";
        o += "position = [" + fmt(a.position.x) + ", " + fmt(a.position.y) + "]\n";
        o += "kernel = {sign = " + fmt(a.kernel.sign) +
             ", decay_length = " + fmt(a.kernel.decay_length) + ", form = \"" +
             (a.kernel.form == KernelForm::UnitDirection ? "unit" : "linear") +
             "\", epsilon = " + fmt(a.kernel.epsilon) + "}\n";
        o += "speed_cap = " + fmt(a.strategy.speed_cap) + "\n";
        if (const auto* g = std::get_if<GreedySpec>(&a.strategy.variant)) {
            o += "strategy = {variant = \"greedy\"";
            if (g->dt_horizon > 0.0) o += ", dt = " + fmt(g->dt_horizon);
            if (g->denom_tol >= 0.0) o += ", denom_tol = " + fmt(g->denom_tol);
            o += "}\n";
        } else if (const auto* c = std::get_if<ConstantSpec>(&a.strategy.variant)) {
            o += "strategy = {variant = \"constant\", u = [" + fmt(c->u.x) + ", " +
                 fmt(c->u.y) + "]}\n";
        } else if (const auto* sc = std::get_if<ScriptedSpec>(&a.strategy.variant)) {
            o += "strategy = {variant = \"scripted\", table = [";
            for (std::size_t r = 0; r < sc->table.size(); ++r) {
                if (r) o += ", ";
                o += "[" + fmt(sc->table[r].first) + ", " + fmt(sc->table[r].second.x) + ", " +
                     fmt(sc->table[r].second.y) + "]";
            }
            o += "]}\n";
        } else {
            const auto& b = std::get<BruteForceSpec>(a.strategy.variant);
            o += "strategy = {variant = \"brute-force\", n_directions = " +
                 fmt(b.n_directions);
            if (b.dt_horizon > 0.0) o += ", dt = " + fmt(b.dt_horizon);
            o += "}\n";
        }
        if (a.target) o += "target = [" + fmt(a.target->x) + ", " + fmt(a.target->y) + "]\n";
        o += "psi_sign = " + fmt(a.psi_sign) + "\n";
    }
    if (!s.snapshot_times.empty()) {
        o += "\n[output]\nsnapshot_times = [";
        for (std::size_t i = 0; i < s.snapshot_times.size(); ++i) {
            if (i) o += ", ";
            o += fmt(s.snapshot_times[i]);
        }
        o += "]\n";
    }
    return o;
}

// --- presets -------------------------------------------------------------

namespace {

AgentSpec make_agent(Vec2 pos, double sign, double L, KernelForm form, double U,
                     std::variant<GreedySpec, ConstantSpec, ScriptedSpec, BruteForceSpec> variant,
                     Vec2 target, double psi_sign) {
    AgentSpec a;
    a.position = pos;
    a.kernel.sign = sign;
    a.kernel.decay_length = L;
    a.kernel.form = form;
    a.kernel.epsilon = form == KernelForm::UnitDirection ? 1e-3 * L : 0.0;
    a.strategy.variant = variant;
    a.strategy.speed_cap = U;
    a.target = target;
    a.psi_sign = psi_sign;
    return a;
}

} // namespace

const std::vector<PresetInfo>& preset_catalog() {
    static const std::vector<PresetInfo> catalog = {
        {"single-agent",
         "one attractive leader (U = 3/2) herds a unit box toward target (1,8); T = 7, "
         "dt = 1/100"},
        {"two-attractive",
         "k = 2 duel: P1 runs a straight script toward (1,9), P2 plays greedy toward "
         "(1,1); T = 10"},
        {"two-attractive-both-greedy",
         "k = 2 symmetric duel, both greedy; mirror-symmetric setup breaks even"},
        {"six-repulsive",
         "k = 6 repulsive herders, common target (5,5), U = 1, T = 5"},
        {"attr-rep-coop",
         "k = 3 (repulsive, attractive, repulsive), shared goal: push the crowd to "
         "(9,5); T = 5"},
        {"attr-rep-steal",
         "same as attr-rep-coop but the repulsive pair maximizes the attractor's cost "
         "(psi negated)"},
    };
    return catalog;
}

Scenario preset(const std::string& name) {
    Scenario s;
    s.x0 = 0.0;
    s.x1 = 10.0;
    s.y0 = 0.0;
    s.y1 = 10.0;
    s.nx = s.ny = 400;
    s.cfl = 0.45;
    s.dt_strategy = 0.01;

    if (name == "single-agent") {
        // the published account leaves the horizon unstated; T = 7 reproduces
        // the published terminal cost at desk resolution
        s.T = 7.0;
        s.density.box = {6.0, 8.0, 2.0, 8.0};
        s.agents.push_back(make_agent({3.0, 2.0}, +1.0, 10.0, KernelForm::UnitDirection,
                                      1.5, GreedySpec{}, {1.0, 8.0}, +1.0));
        return s;
    }
    if (name == "two-attractive" || name == "two-attractive-both-greedy") {
        s.T = 10.0;
        s.density.box = {7.0, 9.0, 3.0, 7.0};
        const bool both_greedy = name == "two-attractive-both-greedy";
        if (both_greedy)
            s.agents.push_back(make_agent({8.0, 5.0}, +1.0, 5.0, KernelForm::Linear, 1.5,
                                          GreedySpec{}, {1.0, 9.0}, +1.0));
        else
            s.agents.push_back(make_agent({8.0, 5.0}, +1.0, 5.0, KernelForm::Linear, 1.5,
                                          ConstantSpec{{-7.0 / 10.0, 2.0 / 5.0}}, {1.0, 9.0},
                                          +1.0));
        s.agents.push_back(make_agent({8.0, 5.0}, +1.0, 5.0, KernelForm::Linear, 1.5,
                                      GreedySpec{}, {1.0, 1.0}, +1.0));
        return s;
    }
    if (name == "six-repulsive") {
        s.T = 5.0;
        s.density.box = {6.0, 8.0, 3.0, 7.0};
        const Vec2 starts[6] = {{1, 2}, {1, 4}, {1, 6}, {1, 8}, {9, 4}, {9, 6}};
        for (const Vec2& p : starts)
            s.agents.push_back(make_agent(p, -1.0, 5.0, KernelForm::UnitDirection, 1.0,
                                          GreedySpec{}, {5.0, 5.0}, +1.0));
        return s;
    }
    if (name == "attr-rep-coop" || name == "attr-rep-steal") {
        s.T = 5.0;
        s.density.box = {1.0, 2.0, 3.0, 7.0};
        const bool steal = name == "attr-rep-steal";
        const double outer_psi = steal ? -1.0 : +1.0;
        s.agents.push_back(make_agent({1.0, 1.0}, -1.0, 5.0, KernelForm::UnitDirection, 1.0,
                                      GreedySpec{}, {9.0, 5.0}, outer_psi));
        s.agents.push_back(make_agent({1.0, 5.0}, +1.0, 5.0, KernelForm::UnitDirection, 1.0,
                                      GreedySpec{}, {9.0, 5.0}, +1.0));
        s.agents.push_back(make_agent({1.0, 9.0}, -1.0, 5.0, KernelForm::UnitDirection, 1.0,
                                      GreedySpec{}, {9.0, 5.0}, outer_psi));
        return s;
    }
    throw ConfigError("unknown preset: " + name);
}

// --- outputs -------------------------------------------------------------

std::vector<std::string> write_outputs(const GameTrace& trace, const Scenario& scenario,
                                       const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory: " + out_dir);

    std::vector<std::string> written;
    using json = nlohmann::ordered_json;

    json summary;
    summary["epochs"] = trace.epochs();
    summary["agents"] = trace.agent_count();
    json costs = json::object();
    for (int i = 0; i < trace.agent_count(); ++i)
        costs["J_" + std::to_string(i + 1)] = trace.final_costs[i];
    summary["final_costs"] = costs;
    summary["times"] = trace.times;
    {
        json pos = json::array();
        for (const auto& snap : trace.positions) {
            json row = json::array();
            for (const Vec2& p : snap) row.push_back({p.x, p.y});
            pos.push_back(std::move(row));
        }
        summary["positions"] = std::move(pos);
    }
    {
        json ctl = json::array();
        for (const auto& snap : trace.controls) {
            json row = json::array();
            for (const Vec2& p : snap) row.push_back({p.x, p.y});
            ctl.push_back(std::move(row));
        }
        summary["controls"] = std::move(ctl);
    }
    summary["running_costs"] = trace.running_costs;
    summary["mass"] = trace.mass;

    const std::string summary_path = (fs::path(out_dir) / "summary.json").string();
    {
        std::ofstream os(summary_path, std::ios::binary);
        if (!os) throw ConfigError("cannot open for writing: " + summary_path);
        os << summary.dump(2) << '\n';
        if (!os) throw ConfigError("write failed: " + summary_path);
    }
    written.push_back(summary_path);

    const std::string traj_path = (fs::path(out_dir) / "trajectory.csv").string();
    {
        std::string o = "time";
        for (int i = 0; i < trace.agent_count(); ++i) {
            o += ",P_" + std::to_string(i + 1) + "x";
            o += ",P_" + std::to_string(i + 1) + "y";
        }
        o += '\n';
        for (std::size_t r = 0; r < trace.times.size(); ++r) {
            o += fmt(trace.times[r]);
            for (const Vec2& p : trace.positions[r]) {
                o += ',' + fmt(p.x);
                o += ',' + fmt(p.y);
            }
            o += '\n';
        }
        std::ofstream os(traj_path, std::ios::binary);
        if (!os) throw ConfigError("cannot open for writing: " + traj_path);
        os.write(o.data(), static_cast<std::streamsize>(o.size()));
        if (!os) throw ConfigError("write failed: " + traj_path);
    }
    written.push_back(traj_path);

    for (const auto& [t, field] : trace.snapshots) {
        const std::string base = "rho_t" + fmt(t);
        const std::string csv = (fs::path(out_dir) / (base + ".csv")).string();
        const std::string pgm = (fs::path(out_dir) / (base + ".pgm")).string();
        write_field_csv(csv, field);
        write_field_pgm(pgm, field);
        written.push_back(csv);
        written.push_back(pgm);
    }
    (void)scenario;
    return written;
}

} // namespace consensus
