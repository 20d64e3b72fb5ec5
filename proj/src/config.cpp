#include "vvlab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "vvlab/error.hpp"
#include "vvlab/fixtures.hpp"

namespace vvlab {

namespace {

std::string trim(std::string_view s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::string lower(std::string s)
{
    for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
}

bool valid_name(const std::string& s)
{
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(),
                       [](char ch) { return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_'; });
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(trim(cur));
    return out;
}

const std::map<std::string, std::set<std::string>>& schema()
{
    static const std::map<std::string, std::set<std::string>> s = {
        {"run", {"fixture"}},
        {"grid", {"dim", "n", "period"}},
        {"field", {"family", "params", "lyapunov", "drift", "bx", "by", "section_axis", "n_sections"}},
        {"coefficients", {"c", "a", "f", "phi"}},
        {"sweep", {"epsilons", "scheme", "allow_central"}},
        {"analysis",
         {"delta", "tube_half_width", "extra_half_widths", "n_stations", "weight", "tube_radius", "dt", "tail_tol",
          "transport_epsilons", "lambda_lo", "lambda_hi", "n_lambda", "u0", "picard_tol", "picard_dt",
          "picard_tail_tol", "osc_points", "osc_t_max", "osc_window", "lyapunov_tol", "lyapunov_delta"}},
        {"output", {"dir", "formats"}},
    };
    return s;
}

[[noreturn]] void fail(const ConfigValue* v, const std::string& section, const std::string& key,
                       const std::string& msg)
{
    std::ostringstream os;
    if (v) os << v->source << ":" << v->line << ": ";
    os << section << "." << key << ": " << msg;
    throw PreconditionError(os.str());
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& source)
{
    Config cfg;
    std::string section;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        auto where = [&] { return source + ":" + std::to_string(line_no) + ": "; };
        if (line.front() == '[') {
            if (line.back() != ']') throw PreconditionError(where() + "unterminated section header");
            section = lower(trim(std::string_view(line).substr(1, line.size() - 2)));
            if (!valid_name(section)) throw PreconditionError(where() + "invalid section name '" + section + "'");
            cfg.sections_[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) throw PreconditionError(where() + "expected 'key = value'");
        if (section.empty()) throw PreconditionError(where() + "key outside of any section");
        const std::string key = lower(trim(std::string_view(line).substr(0, eq)));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (!valid_name(key)) throw PreconditionError(where() + "invalid key '" + key + "'");
        // Trailing comments need whitespace before the marker.
        for (const char* marker : {" #", " ;", "\t#", "\t;"}) {
            const std::size_t c = value.find(marker);
            if (c != std::string::npos) value = trim(std::string_view(value).substr(0, c));
        }
        if (cfg.has(section, key)) throw PreconditionError(where() + "duplicate key " + section + "." + key);
        cfg.sections_[section][key] = {value, source, line_no};
    }
    return cfg;
}

Config Config::load(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PreconditionError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

void Config::set_override(const std::string& assignment)
{
    const std::size_t eq = assignment.find('=');
    const std::string lhs = eq == std::string::npos ? assignment : assignment.substr(0, eq);
    const std::size_t dot = lhs.find('.');
    if (eq == std::string::npos || dot == std::string::npos)
        throw PreconditionError("--set expects section.key=value, got '" + assignment + "'");
    const std::string section = lower(trim(lhs.substr(0, dot)));
    const std::string key = lower(trim(lhs.substr(dot + 1)));
    if (!valid_name(section) || !valid_name(key))
        throw PreconditionError("--set expects section.key=value, got '" + assignment + "'");
    set(section, key, trim(assignment.substr(eq + 1)), "--set", 0);
}

void Config::set(const std::string& section, const std::string& key, const std::string& value,
                 const std::string& source, int line)
{
    sections_[section][key] = {value, source, line};
}

void Config::erase(const std::string& section, const std::string& key)
{
    const auto it = sections_.find(section);
    if (it == sections_.end()) return;
    it->second.erase(key);
    if (it->second.empty()) sections_.erase(it);
}

void Config::inherit(const Config& base)
{
    for (const auto& [sec, keys] : base.sections_)
        for (const auto& [key, val] : keys)
            if (!has(sec, key)) sections_[sec][key] = val;
}

bool Config::has(const std::string& section, const std::string& key) const
{
    return find(section, key) != nullptr;
}

const ConfigValue* Config::find(const std::string& section, const std::string& key) const
{
    const auto s = sections_.find(section);
    if (s == sections_.end()) return nullptr;
    const auto k = s->second.find(key);
    return k == s->second.end() ? nullptr : &k->second;
}

std::string Config::echo() const
{
    std::ostringstream os;
    bool first = true;
    for (const auto& [sec, keys] : sections_) {
        if (keys.empty()) continue;
        if (!first) os << "\n";
        first = false;
        os << "[" << sec << "]\n";
        for (const auto& [key, val] : keys) os << key << " = " << val.text << "\n";
    }
    return os.str();
}

double parse_number(const std::string& text, const ParamMap& params)
{
    const Expr e = Expr::parse(text, params);
    if (!e.is_constant()) throw PreconditionError("expected a constant, got '" + text + "'");
    return e.evaluate(0.0, 0.0);
}

std::vector<double> parse_number_list(const std::string& text, const ParamMap& params)
{
    std::vector<double> out;
    if (trim(text).empty()) return out;
    for (const auto& item : split(text, ',')) out.push_back(parse_number(item, params));
    return out;
}

bool ExperimentConfig::wants(const std::string& format) const
{
    return std::find(formats.begin(), formats.end(), format) != formats.end();
}

ExperimentConfig build_experiment(Config cfg)
{
    ExperimentConfig ex;
    if (const ConfigValue* fx = cfg.find("run", "fixture")) {
        const Fixture& fixture = find_fixture(fx->text);
        Config preset = Config::parse(fixture.preset, "fixture:" + fixture.name);
        // a and c name the same coefficient; the caller's spelling wins.
        if (cfg.has("coefficients", "a") || cfg.has("coefficients", "c")) {
            preset.erase("coefficients", "a");
            preset.erase("coefficients", "c");
        }
        cfg.inherit(preset);
        ex.fixture = fixture.name;
    }
    for (const auto& [sec, keys] : cfg.sections()) {
        const auto s = schema().find(sec);
        for (const auto& [key, val] : keys) {
            if (s == schema().end()) fail(&val, sec, key, "unknown section [" + sec + "]");
            if (!s->second.count(key)) fail(&val, sec, key, "unknown key");
        }
    }

    auto get = [&](const std::string& sec, const std::string& key) { return cfg.find(sec, key); };
    auto guarded = [&](const std::string& sec, const std::string& key, auto&& fn) {
        const ConfigValue* v = get(sec, key);
        try {
            return fn(v);
        } catch (const PreconditionError& e) {
            fail(v, sec, key, e.what());
        }
    };
    auto number = [&](const std::string& sec, const std::string& key, double def) {
        return guarded(sec, key, [&](const ConfigValue* v) { return v ? parse_number(v->text, ex.params) : def; });
    };
    auto integer = [&](const std::string& sec, const std::string& key, int def) {
        const double d = number(sec, key, def);
        if (d != std::floor(d) || std::abs(d) > 1e9) fail(get(sec, key), sec, key, "expected an integer");
        return static_cast<int>(d);
    };
    auto text = [&](const std::string& sec, const std::string& key, const std::string& def) {
        const ConfigValue* v = get(sec, key);
        return v ? v->text : def;
    };
    auto list = [&](const std::string& sec, const std::string& key) {
        return guarded(sec, key, [&](const ConfigValue* v) {
            return v ? parse_number_list(v->text, ex.params) : std::vector<double>{};
        });
    };
    auto boolean = [&](const std::string& sec, const std::string& key, bool def) {
        const ConfigValue* v = get(sec, key);
        if (!v) return def;
        const std::string t = lower(v->text);
        if (t == "true" || t == "yes" || t == "1" || t == "on") return true;
        if (t == "false" || t == "no" || t == "0" || t == "off") return false;
        fail(v, sec, key, "expected a boolean");
    };
    auto function = [&](const std::string& sec, const std::string& key) {
        return guarded(sec, key, [&](const ConfigValue* v) { return ScalarFunction::parse(v->text, ex.params); });
    };

    // Parameters first: every expression below may refer to them.
    if (const ConfigValue* v = get("field", "params")) {
        for (const auto& item : split(v->text, ',')) {
            if (item.empty()) continue;
            const std::size_t eq = item.find('=');
            if (eq == std::string::npos) fail(v, "field", "params", "expected name=value pairs");
            const std::string name = trim(item.substr(0, eq));
            if (!valid_name(name) || std::isdigit(static_cast<unsigned char>(name[0])))
                fail(v, "field", "params", "invalid parameter name '" + name + "'");
            if (name == "x" || name == "y" || name == "lambda" || name == "pi")
                fail(v, "field", "params", "parameter name '" + name + "' is reserved");
            try {
                ex.params[name] = parse_number(item.substr(eq + 1), ex.params);
            } catch (const PreconditionError& e) {
                fail(v, "field", "params", e.what());
            }
        }
    }

    const int dim = integer("grid", "dim", 1);
    const int n = integer("grid", "n", 128);
    const double period = number("grid", "period", 2.0 * std::numbers::pi);
    if (dim != 1 && dim != 2) fail(get("grid", "dim"), "grid", "dim", "must be 1 or 2");
    if (std::abs(period - 2.0 * std::numbers::pi) > 1e-12)
        fail(get("grid", "period"), "grid", "period", "the field families are 2*pi-periodic");
    ex.grid = guarded("grid", "n", [&](const ConfigValue*) { return build_grid(dim, n, period); });

    if (cfg.has("coefficients", "c") && cfg.has("coefficients", "a"))
        fail(get("coefficients", "a"), "coefficients", "a", "a is an alias of c; give only one");
    ex.c = cfg.has("coefficients", "a") ? function("coefficients", "a")
           : cfg.has("coefficients", "c") ? function("coefficients", "c")
                                          : ScalarFunction(Expr::constant(1.0));
    ex.f = cfg.has("coefficients", "f") ? function("coefficients", "f") : ScalarFunction(Expr::constant(1.0));
    if (cfg.has("coefficients", "phi")) ex.phi = function("coefficients", "phi");
    for (const char* key : {"c", "a", "f", "phi"}) {
        const ConfigValue* v = get("coefficients", key);
        if (!v) continue;
        const Expr e = Expr::parse(v->text, ex.params);
        if (dim == 1 && e.depends_on(Var::Y)) fail(v, "coefficients", key, "depends on y on a one-dimensional grid");
        if (std::string(key) == "phi" && e.depends_on(Var::Lambda))
            fail(v, "coefficients", key, "must not depend on lambda");
    }

    ex.family = text("field", "family", "zero");
    const ConfigValue* fam = get("field", "family");
    auto need_dim = [&](int d) {
        if (dim != d) fail(fam, "field", "family", ex.family + " needs grid.dim = " + std::to_string(d));
    };
    auto expr = [&](const std::string& sec, const std::string& key) {
        return guarded(sec, key, [&](const ConfigValue* v) {
            if (!v) throw PreconditionError("required by field.family = " + ex.family);
            return Expr::parse(v->text, ex.params);
        });
    };
    if (ex.family == "zero") {
        ex.omega = FieldSpec::zero(dim);
    } else if (ex.family == "circle_sine") {
        need_dim(1);
        ex.omega = FieldSpec::circle_sine();
    } else if (ex.family == "torus_morse") {
        need_dim(2);
        ex.omega = FieldSpec::torus_morse();
    } else if (ex.family == "torus_cycles") {
        need_dim(2);
        ex.omega = FieldSpec::torus_cycles();
    } else if (ex.family == "shifted_torus_cycles") {
        need_dim(2);
        if (!ex.params.count("kappa")) fail(fam, "field", "params", "shifted_torus_cycles needs kappa");
        ex.omega = FieldSpec::shifted_torus_cycles(ex.params.at("kappa"));
    } else if (ex.family == "gradient") {
        if (!ex.phi) fail(fam, "field", "family", "gradient needs coefficients.phi");
        ex.omega = FieldSpec::gradient(ex.phi->expr(), dim);
    } else if (ex.family == "expression") {
        const Expr bx = expr("field", "bx");
        const Expr by = dim == 2 ? expr("field", "by") : Expr{};
        if (dim == 1 && cfg.has("field", "by")) fail(get("field", "by"), "field", "by", "unused on a one-dimensional grid");
        ex.omega = FieldSpec::expression(dim, bx, by);
    } else {
        fail(fam, "field", "family",
             "unknown family '" + ex.family +
                 "' (zero, circle_sine, torus_morse, torus_cycles, shifted_torus_cycles, gradient, expression)");
    }
    ex.field = ex.omega;
    if (cfg.has("field", "lyapunov")) ex.lyapunov = function("field", "lyapunov");
    const std::string drift = text("field", "drift", "omega");
    if (drift == "shifted") {
        if (!ex.lyapunov) fail(get("field", "drift"), "field", "drift", "shifted drift needs field.lyapunov");
        ex.field = FieldSpec::lyapunov_shift(ex.omega, ex.lyapunov->expr());
    } else if (drift != "omega") {
        fail(get("field", "drift"), "field", "drift", "expected omega or shifted");
    }
    ex.section_axis = integer("field", "section_axis", 0);
    ex.n_sections = integer("field", "n_sections", 64);
    if (ex.section_axis < 0 || ex.section_axis >= dim)
        fail(get("field", "section_axis"), "field", "section_axis", "must name a grid axis");
    if (ex.n_sections < 4) fail(get("field", "n_sections"), "field", "n_sections", "must be at least 4");

    ex.epsilons = list("sweep", "epsilons");
    for (std::size_t k = 0; k < ex.epsilons.size(); ++k) {
        if (!(ex.epsilons[k] > 0.0)) fail(get("sweep", "epsilons"), "sweep", "epsilons", "values must be positive");
        if (k > 0 && !(ex.epsilons[k] < ex.epsilons[k - 1]))
            fail(get("sweep", "epsilons"), "sweep", "epsilons", "values must be strictly decreasing");
    }
    ex.scheme = guarded("sweep", "scheme", [&](const ConfigValue* v) {
        return v ? scheme_from_string(v->text) : Scheme::ExponentialFitted;
    });
    ex.allow_central = boolean("sweep", "allow_central", false);

    ex.delta = number("analysis", "delta", ex.delta);
    ex.tube_half_width = number("analysis", "tube_half_width", ex.tube_half_width);
    ex.extra_half_widths = list("analysis", "extra_half_widths");
    ex.n_stations = integer("analysis", "n_stations", ex.n_stations);
    ex.weight = text("analysis", "weight", "none");
    if (ex.weight != "none" && ex.weight != "phi" && ex.weight != "lyapunov")
        fail(get("analysis", "weight"), "analysis", "weight", "expected none, phi or lyapunov");
    if (ex.weight == "phi" && !ex.phi) fail(get("analysis", "weight"), "analysis", "weight", "needs coefficients.phi");
    if (ex.weight == "lyapunov" && !ex.lyapunov)
        fail(get("analysis", "weight"), "analysis", "weight", "needs field.lyapunov");
    ex.tube_radius = number("analysis", "tube_radius", ex.tube_radius);
    ex.dt = number("analysis", "dt", ex.dt);
    ex.tail_tol = number("analysis", "tail_tol", ex.tail_tol);
    ex.transport_epsilons = list("analysis", "transport_epsilons");
    ex.lambda_lo = number("analysis", "lambda_lo", ex.lambda_lo);
    ex.lambda_hi = number("analysis", "lambda_hi", ex.lambda_hi);
    ex.n_lambda = integer("analysis", "n_lambda", ex.n_lambda);
    ex.u0 = number("analysis", "u0", ex.u0);
    ex.picard_tol = number("analysis", "picard_tol", ex.picard_tol);
    ex.picard_dt = number("analysis", "picard_dt", ex.picard_dt);
    ex.picard_tail_tol = number("analysis", "picard_tail_tol", ex.picard_tail_tol);
    if (const ConfigValue* v = get("analysis", "osc_points")) {
        for (const auto& item : split(v->text, ';')) {
            if (item.empty()) continue;
            std::istringstream is(item);
            std::vector<double> xs;
            std::string tok;
            while (is >> tok) {
                try {
                    xs.push_back(parse_number(tok, ex.params));
                } catch (const PreconditionError& e) {
                    fail(v, "analysis", "osc_points", e.what());
                }
            }
            if (static_cast<int>(xs.size()) != dim)
                fail(v, "analysis", "osc_points", "each point needs " + std::to_string(dim) + " coordinates");
            ex.osc_points.push_back({xs[0], dim == 2 ? xs[1] : 0.0});
        }
    }
    ex.osc_t_max = number("analysis", "osc_t_max", ex.osc_t_max);
    ex.osc_window = number("analysis", "osc_window", ex.osc_window);
    ex.lyapunov_tol = number("analysis", "lyapunov_tol", ex.lyapunov_tol);
    ex.lyapunov_delta = number("analysis", "lyapunov_delta", ex.lyapunov_delta);
    if (!(ex.dt > 0.0)) fail(get("analysis", "dt"), "analysis", "dt", "must be positive");
    if (!(ex.tail_tol > 0.0 && ex.tail_tol < 1.0)) fail(get("analysis", "tail_tol"), "analysis", "tail_tol", "must lie in (0, 1)");

    ex.out_dir = text("output", "dir", ex.out_dir);
    if (const ConfigValue* v = get("output", "formats")) {
        ex.formats.clear();
        for (const auto& item : split(v->text, ',')) {
            if (item != "csv" && item != "json") fail(v, "output", "formats", "expected csv and/or json");
            ex.formats.push_back(item);
        }
    }
    ex.raw = std::move(cfg);
    return ex;
}

}  // namespace vvlab
