#include "semiclassical/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>

#include "semiclassical/error.hpp"

namespace semiclassical {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what)
{
    throw ConfigError(path + ": " + what);
}

void allow_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys)
{
    if (!j.is_object()) fail(path.empty() ? "config" : path, "must be an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
        if (!allowed.contains(k)) fail(path.empty() ? k : path + "." + k, "unknown key");
    }
}

double number(const json& j, const std::string& path)
{
    if (!j.is_number()) fail(path, "must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(path, "must be finite");
    return v;
}

double positive(const json& j, const std::string& path)
{
    const double v = number(j, path);
    if (!(v > 0.0)) fail(path, "must be positive");
    return v;
}

std::size_t count(const json& j, const std::string& path, std::size_t min = 0)
{
    if (!j.is_number_integer() || j.get<long long>() < static_cast<long long>(min)) {
        fail(path, "must be an integer >= " + std::to_string(min));
    }
    return j.get<std::size_t>();
}

std::vector<double> numbers(const json& j, const std::string& path)
{
    if (!j.is_array()) fail(path, "must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

Point3 point(const json& j, const std::string& path, int dim)
{
    const auto v = numbers(j, path);
    if (static_cast<int>(v.size()) != dim) fail(path, "needs " + std::to_string(dim) + " components");
    Point3 p{0, 0, 0};
    for (int a = 0; a < dim; ++a) p[a] = v[a];
    return p;
}

void validate_mode(const json& j, const std::string& path)
{
    allow_keys(j, path, {"kind", "wavevectors", "amplitudes", "phases", "center", "slope", "amplitude_rates"});
    if (!j.contains("kind") || !j["kind"].is_string()) fail(path + ".kind", "required string");
    try {
        mode_kind_from_string(j["kind"].get<std::string>());
    } catch (const Error& e) {
        fail(path + ".kind", e.what());
    }
    if (j.contains("wavevectors")) {
        if (!j["wavevectors"].is_array()) fail(path + ".wavevectors", "must be an array of vectors");
        for (std::size_t i = 0; i < j["wavevectors"].size(); ++i) {
            numbers(j["wavevectors"][i], path + ".wavevectors[" + std::to_string(i) + "]");
        }
    }
    for (const char* key : {"amplitudes", "phases", "center", "slope", "amplitude_rates"}) {
        if (j.contains(key)) numbers(j[key], path + "." + key);
    }
    if (!j.contains("amplitudes")) fail(path + ".amplitudes", "required");
    if (j.contains("amplitude_rates") && j["amplitude_rates"].size() != j["amplitudes"].size()) {
        fail(path + ".amplitude_rates", "needs one rate per amplitude");
    }
}

std::string hex64(std::uint64_t h)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace

std::string fnv1a_hex(std::string_view bytes)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return hex64(h);
}

HelmholtzMode mode_from_json(const json& j, double lambda, double t)
{
    HelmholtzMode m;
    m.kind = mode_kind_from_string(j.at("kind").get<std::string>());
    m.lambda = lambda;
    if (j.contains("wavevectors")) m.wavevectors = j["wavevectors"].get<std::vector<std::vector<double>>>();
    m.amplitudes = j.at("amplitudes").get<std::vector<double>>();
    if (j.contains("phases")) m.phases = j["phases"].get<std::vector<double>>();
    if (j.contains("center")) m.center = j["center"].get<std::vector<double>>();
    if (j.contains("slope")) m.slope = j["slope"].get<std::vector<double>>();
    if (j.contains("amplitude_rates")) {
        const auto rates = j["amplitude_rates"].get<std::vector<double>>();
        for (std::size_t i = 0; i < m.amplitudes.size(); ++i) m.amplitudes[i] += rates[i] * t;
    }
    return m;
}

json mode_to_json(const HelmholtzMode& m)
{
    json j;
    j["kind"] = std::string(to_string(m.kind));
    if (!m.wavevectors.empty()) j["wavevectors"] = m.wavevectors;
    j["amplitudes"] = m.amplitudes;
    if (!m.phases.empty()) j["phases"] = m.phases;
    if (!m.center.empty()) j["center"] = m.center;
    if (!m.slope.empty()) j["slope"] = m.slope;
    return j;
}

ScenarioConfig::ScenarioConfig(json document) : doc_(std::move(document))
{
    validate();
}

ScenarioConfig ScenarioConfig::load(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    try {
        return ScenarioConfig(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void ScenarioConfig::apply_override(std::string_view assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string_view::npos || eq == 0) {
        throw ConfigError("override '" + std::string(assignment) + "' is not KEY=VALUE");
    }
    const std::string key(assignment.substr(0, eq));
    const std::string text(assignment.substr(eq + 1));
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;

    json updated = doc_;
    json* node = &updated;
    std::size_t start = 0;
    while (true) {
        const auto dot = key.find('.', start);
        const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty()) throw ConfigError("override key '" + key + "' has an empty component");
        if (!node->is_object()) throw ConfigError("override key '" + key + "' descends into a non-object");
        if (dot == std::string::npos) {
            (*node)[part] = value;
            break;
        }
        node = &(*node)[part];
        if (node->is_null()) *node = json::object();
        start = dot + 1;
    }
    ScenarioConfig checked(std::move(updated));
    doc_ = std::move(checked.doc_);
}

std::string ScenarioConfig::hash() const
{
    return fnv1a_hex(doc_.dump());
}

std::string ScenarioConfig::id() const
{
    return doc_.value("id", std::string("scenario"));
}

void ScenarioConfig::validate() const
{
    const json& d = doc_;
    allow_keys(d, "", {"id", "grid", "constants", "case", "lambda", "lambda_schedule", "E", "modes", "eps_node",
                       "tolerances", "dynamics", "gauge", "compare", "seed"});
    if (d.contains("id") && !d["id"].is_string()) fail("id", "must be a string");

    if (!d.contains("grid")) fail("grid", "required");
    const json& g = d["grid"];
    allow_keys(g, "grid", {"dim", "extents", "origin", "spacing", "upper", "boundary"});
    if (!g.contains("extents") || !g["extents"].is_array() || g["extents"].empty()) {
        fail("grid.extents", "required non-empty array");
    }
    const auto dim = static_cast<int>(g["extents"].size());
    if (dim > 3) fail("grid.extents", "at most 3 axes are supported");
    for (std::size_t a = 0; a < g["extents"].size(); ++a) count(g["extents"][a], "grid.extents", 1);
    if (g.contains("dim") && count(g["dim"], "grid.dim", 1) != static_cast<std::size_t>(dim)) {
        fail("grid.dim", "does not match the number of extents");
    }
    if (!g.contains("origin")) fail("grid.origin", "required");
    point(g["origin"], "grid.origin", dim);
    if (g.contains("spacing") == g.contains("upper")) fail("grid", "give exactly one of spacing and upper");
    if (g.contains("spacing")) {
        point(g["spacing"], "grid.spacing", dim);
        for (std::size_t a = 0; a < g["spacing"].size(); ++a) positive(g["spacing"][a], "grid.spacing");
    } else {
        point(g["upper"], "grid.upper", dim);
    }
    if (!g.contains("boundary") || !g["boundary"].is_string()) fail("grid.boundary", "required string");
    try {
        boundary_from_string(g["boundary"].get<std::string>());
    } catch (const Error& e) {
        fail("grid.boundary", e.what());
    }

    if (d.contains("constants")) {
        allow_keys(d["constants"], "constants", {"hbar", "mass"});
        if (d["constants"].contains("hbar")) positive(d["constants"]["hbar"], "constants.hbar");
        if (d["constants"].contains("mass")) positive(d["constants"]["mass"], "constants.mass");
    }

    if (!d.contains("case") || !d["case"].is_string()) fail("case", "required string");
    ScenarioCase kind;
    try {
        kind = scenario_case_from_string(d["case"].get<std::string>());
    } catch (const Error& e) {
        fail("case", e.what());
    }
    if (kind == ScenarioCase::stationary) {
        if (!d.contains("lambda")) fail("lambda", "required for a stationary scenario");
        if (number(d["lambda"], "lambda") < 0.0) fail("lambda", "must be non-negative");
        if (d.contains("lambda_schedule")) fail("lambda_schedule", "only valid for a time_dependent scenario");
        if (!d.contains("E")) fail("E", "required for a stationary scenario");
        number(d["E"], "E");
    } else {
        if (d.contains("E")) fail("E", "only valid for a stationary scenario");
        if (d.contains("lambda")) fail("lambda", "time_dependent scenarios take lambda_schedule");
        if (!d.contains("lambda_schedule")) fail("lambda_schedule", "required for a time_dependent scenario");
        const json& ls = d["lambda_schedule"];
        allow_keys(ls, "lambda_schedule", {"times", "values", "K"});
        if (!ls.contains("times")) fail("lambda_schedule.times", "required");
        const auto times = numbers(ls["times"], "lambda_schedule.times");
        if (ls.contains("values") == ls.contains("K")) fail("lambda_schedule", "give exactly one of values and K");
        const auto vals = numbers(ls.contains("values") ? ls["values"] : ls["K"], "lambda_schedule.values");
        if (vals.size() != times.size()) fail("lambda_schedule", "needs one value per time");
    }

    if (!d.contains("modes")) fail("modes", "required");
    const json& m = d["modes"];
    const char* numerator = kind == ScenarioCase::stationary ? "S_tilde" : "phi_tilde";
    if (kind == ScenarioCase::stationary) {
        allow_keys(m, "modes", {"R", "S_tilde"});
    } else {
        allow_keys(m, "modes", {"R", "phi_tilde"});
    }
    if (!m.contains("R")) fail("modes.R", "required");
    validate_mode(m["R"], "modes.R");
    if (!m.contains(numerator)) fail(std::string("modes.") + numerator, "required");
    if (m[numerator].is_string()) {
        if (kind == ScenarioCase::stationary || m[numerator].get<std::string>() != "solve") {
            fail(std::string("modes.") + numerator, "\"solve\" is only valid for phi_tilde");
        }
    } else {
        validate_mode(m[numerator], std::string("modes.") + numerator);
    }

    if (d.contains("eps_node") && number(d["eps_node"], "eps_node") < 0.0) fail("eps_node", "must be >= 0");
    if (d.contains("tolerances")) {
        allow_keys(d["tolerances"], "tolerances", {"helmholtz", "inhomogeneous"});
        for (const auto& [k, v] : d["tolerances"].items()) positive(v, "tolerances." + k);
    }

    if (d.contains("dynamics")) {
        const json& dy = d["dynamics"];
        allow_keys(dy, "dynamics", {"dt", "T", "snapshot_stride", "particles", "random_particles"});
        if (dy.contains("dt")) positive(dy["dt"], "dynamics.dt");
        if (dy.contains("T")) positive(dy["T"], "dynamics.T");
        if (dy.contains("snapshot_stride")) count(dy["snapshot_stride"], "dynamics.snapshot_stride", 1);
        if (dy.contains("particles")) {
            if (!dy["particles"].is_array()) fail("dynamics.particles", "must be an array");
            for (std::size_t i = 0; i < dy["particles"].size(); ++i) {
                const std::string p = "dynamics.particles[" + std::to_string(i) + "]";
                const json& pj = dy["particles"][i];
                allow_keys(pj, p, {"x0", "v0"});
                if (!pj.contains("x0")) fail(p + ".x0", "required");
                point(pj["x0"], p + ".x0", dim);
                if (pj.contains("v0")) point(pj["v0"], p + ".v0", dim);
            }
        }
        if (dy.contains("random_particles")) {
            const json& r = dy["random_particles"];
            allow_keys(r, "dynamics.random_particles", {"count", "lower", "upper"});
            if (!r.contains("count") || !r.contains("lower") || !r.contains("upper")) {
                fail("dynamics.random_particles", "needs count, lower and upper");
            }
            count(r["count"], "dynamics.random_particles.count");
            const Point3 lo = point(r["lower"], "dynamics.random_particles.lower", dim);
            const Point3 hi = point(r["upper"], "dynamics.random_particles.upper", dim);
            for (int a = 0; a < dim; ++a) {
                if (!(lo[a] <= hi[a])) fail("dynamics.random_particles", "lower must not exceed upper");
            }
        }
    }

    if (d.contains("gauge")) {
        const json& ga = d["gauge"];
        allow_keys(ga, "gauge", {"f", "T", "samples"});
        if (!ga.contains("f")) fail("gauge.f", "required");
        const json& f = ga["f"];
        if (f.is_string()) {
            if (f != "K" && f != "-K") fail("gauge.f", "string form must be \"K\" or \"-K\"");
        } else if (f.is_array()) {
            numbers(f, "gauge.f");
            if (f.size() < 2) fail("gauge.f", "needs at least 2 samples");
            if (ga.contains("samples") && count(ga["samples"], "gauge.samples", 2) != f.size()) {
                fail("gauge.samples", "does not match the number of f samples");
            }
        } else {
            number(f, "gauge.f");
        }
        if (ga.contains("T")) positive(ga["T"], "gauge.T");
        if (ga.contains("samples")) count(ga["samples"], "gauge.samples", 2);
    }

    if (d.contains("compare")) {
        allow_keys(d["compare"], "compare", {"tolerance", "potential_tilt"});
        if (d["compare"].contains("tolerance")) positive(d["compare"]["tolerance"], "compare.tolerance");
        if (d["compare"].contains("potential_tilt")) number(d["compare"]["potential_tilt"], "compare.potential_tilt");
    }
    if (d.contains("seed")) {
        const json& seed = d["seed"];
        const bool ok = seed.is_number_unsigned() || (seed.is_number_integer() && seed.get<long long>() >= 0);
        if (!ok) fail("seed", "must be a non-negative integer");
    }
}

Grid ScenarioConfig::grid() const
{
    const json& g = doc_["grid"];
    const auto extents = g["extents"].get<std::vector<std::size_t>>();
    const auto origin = g["origin"].get<std::vector<double>>();
    const Boundary b = boundary_from_string(g["boundary"].get<std::string>());
    std::vector<double> spacing;
    if (g.contains("spacing")) {
        spacing = g["spacing"].get<std::vector<double>>();
    } else {
        const auto upper = g["upper"].get<std::vector<double>>();
        for (std::size_t a = 0; a < extents.size(); ++a) {
            const double cells = b == Boundary::periodic ? static_cast<double>(extents[a])
                                                         : static_cast<double>(extents[a]) - 1.0;
            spacing.push_back((upper[a] - origin[a]) / cells);
        }
    }
    try {
        return Grid(extents, origin, spacing, b);
    } catch (const GridError& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }
}

PhysicalConstants ScenarioConfig::constants() const
{
    if (!doc_.contains("constants")) return {};
    const json& c = doc_["constants"];
    return PhysicalConstants(c.value("hbar", 1.0), c.value("mass", 1.0));
}

ScenarioCase ScenarioConfig::scenario_case() const
{
    return scenario_case_from_string(doc_["case"].get<std::string>());
}

LambdaSchedule ScenarioConfig::lambda_schedule() const
{
    if (scenario_case() == ScenarioCase::stationary) {
        return LambdaSchedule::constant(doc_["lambda"].get<double>(), {0.0});
    }
    const json& ls = doc_["lambda_schedule"];
    auto times = ls["times"].get<std::vector<double>>();
    try {
        if (ls.contains("K")) {
            const auto K = ls["K"].get<std::vector<double>>();
            return LambdaSchedule::from_quantum_potential(std::move(times), K, constants());
        }
        return LambdaSchedule(std::move(times), ls["values"].get<std::vector<double>>());
    } catch (const Error& e) {
        throw ConfigError(std::string("lambda_schedule: ") + e.what());
    }
}

std::uint64_t ScenarioConfig::seed() const
{
    return doc_.value("seed", std::uint64_t{0});
}

SemiclassicalScenario ScenarioConfig::build() const
{
    const Grid g = grid();
    const PhysicalConstants c = constants();
    ScenarioOptions options;
    options.eps_node = doc_.value("eps_node", 0.0);
    if (doc_.contains("tolerances")) {
        options.tolerances.helmholtz = doc_["tolerances"].value("helmholtz", options.tolerances.helmholtz);
        options.tolerances.inhomogeneous = doc_["tolerances"].value("inhomogeneous", options.tolerances.inhomogeneous);
    }
    const json& modes = doc_["modes"];
    auto make = [&](const json& mj, double lambda, double t, bool rescale) {
        HelmholtzMode m = mode_from_json(mj, lambda, t);
        if (rescale && (m.kind == ModeKind::plane_wave_superposition || m.kind == ModeKind::separable_trig)) {
            for (auto& k : m.wavevectors) {
                double norm = 0.0;
                for (double v : k) norm += v * v;
                norm = std::sqrt(norm);
                if (norm > 0.0) {
                    for (double& v : k) v *= lambda / norm;
                }
            }
        }
        try {
            m.validate();
            return evaluate_mode(m, g);
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            throw ConfigError(std::string("modes: ") + e.what());
        }
    };

    SemiclassicalScenario s = [&] {
        if (scenario_case() == ScenarioCase::stationary) {
            const double lambda = doc_["lambda"].get<double>();
            return construct_stationary(make(modes["R"], lambda, 0.0, false), make(modes["S_tilde"], lambda, 0.0, false),
                                        doc_["E"].get<double>(), lambda, c, options);
        }
        const LambdaSchedule sched = lambda_schedule();
        std::vector<ScalarField> R;
        for (std::size_t k = 0; k < sched.size(); ++k) {
            R.push_back(make(modes["R"], sched.values()[k], sched.times()[k], true));
        }
        std::vector<ScalarField> phi_tilde;
        if (modes["phi_tilde"].is_string()) {
            phi_tilde = solve_phase_numerators(R, sched, c);
        } else {
            for (std::size_t k = 0; k < sched.size(); ++k) {
                phi_tilde.push_back(make(modes["phi_tilde"], sched.values()[k], sched.times()[k], true));
            }
        }
        return construct_time_dependent(R, phi_tilde, sched, c, options);
    }();
    s.id = id();
    s.config_hash = hash();
    return s;
}

ScenarioConfig::Dynamics ScenarioConfig::dynamics() const
{
    Dynamics out;
    const int dim = static_cast<int>(doc_["grid"]["extents"].size());
    if (!doc_.contains("dynamics")) return out;
    const json& dy = doc_["dynamics"];
    out.dt = dy.value("dt", out.dt);
    out.T = dy.value("T", out.T);
    out.snapshot_stride = dy.value("snapshot_stride", out.snapshot_stride);
    if (dy.contains("particles")) {
        for (const auto& p : dy["particles"]) {
            out.x0.push_back(point(p["x0"], "x0", dim));
            out.v0.push_back(p.contains("v0") ? std::optional<Point3>(point(p["v0"], "v0", dim)) : std::nullopt);
        }
    }
    if (dy.contains("random_particles")) {
        const json& r = dy["random_particles"];
        const Point3 lo = point(r["lower"], "lower", dim);
        const Point3 hi = point(r["upper"], "upper", dim);
        std::mt19937_64 rng(seed());
        const auto n = r["count"].get<std::size_t>();
        for (std::size_t i = 0; i < n; ++i) {
            Point3 x{0, 0, 0};
            for (int a = 0; a < dim; ++a) x[a] = lo[a] + (hi[a] - lo[a]) * std::generate_canonical<double, 53>(rng);
            out.x0.push_back(x);
            out.v0.emplace_back(std::nullopt);
        }
    }
    return out;
}

ScenarioConfig::Compare ScenarioConfig::compare() const
{
    Compare out;
    if (!doc_.contains("compare")) return out;
    out.tolerance = doc_["compare"].value("tolerance", out.tolerance);
    out.potential_tilt = doc_["compare"].value("potential_tilt", out.potential_tilt);
    return out;
}

std::optional<ScenarioConfig::Gauge> ScenarioConfig::gauge() const
{
    if (!doc_.contains("gauge")) return std::nullopt;
    const json& ga = doc_["gauge"];
    Gauge out;
    out.T = ga.value("T", out.T);
    out.samples = ga.value("samples", out.samples);
    const json& f = ga["f"];
    if (f.is_string()) {
        out.kind = f.get<std::string>();
    } else if (f.is_array()) {
        out.f = f.get<std::vector<double>>();
        out.samples = out.f.size();
    } else {
        out.f.assign(out.samples, f.get<double>());
    }
    return out;
}

}  // namespace semiclassical
