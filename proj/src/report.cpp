#include "semiclassical/report.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

namespace semiclassical {

std::string_view to_string(CheckStatus s)
{
    switch (s) {
    case CheckStatus::pass: return "pass";
    case CheckStatus::fail: return "fail";
    case CheckStatus::inconclusive: return "inconclusive";
    }
    return "fail";
}

namespace {

CheckStatus status_from_string(std::string_view s)
{
    if (s == "pass") return CheckStatus::pass;
    if (s == "inconclusive") return CheckStatus::inconclusive;
    return CheckStatus::fail;
}

// JSON has no NaN/Inf; encode them as null.
nlohmann::json number(double v)
{
    if (!std::isfinite(v)) return nullptr;
    return v;
}

double number_or_nan(const nlohmann::json& j)
{
    return j.is_number() ? j.get<double>() : std::nan("");
}

}  // namespace

ReportEntry ReportEntry::compare(std::string name, double measured, double tolerance, double mask_fraction)
{
    ReportEntry e;
    e.name = std::move(name);
    e.measured = measured;
    e.tolerance = tolerance;
    e.mask_fraction = mask_fraction;
    if (mask_fraction > kMaxMaskFraction) {
        e.status = CheckStatus::inconclusive;
    } else {
        e.status = measured <= tolerance ? CheckStatus::pass : CheckStatus::fail;
    }
    return e;
}

void VerificationReport::append(const VerificationReport& other)
{
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
}

bool VerificationReport::verdict() const
{
    return std::all_of(entries.begin(), entries.end(), [](const ReportEntry& e) { return e.passed(); });
}

CheckStatus VerificationReport::status() const
{
    bool inconclusive = false;
    for (const auto& e : entries) {
        if (e.status == CheckStatus::fail) return CheckStatus::fail;
        if (e.status == CheckStatus::inconclusive) inconclusive = true;
    }
    return inconclusive ? CheckStatus::inconclusive : CheckStatus::pass;
}

const ReportEntry* VerificationReport::find(std::string_view name) const
{
    for (const auto& e : entries) {
        if (e.name == name) return &e;
    }
    return nullptr;
}

nlohmann::json VerificationReport::to_json() const
{
    nlohmann::json j;
    j["scenario_id"] = scenario_id;
    j["config_hash"] = config_hash;
    j["normalization"] = normalization;
    j["verdict"] = verdict();
    j["status"] = std::string(to_string(status()));
    auto& arr = j["entries"] = nlohmann::json::array();
    for (const auto& e : entries) {
        arr.push_back({{"name", e.name},
                       {"measured", number(e.measured)},
                       {"tolerance", number(e.tolerance)},
                       {"status", std::string(to_string(e.status))},
                       {"mask_fraction", e.mask_fraction},
                       {"metadata", e.metadata}});
    }
    return j;
}

VerificationReport VerificationReport::from_json(const nlohmann::json& j)
{
    VerificationReport r;
    r.scenario_id = j.value("scenario_id", "");
    r.config_hash = j.value("config_hash", "");
    r.normalization = j.value("normalization", "box");
    for (const auto& je : j.at("entries")) {
        ReportEntry e;
        e.name = je.at("name").get<std::string>();
        e.measured = number_or_nan(je.at("measured"));
        e.tolerance = number_or_nan(je.at("tolerance"));
        e.status = status_from_string(je.at("status").get<std::string>());
        e.mask_fraction = je.value("mask_fraction", 0.0);
        e.metadata = je.value("metadata", nlohmann::json::object());
        r.entries.push_back(std::move(e));
    }
    return r;
}

void VerificationReport::print_table(std::ostream& os) const
{
    std::size_t width = 5;
    for (const auto& e : entries) width = std::max(width, e.name.size());
    const auto flags = os.flags();
    os << std::left << std::setw(static_cast<int>(width)) << "check" << "  " << std::setw(13) << "measured" << "  "
       << std::setw(13) << "tolerance" << "  " << std::setw(6) << "mask" << "  status\n";
    for (const auto& e : entries) {
        os << std::left << std::setw(static_cast<int>(width)) << e.name << "  " << std::scientific
           << std::setprecision(5) << std::setw(13) << e.measured << "  " << std::setw(13) << e.tolerance << "  "
           << std::fixed << std::setprecision(3) << std::setw(6) << e.mask_fraction << "  " << to_string(e.status)
           << '\n';
    }
    os << "verdict: " << to_string(status());
    if (!scenario_id.empty()) os << "  scenario " << scenario_id;
    if (!config_hash.empty()) os << "  config " << config_hash;
    os << '\n';
    os.flags(flags);
}

int exit_code(CheckStatus s)
{
    switch (s) {
    case CheckStatus::pass: return 0;
    case CheckStatus::fail: return 1;
    case CheckStatus::inconclusive: return 3;
    }
    return 1;
}

}  // namespace semiclassical
