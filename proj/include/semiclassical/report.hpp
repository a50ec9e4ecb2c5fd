#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace semiclassical {

enum class CheckStatus { pass, fail, inconclusive };

std::string_view to_string(CheckStatus s);

/// One named measurement against a tolerance.
struct ReportEntry {
    std::string name;
    double measured = 0.0;
    double tolerance = 0.0;
    CheckStatus status = CheckStatus::fail;
    double mask_fraction = 0.0;
    /// Grid description, time step, refinement constants and anything else
    /// needed to reproduce the number.
    nlohmann::json metadata = nlohmann::json::object();

    bool passed() const noexcept { return status == CheckStatus::pass; }

    /// pass iff measured <= tolerance (NaN fails).
    static ReportEntry compare(std::string name, double measured, double tolerance, double mask_fraction = 0.0);
};

/// Entries whose mask fraction is above this are reported inconclusive.
inline constexpr double kMaxMaskFraction = 0.20;

struct VerificationReport {
    std::vector<ReportEntry> entries;
    std::string scenario_id;
    std::string config_hash;
    /// How Psi is normalised; Helmholtz amplitudes are only box-normalisable.
    std::string normalization = "box";

    void add(ReportEntry e) { entries.push_back(std::move(e)); }
    void append(const VerificationReport& other);

    /// True iff every entry passes.
    bool verdict() const;
    /// fail if any entry fails, else inconclusive if any is, else pass.
    CheckStatus status() const;
    const ReportEntry* find(std::string_view name) const;

    nlohmann::json to_json() const;
    static VerificationReport from_json(const nlohmann::json& j);
    void print_table(std::ostream& os) const;
};

/// Exit status contract shared by every CLI subcommand.
int exit_code(CheckStatus s);

}  // namespace semiclassical
