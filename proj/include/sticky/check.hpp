#pragma once

#include <nlohmann/json.hpp>

#include <string>

namespace sticky {

enum class Relation { LessEqual, GreaterEqual, Greater };

enum class CheckStatus { Pass, Fail, Skipped, Informational };

/// One named inequality lhs (relation) rhs. `slack` is rhs - lhs for LessEqual and
/// lhs - rhs otherwise, so a nonnegative slack always means the relation holds.
struct Check {
    std::string name;
    std::string clause;
    double lhs = 0.0;
    double rhs = 0.0;
    Relation relation = Relation::LessEqual;
    double tolerance = 0.0;
    double slack = 0.0;
    CheckStatus status = CheckStatus::Skipped;
    std::string note;

    bool passed() const { return status == CheckStatus::Pass; }
};

/// Evaluates the relation. Passes when slack >= -tolerance (Greater needs slack > 0).
Check make_check(std::string name, std::string clause, double lhs, Relation relation, double rhs, double tolerance);

/// A clause that could not be evaluated; kept in reports so it is never silently absent.
Check skipped_check(std::string name, std::string clause, Relation relation, std::string note);

/// A relation evaluated on values that are not certified; it never counts as a failure.
Check informational_check(std::string name, std::string clause, double lhs, Relation relation, double rhs,
                          double tolerance, std::string note);

std::string to_string(Relation relation);
std::string to_string(CheckStatus status);

nlohmann::json to_json(const Check& check);

}  // namespace sticky
