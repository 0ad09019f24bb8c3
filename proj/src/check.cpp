#include "sticky/check.hpp"

#include <cmath>
#include <limits>

namespace sticky {

namespace {

double signed_slack(double lhs, Relation relation, double rhs) {
    return relation == Relation::LessEqual ? rhs - lhs : lhs - rhs;
}

bool holds(double slack, Relation relation, double tolerance) {
    if (std::isnan(slack)) return false;
    return relation == Relation::Greater ? slack > 0.0 : slack >= -tolerance;
}

}  // namespace

Check make_check(std::string name, std::string clause, double lhs, Relation relation, double rhs, double tolerance) {
    Check c;
    c.name = std::move(name);
    c.clause = std::move(clause);
    c.lhs = lhs;
    c.rhs = rhs;
    c.relation = relation;
    c.tolerance = tolerance;
    c.slack = signed_slack(lhs, relation, rhs);
    c.status = holds(c.slack, relation, tolerance) ? CheckStatus::Pass : CheckStatus::Fail;
    return c;
}

Check skipped_check(std::string name, std::string clause, Relation relation, std::string note) {
    Check c;
    c.name = std::move(name);
    c.clause = std::move(clause);
    c.relation = relation;
    c.lhs = c.rhs = c.slack = std::numeric_limits<double>::quiet_NaN();
    c.status = CheckStatus::Skipped;
    c.note = std::move(note);
    return c;
}

Check informational_check(std::string name, std::string clause, double lhs, Relation relation, double rhs,
                          double tolerance, std::string note) {
    Check c = make_check(std::move(name), std::move(clause), lhs, relation, rhs, tolerance);
    c.status = CheckStatus::Informational;
    c.note = std::move(note);
    return c;
}

std::string to_string(Relation relation) {
    switch (relation) {
        case Relation::LessEqual: return "<=";
        case Relation::GreaterEqual: return ">=";
        case Relation::Greater: return ">";
    }
    return "?";
}

std::string to_string(CheckStatus status) {
    switch (status) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        case CheckStatus::Skipped: return "skipped";
        case CheckStatus::Informational: return "informational";
    }
    return "?";
}

nlohmann::json to_json(const Check& check) {
    auto number = [](double x) -> nlohmann::json {
        if (std::isfinite(x)) return x;
        if (std::isnan(x)) return nullptr;
        return x > 0 ? "inf" : "-inf";
    };
    nlohmann::json out = {{"name", check.name},         {"clause", check.clause},
                          {"lhs", number(check.lhs)},    {"relation", to_string(check.relation)},
                          {"rhs", number(check.rhs)},    {"slack", number(check.slack)},
                          {"tolerance", check.tolerance}, {"status", to_string(check.status)}};
    if (!check.note.empty()) out["note"] = check.note;
    return out;
}

}  // namespace sticky
