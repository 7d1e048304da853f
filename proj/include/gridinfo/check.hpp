#pragma once

#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace gridinfo {

// One-sided default tolerance for <=-form inequality checks on Fisher-scale
// quantities; extrapolated sweep limits use a relative tolerance instead.
inline constexpr double kDefaultInequalityTol = 1e-5;
inline constexpr double kLimitRelTol = 0.01;

enum class Verdict { pass, fail, degenerate };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::pass: return "pass";
        case Verdict::fail: return "fail";
        default: return "degenerate";
    }
}

struct CheckResult {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    double gap = 0.0;
    double tolerance = 0.0;
    Verdict verdict = Verdict::fail;
    std::map<std::string, double> diagnostics;
    std::string note;  // set when degenerate: what went wrong
};

// <=-form check: lhs <= rhs with one-sided slack; gap = rhs - lhs.
inline CheckResult inequality_check(std::string name, double lhs, double rhs, double tol) {
    CheckResult r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.gap = rhs - lhs;
    r.tolerance = tol;
    r.verdict = (r.gap >= -tol) ? Verdict::pass : Verdict::fail;
    return r;
}

// Equality-form check: |lhs - rhs| <= tol; gap = |lhs - rhs|.
inline CheckResult equality_check(std::string name, double lhs, double rhs, double tol) {
    CheckResult r;
    r.name = std::move(name);
    r.lhs = lhs;
    r.rhs = rhs;
    r.gap = std::abs(rhs - lhs);
    r.tolerance = tol;
    r.verdict = (r.gap <= tol) ? Verdict::pass : Verdict::fail;
    return r;
}

struct SweepReport {
    std::string name;
    std::string parameter;               // swept parameter, e.g. "t" or "epsilon"
    std::vector<double> values;
    std::vector<CheckResult> results;    // one per parameter value
    std::map<std::string, double> limits;  // extrapolated / summary quantities
    Verdict verdict = Verdict::fail;
    std::string note;  // set when degenerate: what went wrong
};

inline Verdict combine(Verdict a, Verdict b) {
    if (a == Verdict::degenerate || b == Verdict::degenerate) return Verdict::degenerate;
    if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
    return Verdict::pass;
}

}  // namespace gridinfo
